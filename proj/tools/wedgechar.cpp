// wedgechar: exterior-power character decompositions from the command line.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wedge/charpoly.hpp"
#include "wedge/pipeline.hpp"

using namespace wedge;

namespace {

struct RunFlags {
  std::string config, group, out, sampling;
  int d_max = -1, k_max = -2, exterior_bound = -1, workers = -1;
  long M = -1, stop_after = -2;
  bool resume = false;
};

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("-c,--config", f.config, "JSON config file");
  sub->add_option("-g,--group", f.group, "root system, e.g. A2, G2, D4, E8");
  sub->add_option("--d-max", f.d_max, "class threshold d_max");
  sub->add_option("-M,--precision", f.M, "working mantissa bits");
  sub->add_option("--k-max", f.k_max, "highest degree solved directly (-1: (n - r)/2)");
  sub->add_option("--exterior-bound", f.exterior_bound, "solve k <= K on the reduced set J_K only");
  sub->add_option("-w,--workers", f.workers, "worker threads");
  sub->add_option("-o,--out", f.out, "output directory");
  sub->add_option("--sampling", f.sampling, "override set S, e.g. '1,0;-1,0;1/2,1/2'");
  sub->add_flag("--resume", f.resume, "continue from the manifest in --out");
  sub->add_option("--stop-after", f.stop_after, "stop once this many classes are solved");
}

std::vector<GaussianRational> parse_sampling(const std::string& s) {
  std::vector<GaussianRational> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ';')) {
    auto comma = item.find(',');
    GaussianRational g{mpq_class(item.substr(0, comma)),
                       comma == std::string::npos ? mpq_class(0) : mpq_class(item.substr(comma + 1))};
    g.re.canonicalize();
    g.im.canonicalize();
    out.push_back(g);
  }
  return out;
}

RunConfig make_config(const RunFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.group.empty()) c.group = f.group;
  if (f.d_max >= 0) c.d_max = f.d_max;
  if (f.M > 0) c.M = f.M;
  if (f.k_max >= -1) c.k_max = f.k_max;
  if (f.exterior_bound >= 0) c.exterior_bound = f.exterior_bound;
  if (f.workers > 0) c.workers = f.workers;
  if (!f.out.empty()) c.output_dir = f.out;
  if (!f.sampling.empty()) c.sampling = parse_sampling(f.sampling);
  if (f.resume) c.resume = true;
  if (f.stop_after >= -1) c.stop_after_classes = f.stop_after;
  return c;
}

std::vector<mpq_class> parse_list(const std::string& s) {
  std::vector<mpq_class> v;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    mpq_class q(item);
    q.canonicalize();
    v.push_back(q);
  }
  return v;
}

PublishedData load_dir(const std::string& dir, const RootSystem& rs) {
  PublishedPaths p;
  p.dict = dir + "/DictFile.bin";
  p.sol = dir + "/SolFile.bin";
  return read_published(p, rs);
}

void print_poly(const QPoly& p) {
  for (size_t i = p.size(); i-- > 0;) std::cout << p[i].get_str() << "\n";
}

int cmd_run(const RunFlags& f) {
  auto cfg = make_config(f);
  auto res = run(cfg);
  if (!res.finished) {
    size_t solved = 0;
    for (const auto& c : res.classes) solved += c.status == ClassStatus::Solved;
    std::cerr << "stopped after " << solved << " of " << res.classes.size() << " classes\n";
    return 0;
  }
  if (cfg.output_dir.empty()) {
    std::cout << table_tsv(res.table, res.set);
  } else {
    for (const auto& [name, sha] : res.files) std::cout << sha << "  " << name << "\n";
  }
  std::cerr << timing_tsv(res.timing);
  return 0;
}

int cmd_dry_run(const RunFlags& f) {
  auto cfg = make_config(f);
  auto res = dry_run(cfg);
  size_t biggest = 0;
  for (const auto& c : res.partition.classes) biggest = std::max(biggest, c.members.size());
  std::cout << "group\t" << cfg.group << "\nadmissible\t" << res.set.size() << "\nmax_degree\t"
            << res.set.max_degree() << "\nclasses\t" << res.partition.classes.size() << "\nlargest_class\t" << biggest
            << "\nlayers\t" << res.partition.num_layers << "\n";
  return 0;
}

int cmd_charpoly(const std::string& group, const std::string& dir, const std::string& chi_s, int d0,
                 const std::string& basis, int top) {
  auto rs = RootSystem::parse(group);
  const int n = static_cast<int>(adjoint_weight_system(rs).dim());
  auto data = load_dir(dir, rs);
  auto chi = parse_list(chi_s);
  const int d = d0 < 0 ? rs.rank() : d0;
  if (top > 0) {
    auto e = exterior_values(chi, data.table, data.set);
    auto c = reduced_top_coefficients(e, d, std::min<size_t>(top, e.size()));
    if (basis == "trace") c = trace_basis_top(c, static_cast<size_t>(n - d) / 2);
    for (const auto& x : c) std::cout << x.get_str() << "\n";
    return 0;
  }
  auto res = char_poly(CharPolySpec{chi, d0}, data.table, data.set, n);
  if (basis == "trace") {
    auto q = trace_basis(res.reduced);
    for (size_t k = q.size(); k-- > 0;) std::cout << q[k].get_str() << "\n";
  } else if (basis == "symmetric") {
    auto q = symmetric_basis(res.reduced);
    for (size_t k = q.size(); k-- > 0;) std::cout << q[k].get_str() << "\n";
  } else if (basis == "exterior") {
    for (const auto& x : res.exterior) std::cout << x.get_str() << "\n";
  } else {
    print_poly(res.reduced);
  }
  return 0;
}

int cmd_factor(const std::string& path, int max_n) {
  std::ifstream file;
  std::istream* in = &std::cin;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw FormatError("cannot open " + path);
    in = &file;
  }
  std::vector<mpz_class> hi_first;
  std::string line;
  while (std::getline(*in, line))
    if (!line.empty() && line[0] != '#') hi_first.emplace_back(line);
  ZPoly p(hi_first.rbegin(), hi_first.rend());
  std::cout << cyclotomic_factor(p, max_n).str() << "\n";
  return 0;
}

int cmd_read_published(const std::string& group, PublishedPaths p) {
  auto rs = RootSystem::parse(group);
  auto d = read_published(p, rs);
  for (const auto& l : d.log) std::cout << l << "\n";
  std::cout << (d.valid ? "valid" : "INVALID") << "\n";
  return d.valid ? 0 : 1;
}

int cmd_verify(const std::string& group, const std::string& dir, const std::string& fixture) {
  auto rs = RootSystem::parse(group);
  auto d = load_dir(dir, rs);
  auto rep = verify_table(d.table, d.set, read_fixture(fixture, rs.rank()));
  for (const auto& l : rep.lines) std::cout << l << "\n";
  std::cout << rep.rows_checked << " degrees checked, " << rep.mismatches << " mismatches\n";
  return rep.ok() ? 0 : 1;
}

int cmd_bench(const RunFlags& f, int repeats) {
  auto cfg = make_config(f);
  cfg.output_dir.clear();
  const int workers = f.workers > 0 ? f.workers : 4;
  std::cout << "workers\tseconds\n";
  for (int w : {1, workers}) {
    cfg.workers = w;
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
      auto t0 = std::chrono::steady_clock::now();
      run(cfg);
      best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::cout << w << "\t" << best << "\n";
    if (w == workers) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exterior-power characters of simple Lie groups in fundamental characters"};
  app.require_subcommand(1);

  RunFlags rf, df, bf;
  auto* run_cmd = app.add_subcommand("run", "sample, solve and write the decomposition table");
  add_run_flags(run_cmd, rf);
  auto* dry_cmd = app.add_subcommand("dry-run", "enumerate and schedule only");
  add_run_flags(dry_cmd, df);

  std::string group = "E8", dir, chi, basis = "poly", fixture, factor_in;
  int d0 = -1, top = 0, max_n = 256, repeats = 1;
  auto* cp = app.add_subcommand("charpoly", "characteristic polynomial from a table, one coefficient per line");
  cp->add_option("-g,--group", group);
  cp->add_option("-d,--dir", dir, "directory with DictFile.bin and SolFile.bin")->required();
  cp->add_option("--chi", chi, "comma separated chi_1..chi_r")->required();
  cp->add_option("--d0", d0, "multiplicity of the eigenvalue 1 to remove (default: rank)");
  cp->add_option("--basis", basis, "poly | exterior | trace | symmetric");
  cp->add_option("--top", top, "only the leading coefficients, from the available rows");

  auto* fc = app.add_subcommand("factor", "cyclotomic factorization of a coefficient list (highest first)");
  fc->add_option("file", factor_in, "input, '-' for stdin");
  fc->add_option("--max-n", max_n);

  PublishedPaths pp;
  bool big_endian = false, imag_first = false;
  auto* rp = app.add_subcommand("read-published", "validate binary artifacts");
  rp->add_option("-g,--group", group);
  rp->add_option("--dict", pp.dict)->required();
  rp->add_option("--sol", pp.sol);
  rp->add_option("--usamples", pp.usamples);
  rp->add_option("--allroots", pp.allroots);
  rp->add_option("--delta", pp.delta);
  rp->add_flag("--big-endian", big_endian, "AllRoots blocks are big-endian");
  rp->add_flag("--imag-first", imag_first, "AllRoots stores Im before Re");

  auto* vf = app.add_subcommand("verify", "compare a table with reference rows");
  vf->add_option("-g,--group", group);
  vf->add_option("-d,--dir", dir)->required();
  vf->add_option("-f,--fixture", fixture)->required();

  auto* bc = app.add_subcommand("bench", "wall time of a run on 1 and N workers");
  add_run_flags(bc, bf);
  bc->add_option("--repeats", repeats);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return cmd_run(rf);
    if (*dry_cmd) return cmd_dry_run(df);
    if (*cp) return cmd_charpoly(group, dir, chi, d0, basis, top);
    if (*fc) return cmd_factor(factor_in, max_n);
    if (*rp) {
      pp.layout.little_endian = !big_endian;
      pp.layout.real_first = !imag_first;
      return cmd_read_published(group, pp);
    }
    if (*vf) return cmd_verify(group, dir, fixture);
    if (*bc) return cmd_bench(bf, repeats);
  } catch (const std::exception& e) {
    std::cerr << "wedgechar: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
