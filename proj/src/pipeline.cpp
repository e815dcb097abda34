#include "wedge/pipeline.hpp"

#include <omp.h>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "wedge/faadibruno.hpp"

namespace wedge {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

mpq_class parse_q(const std::string& s) {
  mpq_class q(s);
  q.canonicalize();
  return q;
}

// power-of-two exponent of a denominator, -1 otherwise
int pow2_exponent(const mpz_class& d) {
  if (d <= 0) return -1;
  size_t e = mpz_scan1(d.get_mpz_t(), 0);
  mpz_class t = d >> e;
  return t == 1 ? static_cast<int>(e) : -1;
}

std::string real_hex(const Real& x) {
  if (x.is_zero()) return "0";
  mpz_class z;
  long e = mpfr_get_z_2exp(z.get_mpz_t(), x.get());
  return z.get_str(16) + "p" + std::to_string(e);
}

void real_from_hex(Real& x, const std::string& s) {
  if (s == "0") {
    mpfr_set_zero(x.get(), 1);
    return;
  }
  auto p = s.find('p');
  if (p == std::string::npos) throw FormatError("bad real in checkpoint: " + s);
  mpz_class z(s.substr(0, p), 16);
  mpfr_set_z_2exp(x.get(), z.get_mpz_t(), std::stol(s.substr(p + 1)), MPFR_RNDN);
}

json sample_json(const SamplePoint& s) {
  json j;
  j["u"] = json::array();
  for (const auto& g : s.u) j["u"].push_back({g.re.get_str(), g.im.get_str()});
  j["prec"] = s.Q.empty() ? 0 : static_cast<long>(s.Q[0].prec());
  j["Q"] = json::array();
  for (const auto& q : s.Q) j["Q"].push_back({real_hex(q.re), real_hex(q.im)});
  j["eps_Q"] = s.eps_Q;
  j["det_rel"] = s.det_rel;
  j["steps"] = s.steps;
  j["refinements"] = s.refinements;
  if (s.torsion_order > 0) {
    j["torsion_order"] = s.torsion_order;
    j["torsion"] = s.torsion;
  }
  return j;
}

SamplePoint sample_from_json(const json& j) {
  SamplePoint s;
  for (const auto& g : j.at("u")) s.u.push_back({parse_q(g[0]), parse_q(g[1])});
  const mpfr_prec_t prec = j.at("prec").get<long>();
  for (const auto& q : j.at("Q")) {
    Complex c(prec);
    real_from_hex(c.re, q[0]);
    real_from_hex(c.im, q[1]);
    s.Q.push_back(std::move(c));
  }
  s.eps_Q = j.at("eps_Q");
  s.det_rel = j.at("det_rel");
  s.steps = j.at("steps");
  s.refinements = j.at("refinements");
  s.torsion_order = j.value("torsion_order", 0L);
  if (s.torsion_order > 0) s.torsion = j.at("torsion").get<std::vector<long>>();
  s.status = SampleStatus::Converged;
  return s;
}

json record_json(const ClassRecord& r, const ClassInfo& cls, int rank) {
  json j;
  j["index"] = r.index;
  j["tag"] = cls.tag.str(rank);
  j["status"] = status_name(r.status);
  j["members"] = cls.members;
  j["samples"] = json::array();
  for (const auto& s : r.samples) j["samples"].push_back(sample_json(s));
  j["delta"] = r.delta;
  j["ks"] = r.result.ks;
  j["N"] = json::array();
  for (const auto& col : r.result.N) {
    json c = json::array();
    for (const auto& v : col) c.push_back(v.get_str());
    j["N"].push_back(c);
  }
  j["prime"] = r.result.prime;
  j["lifts"] = r.result.lifts;
  j["candidates"] = r.candidates;
  j["nr_failures"] = r.nr_failures;
  j["sample_prime"] = r.sample_prime;
  return j;
}

ClassRecord record_from_json(const json& j, const ClassInfo& cls) {
  ClassRecord r;
  r.index = j.at("index");
  if (j.at("members").get<std::vector<uint32_t>>() != cls.members)
    throw FormatError("checkpoint members differ from the partition");
  for (const auto& s : j.at("samples")) r.samples.push_back(sample_from_json(s));
  r.delta = j.at("delta").get<std::vector<double>>();
  r.result.class_index = r.index;
  r.result.unknowns = cls.members;
  r.result.ks = j.at("ks").get<std::vector<int>>();
  for (const auto& col : j.at("N")) {
    std::vector<mpz_class> c;
    for (const auto& v : col) c.emplace_back(v.get<std::string>());
    r.result.N.push_back(std::move(c));
  }
  r.result.prime = j.at("prime");
  r.result.lifts = j.at("lifts");
  r.candidates = j.at("candidates");
  r.nr_failures = j.at("nr_failures");
  r.sample_prime = j.at("sample_prime");
  r.status = ClassStatus::Solved;
  return r;
}

std::string checkpoint_path(const std::string& dir, size_t index) {
  std::ostringstream os;
  os << dir << "/checkpoints/class_" << std::setw(6) << std::setfill('0') << index << ".json";
  return os.str();
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out << s;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

size_t class_cost(const ClassInfo& c) {
  const size_t m = c.members.size();
  return m * (1 + static_cast<size_t>(exponent_degree(c.deriv))) + m * m;
}

json schedule_json(const Partition& part, const AdmissibleSet& set) {
  json j = json::array();
  for (size_t i = 0; i < part.classes.size(); ++i) {
    const auto& c = part.classes[i];
    j.push_back({{"index", i},
                 {"tag", c.tag.str(set.rank())},
                 {"layer", c.layer},
                 {"size", c.members.size()},
                 {"free", c.free_coords},
                 {"deriv_order", exponent_degree(c.deriv)}});
  }
  return j;
}

struct Setup {
  RootSystem rs;
  AdmissibleSet set;
  Partition part;
  int n = 0, K = 0;
  bool extend = false;
  long scale_exp = 0;
  std::vector<GaussianRational> S;
};

Setup prepare(const RunConfig& cfg) {
  if (cfg.d_max < 0) throw std::invalid_argument("d_max must be >= 0");
  if (cfg.M < 16) throw std::invalid_argument("M must be >= 16");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  Setup s{RootSystem::parse(cfg.group), {}, {}, 0, 0, false, 0, {}};
  auto adj = adjoint_weight_system(s.rs);
  s.n = static_cast<int>(adj.dim());
  const int r = s.rs.rank();
  if (cfg.exterior_bound > 0) {
    s.K = cfg.exterior_bound;
    s.set = enumerate_admissible(s.rs, exterior_degree_bound(s.rs, adj, s.K));
  } else {
    s.K = cfg.k_max >= 0 ? std::min(cfg.k_max, s.n) : (s.n - r) / 2;
    s.set = enumerate_admissible(s.rs);
    s.extend = s.K < s.n && s.K >= (s.n - r) / 2;
  }
  s.part = partition_admissible(s.set, s.rs, cfg.d_max);
  s.S = cfg.sampling.empty() ? sampling_set() : cfg.sampling;
  int e = 0;
  for (const auto& g : s.S) {
    int a = pow2_exponent(g.re.get_den()), b = pow2_exponent(g.im.get_den());
    if (a < 0 || b < 0) throw std::invalid_argument("sampling values need power-of-two denominators");
    e = std::max({e, a, b});
  }
  s.scale_exp = static_cast<long>(e) * std::max(1, s.set.max_degree());
  return s;
}

}  // namespace

const char* status_name(ClassStatus s) {
  switch (s) {
    case ClassStatus::Pending:
      return "pending";
    case ClassStatus::Sampling:
      return "sampling";
    case ClassStatus::Derived:
      return "derived";
    case ClassStatus::Solved:
      return "solved";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  json j = json::parse(text);
  RunConfig c;
  c.group = j.value("group", c.group);
  c.d_max = j.value("d_max", c.d_max);
  c.M = j.value("M", c.M);
  c.k_max = j.value("k_max", c.k_max);
  c.exterior_bound = j.value("exterior_bound", c.exterior_bound);
  c.workers = j.value("workers", c.workers);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.resume = j.value("resume", c.resume);
  c.stop_after_classes = j.value("stop_after_classes", c.stop_after_classes);
  if (j.contains("sampling"))
    for (const auto& g : j["sampling"]) c.sampling.push_back({parse_q(g.at(0)), parse_q(g.at(1))});
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"group", "d_max",  "M",       "k_max",  "exterior_bound",    "workers",
                                  "output_dir", "resume", "sampling", "stop_after_classes"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return it.key() == k; }) ==
        std::end(known))
      throw std::invalid_argument("unknown config key: " + it.key());
  }
  return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

std::string config_json(const RunConfig& c) {
  json j;
  j["group"] = c.group;
  j["d_max"] = c.d_max;
  j["M"] = c.M;
  j["k_max"] = c.k_max;
  j["exterior_bound"] = c.exterior_bound;
  j["sampling"] = json::array();
  for (const auto& g : c.sampling) j["sampling"].push_back({g.re.get_str(), g.im.get_str()});
  return j.dump();
}

std::vector<CertifiedValue> certified_exterior_derivatives(const CharacterEngine& eng, const TorusPoint& pt,
                                                          const Exponent& c, const std::vector<int>& ks,
                                                          mpfr_prec_t W) {
  const int r = eng.rank();
  const int order = exponent_degree(c);
  const MultiIndexSet mis(r, order);
  const int Kmax = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
  auto F = eng.exterior_jets(pt, mis, Kmax, W);
  std::vector<CertifiedValue> out(ks.size());
  if (order == 0) {
    for (size_t col = 0; col < ks.size(); ++col) {
      out[col].v = F[ks[col]].v[0];
      out[col].delta = F[ks[col]].rad[0];
    }
    return out;
  }
  std::vector<double> absQ;
  for (const auto& q : pt.Q) absQ.push_back(abs_double(q));
  auto chi = eng.fundamental_jets(pt, mis, W);
  // throws SingularMatrix when J^-1 cannot be certified
  auto op = build_operator(c, inverse_taylor(jacobian_taylor(chi, mis), mis), mis);
  const double apriori = apriori_operator_norm(order, jinv_norm3_bound(absQ, pt.eps));
  for (size_t col = 0; col < ks.size(); ++col) out[col] = apply_operator(op, F[ks[col]], apriori);
  return out;
}

DerivedValues derive_class(const CharacterEngine& eng, const ClassInfo& cls, const std::vector<SamplePoint>& samples,
                           const std::vector<int>& ks, long M, long scale_exp, Exec exec) {
  const int r = eng.rank();
  const mpfr_prec_t W = M + kGuardBits;
  const Exponent& c = cls.deriv;
  mpz_class fact = 1;
  for (int j = 0; j < r; ++j)
    for (int t = 2; t <= c[j]; ++t) fact *= t;
  const mpq_class inv_fact(1, fact);

  DerivedValues out;
  out.values.assign(samples.size(), std::vector<GaussianRational>(ks.size()));
  out.delta_max.assign(samples.size(), 0.0);
  std::string error;
  std::mutex mu;

  auto row_job = [&](size_t row) {
    const auto& s = samples[row];
    TorusPoint pt;
    pt.eps = s.eps_Q;
    for (const auto& q : s.Q) {
      pt.Q.emplace_back(W);
      set(pt.Q.back(), q);
    }
    std::vector<CertifiedValue> cv;
    try {
      cv = certified_exterior_derivatives(eng, pt, c, ks, W);
    } catch (const SingularMatrix& e) {
      throw CertificationError("class " + cls.tag.str(r) + " row " + std::to_string(row) +
                               ": Jacobian inverse not certified (" + e.what() + ")");
    }
    for (size_t col = 0; col < ks.size(); ++col) {
      Complex scaled(W);
      mul_q(scaled, cv[col].v, inv_fact);
      // exact scaling by 1/c! plus one rounding
      const double delta =
          cv[col].delta / fact.get_d() + abs_double(scaled) * std::ldexp(1.0, static_cast<int>(-W) + 1);
      auto g = lattice_round(scaled, delta, scale_exp);
      if (!g) {
        std::ostringstream os;
        os << "class " << cls.tag.str(r) << " row " << row << " k=" << ks[col] << ": radius " << delta
           << " too wide for the lattice 2^-" << scale_exp << " (u = ";
        for (const auto& x : s.u) os << to_string(x) << " ";
        os << ")";
        throw CertificationError(os.str());
      }
      out.values[row][col] = *g;
      out.delta_max[row] = std::max(out.delta_max[row], delta);
    }
  };

  auto guarded = [&](size_t row) {
    try {
      row_job(row);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      if (error.empty()) error = e.what();
    }
  };
  if (exec == Exec::Parallel && !omp_in_parallel()) {
#pragma omp parallel for schedule(dynamic)
    for (long row = 0; row < static_cast<long>(samples.size()); ++row) guarded(static_cast<size_t>(row));
  } else {
    for (size_t row = 0; row < samples.size(); ++row) guarded(row);
  }
  if (!error.empty()) throw CertificationError(error);
  return out;
}

std::vector<std::vector<size_t>> segment_and_dispatch(const Partition& part, int layer, int workers) {
  std::vector<size_t> idx;
  for (size_t i = 0; i < part.classes.size(); ++i)
    if (part.classes[i].layer == layer) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return class_cost(part.classes[a]) > class_cost(part.classes[b]); });
  std::vector<std::vector<size_t>> shards(workers);
  std::vector<size_t> load(workers, 0);
  for (size_t i : idx) {
    size_t w = static_cast<size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    shards[w].push_back(i);
    load[w] += class_cost(part.classes[i]);
  }
  for (auto& s : shards) std::sort(s.begin(), s.end());
  return shards;
}

std::string table_tsv(const DecompTable& t, const AdmissibleSet& set) {
  std::ostringstream os;
  for (int k = 0; k <= t.K(); ++k)
    for (size_t i = 0; i < t.items(); ++i) {
      const auto& v = t.get(k, i);
      if (v == 0) continue;
      os << k << "\t";
      for (int j = 0; j < set.rank(); ++j) os << (j ? "," : "") << int(set[i][j]);
      os << "\t" << v.get_str() << "\n";
    }
  return os.str();
}

std::string timing_tsv(const std::vector<StageTiming>& timing) {
  std::ostringstream os;
  os << "stage\tseconds\n";
  for (const auto& t : timing) os << t.stage << "\t" << std::fixed << std::setprecision(3) << t.seconds << "\n";
  return os.str();
}

RunResult dry_run(const RunConfig& cfg) {
  auto t0 = Clock::now();
  Setup s = prepare(cfg);
  RunResult res;
  res.config = cfg;
  res.n = s.n;
  res.K = s.K;
  res.timing.push_back({"enumerate+partition", seconds_since(t0)});
  for (int l = 0; l < s.part.num_layers; ++l) res.shards.push_back(segment_and_dispatch(s.part, l, cfg.workers));
  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    auto dict = encode_dict(s.set);
    write_file(cfg.output_dir + "/DictFile.bin", dict);
    res.files["DictFile.bin"] = sha256_hex(dict);
    json j;
    j["config"] = json::parse(config_json(cfg));
    j["admissible"] = s.set.size();
    j["max_degree"] = s.set.max_degree();
    j["layers"] = s.part.num_layers;
    j["classes"] = schedule_json(s.part, s.set);
    j["shards"] = res.shards;
    write_text(cfg.output_dir + "/schedule.json", j.dump(1) + "\n");
  }
  res.set = std::move(s.set);
  res.partition = std::move(s.part);
  return res;
}

RunResult run(const RunConfig& cfg) {
  std::vector<StageTiming> timing;
  auto tick = Clock::now();
  Setup s = prepare(cfg);
  timing.push_back({"enumerate+partition", seconds_since(tick)});
  const int r = s.rs.rank();
  CharacterEngine eng(s.rs);
  std::vector<int> ks;
  for (int k = 0; k <= s.K; ++k) ks.push_back(k);

  RunResult res;
  res.config = cfg;
  res.n = s.n;
  res.K = s.K;
  res.classes.resize(s.part.classes.size());
  for (size_t i = 0; i < res.classes.size(); ++i) res.classes[i].index = i;

  const bool io = !cfg.output_dir.empty();
  const std::string cfg_text = config_json(cfg);
  if (io) fs::create_directories(cfg.output_dir + "/checkpoints");

  // resume from a matching manifest
  if (io && cfg.resume && fs::exists(cfg.output_dir + "/manifest.json")) {
    json m = json::parse(read_text(cfg.output_dir + "/manifest.json"));
    if (m.at("config").dump() != json::parse(cfg_text).dump())
      throw std::invalid_argument("resume: manifest was written for a different configuration");
    for (const auto& c : m.at("classes")) {
      if (c.at("status") != "solved") continue;
      size_t i = c.at("index");
      json cj = json::parse(read_text(checkpoint_path(cfg.output_dir, i)));
      res.classes[i] = record_from_json(cj, s.part.classes[i]);
    }
  }

  NrConfig nr;
  nr.M = cfg.M;
  Inverter inv(eng, nr);
  if (cfg.d_max > 0) {
    // derivative rows are taken at chi = 0 and need an invertible Jacobian there
    auto z = inv.solve(std::vector<GaussianRational>(r, GaussianRational{0, 0}));
    if (z.status != SampleStatus::Converged || z.torsion_order > 0)
      throw std::invalid_argument("the fibre over chi = 0 is singular for " + s.rs.name() +
                                  "; derivative classes are unavailable, use d_max = 0");
  }
  SamplingOptions sopt;
  sopt.S = s.S;
  DixonOptions dopt;
  dopt.key = s.rs.name();

  DecompTable running(s.set.size(), s.K);
  auto absorb = [&](const ClassRecord& rec) {
    const auto& cls = s.part.classes[rec.index];
    for (size_t j = 0; j < cls.members.size(); ++j) {
      running.mark_solved(cls.members[j]);
      for (size_t c = 0; c < rec.result.ks.size(); ++c) running.set(rec.result.ks[c], cls.members[j], rec.result.N[c][j]);
    }
  };
  size_t solved = 0;
  for (const auto& rec : res.classes)
    if (rec.status == ClassStatus::Solved) {
      absorb(rec);
      ++solved;
    }

  double t_sample = 0, t_derive = 0, t_solve = 0;
  std::mutex tmu;

  auto process = [&](size_t ci, bool inner_parallel) {
    ClassRecord& rec = res.classes[ci];
    const ClassInfo& cls = s.part.classes[ci];
    auto t0 = Clock::now();
    rec.status = ClassStatus::Sampling;
    SamplingOptions so = sopt;
    so.parallel = inner_parallel;
    auto cs = select_samples(cls, s.set, s.rs, inv, so);
    rec.samples = std::move(cs.points);
    rec.candidates = cs.candidates;
    rec.nr_failures = cs.nr_failures;
    rec.sample_prime = cs.prime;
    auto t1 = Clock::now();
    auto dv = derive_class(eng, cls, rec.samples, ks, cfg.M, s.scale_exp,
                           inner_parallel ? Exec::Parallel : Exec::Serial);
    rec.delta = dv.delta_max;
    rec.status = ClassStatus::Derived;
    auto t2 = Clock::now();
    auto sys = assemble(cls, ci, s.set, rec.samples, dv.values, ks, running);
    DixonOptions d = dopt;
    d.exec = inner_parallel ? Exec::Parallel : Exec::Serial;
    rec.result = solve_class(sys, d);
    rec.status = ClassStatus::Solved;
    std::lock_guard<std::mutex> lock(tmu);
    t_sample += std::chrono::duration<double>(t1 - t0).count();
    t_derive += std::chrono::duration<double>(t2 - t1).count();
    t_solve += seconds_since(t2);
  };

  auto write_manifest = [&]() {
    json m;
    m["config"] = json::parse(cfg_text);
    m["admissible"] = s.set.size();
    m["K"] = s.K;
    m["n"] = s.n;
    m["layers"] = s.part.num_layers;
    m["classes"] = json::array();
    for (size_t i = 0; i < res.classes.size(); ++i)
      m["classes"].push_back({{"index", i},
                              {"tag", s.part.classes[i].tag.str(r)},
                              {"layer", s.part.classes[i].layer},
                              {"status", status_name(res.classes[i].status)}});
    m["files"] = res.files;
    write_text(cfg.output_dir + "/manifest.json", m.dump(1) + "\n");
  };

  bool stopped = false;
  for (int layer = 0; layer < s.part.num_layers && !stopped; ++layer) {
    auto shards = segment_and_dispatch(s.part, layer, cfg.workers);
    res.shards.push_back(shards);
    std::vector<size_t> todo;
    for (size_t i = 0; i < s.part.classes.size(); ++i)
      if (s.part.classes[i].layer == layer && res.classes[i].status != ClassStatus::Solved) todo.push_back(i);
    if (cfg.stop_after_classes >= 0) {
      const size_t room = cfg.stop_after_classes > static_cast<long>(solved)
                              ? static_cast<size_t>(cfg.stop_after_classes) - solved
                              : 0;
      if (todo.size() > room) {
        todo.resize(room);
        stopped = true;
      }
    }
    std::vector<uint8_t> selected(s.part.classes.size(), 0);
    for (size_t i : todo) selected[i] = 1;

    std::string error;
    std::mutex emu;
    auto guarded = [&](size_t ci, bool inner) {
      try {
        process(ci, inner);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(emu);
        if (error.empty()) error = "class #" + std::to_string(ci) + " " + s.part.classes[ci].tag.str(r) + ": " + e.what();
      }
    };
    if (cfg.workers > 1 && todo.size() > 1) {
#pragma omp parallel num_threads(cfg.workers)
      {
        const auto& mine = shards[static_cast<size_t>(omp_get_thread_num())];
        for (size_t ci : mine)
          if (selected[ci]) guarded(ci, false);
      }
    } else {
      for (size_t ci : todo) guarded(ci, cfg.workers > 1);
    }
    if (!error.empty()) throw CertificationError(error);

    // layer barrier: publish results and checkpoints
    for (size_t ci : todo) {
      absorb(res.classes[ci]);
      ++solved;
      if (io)
        write_text(checkpoint_path(cfg.output_dir, ci),
                   record_json(res.classes[ci], s.part.classes[ci], r).dump(1) + "\n");
    }
    if (io) write_manifest();
  }
  timing.push_back({"sampling+NR", t_sample});
  timing.push_back({"derivatives", t_derive});
  timing.push_back({"assemble+solve", t_solve});
  res.nr_solves = inv.solves();

  if (stopped || solved < s.part.classes.size()) {
    res.finished = false;
    res.set = std::move(s.set);
    res.partition = std::move(s.part);
    res.table = std::move(running);
    res.timing = std::move(timing);
    return res;
  }

  tick = Clock::now();
  std::vector<ClassResult> results;
  for (const auto& rec : res.classes) results.push_back(rec.result);
  res.table = s.extend ? merge(results, s.set.size(), s.K, s.n, r, s.set)
                       : merge(results, s.set.size(), s.K, s.K, r, s.set);
  timing.push_back({"merge", seconds_since(tick)});

  if (io) {
    tick = Clock::now();
    const size_t N = s.set.size();
    std::vector<std::vector<GaussianRational>> U(N);
    std::vector<std::vector<Complex>> Q(N);
    std::vector<double> D(N, 0.0);
    for (size_t ci = 0; ci < s.part.classes.size(); ++ci) {
      const auto& cls = s.part.classes[ci];
      const auto& rec = res.classes[ci];
      for (size_t j = 0; j < cls.members.size(); ++j) {
        U[cls.members[j]] = rec.samples[j].u;
        Q[cls.members[j]] = rec.samples[j].Q;
        D[cls.members[j]] = rec.delta[j];
      }
    }
    std::vector<std::pair<std::string, std::vector<uint8_t>>> arts;
    arts.emplace_back("DictFile.bin", encode_dict(s.set));
    arts.emplace_back("SolFile.bin", encode_sol(res.table, s.K));
    arts.emplace_back("USamples.bin", encode_usamples(U, r));
    if (cfg.M + 1 <= kRootMantissaBits) arts.emplace_back("AllRoots.bin", encode_allroots(Q, r));
    arts.emplace_back("Delta.bin", encode_delta(D));
    const std::string tsv = table_tsv(res.table, s.set);
    arts.emplace_back("table.tsv", std::vector<uint8_t>(tsv.begin(), tsv.end()));
    for (const auto& [name, bytes] : arts) {
      write_file(cfg.output_dir + "/" + name, bytes);
      res.files[name] = sha256_hex(bytes);
    }
    write_manifest();
    json sh = res.shards;
    write_text(cfg.output_dir + "/shards.json", sh.dump() + "\n");
    timing.push_back({"write", seconds_since(tick)});
    write_text(cfg.output_dir + "/timing.tsv", timing_tsv(timing));
  }
  res.finished = true;
  res.set = std::move(s.set);
  res.partition = std::move(s.part);
  res.timing = std::move(timing);
  return res;
}

PublishedData read_published(const PublishedPaths& paths, const RootSystem& rs) {
  PublishedData d;
  const int r = rs.rank();
  if (paths.dict.empty()) throw FormatError("read_published: DictFile is required");
  d.set = decode_dict(read_file(paths.dict), r);
  d.log.push_back("DictFile rows: " + std::to_string(d.set.size()));
  auto reference = enumerate_admissible(rs);
  if (reference.size() != d.set.size()) {
    d.valid = false;
    d.log.push_back("row count differs from the enumeration (" + std::to_string(reference.size()) + ")");
  } else {
    size_t missing = 0;
    for (const auto& e : d.set.items())
      if (!reference.contains(e)) ++missing;
    d.log.push_back("exponents outside the enumeration: " + std::to_string(missing));
    if (missing) d.valid = false;
  }
  if (!paths.sol.empty()) {
    d.table = decode_sol(read_file(paths.sol), d.set);
    d.log.push_back("SolFile rows k = 1.." + std::to_string(d.table.K()));
    const int n = static_cast<int>(adjoint_weight_system(rs).dim());
    if (d.table.K() < n && d.table.K() >= (n - r) / 2) {
      auto full = extend_exterior_range(to_decomposition(d.table, d.set), n, r);
      DecompTable t(d.set.size(), n);
      for (size_t i = 0; i < d.set.size(); ++i) t.mark_solved(i);
      for (int k = 0; k <= n; ++k)
        for (const auto& [e, c] : full[k]) {
          long idx = d.set.index_of(e);
          if (idx < 0) throw FormatError("extension produced an exponent outside the DictFile");
          t.set(k, static_cast<size_t>(idx), c);
        }
      d.table = std::move(t);
      d.log.push_back("extended to k = 0.." + std::to_string(n));
    }
    // dimension identity at the identity element
    auto dims = fundamental_dimensions(rs);
    std::vector<mpz_class> mono(d.set.size());
    for (size_t i = 0; i < d.set.size(); ++i) {
      mono[i] = 1;
      for (int j = 0; j < r; ++j)
        for (int t = 0; t < d.set[i][j]; ++t) mono[i] *= dims[j];
    }
    int bad = 0;
    for (int k = 1; k <= d.table.K(); ++k) {
      mpz_class s = 0, b;
      for (size_t i = 0; i < d.set.size(); ++i)
        if (d.table.get(k, i) != 0) s += d.table.get(k, i) * mono[i];
      mpz_bin_uiui(b.get_mpz_t(), n, k);
      if (s != b) ++bad;
    }
    d.log.push_back("dimension identity failures: " + std::to_string(bad));
    if (bad) d.valid = false;
  }
  if (!paths.usamples.empty()) {
    d.u = decode_usamples(read_file(paths.usamples), r);
    if (d.u.size() != d.set.size()) {
      d.valid = false;
      d.log.push_back("USamples row count mismatch");
    }
  }
  if (!paths.allroots.empty()) {
    d.Q = decode_allroots(read_file(paths.allroots), r, paths.layout);
    if (d.Q.size() != d.set.size()) {
      d.valid = false;
      d.log.push_back("AllRoots row count mismatch");
    }
  }
  if (!paths.delta.empty()) {
    d.delta = decode_delta(read_file(paths.delta));
    if (d.delta.size() != d.set.size()) {
      d.valid = false;
      d.log.push_back("Delta row count mismatch");
    }
  }
  return d;
}

ExteriorDecomposition read_fixture(const std::string& path, int rank) {
  std::istringstream in(read_text(path));
  ExteriorDecomposition out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int k;
    long long coef;
    std::string ex;
    if (!(ls >> k >> coef >> ex)) throw FormatError("bad fixture line: " + line);
    Exponent e{};
    std::istringstream es(ex);
    std::string part;
    int j = 0;
    while (std::getline(es, part, ',')) {
      if (j >= rank) throw FormatError("fixture exponent longer than the rank: " + line);
      e[j++] = static_cast<uint8_t>(std::stoi(part));
    }
    if (j != rank) throw FormatError("fixture exponent shorter than the rank: " + line);
    if (static_cast<int>(out.size()) <= k) out.resize(k + 1);
    out[k][e] += coef;
  }
  return out;
}

VerifyReport verify_table(const DecompTable& t, const AdmissibleSet& set, const ExteriorDecomposition& fixture) {
  VerifyReport rep;
  for (int k = 0; k < static_cast<int>(fixture.size()); ++k) {
    if (fixture[k].empty()) continue;
    if (k > t.K()) {
      rep.lines.push_back("k=" + std::to_string(k) + ": SKIP (not in table)");
      continue;
    }
    ++rep.rows_checked;
    int bad = 0;
    // every fixture entry present, and nothing else nonzero
    for (const auto& [e, c] : fixture[k]) {
      long idx = set.index_of(e);
      if (idx < 0 || t.get(k, static_cast<size_t>(idx)) != static_cast<long>(c)) ++bad;
    }
    size_t nz = t.nonzero(k);
    if (nz != fixture[k].size()) ++bad;
    rep.lines.push_back("k=" + std::to_string(k) + ": " + (bad ? "MISMATCH" : "ok"));
    if (bad) ++rep.mismatches;
  }
  return rep;
}

}  // namespace wedge
