#include "wedge/inversion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wedge/modarith.hpp"

namespace wedge {

std::vector<Complex> homotopy_start(const RootSystem& rs, mpfr_prec_t prec) {
  if (rs.family() == 'E' && rs.rank() == 8) {
    std::vector<mpq_class> s;
    for (int x : {6, 3, 15, 1, 12, -4, 5, 0}) s.push_back(mpq_class(-x, 31));
    return torus_from_coroot(s, prec);
  }
  return principal_element(rs, prec);
}

namespace {

bool small_step(const std::vector<Complex>& dQ, const std::vector<Complex>& Q, int tol_bits) {
  const double tol = std::ldexp(1.0, -tol_bits);
  for (size_t i = 0; i < Q.size(); ++i)
    if (!(abs_double(dQ[i]) <= tol * std::max(1.0, abs_double(Q[i])))) return false;
  return true;
}

enum class StageResult { Converged, Stalled, Singular };

double max_rel_step(const std::vector<Complex>& dQ, const std::vector<Complex>& Q) {
  double m = 0.0;
  for (size_t i = 0; i < Q.size(); ++i) m = std::max(m, abs_double(dQ[i]) / std::max(1.0, abs_double(Q[i])));
  return m;
}

// Newton iteration at a fixed target. Small steps that keep shrinking only
// linearly mean the Jacobian is singular at the root.
StageResult newton_stage(const CharacterEngine& eng, std::vector<Complex>& Q, const std::vector<Complex>& target,
                         int max_steps, int tol_bits, mpfr_prec_t W, int& steps) {
  const int n = static_cast<int>(Q.size());
  std::vector<Complex> chi;
  std::vector<std::vector<Complex>> Jrows;
  CMatrix J(n, W);
  std::vector<Complex> r;
  for (int i = 0; i < n; ++i) r.emplace_back(W);
  double prev = std::numeric_limits<double>::infinity();
  int linear = 0;
  for (int it = 0; it < max_steps; ++it) {
    ++steps;
    eng.values_and_jacobian(Q, W, chi, Jrows);
    for (int i = 0; i < n; ++i) {
      sub(r[i], target[i], chi[i]);
      for (int j = 0; j < n; ++j) set(J.at(i, j), Jrows[i][j]);
    }
    std::vector<Complex> dQ;
    try {
      dQ = solve(J, r);
    } catch (const SingularMatrix&) {
      return StageResult::Stalled;
    }
    for (int i = 0; i < n; ++i) {
      if (!dQ[i].is_finite()) return StageResult::Stalled;
      add(Q[i], Q[i], dQ[i]);
      if (Q[i].is_zero() || !Q[i].is_finite()) return StageResult::Stalled;
    }
    if (small_step(dQ, Q, tol_bits)) return StageResult::Converged;
    const double cur = max_rel_step(dQ, Q);
    linear = (cur < 1e-12 && cur > 0.25 * prev) ? linear + 1 : 0;
    if (linear >= 12) return StageResult::Singular;
    prev = cur;
  }
  return StageResult::Stalled;
}

}  // namespace

SamplePoint newton_raphson(const CharacterEngine& eng, const std::vector<GaussianRational>& u,
                           const std::vector<Complex>& Q0, const NrConfig& cfg) {
  const int n = eng.rank();
  const mpfr_prec_t W = cfg.M + cfg.guard;
  SamplePoint s;
  s.u = u;
  std::vector<Complex> Qconv;
  for (const auto& q : Q0) {
    Qconv.emplace_back(W);
    set(Qconv.back(), q);
  }
  const auto chi0 = eng.values(Qconv, W);
  std::vector<Complex> uc, diff;
  for (int i = 0; i < n; ++i) {
    uc.emplace_back(W);
    set(uc[i], u[i]);
    diff.emplace_back(W);
    sub(diff[i], uc[i], chi0[i]);
  }
  long l = 0, den = 1;
  const int final_tol = static_cast<int>(W) - 24;
  while (true) {
    const bool final = l + 1 == den;
    std::vector<Complex> target;
    for (int i = 0; i < n; ++i) {
      target.emplace_back(W);
      if (final) {
        set(target[i], uc[i]);
      } else {
        mpq_class t(l + 1, den);
        t.canonicalize();
        mul_q(target[i], diff[i], t);
        add(target[i], target[i], chi0[i]);
      }
    }
    std::vector<Complex> Q = Qconv;
    const auto res = newton_stage(eng, Q, target, final ? cfg.max_steps : cfg.intermediate_steps,
                                  final ? final_tol : cfg.intermediate_tol_bits, W, s.steps);
    if (res == StageResult::Singular && final) {
      // a finer path cannot help when the target itself is singular
      s.status = SampleStatus::Rejected;
      s.reason = "singular Jacobian at the pre-image";
      s.Q = std::move(Q);
      return s;
    }
    if (res == StageResult::Converged) {
      Qconv = std::move(Q);
      ++l;
      s.path.emplace_back(static_cast<int>(l), static_cast<int>(den));
      if (l == den) break;
      continue;
    }
    if (++s.refinements > cfg.max_refinements) {
      s.status = SampleStatus::Rejected;
      s.reason = "continuation budget exceeded";
      s.Q = std::move(Qconv);
      return s;
    }
    l = (den + 1) * l / den;
    ++den;
  }
  s.Q = std::move(Qconv);
  s.status = SampleStatus::Converged;
  return s;
}

void certify(const CharacterEngine& eng, SamplePoint& s, const NrConfig& cfg) {
  if (s.status != SampleStatus::Converged) return;
  const int n = eng.rank();
  const mpfr_prec_t W = cfg.M + cfg.guard;
  std::vector<Complex> Qhat, Qw;
  double eps = 0.0;
  for (const auto& q : s.Q) {
    Qhat.push_back(rnd(q, cfg.M));
    eps = std::max(eps, ulp_radius(Qhat.back(), cfg.M));
    Qw.emplace_back(W);
    set(Qw.back(), Qhat.back());
  }
  s.Q = std::move(Qhat);
  s.eps_Q = eps;
  MultiIndexSet mis(n, 1);
  auto jets = eng.fundamental_jets(TorusPoint{Qw, eps}, mis, W);
  CMatrix J(n, W);
  std::vector<Complex> r;
  bool inside = true;
  for (int i = 0; i < n; ++i) {
    r.emplace_back(W);
    Complex ui(W);
    set(ui, s.u[i]);
    sub(r[i], ui, jets[i].v[0]);
    if (!(abs_double(r[i]) <= jets[i].rad[0])) inside = false;
    for (int j = 0; j < n; ++j) set(J.at(i, j), jets[i].v[mis.shift(0, j)]);
  }
  s.det = determinant(J);
  double rows = 1.0;
  for (int i = 0; i < n; ++i) {
    double t = 0.0;
    for (int j = 0; j < n; ++j) t += std::pow(abs_double(J.at(i, j)), 2);
    rows *= std::sqrt(t);
  }
  s.det_rel = rows > 0 ? abs_double(s.det) / rows : 0.0;
  if (!(s.det_rel >= std::ldexp(1.0, -static_cast<int>(cfg.M / 2)))) {
    s.status = SampleStatus::Rejected;
    s.reason = "singular Jacobian";
    return;
  }
  if (!inside) {
    s.status = SampleStatus::Rejected;
    s.reason = "forward residual outside certified radius";
    return;
  }
  auto step = solve(J, r);
  for (const auto& d : step)
    if (!(abs_double(d) <= 0.75 * eps)) {
      s.status = SampleStatus::Rejected;
      s.reason = "Newton correction exceeds eps_Q";
      return;
    }
}

std::string sample_key(const std::vector<GaussianRational>& u) {
  std::ostringstream os;
  for (const auto& x : u) os << x.re.get_str() << ',' << x.im.get_str() << ';';
  return os.str();
}

Inverter::Inverter(const CharacterEngine& eng, NrConfig cfg)
    : eng_(eng), cfg_(cfg), Q0_(homotopy_start(eng.roots(), cfg.M + cfg.guard)) {}

namespace {

// c mod Phi_N, c indexed by exponent 0..N-1
std::vector<mpz_class> reduce_cyclotomic(std::vector<mpz_class> c, long N) {
  // Phi_N from mu^N - 1 by dividing out Phi_d, d | N, d < N
  std::vector<std::vector<mpz_class>> phis(N + 1);
  auto divide = [](std::vector<mpz_class> a, const std::vector<mpz_class>& b) {
    std::vector<mpz_class> q(a.size() - b.size() + 1);
    for (size_t i = q.size(); i-- > 0;) {
      q[i] = a[i + b.size() - 1];
      if (q[i] != 0)
        for (size_t j = 0; j < b.size(); ++j) a[i + j] -= q[i] * b[j];
    }
    return q;
  };
  for (long d = 1; d <= N; ++d) {
    if (N % d) continue;
    std::vector<mpz_class> p(d + 1, 0);
    p[0] = -1;
    p[d] = 1;
    for (long e = 1; e < d; ++e)
      if (d % e == 0) p = divide(p, phis[e]);
    phis[d] = std::move(p);
  }
  const auto& phi = phis[N];
  const size_t deg = phi.size() - 1;
  for (size_t i = c.size(); i-- > deg;) {
    if (c[i] == 0) continue;
    mpz_class t = c[i];
    for (size_t j = 0; j <= deg; ++j) c[i - deg + j] -= t * phi[j];
  }
  c.resize(deg);
  return c;
}

}  // namespace

bool snap_torsion(const RootSystem& rs, SamplePoint& s, const NrConfig& cfg, long max_den) {
  const int r = rs.rank();
  if (static_cast<int>(s.Q.size()) != r || static_cast<int>(s.u.size()) != r) return false;
  for (const auto& g : s.u)
    if (g.re.get_den() != 1 || g.im.get_den() != 1) return false;  // characters are algebraic integers
  for (int i = 1; i <= r; ++i)
    if (rs.weyl_dimension(rs.fundamental(i)) > 5'000'000) return false;
  // angles as fractions p/q of a full turn
  std::vector<long> num(r), den(r);
  long N = 1;
  for (int j = 0; j < r; ++j) {
    const double re = mpfr_get_d(s.Q[j].re.get(), MPFR_RNDN), im = mpfr_get_d(s.Q[j].im.get(), MPFR_RNDN);
    if (std::abs(std::hypot(re, im) - 1.0) > 1e-9) return false;
    double th = std::atan2(im, re) / (2 * M_PI);
    if (th < 0) th += 1.0;
    bool found = false;
    for (long q = 1; q <= max_den && !found; ++q) {
      const double pq = std::round(th * q);
      if (std::abs(th * q - pq) < 1e-9 * q) {
        num[j] = static_cast<long>(pq) % q;
        den[j] = q;
        found = true;
      }
    }
    if (!found) return false;
    N = std::lcm(N, den[j]);
    if (N > 100'000) return false;
  }
  std::vector<long> a(r);
  for (int j = 0; j < r; ++j) a[j] = num[j] * (N / den[j]);
  // exact check of every fundamental character
  for (int i = 1; i <= r; ++i) {
    auto ws = weight_system(rs, rs.fundamental(i));
    std::vector<mpz_class> c(N, 0);
    for (size_t w = 0; w < ws.size(); ++w) {
      long e = 0;
      for (int j = 0; j < r; ++j) e = (e + ws.weights[w][j] * a[j]) % N;
      if (e < 0) e += N;
      c[e] += ws.mult[w];
    }
    std::vector<mpz_class> t(N, 0);
    t[0] = s.u[i - 1].re.get_num();
    if (s.u[i - 1].im != 0) {
      if (N % 4) return false;
      t[N / 4] += s.u[i - 1].im.get_num();
    }
    if (reduce_cyclotomic(c, N) != reduce_cyclotomic(t, N)) return false;
  }
  const mpfr_prec_t W = cfg.M + cfg.guard;
  std::vector<Complex> Q;
  for (int j = 0; j < r; ++j) {
    Real th(W), pi(W);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    mpfr_mul_si(th.get(), pi.get(), 2 * a[j], MPFR_RNDN);
    mpfr_div_si(th.get(), th.get(), N, MPFR_RNDN);
    Complex q(W);
    mpfr_sin_cos(q.im.get(), q.re.get(), th.get(), MPFR_RNDN);
    Q.push_back(rnd(q, cfg.M));
  }
  // |error| of each part is below 2^-(M) from the M-bit rounding plus
  // a few W-bit ulps from pi and the division
  s.Q = std::move(Q);
  s.eps_Q = std::ldexp(1.0, static_cast<int>(1 - cfg.M));
  s.torsion_order = N;
  s.torsion = std::move(a);
  s.status = SampleStatus::Converged;
  s.reason.clear();
  s.det_rel = 0.0;
  return true;
}

SamplePoint Inverter::solve(const std::vector<GaussianRational>& u) {
  const std::string key = sample_key(u);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  SamplePoint s = newton_raphson(eng_, u, Q0_, cfg_);
  certify(eng_, s, cfg_);
  if (s.status == SampleStatus::Rejected && s.reason.find("singular") != std::string::npos)
    snap_torsion(eng_.roots(), s, cfg_);
  std::lock_guard<std::mutex> lk(mu_);
  ++solves_;
  return cache_.emplace(key, std::move(s)).first->second;
}

size_t Inverter::cache_size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return cache_.size();
}

std::vector<GaussianRational> sampling_set() {
  std::vector<GaussianRational> S;
  for (int l = -3; l <= 3; ++l)
    for (int m = -2; m <= 2; ++m) {
      GaussianRational g{mpq_class(l, 2), mpq_class(m, 2)};
      g.re.canonicalize();
      g.im.canonicalize();
      S.push_back(g);
    }
  std::sort(S.begin(), S.end(), [](const GaussianRational& a, const GaussianRational& b) {
    mpq_class na = a.re * a.re + a.im * a.im, nb = b.re * b.re + b.im * b.im;
    if (na != nb) return na < nb;
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  });
  return S;
}

std::vector<GaussianRational> coordinate_domain(const ClassInfo& cls, const RootSystem& rs,
                                                const std::vector<GaussianRational>& S) {
  std::vector<GaussianRational> dom;
  auto push = [&](const GaussianRational& g) {
    if (g.re == 0 && g.im == 0) return;
    if (std::find(dom.begin(), dom.end(), g) == dom.end()) dom.push_back(g);
  };
  if (cls.tag.kind == ClassKind::Overflow && std::popcount(cls.tag.phi) == 1) {
    int k = std::countr_zero(cls.tag.phi);
    mpz_class e;
    mpz_fdiv_q(e.get_mpz_t(), rs.rho_alpha()[k].get_num_mpz_t(), rs.rho_alpha()[k].get_den_mpz_t());
    for (long v = 1; v <= e.get_si(); ++v) {
      push({mpq_class(-v), 0});
      push({mpq_class(v), 0});
    }
  }
  for (const auto& g : S) push(g);
  return dom;
}

std::vector<mpq_class> sample_row(const ClassInfo& cls, const AdmissibleSet& set,
                                  const std::vector<GaussianRational>& u) {
  std::vector<mpq_class> row;
  for (uint32_t m : cls.members) {
    const Exponent& k = set[m];
    GaussianRational p{1, 0};
    for (int j : cls.free_coords) p = p * gpow(u[j], k[j]);
    row.push_back(p.re);
  }
  return row;
}

namespace {

struct ModGauss {
  u64 re, im;
};

class EchelonModP {
 public:
  EchelonModP(size_t width, u64 p) : width_(width), p_(p) {}
  size_t rank() const { return rows_.size(); }
  // reduces a copy; returns the pivot column or -1 when dependent
  long reduce(std::vector<u64>& v) const {
    for (size_t r = 0; r < rows_.size(); ++r) {
      u64 f = v[pivots_[r]];
      if (!f) continue;
      const auto& row = rows_[r];
      for (size_t c = 0; c < width_; ++c)
        if (row[c]) v[c] = submod(v[c], mulmod(f, row[c], p_), p_);
    }
    for (size_t c = 0; c < width_; ++c)
      if (v[c]) return static_cast<long>(c);
    return -1;
  }
  void add(std::vector<u64> v, long piv) {
    u64 s = invmod(v[piv], p_);
    for (auto& x : v) x = mulmod(x, s, p_);
    rows_.push_back(std::move(v));
    pivots_.push_back(static_cast<size_t>(piv));
  }

 private:
  size_t width_;
  u64 p_;
  std::vector<std::vector<u64>> rows_;
  std::vector<size_t> pivots_;
};

std::vector<u64> row_mod_p(const ClassInfo& cls, const AdmissibleSet& set, const std::vector<GaussianRational>& u,
                           u64 p) {
  // powers of each free coordinate, as Gaussian residues
  std::vector<std::vector<ModGauss>> pw;
  for (int j : cls.free_coords) {
    int top = 0;
    for (uint32_t m : cls.members) top = std::max<int>(top, set[m][j]);
    std::vector<ModGauss> v{{1, 0}};
    ModGauss b{mod_q(u[j].re, p), mod_q(u[j].im, p)};
    for (int e = 1; e <= top; ++e) {
      const auto& a = v.back();
      v.push_back({submod(mulmod(a.re, b.re, p), mulmod(a.im, b.im, p), p),
                   addmod(mulmod(a.re, b.im, p), mulmod(a.im, b.re, p), p)});
    }
    pw.push_back(std::move(v));
  }
  std::vector<u64> row;
  row.reserve(cls.members.size());
  for (uint32_t m : cls.members) {
    ModGauss acc{1, 0};
    for (size_t f = 0; f < cls.free_coords.size(); ++f) {
      const auto& b = pw[f][set[m][cls.free_coords[f]]];
      acc = {submod(mulmod(acc.re, b.re, p), mulmod(acc.im, b.im, p), p),
             addmod(mulmod(acc.re, b.im, p), mulmod(acc.im, b.re, p), p)};
    }
    row.push_back(acc.re);
  }
  return row;
}

// Visits index tuples in [0, width)^f box by box, lexicographic inside a box.
class BoxEnumerator {
 public:
  BoxEnumerator(size_t f, size_t width) : f_(f), width_(width), idx_(f, 0) {}
  bool next(std::vector<size_t>& out) {
    if (done_) return false;
    if (f_ == 0 || width_ == 0) {
      done_ = true;
      out.clear();
      return f_ == 0;
    }
    while (true) {
      if (started_ && !increment()) {
        if (++box_ >= width_) {
          done_ = true;
          return false;
        }
        std::fill(idx_.begin(), idx_.end(), 0);
      }
      started_ = true;
      if (*std::max_element(idx_.begin(), idx_.end()) == box_) {
        out = idx_;
        return true;
      }
    }
  }

 private:
  bool increment() {
    for (size_t p = f_; p-- > 0;) {
      if (idx_[p] < box_) {
        ++idx_[p];
        std::fill(idx_.begin() + p + 1, idx_.end(), 0);
        return true;
      }
    }
    return false;
  }

  size_t f_, width_;
  std::vector<size_t> idx_;
  size_t box_ = 0;
  bool started_ = false, done_ = false;
};

}  // namespace

ClassSamples select_samples(const ClassInfo& cls, const AdmissibleSet& set, const RootSystem& rs,
                            Inverter& inv, const SamplingOptions& opt) {
  const int r = rs.rank();
  const size_t need = cls.members.size();
  const auto dom = coordinate_domain(cls, rs, opt.S);
  ClassSamples out;
  out.prime = prime_from_key(rs.name() + ":" + cls.tag.str(r));
  EchelonModP basis(need, out.prime);
  BoxEnumerator en(cls.free_coords.size(), dom.size());
  std::vector<size_t> idx;
  bool exhausted = false;
  while (out.points.size() < need) {
    // next batch of candidates independent of the committed rows
    std::vector<std::vector<GaussianRational>> us;
    while (static_cast<int>(us.size()) < opt.batch) {
      if (out.candidates >= opt.max_candidates || !en.next(idx)) {
        exhausted = true;
        break;
      }
      ++out.candidates;
      std::vector<GaussianRational> u(r, GaussianRational{0, 0});
      for (size_t f = 0; f < idx.size(); ++f) u[cls.free_coords[f]] = dom[idx[f]];
      auto row = row_mod_p(cls, set, u, out.prime);
      if (basis.reduce(row) < 0) continue;
      us.push_back(std::move(u));
    }
    if (us.empty()) break;
    std::vector<SamplePoint> pts(us.size());
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
    for (size_t b = 0; b < us.size(); ++b) pts[b] = inv.solve(us[b]);
    for (size_t b = 0; b < us.size() && out.points.size() < need; ++b) {
      // torsion points have no Jacobian inverse for derivative rows
      if (pts[b].status != SampleStatus::Converged || (pts[b].torsion_order > 0 && exponent_degree(cls.deriv) > 0)) {
        ++out.nr_failures;
        continue;
      }
      auto row = row_mod_p(cls, set, us[b], out.prime);
      long piv = basis.reduce(row);
      if (piv < 0) continue;
      basis.add(std::move(row), piv);
      out.points.push_back(std::move(pts[b]));
    }
    if (exhausted) break;
  }
  if (out.points.size() < need)
    throw std::runtime_error("sampling set exhausted for class " + cls.tag.str(r) + " (" +
                             std::to_string(out.points.size()) + "/" + std::to_string(need) + ")");
  return out;
}

}  // namespace wedge
