#include "wedge/charcalc.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace wedge {

// ---------------------------------------------------------------- multi-indices

MultiIndexSet::MultiIndexSet(int rank, int order) : rank_(rank), order_(order) {
  if (rank < 1 || rank > 8) throw std::invalid_argument("rank must be in 1..8");
  for (int g = 0; g <= order; ++g) {
    Exponent e{};
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == rank - 1) {
        e[i] = static_cast<uint8_t>(left);
        items_.push_back(e);
        return;
      }
      for (int x = left; x >= 0; --x) {
        e[i] = static_cast<uint8_t>(x);
        self(self, i + 1, left - x);
      }
      e[i] = 0;
    };
    rec(rec, 0, g);
    prefix_.push_back(items_.size());
  }
  for (uint32_t i = 0; i < items_.size(); ++i) index_.emplace(exponent_key(items_[i]), i);
  fact_.resize(items_.size());
  leibniz_.resize(items_.size());
  shift_.assign(items_.size() * rank_, -1);
  for (size_t c = 0; c < items_.size(); ++c) {
    const Exponent& ce = items_[c];
    int64_t f = 1;
    for (int i = 0; i < rank_; ++i)
      for (int t = 2; t <= ce[i]; ++t) f *= t;
    fact_[c] = f;
    Exponent a{};
    auto rec = [&](auto&& self, int i) -> void {
      if (i == rank_) {
        Exponent b{};
        int64_t bin = 1;
        for (int t = 0; t < rank_; ++t) {
          b[t] = static_cast<uint8_t>(ce[t] - a[t]);
          int64_t x = 1;
          for (int s = 0; s < a[t]; ++s) x = x * (ce[t] - s) / (s + 1);
          bin *= x;
        }
        leibniz_[c].push_back({index_.at(exponent_key(a)), index_.at(exponent_key(b)), bin});
        return;
      }
      for (int x = 0; x <= ce[i]; ++x) {
        a[i] = static_cast<uint8_t>(x);
        self(self, i + 1);
      }
      a[i] = 0;
    };
    rec(rec, 0);
    for (int j = 0; j < rank_; ++j) {
      Exponent s = ce;
      s[j]++;
      auto it = index_.find(exponent_key(s));
      if (it != index_.end()) shift_[c * rank_ + j] = it->second;
    }
  }
}

long MultiIndexSet::index_of(const Exponent& d) const {
  auto it = index_.find(exponent_key(d));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

// ---------------------------------------------------------------- jet algebra

namespace {

double round_rad(const Complex& v, mpfr_prec_t prec, double terms = 1.0) {
  return abs_double(v) * std::ldexp(terms + 1.0, static_cast<int>(1 - prec));
}

}  // namespace

Jet jet_constant(const MultiIndexSet& mis, long c, mpfr_prec_t prec) {
  Jet j(mis.size(), prec);
  set_si(j.v[0], c);
  return j;
}

Jet jet_add(const Jet& a, const Jet& b) {
  Jet r(a.size(), a.v[0].prec());
  for (size_t i = 0; i < a.size(); ++i) {
    add(r.v[i], a.v[i], b.v[i]);
    r.rad[i] = a.rad[i] + b.rad[i] + round_rad(r.v[i], r.v[i].prec());
  }
  return r;
}

Jet jet_sub(const Jet& a, const Jet& b) {
  Jet r(a.size(), a.v[0].prec());
  for (size_t i = 0; i < a.size(); ++i) {
    sub(r.v[i], a.v[i], b.v[i]);
    r.rad[i] = a.rad[i] + b.rad[i] + round_rad(r.v[i], r.v[i].prec());
  }
  return r;
}

Jet jet_scale(const Jet& a, const mpq_class& s) {
  Jet r(a.size(), a.v[0].prec());
  double as = std::abs(s.get_d());
  for (size_t i = 0; i < a.size(); ++i) {
    mul_q(r.v[i], a.v[i], s);
    r.rad[i] = a.rad[i] * as * (1 + 1e-12) + round_rad(r.v[i], r.v[i].prec());
  }
  return r;
}

Jet jet_mul(const MultiIndexSet& mis, const Jet& a, const Jet& b) {
  const mpfr_prec_t prec = a.v[0].prec();
  Jet r(a.size(), prec);
  Complex t(prec);
  std::vector<double> am(a.size()), bm(b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    am[i] = abs_double(a.v[i]);
    bm[i] = abs_double(b.v[i]);
  }
  for (size_t c = 0; c < a.size(); ++c) {
    double rad = 0.0, mag = 0.0;
    const auto& terms = mis.leibniz(c);
    for (const auto& lt : terms) {
      mul(t, a.v[lt.a], b.v[lt.b]);
      if (lt.binom != 1) mul_si(t, t, lt.binom);
      add(r.v[c], r.v[c], t);
      double w = static_cast<double>(lt.binom);
      rad += w * (am[lt.a] * b.rad[lt.b] + a.rad[lt.a] * bm[lt.b] + a.rad[lt.a] * b.rad[lt.b]);
      mag += w * am[lt.a] * bm[lt.b];
    }
    r.rad[c] = rad * (1 + 1e-12) + mag * std::ldexp(2.0 * terms.size() + 4.0, static_cast<int>(-prec));
  }
  return r;
}

// ---------------------------------------------------------------- power sums

namespace {

// falling factorial n (n-1) ... (n-c+1)
__int128 falling(long n, int c) {
  __int128 r = 1;
  for (int s = 0; s < c; ++s) r *= (n - s);
  return r;
}

}  // namespace

Jet power_sum_jet(const WeightSystem& ws, int k, const TorusPoint& pt, const MultiIndexSet& mis,
                  mpfr_prec_t prec, const IntMatrix& cartan, Exec exec) {
  const int n = mis.rank();
  const size_t nw = ws.size();
  const auto& Q = pt.Q;

  // monomials Q^(k w) along the parent chain
  std::vector<Complex> mono;
  mono.reserve(nw);
  std::vector<Complex> stepf;
  for (int i = 0; i < n; ++i) {
    Complex s(prec + 8), t(prec + 8);
    set_si(s, 1);
    for (int j = 0; j < n; ++j) {
      if (cartan[i][j] == 0) continue;
      cpow_si(t, Q[j], -static_cast<long>(k) * cartan[i][j]);
      mul(s, s, t);
    }
    stepf.push_back(std::move(s));
  }
  std::vector<int> depth(nw, 0);
  {
    Complex h(prec), t(prec);
    set_si(h, 1);
    for (int j = 0; j < n; ++j) {
      if (ws.highest[j] == 0) continue;
      cpow_si(t, Q[j], static_cast<long>(k) * ws.highest[j]);
      mul(h, h, t);
    }
    mono.push_back(std::move(h));
  }
  for (size_t w = 1; w < nw; ++w) {
    Complex m(prec);
    mul(m, mono[ws.parent[w]], stepf[ws.step[w]]);
    mono.push_back(std::move(m));
    depth[w] = depth[ws.parent[w]] + 1;
  }
  int maxdepth = *std::max_element(depth.begin(), depth.end());

  // Q^{-c}
  std::vector<std::vector<Complex>> qinv(n);
  for (int j = 0; j < n; ++j) {
    Complex inv1(prec + 8);
    inv(inv1, Q[j]);
    Complex cur(prec + 8);
    set_si(cur, 1);
    for (int e = 0; e <= mis.order(); ++e) {
      qinv[j].push_back(cur);
      mul(cur, cur, inv1);
    }
  }

  std::vector<double> lq(n);
  for (int j = 0; j < n; ++j) lq[j] = log2_abs(Q[j]);
  auto envelope = [&](const Exponent& c, double eps, double& mag) {
    std::vector<double> rel(n);
    bool bad = false;
    for (int l = 0; l < n; ++l) {
      double e = eps / std::exp2(lq[l]);
      if (!(e < 0.5)) bad = true;
      rel[l] = std::log1p(e) - std::log1p(-e);
    }
    double env = 0.0;
    mag = 0.0;
    for (size_t w = 0; w < nw; ++w) {
      double lg = 0.0, L = 0.0, coef = static_cast<double>(ws.mult[w]);
      for (int l = 0; l < n; ++l) {
        long p = static_cast<long>(k) * ws.weights[w][l] - c[l];
        lg += p * lq[l];
        L += std::abs(p) * rel[l];
        long kw = static_cast<long>(k) * ws.weights[w][l];
        for (int s = 0; s < c[l]; ++s) coef *= std::abs(static_cast<double>(kw - s));
      }
      if (coef == 0.0) continue;
      double a = coef * std::exp2(lg);
      mag += a;
      env += a * std::expm1(L);
    }
    if (bad) env = std::numeric_limits<double>::infinity();
    return env * (1 + 1e-10);
  };

  // |Q^{k w}| for the rounding term
  std::vector<double> monoabs(nw);
  for (size_t w = 0; w < nw; ++w) {
    double lg = 0.0;
    for (int l = 0; l < n; ++l) lg += static_cast<double>(k) * ws.weights[w][l] * lq[l];
    monoabs[w] = std::exp2(lg);
  }

  Jet out(mis.size(), prec);
  double mag0;
  const double env0_2eps = pt.eps > 0 ? envelope(mis[0], 2 * pt.eps, mag0) : 0.0;

  auto do_c = [&](size_t ci) {
    const Exponent& c = mis[ci];
    Complex acc(prec + 16), t(prec + 16);
    double mag = 0.0;
    for (size_t w = 0; w < nw; ++w) {
      __int128 coef = ws.mult[w];
      for (int l = 0; l < n && coef != 0; ++l)
        if (c[l]) coef *= falling(static_cast<long>(k) * ws.weights[w][l], c[l]);
      if (coef == 0) continue;
      mag += std::fabs(static_cast<double>(coef)) * monoabs[w];
      if (coef > std::numeric_limits<long>::max() || coef < std::numeric_limits<long>::min()) {
        mpz_class z;
        __int128 a = coef < 0 ? -coef : coef;
        mpz_class hi(static_cast<unsigned long>(a >> 64)), lo(static_cast<unsigned long>(a));
        z = (hi << 64) + lo;
        if (coef < 0) z = -z;
        addmul_z(acc, mono[w], z, t);
      } else if (coef == 1) {
        add(acc, acc, mono[w]);
      } else {
        addmul_si(acc, mono[w], static_cast<long>(coef), t);
      }
    }
    for (int l = 0; l < n; ++l)
      if (c[l]) mul(acc, acc, qinv[l][c[l]]);
    set(out.v[ci], acc);
    double lc = 0.0;
    for (int l = 0; l < n; ++l) lc += c[l] * lq[l];
    mag *= std::exp2(-lc) * (1 + 1e-9);
    int abs_c = mis.degree(ci);
    double bound = 0.0;
    if (pt.eps > 0) {
      double emag;
      bound = power_sum_bound(envelope(c, pt.eps, emag), abs_c, env0_2eps);
      mag = std::max(mag, emag);
    }
    out.rad[ci] = bound + mag * std::ldexp(maxdepth + 2.0 * abs_c + 16.0, static_cast<int>(-prec));
  };

  if (exec == Exec::Parallel && !omp_in_parallel()) {
#pragma omp parallel for schedule(dynamic)
    for (long ci = 0; ci < static_cast<long>(mis.size()); ++ci) do_c(static_cast<size_t>(ci));
  } else {
    for (size_t ci = 0; ci < mis.size(); ++ci) do_c(ci);
  }
  return out;
}

std::vector<Jet> newton_exterior(const MultiIndexSet& mis, const std::vector<Jet>& p, int K) {
  if (static_cast<int>(p.size()) < K) throw std::invalid_argument("not enough power sums");
  const mpfr_prec_t prec = p.empty() ? 64 : p[0].v[0].prec();
  std::vector<Jet> e;
  e.push_back(jet_constant(mis, 1, prec));
  for (int k = 1; k <= K; ++k) {
    Jet acc(mis.size(), prec);
    for (int m = 1; m <= k; ++m) {
      Jet t = jet_mul(mis, p[m - 1], e[k - m]);
      acc = (m % 2 == 1) ? jet_add(acc, t) : jet_sub(acc, t);
    }
    e.push_back(jet_scale(acc, mpq_class(1, k)));
  }
  return e;
}

// ---------------------------------------------------------------- engine

CharacterEngine::CharacterEngine(const RootSystem& rs) : rs_(rs) {
  e8_ = rs.family() == 'E' && rs.rank() == 8;
  adj_ = adjoint_weight_system(rs);
  fund_.resize(rs.rank());
  for (int i = 1; i <= rs.rank(); ++i) {
    if (e8_ && i != 1 && i != 7 && i != 8) continue;
    fund_[i - 1] = weight_system(rs, rs.fundamental(i));
  }
}

std::vector<Jet> CharacterEngine::fundamental_jets(const TorusPoint& pt, const MultiIndexSet& mis,
                                                   mpfr_prec_t prec, Exec exec) const {
  const auto& A = rs_.cartan();
  std::vector<Jet> out;
  if (!e8_) {
    for (int i = 0; i < rs_.rank(); ++i) out.push_back(power_sum_jet(fund_[i], 1, pt, mis, prec, A, exec));
    return out;
  }
  std::vector<Jet> p7, p1;
  for (int m = 1; m <= 5; ++m) p7.push_back(power_sum_jet(fund_[6], m, pt, mis, prec, A, exec));
  for (int m = 1; m <= 2; ++m) p1.push_back(power_sum_jet(fund_[0], m, pt, mis, prec, A, exec));
  Jet x8 = power_sum_jet(fund_[7], 1, pt, mis, prec, A, exec);
  auto e7 = newton_exterior(mis, p7, 5);
  auto e1 = newton_exterior(mis, p1, 2);
  const Jet& x7 = e7[1];
  const Jet& x1 = e1[1];
  auto mulj = [&](const Jet& a, const Jet& b) { return jet_mul(mis, a, b); };
  auto twice = [&](const Jet& a) { return jet_scale(a, 2); };
  Jet v6 = jet_sub(e7[2], x7);
  Jet v5 = jet_sub(jet_add(e7[3], x7), mulj(x7, x7));
  Jet v4 = jet_sub(jet_sub(jet_add(jet_add(e7[4], e7[3]), e7[2]), mulj(e7[2], x7)), v5);
  Jet v3 = jet_sub(
      jet_sub(jet_sub(jet_add(jet_add(e7[5], twice(e7[4])), twice(e7[2])), x7), mulj(e7[3], x7)), twice(v4));
  Jet v2 = jet_add(jet_sub(jet_add(e1[2], x1), mulj(x1, x7)), x8);
  out = {x1, v2, v3, v4, v5, v6, x7, x8};
  return out;
}

std::vector<Jet> CharacterEngine::exterior_jets(const TorusPoint& pt, const MultiIndexSet& mis, int K,
                                                mpfr_prec_t prec, Exec exec) const {
  std::vector<Jet> p;
  const WeightSystem& ws = e8_ ? fund_[6] : adj_;
  for (int m = 1; m <= K; ++m) p.push_back(power_sum_jet(ws, m, pt, mis, prec, rs_.cartan(), exec));
  return newton_exterior(mis, p, K);
}

void CharacterEngine::values_and_jacobian(const std::vector<Complex>& Q, mpfr_prec_t prec,
                                          std::vector<Complex>& chi,
                                          std::vector<std::vector<Complex>>& J) const {
  const int n = rs_.rank();
  MultiIndexSet mis(n, 1);
  TorusPoint pt{Q, 0.0};
  auto f = fundamental_jets(pt, mis, prec);
  chi.clear();
  J.assign(n, {});
  for (int i = 0; i < n; ++i) {
    chi.push_back(f[i].v[0]);
    for (int j = 0; j < n; ++j) J[i].push_back(f[i].v[mis.shift(0, j)]);
  }
}

std::vector<Complex> CharacterEngine::values(const std::vector<Complex>& Q, mpfr_prec_t prec) const {
  MultiIndexSet mis(rs_.rank(), 0);
  TorusPoint pt{Q, 0.0};
  auto f = fundamental_jets(pt, mis, prec);
  std::vector<Complex> out;
  for (auto& j : f) out.push_back(j.v[0]);
  return out;
}

Complex power_sum_deriv(const RootSystem& rs, int j, int k, const Exponent& c, const std::vector<Complex>& Q,
                        mpfr_prec_t prec) {
  MultiIndexSet mis(rs.rank(), exponent_degree(c));
  auto ws = weight_system(rs, rs.fundamental(j));
  auto jet = power_sum_jet(ws, k, TorusPoint{Q, 0.0}, mis, prec, rs.cartan());
  return jet.v[mis.index_of(c)];
}

Complex exterior_deriv(const CharacterEngine& eng, int k, const Exponent& c, const std::vector<Complex>& Q,
                       mpfr_prec_t prec) {
  MultiIndexSet mis(eng.rank(), exponent_degree(c));
  auto e = eng.exterior_jets(TorusPoint{Q, 0.0}, mis, k, prec);
  return e[k].v[mis.index_of(c)];
}

Complex fundamental_deriv(const CharacterEngine& eng, int i, const Exponent& c, const std::vector<Complex>& Q,
                          mpfr_prec_t prec) {
  MultiIndexSet mis(eng.rank(), exponent_degree(c));
  auto f = eng.fundamental_jets(TorusPoint{Q, 0.0}, mis, prec);
  return f[i - 1].v[mis.index_of(c)];
}

std::vector<Complex> torus_from_coroot(const std::vector<mpq_class>& s, mpfr_prec_t prec) {
  std::vector<Complex> Q;
  Real pi(prec + 16);
  mpfr_const_pi(pi.get(), MPFR_RNDN);
  for (const auto& x : s) {
    Complex t(prec + 16), q(prec);
    mpfr_mul_q(t.im.get(), pi.get(), x.get_mpq_t(), MPFR_RNDN);
    mpfr_mul_2si(t.im.get(), t.im.get(), 1, MPFR_RNDN);
    cexp(q, t);
    Q.push_back(std::move(q));
  }
  return Q;
}

std::vector<Complex> principal_element(const RootSystem& rs, mpfr_prec_t prec) {
  auto c = rs.rho_coroot();
  for (auto& x : c) x /= (rs.coxeter_number() + 1);
  return torus_from_coroot(c, prec);
}

// ---------------------------------------------------------------- Laurent oracle

uint64_t LaurentPoly::pack(const Weight& w) {
  uint64_t k = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i] < -127 || w[i] > 127) throw std::length_error("Laurent exponent out of range");
    k |= static_cast<uint64_t>(static_cast<uint8_t>(static_cast<int8_t>(w[i]))) << (8 * i);
  }
  return k;
}

Weight LaurentPoly::unpack(uint64_t k, int rank) {
  Weight w(rank);
  for (int i = 0; i < rank; ++i) w[i] = static_cast<int8_t>(static_cast<uint8_t>(k >> (8 * i)));
  return w;
}

LaurentPoly LaurentPoly::from_weights(const WeightSystem& ws, int rank) {
  LaurentPoly p(rank);
  for (size_t i = 0; i < ws.size(); ++i) p.add_term(pack(ws.weights[i]), ws.mult[i]);
  return p;
}

int64_t LaurentPoly::coeff(const Weight& w) const {
  auto it = terms_.find(pack(w));
  return it == terms_.end() ? 0 : it->second;
}

void LaurentPoly::add_term(uint64_t key, int64_t c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.try_emplace(key, c);
  if (!fresh) {
    if (__builtin_add_overflow(it->second, c, &it->second)) throw std::overflow_error("Laurent coefficient");
    if (it->second == 0) terms_.erase(it);
  }
  if (terms_.size() > capacity_limit) throw std::length_error("Laurent polynomial exceeds capacity");
}

namespace {
inline uint64_t add_keys(uint64_t a, uint64_t b, int rank) {
  uint64_t k = 0;
  for (int i = 0; i < rank; ++i) {
    int x = static_cast<int8_t>(static_cast<uint8_t>(a >> (8 * i))) +
            static_cast<int8_t>(static_cast<uint8_t>(b >> (8 * i)));
    if (x < -127 || x > 127) throw std::length_error("Laurent exponent out of range");
    k |= static_cast<uint64_t>(static_cast<uint8_t>(static_cast<int8_t>(x))) << (8 * i);
  }
  return k;
}
}  // namespace

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  LaurentPoly r(rank_);
  r.capacity_limit = capacity_limit;
  r.terms_.reserve(terms_.size() * 4 + 16);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) {
      int64_t c;
      if (__builtin_mul_overflow(ca, cb, &c)) throw std::overflow_error("Laurent coefficient");
      r.add_term(add_keys(ka, kb, rank_), c);
    }
  return r;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

LaurentPoly LaurentPoly::scaled(int64_t s) const {
  LaurentPoly r(rank_);
  for (const auto& [k, c] : terms_) r.add_term(k, c * s);
  return r;
}

LaurentPoly LaurentPoly::adams(int k) const {
  LaurentPoly r(rank_);
  for (const auto& [key, c] : terms_) {
    Weight w = unpack(key, rank_);
    for (auto& x : w) x *= k;
    r.add_term(pack(w), c);
  }
  return r;
}

ExteriorDecomposition oracle_decompose(const RootSystem& rs, const WeightSystem& V, int k_max,
                                       size_t capacity) {
  const int n = rs.rank();
  std::vector<LaurentPoly> E(k_max + 1, LaurentPoly(n));
  for (auto& e : E) e.capacity_limit = capacity;
  E[0].add_term(LaurentPoly::pack(Weight(n, 0)), 1);
  int top = 0;
  for (size_t w = 0; w < V.size(); ++w) {
    uint64_t key = LaurentPoly::pack(V.weights[w]);
    for (int64_t m = 0; m < V.mult[w]; ++m) {
      top = std::min(top + 1, k_max);
      for (int k = top; k >= 1; --k) {
        for (const auto& [kk, c] : E[k - 1].terms()) E[k].add_term(add_keys(kk, key, n), c);
      }
    }
  }

  std::vector<LaurentPoly> fund;
  for (int i = 1; i <= n; ++i) fund.push_back(LaurentPoly::from_weights(weight_system(rs, rs.fundamental(i)), n));
  std::map<Exponent, LaurentPoly> cache;
  std::function<const LaurentPoly&(const Exponent&)> product = [&](const Exponent& e) -> const LaurentPoly& {
    auto it = cache.find(e);
    if (it != cache.end()) return it->second;
    int last = -1;
    for (int i = 0; i < n; ++i)
      if (e[i]) last = i;
    LaurentPoly p(n);
    p.capacity_limit = capacity;
    if (last < 0) {
      p.add_term(LaurentPoly::pack(Weight(n, 0)), 1);
    } else {
      Exponent prev = e;
      prev[last]--;
      p = product(prev) * fund[last];
    }
    return cache.emplace(e, std::move(p)).first->second;
  };

  // height of a weight in root coordinates, scaled by the lattice denominator
  std::vector<long> ht(n, 0);
  for (int i = 0; i < n; ++i) {
    mpq_class h = 0;
    for (int j = 0; j < n; ++j) h += rs.inverse_cartan()[i][j];
    h *= rs.lattice_denominator();
    ht[i] = h.get_num().get_si();
  }

  ExteriorDecomposition out(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    LaurentPoly R = E[k];
    while (!R.is_zero()) {
      long best_h = std::numeric_limits<long>::min();
      Weight best;
      int64_t best_c = 0;
      for (const auto& [key, c] : R.terms()) {
        Weight w = LaurentPoly::unpack(key, n);
        if (!rs.is_dominant(w)) continue;
        long h = 0;
        for (int i = 0; i < n; ++i) h += ht[i] * w[i];
        if (h > best_h || (h == best_h && w > best)) {
          best_h = h;
          best = w;
          best_c = c;
        }
      }
      if (best.empty()) throw std::logic_error("remainder without dominant weight");
      Exponent e{};
      for (int i = 0; i < n; ++i) {
        if (best[i] > 255) throw std::overflow_error("exponent exceeds 8 bits");
        e[i] = static_cast<uint8_t>(best[i]);
      }
      out[k][e] += best_c;
      R += product(e).scaled(-best_c);
    }
  }
  return out;
}

namespace {

using ChiPoly = std::map<Exponent, int64_t>;

void axpy(ChiPoly& y, int64_t a, const ChiPoly& x) {
  if (a == 0) return;
  for (const auto& [e, c] : x) {
    int64_t t;
    if (__builtin_mul_overflow(a, c, &t)) throw std::overflow_error("coefficient overflow");
    int64_t& s = y[e];
    if (__builtin_add_overflow(s, t, &s)) throw std::overflow_error("coefficient overflow");
    if (s == 0) y.erase(e);
  }
}

int64_t binom(int n, int k) {
  int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

ExteriorDecomposition extend_exterior_range(const ExteriorDecomposition& low, int n, int r) {
  const int d = n - r;
  const int K = d / 2;
  if (static_cast<int>(low.size()) < K + 1) throw std::invalid_argument("need e_k for k <= (n-r)/2");
  // a_j: coefficient of mu^j in det(mu - g) = sum_k (-1)^k e_k mu^(n-k)
  auto a_of = [&](int j) {
    ChiPoly p;
    int k = n - j;
    axpy(p, (k % 2) ? -1 : 1, low.at(k));
    return p;
  };
  std::vector<ChiPoly> q(d + 1);
  for (int m = d; m >= d - K; --m) {
    ChiPoly v = a_of(m + r);
    for (int i = 0; i < r; ++i) {
      int idx = m + r - i;
      if (idx > d) continue;
      int64_t coef = binom(r, i) * (((r - i) % 2) ? -1 : 1);
      axpy(v, -coef, q[idx]);
    }
    q[m] = v;
  }
  for (int m = 0; m < d - K; ++m) q[m] = q[d - m];
  // a = (mu - 1)^r q
  std::vector<ChiPoly> a(n + 1);
  for (int m = 0; m <= d; ++m)
    for (int i = 0; i <= r; ++i) axpy(a[m + i], binom(r, i) * (((r - i) % 2) ? -1 : 1), q[m]);
  ExteriorDecomposition out(n + 1);
  for (int k = 0; k <= n; ++k) {
    out[k] = a[n - k];
    if (k % 2) {
      for (auto& [e, c] : out[k]) c = -c;
    }
  }
  return out;
}

}  // namespace wedge
