#include "wedge/faadibruno.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wedge {

namespace {

constexpr double kSlack = 1.0 + 1e-9;

double unit_roundoff(mpfr_prec_t prec) { return std::ldexp(1.0, 4 - static_cast<int>(prec)); }

}  // namespace

int FdbSkeleton::k_right() const {
  return static_cast<int>(std::count(target.begin(), target.end(), 0));
}

std::vector<int> FdbSkeleton::incoming(int m) const {
  std::vector<int> in;
  for (int l = 0; l < k_left(); ++l)
    if (target[l] == m) in.push_back(l + 1);
  return in;
}

std::vector<FdbSkeleton> enumerate_skeletons(int k) {
  std::vector<FdbSkeleton> out;
  FdbSkeleton cur;
  cur.target.assign(k, 0);
  auto rec = [&](auto&& self, int l) -> void {
    if (l == k) {
      out.push_back(cur);
      return;
    }
    cur.target[l] = 0;
    self(self, l + 1);
    for (int m = l + 2; m <= k; ++m) {
      cur.target[l] = static_cast<uint8_t>(m);
      self(self, l + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<FdbGraph> enumerate_graphs(int k, int n) {
  std::vector<FdbGraph> out;
  for (const auto& sk : enumerate_skeletons(k)) {
    std::vector<uint8_t> dec(k, 1);
    while (true) {
      out.push_back({sk, dec});
      int p = k - 1;
      while (p >= 0 && dec[p] == n) dec[p--] = 1;
      if (p < 0) break;
      ++dec[p];
    }
  }
  return out;
}

bool is_valid_graph(const FdbGraph& g, int n) {
  const int k = g.skeleton.k_left();
  if (static_cast<int>(g.decoration.size()) != k) return false;
  for (int l = 0; l < k; ++l) {
    int t = g.skeleton.target[l];
    if (t != 0 && (t <= l + 1 || t > k)) return false;
    if (g.decoration[l] < 1 || g.decoration[l] > n) return false;
  }
  return g.skeleton.k_right() >= 1 || k == 0;
}

std::vector<CMatrix> jacobian_taylor(const std::vector<Jet>& chi, const MultiIndexSet& mis) {
  const int n = mis.rank();
  const size_t count = mis.order() > 0 ? mis.prefix(mis.order() - 1) : 0;
  const mpfr_prec_t prec = chi.at(0).v[0].prec();
  std::vector<CMatrix> out;
  for (size_t d = 0; d < count; ++d) {
    CMatrix m(n, prec);
    double r2 = 0.0;
    mpq_class inv_fact(1, mis.factorial(d));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        long s = mis.shift(d, j);
        mul_q(m.at(i, j), chi[i].v[s], inv_fact);
        r2 += chi[i].rad[s] * chi[i].rad[s];
      }
    // mul_q rounding is covered by the relative slack of the downstream radii
    m.rad = std::sqrt(r2) / static_cast<double>(mis.factorial(d)) * kSlack +
            frobenius(m) * unit_roundoff(prec);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<CMatrix> inverse_taylor(const std::vector<CMatrix>& jt, const MultiIndexSet& mis) {
  if (jt.empty()) return {};
  const int n = mis.rank();
  const mpfr_prec_t prec = jt[0].prec();
  const double u = unit_roundoff(prec);
  std::vector<CMatrix> H;
  H.push_back(certified_inverse(jt[0]));
  const CMatrix X = H[0];
  const double xn = frobenius(X), dx = X.rad;
  std::vector<double> hn{xn};
  std::vector<double> tn;
  for (const auto& t : jt) tn.push_back(frobenius(t));
  for (size_t c = 1; c < jt.size(); ++c) {
    CMatrix S(n, prec);
    double sigma = 0.0;
    for (const auto& term : mis.leibniz(c)) {
      if (term.a == 0) continue;
      CMatrix p = matmul(jt[term.a], H[term.b]);
      for (size_t e = 0; e < p.a.size(); ++e) add(S.a[e], S.a[e], p.a[e]);
      double da = jt[term.a].rad, eb = H[term.b].rad;
      sigma += da * hn[term.b] + tn[term.a] * eb + da * eb + n * tn[term.a] * hn[term.b] * u;
    }
    CMatrix h = matmul(X, S);
    for (auto& v : h.a) neg(v, v);
    double sn = frobenius(S);
    h.rad = (dx * (sn + sigma) + xn * sigma + n * xn * sn * u) * kSlack;
    hn.push_back(frobenius(h));
    H.push_back(std::move(h));
  }
  return H;
}

size_t ChiDerivOperator::nonzero() const {
  size_t z = 0;
  for (const auto& c : coeff)
    if (!c.is_zero()) ++z;
  return z;
}

namespace {

struct State {
  Complex v;
  double rad = 0.0;
};

}  // namespace

ChiDerivOperator build_operator(const std::vector<int>& rows, const std::vector<CMatrix>& jinv_taylor,
                                const MultiIndexSet& mis) {
  const int n = mis.rank();
  const int k = static_cast<int>(rows.size());
  if (k > mis.order()) throw std::invalid_argument("derivative order exceeds the jet order");
  if (k > 0 && jinv_taylor.size() < mis.prefix(k - 1)) throw std::invalid_argument("incomplete J^-1 table");
  const mpfr_prec_t prec = jinv_taylor.empty() ? 64 : jinv_taylor[0].prec();
  const double u = unit_roundoff(prec);

  // key: derivative multi-indices pending on left vertices l..k-1, then the one on F
  using Key = std::vector<uint8_t>;
  std::map<Key, State> states;
  states[Key(static_cast<size_t>(k + 1) * n, 0)] = State{Complex(prec), 0.0};
  set_si(states.begin()->second.v, 1);

  Complex f(prec), prod(prec);
  for (int l = 0; l < k; ++l) {
    const int i = rows[l];
    std::map<Key, State> next;
    for (const auto& [key, st] : states) {
      Exponent d{};
      for (int t = 0; t < n; ++t) d[t] = key[t];
      long di = mis.index_of(d);
      const CMatrix& Hd = jinv_taylor.at(di);
      const int64_t dfact = mis.factorial(di);
      const double df = static_cast<double>(dfact) * Hd.rad;
      const double sv = abs_double(st.v);
      Key rest(key.begin() + n, key.end());
      for (int j = 0; j < n; ++j) {
        // D^d M_ij with M = (J^{-1})^T
        mul_si(f, Hd.at(j, i), dfact);
        double fv = abs_double(f);
        if (fv == 0.0 && df == 0.0) continue;
        mul(prod, st.v, f);
        double pr = st.rad * (fv + df) + sv * df + abs_double(prod) * u;
        const int slots = k - l - 1;
        for (int t = 0; t <= slots; ++t) {
          // t < slots: vertex l+1+t; t == slots: F
          Key nk = rest;
          nk[static_cast<size_t>(t) * n + j] += 1;
          auto it = next.find(nk);
          if (it == next.end()) {
            State s{Complex(prec), pr};
            set(s.v, prod);
            next.emplace(std::move(nk), std::move(s));
          } else {
            add(it->second.v, it->second.v, prod);
            it->second.rad += pr + abs_double(it->second.v) * u;
          }
        }
      }
    }
    states = std::move(next);
  }

  ChiDerivOperator op;
  op.rows = rows;
  for (size_t c = 0; c < mis.size(); ++c) op.coeff.emplace_back(prec);
  op.rad.assign(mis.size(), 0.0);
  for (const auto& [key, st] : states) {
    Exponent d{};
    for (int t = 0; t < n; ++t) d[t] = key[t];
    long di = mis.index_of(d);
    set(op.coeff[di], st.v);
    op.rad[di] = st.rad * kSlack;
  }
  return op;
}

ChiDerivOperator build_operator(const Exponent& c, const std::vector<CMatrix>& jinv_taylor,
                                const MultiIndexSet& mis) {
  std::vector<int> rows;
  for (int i = 0; i < mis.rank(); ++i)
    for (int m = 0; m < c[i]; ++m) rows.push_back(i);
  return build_operator(rows, jinv_taylor, mis);
}

CertifiedValue apply_operator(const ChiDerivOperator& op, const Jet& F, double apriori_norm) {
  const mpfr_prec_t prec = F.v[0].prec();
  const double u = unit_roundoff(prec);
  CertifiedValue out{Complex(prec), 0.0};
  Complex t(prec);
  double delta = 0.0;
  std::vector<double> dD;
  for (size_t d = 0; d < op.coeff.size(); ++d) {
    if (op.coeff[d].is_zero() && op.rad[d] == 0.0) continue;
    mul(t, op.coeff[d], F.v[d]);
    add(out.v, out.v, t);
    double c = abs_double(op.coeff[d]), fv = abs_double(F.v[d]);
    delta += c * F.rad[d] + op.rad[d] * (fv + F.rad[d]) + (abs_double(t) + abs_double(out.v)) * u;
    dD.push_back(F.rad[d]);
  }
  delta *= kSlack;
  if (apriori_norm > 0.0) delta = std::max(delta, chain_bound(apriori_norm, dD));
  out.delta = delta;
  return out;
}

CertifiedValue chi_derivative(const Exponent& c, const std::vector<Jet>& chi, const Jet& F,
                              const MultiIndexSet& mis, double apriori_norm) {
  auto jt = jacobian_taylor(chi, mis);
  auto h = inverse_taylor(jt, mis);
  auto op = build_operator(c, h, mis);
  return apply_operator(op, F, apriori_norm);
}

}  // namespace wedge
