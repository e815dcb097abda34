#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/liealg.hpp"
#include "wedge/mpfloat.hpp"

namespace wedge {

// Multi-indices d in N^r with |d| <= order, graded then lexicographic, so
// index 0 is d = 0 and lower orders form a prefix.
class MultiIndexSet {
 public:
  struct LeibnizTerm {
    uint32_t a, b;  // a + b = c
    int64_t binom;  // prod_i C(c_i, a_i)
  };

  MultiIndexSet(int rank, int order);
  int rank() const { return rank_; }
  int order() const { return order_; }
  size_t size() const { return items_.size(); }
  // number of indices of order <= g
  size_t prefix(int g) const { return prefix_.at(g); }
  const Exponent& operator[](size_t i) const { return items_[i]; }
  long index_of(const Exponent& d) const;
  const std::vector<LeibnizTerm>& leibniz(size_t c) const { return leibniz_[c]; }
  int degree(size_t i) const { return exponent_degree(items_[i]); }
  // d! = prod_i d_i!
  int64_t factorial(size_t i) const { return fact_[i]; }
  // index of d + e_j, -1 if beyond the order
  long shift(size_t i, int j) const { return shift_[i * rank_ + j]; }

 private:
  int rank_, order_;
  std::vector<Exponent> items_;
  std::vector<size_t> prefix_;
  std::unordered_map<uint64_t, uint32_t> index_;
  std::vector<std::vector<LeibnizTerm>> leibniz_;
  std::vector<int64_t> fact_;
  std::vector<long> shift_;
};

// Derivatives D^d f (plain, not divided by d!) over a MultiIndexSet with
// radii: |D^d f(Q*) - v[d]| <= rad[d] for the true point Q* of the sample.
struct Jet {
  std::vector<Complex> v;
  std::vector<double> rad;
  Jet() = default;
  Jet(size_t n, mpfr_prec_t prec) : rad(n, 0.0) {
    v.reserve(n);
    for (size_t i = 0; i < n; ++i) v.emplace_back(prec);
  }
  size_t size() const { return v.size(); }
};

Jet jet_constant(const MultiIndexSet& mis, long c, mpfr_prec_t prec);
Jet jet_add(const Jet& a, const Jet& b);
Jet jet_sub(const Jet& a, const Jet& b);
Jet jet_scale(const Jet& a, const mpq_class& s);
Jet jet_mul(const MultiIndexSet& mis, const Jet& a, const Jet& b);

// Sample point with its ulp radius.
struct TorusPoint {
  std::vector<Complex> Q;
  double eps = 0.0;
};

enum class Exec { Serial, Parallel };

// D^c of Q -> sum_w mult_w Q^(k w) for all c in mis.
Jet power_sum_jet(const WeightSystem& ws, int k, const TorusPoint& pt, const MultiIndexSet& mis,
                  mpfr_prec_t prec, const IntMatrix& cartan, Exec exec = Exec::Serial);

// Newton recursion k e_k = sum_{m=1}^k (-1)^(m+1) p_m e_{k-m}; p[m-1] is the
// m-th power-sum jet. Returns e_0..e_K.
std::vector<Jet> newton_exterior(const MultiIndexSet& mis, const std::vector<Jet>& p, int K);

// Evaluates fundamental characters and exterior powers of the adjoint
// module. For E8 only omega_1, omega_7, omega_8 are summed directly; the
// other fundamentals come from tensor identities in exterior powers.
class CharacterEngine {
 public:
  explicit CharacterEngine(const RootSystem& rs);

  const RootSystem& roots() const { return rs_; }
  int rank() const { return rs_.rank(); }
  const WeightSystem& adjoint() const { return adj_; }
  int adjoint_dim() const { return static_cast<int>(adj_.dim()); }
  bool uses_identities() const { return e8_; }

  std::vector<Jet> fundamental_jets(const TorusPoint& pt, const MultiIndexSet& mis, mpfr_prec_t prec,
                                    Exec exec = Exec::Serial) const;
  // exterior powers of the adjoint, k = 0..K
  std::vector<Jet> exterior_jets(const TorusPoint& pt, const MultiIndexSet& mis, int K, mpfr_prec_t prec,
                                 Exec exec = Exec::Serial) const;
  // chi(Q) and J_ij = d chi_i / d Q_j
  void values_and_jacobian(const std::vector<Complex>& Q, mpfr_prec_t prec, std::vector<Complex>& chi,
                           std::vector<std::vector<Complex>>& J) const;
  std::vector<Complex> values(const std::vector<Complex>& Q, mpfr_prec_t prec) const;

 private:
  RootSystem rs_;
  bool e8_ = false;
  WeightSystem adj_;
  std::vector<WeightSystem> fund_;  // indexed by node; empty if unused
};

// Single-entry conveniences.
Complex power_sum_deriv(const RootSystem& rs, int j, int k, const Exponent& c, const std::vector<Complex>& Q,
                        mpfr_prec_t prec);
Complex exterior_deriv(const CharacterEngine& eng, int k, const Exponent& c, const std::vector<Complex>& Q,
                       mpfr_prec_t prec);
Complex fundamental_deriv(const CharacterEngine& eng, int i, const Exponent& c, const std::vector<Complex>& Q,
                          mpfr_prec_t prec);

// Torus points of special interest.
std::vector<Complex> principal_element(const RootSystem& rs, mpfr_prec_t prec);
std::vector<Complex> torus_from_coroot(const std::vector<mpq_class>& t_over_2pi_i, mpfr_prec_t prec);

// Laurent polynomials in Q with integer coefficients (exponents packed in
// signed bytes, rank <= 8).
class LaurentPoly {
 public:
  explicit LaurentPoly(int rank = 0) : rank_(rank) {}
  static LaurentPoly from_weights(const WeightSystem& ws, int rank);
  static uint64_t pack(const Weight& w);
  static Weight unpack(uint64_t k, int rank);
  int rank() const { return rank_; }
  size_t size() const { return terms_.size(); }
  const std::unordered_map<uint64_t, int64_t>& terms() const { return terms_; }
  int64_t coeff(const Weight& w) const;
  void add_term(uint64_t key, int64_t c);
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly scaled(int64_t s) const;
  // Q -> Q^k on every monomial
  LaurentPoly adams(int k) const;
  bool is_zero() const { return terms_.empty(); }
  size_t capacity_limit = 50'000'000;

 private:
  int rank_;
  std::unordered_map<uint64_t, int64_t> terms_;
};

// Decomposition of chi_{wedge^k V} into monomials in fundamental characters.
using ExteriorDecomposition = std::vector<std::map<Exponent, int64_t>>;  // index k

// Brute-force reference: expands prod_w (1 + t Q^w) and peels leading
// dominant monomials. Throws std::length_error beyond the term capacity.
ExteriorDecomposition oracle_decompose(const RootSystem& rs, const WeightSystem& V, int k_max,
                                       size_t capacity = 20'000'000);

// Completes e_k for all k in 0..n from k <= (n-r)/2 using
// det(g - mu) = (mu - 1)^r Qpoly(mu) with Qpoly palindromic.
ExteriorDecomposition extend_exterior_range(const ExteriorDecomposition& low, int n, int r);

}  // namespace wedge
