#pragma once

#include <cstdint>
#include <vector>

#include "wedge/charcalc.hpp"
#include "wedge/cmatrix.hpp"

namespace wedge {

// Undecorated graph: target[l] for left vertex l+1 is 0 for a horizontal
// arrow (to the next right leaf) or the 1-based index m > l+1 of the left
// vertex it points to.
struct FdbSkeleton {
  std::vector<uint8_t> target;
  int k_left() const { return static_cast<int>(target.size()); }
  int k_right() const;
  // In(v) for left vertex m (1-based)
  std::vector<int> incoming(int m) const;
};

struct FdbGraph {
  FdbSkeleton skeleton;
  std::vector<uint8_t> decoration;  // i(v_l) in 1..n
};

// All k! skeletons, lexicographic in the target vector.
std::vector<FdbSkeleton> enumerate_skeletons(int k_left);
// Decorated graphs grouped by skeleton, decorations lexicographic.
std::vector<FdbGraph> enumerate_graphs(int k_left, int n);
bool is_valid_graph(const FdbGraph& g, int n);

// Taylor coefficients T_d(J) = D^d J / d! of J_ij = d chi_i / d Q_j for all
// d of order <= mis.order() - 1, from the jets of chi over mis.
std::vector<CMatrix> jacobian_taylor(const std::vector<Jet>& chi, const MultiIndexSet& mis);

// Taylor coefficients of J^{-1} from those of J, summing the ordered splits
// d(1) + ... + d(r) = c through the recursion
// T_c(J^{-1}) = -J0^{-1} sum_{0 < d <= c} T_d(J) T_{c-d}(J^{-1}).
std::vector<CMatrix> inverse_taylor(const std::vector<CMatrix>& jt, const MultiIndexSet& mis);

// D^c_chi = sum_d coeff[d] D^d_Q at one sample; coeff indexed over mis.
struct ChiDerivOperator {
  std::vector<int> rows;  // i_1..i_k, 0-based
  std::vector<Complex> coeff;
  std::vector<double> rad;
  size_t nonzero() const;
};

// Sum over graphs and index assignments, with the j-sums fused into a
// dynamic program over the derivative multi-indices still to be applied.
ChiDerivOperator build_operator(const std::vector<int>& rows, const std::vector<CMatrix>& jinv_taylor,
                                const MultiIndexSet& mis);
ChiDerivOperator build_operator(const Exponent& c, const std::vector<CMatrix>& jinv_taylor,
                                const MultiIndexSet& mis);

struct CertifiedValue {
  Complex v;
  double delta = 0.0;
};

// Applies the operator to the Q-jet of F. apriori_norm > 0 adds the
// a-priori chain bound ||L|| * ||delta D|| as a floor for the radius.
CertifiedValue apply_operator(const ChiDerivOperator& op, const Jet& F, double apriori_norm = 0.0);

// D^c_chi F from the jets of chi (fundamental characters) and F over the
// same MultiIndexSet at one sample.
CertifiedValue chi_derivative(const Exponent& c, const std::vector<Jet>& chi, const Jet& F,
                              const MultiIndexSet& mis, double apriori_norm = 0.0);

}  // namespace wedge
