#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/linsolve.hpp"

namespace wedge {

// Dense polynomials in mu, index i holds the coefficient of mu^i.
using ZPoly = std::vector<mpz_class>;
using QPoly = std::vector<mpq_class>;

void trim(ZPoly& p);
void trim(QPoly& p);
ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b);
// exact division; false (and q untouched) when b does not divide a
bool zpoly_divide(const ZPoly& a, const ZPoly& b, ZPoly& q);
ZPoly cyclotomic(int n);
std::string zpoly_str(const ZPoly& p);

struct CyclotomicFactorization {
  std::vector<std::pair<int, int>> factors;  // (n, exponent), increasing n
  ZPoly remainder;                            // not divisible by any Phi_n, n <= bound
  std::string str() const;                    // "Phi_1^2 Phi_2^10 ..."
};

// Greedy division by Phi_1, Phi_2, ..., Phi_max_n.
CyclotomicFactorization cyclotomic_factor(const ZPoly& p, int max_n = 256);

struct CharPolySpec {
  std::vector<mpq_class> chi;     // chi_1 .. chi_r at g
  int zero_multiplicity = -1;     // d0; -1 means the rank (adjoint)
};

struct CharPolyResult {
  std::vector<mpq_class> exterior;  // chi_{wedge^k V}(g), k = 0..n
  QPoly det;                        // det(mu - g), monic of degree n
  QPoly reduced;                    // det / (mu - 1)^d0
};

// chi_{wedge^k}(g) = sum_iota N^(k)_iota prod chi^iota for k = 0..table.K().
std::vector<mpq_class> exterior_values(const std::vector<mpq_class>& chi, const DecompTable& table,
                                       const AdmissibleSet& set);

// Needs the table for all k <= n. Throws std::domain_error when (mu - 1)^d0
// does not divide the determinant.
CharPolyResult char_poly(const CharPolySpec& spec, const DecompTable& table, const AdmissibleSet& set, int n);

// Leading coefficients of det(mu - g) / (mu - 1)^d0, from mu^(n-d0) down, given
// e_0..e_{count-1}; only the top rows of the table are needed.
std::vector<mpq_class> reduced_top_coefficients(const std::vector<mpq_class>& e, int d0, size_t count);

// Palindromic P of degree 2m: P = mu^m sum_k q_k (mu + 1/mu)^k.
std::vector<mpq_class> trace_basis(const QPoly& p);
// q_m, q_(m-1), ... from the leading coefficients of P alone (top[j] is the
// coefficient of mu^(2m-j)); as many entries as top has.
std::vector<mpq_class> trace_basis_top(const std::vector<mpq_class>& top, size_t m);
// Palindromic P of degree 2m: P = mu^m sum_k qt_k (mu^k + mu^-k).
std::vector<mpq_class> symmetric_basis(const QPoly& p);

}  // namespace wedge
