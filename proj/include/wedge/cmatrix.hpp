#pragma once

#include <stdexcept>
#include <vector>

#include "wedge/mpfloat.hpp"

namespace wedge {

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense square complex matrix with a Frobenius-norm error radius.
struct CMatrix {
  int n = 0;
  std::vector<Complex> a;  // row-major
  double rad = 0.0;

  CMatrix() = default;
  CMatrix(int n_, mpfr_prec_t prec);
  Complex& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const Complex& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
  mpfr_prec_t prec() const { return a.empty() ? 64 : a[0].prec(); }
};

CMatrix identity(int n, mpfr_prec_t prec);
CMatrix matmul(const CMatrix& x, const CMatrix& y);
// rad of the result is not propagated by the arithmetic helpers
double frobenius(const CMatrix& x);

// Gauss-Jordan with partial pivoting; throws SingularMatrix on a zero pivot.
CMatrix inverse(const CMatrix& x);
std::vector<Complex> solve(const CMatrix& x, const std::vector<Complex>& b);
Complex determinant(const CMatrix& x);

// Certified inverse: the returned matrix X satisfies
// ||X - (x + E)^{-1}||_F <= X.rad for every ||E||_F <= x.rad.
CMatrix certified_inverse(const CMatrix& x);

}  // namespace wedge
