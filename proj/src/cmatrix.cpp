#include "wedge/cmatrix.hpp"

#include <cmath>

namespace wedge {

namespace {

// upward slack on double-valued norm estimates
constexpr double kSlack = 1.0 + 1e-9;

double unit_roundoff(mpfr_prec_t prec) { return std::ldexp(1.0, 4 - static_cast<int>(prec)); }

}  // namespace

CMatrix::CMatrix(int n_, mpfr_prec_t prec) : n(n_) {
  a.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) a.emplace_back(prec);
}

CMatrix identity(int n, mpfr_prec_t prec) {
  CMatrix m(n, prec);
  for (int i = 0; i < n; ++i) set_si(m.at(i, i), 1);
  return m;
}

CMatrix matmul(const CMatrix& x, const CMatrix& y) {
  CMatrix r(x.n, x.prec());
  Complex s(x.prec());
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j)
      for (int k = 0; k < x.n; ++k) addmul(r.at(i, j), x.at(i, k), y.at(k, j), s);
  return r;
}

double frobenius(const CMatrix& x) {
  double s = 0.0;
  for (const auto& v : x.a) {
    double m = abs_double(v);
    s += m * m;
  }
  return std::sqrt(s) * kSlack;
}

namespace {

// reduces [x | rhs] in place; rhs has w columns
void gauss_jordan(CMatrix x, std::vector<Complex>& rhs, int w) {
  const int n = x.n;
  const mpfr_prec_t prec = x.prec();
  Complex t(prec), s(prec);
  auto R = [&](int i, int j) -> Complex& { return rhs[static_cast<size_t>(i) * w + j]; };
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = abs_double(x.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      double m = abs_double(x.at(i, col));
      if (m > best) best = m, piv = i;
    }
    if (best == 0.0) throw SingularMatrix("zero pivot");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(x.at(piv, j), x.at(col, j));
      for (int j = 0; j < w; ++j) std::swap(R(piv, j), R(col, j));
    }
    inv(t, x.at(col, col));
    for (int j = 0; j < n; ++j) mul(x.at(col, j), x.at(col, j), t);
    for (int j = 0; j < w; ++j) mul(R(col, j), R(col, j), t);
    for (int i = 0; i < n; ++i) {
      if (i == col || x.at(i, col).is_zero()) continue;
      Complex f(prec);
      set(f, x.at(i, col));
      for (int j = 0; j < n; ++j) {
        mul(s, f, x.at(col, j));
        sub(x.at(i, j), x.at(i, j), s);
      }
      for (int j = 0; j < w; ++j) {
        mul(s, f, R(col, j));
        sub(R(i, j), R(i, j), s);
      }
    }
  }
}

}  // namespace

CMatrix inverse(const CMatrix& x) {
  CMatrix r = identity(x.n, x.prec());
  gauss_jordan(x, r.a, x.n);
  return r;
}

std::vector<Complex> solve(const CMatrix& x, const std::vector<Complex>& b) {
  std::vector<Complex> r;
  for (const auto& v : b) {
    r.emplace_back(x.prec());
    set(r.back(), v);
  }
  gauss_jordan(x, r, 1);
  return r;
}

Complex determinant(const CMatrix& x0) {
  CMatrix x = x0;
  const int n = x.n;
  const mpfr_prec_t prec = x.prec();
  Complex det(prec), t(prec), s(prec);
  set_si(det, 1);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = abs_double(x.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      double m = abs_double(x.at(i, col));
      if (m > best) best = m, piv = i;
    }
    if (best == 0.0) return Complex(prec);
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(x.at(piv, j), x.at(col, j));
      neg(det, det);
    }
    mul(det, det, x.at(col, col));
    inv(t, x.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      Complex f(prec);
      mul(f, x.at(i, col), t);
      for (int j = col; j < n; ++j) {
        mul(s, f, x.at(col, j));
        sub(x.at(i, j), x.at(i, j), s);
      }
    }
  }
  return det;
}

CMatrix certified_inverse(const CMatrix& x) {
  CMatrix X = inverse(x);
  const int n = x.n;
  CMatrix R = matmul(x, X);
  for (int i = 0; i < n; ++i) {
    Complex one(R.prec());
    set_si(one, 1);
    sub(R.at(i, i), R.at(i, i), one);
  }
  double xn = frobenius(X);
  double r = frobenius(R) + n * frobenius(x) * xn * unit_roundoff(x.prec());
  double s = r + xn * x.rad;
  if (!(s < 0.5)) throw SingularMatrix("inverse not certifiable");
  X.rad = xn * s / (1.0 - s) * kSlack;
  return X;
}

}  // namespace wedge
