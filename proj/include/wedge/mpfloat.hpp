#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wedge {

// Default mantissa precision M; stored values carry M+1 bits.
inline constexpr long kDefaultPrecision = 494;
inline constexpr long kGuardBits = 64;

struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Real {
 public:
  explicit Real(mpfr_prec_t prec = 64);
  Real(double v, mpfr_prec_t prec);
  Real(const mpq_class& q, mpfr_prec_t prec);
  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);  // keeps own precision
  Real& operator=(Real&& o) noexcept;
  ~Real();

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  void set_prec(mpfr_prec_t p);  // rounds the current value

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  // binary exponent e with |x| in [2^(e-1), 2^e); LONG_MIN for zero
  long exponent() const;
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  std::string str(int digits = 30) const;

 private:
  mpfr_t v_;
};

struct Complex {
  Real re, im;
  explicit Complex(mpfr_prec_t prec = 64) : re(prec), im(prec) {}
  Complex(double r, double i, mpfr_prec_t prec) : re(r, prec), im(i, prec) {}
  mpfr_prec_t prec() const { return re.prec(); }
  void set_prec(mpfr_prec_t p) {
    re.set_prec(p);
    im.set_prec(p);
  }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_finite() const { return re.is_finite() && im.is_finite(); }
};

struct GaussianRational {
  mpq_class re, im;
  bool operator==(const GaussianRational& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GaussianRational& o) const { return !(*this == o); }
};

GaussianRational operator+(const GaussianRational& a, const GaussianRational& b);
GaussianRational operator-(const GaussianRational& a, const GaussianRational& b);
GaussianRational operator*(const GaussianRational& a, const GaussianRational& b);
GaussianRational gpow(const GaussianRational& a, unsigned e);

// In-place arithmetic; results are rounded to the destination precision.
// Aliasing of destination and sources is allowed.
void set(Complex& r, const Complex& a);
void set(Complex& r, const GaussianRational& q);
void set_si(Complex& r, long re, long im = 0);
void add(Complex& r, const Complex& a, const Complex& b);
void sub(Complex& r, const Complex& a, const Complex& b);
void neg(Complex& r, const Complex& a);
void mul(Complex& r, const Complex& a, const Complex& b);
void mul_si(Complex& r, const Complex& a, long s);
void mul_z(Complex& r, const Complex& a, const mpz_class& s);
void mul_q(Complex& r, const Complex& a, const mpq_class& s);
void mul_2si(Complex& r, const Complex& a, long e);
void div(Complex& r, const Complex& a, const Complex& b);
void inv(Complex& r, const Complex& a);
// r += a*b
void addmul(Complex& r, const Complex& a, const Complex& b, Complex& scratch);
// r += a*s
void addmul_si(Complex& r, const Complex& a, long s, Complex& scratch);
void addmul_z(Complex& r, const Complex& a, const mpz_class& s, Complex& scratch);
void cexp(Complex& r, const Complex& a);
void cpow_si(Complex& r, const Complex& a, long e);

double abs_double(const Complex& a);
double log2_abs(const Complex& a);  // -inf for zero
// max(Exp(re), Exp(im)); LONG_MIN for zero
long exponent(const Complex& a);

// FPC rounding to an M-bit value (M+1 stored mantissa bits), ties to even.
// Throws RangeError when the exponent does not fit the 16-bit storage field.
Complex rnd(const Complex& x, long M);
Real rnd(const Real& x, long M);
// ulp radius eps_x = 2^(Exp(x) - M); 0 for exact zero.
double ulp_radius(const Complex& x, long M);

// Error budget of a certified value: |true - computed| <= delta, eps is the
// input radius it was derived from.
struct ErrorBudget {
  double delta = 0.0;
  double eps = 0.0;
};

// Direct envelope for D^c of sum_w mult * coeff_w * Q^(k w - c) under
// |Q - Qhat| <= eps componentwise. Inputs: log2|Qhat_l|, exponent vectors
// p_w = k w - c, |coeff_w * mult_w| as doubles.
double monomial_envelope(const std::vector<double>& log2_absQ, double eps,
                         const std::vector<std::vector<int>>& exps,
                         const std::vector<double>& abs_coeffs);

// (64 |c|)^{|c|} * delta0 with delta0 the c=0 bound at doubled radius.
double harmonic_bound(int abs_c, double delta0_2eps);

// Bound for D^c p_k: max of the direct envelope and the harmonic formula.
double power_sum_bound(double direct, int abs_c, double delta0_2eps);

// Error of (1/k) sum_m sum_c' binom * p~_m(c') D(k-m, c-c') given magnitudes
// and radii of the factors (already summed over m and c' by the caller).
struct ProductTerm {
  double a, da, b, db;  // |a|, delta a, |b|, delta b
  double weight;        // |binomial * sign|
};
double product_sum_bound(const std::vector<ProductTerm>& terms, double scale);

// ||L||_2 * ||delta_D||_2 and the a-priori operator norm bound.
double chain_bound(double op_norm, const std::vector<double>& deltas);
double jinv_norm3_bound(const std::vector<double>& absQ, double eps);
double apriori_operator_norm(int abs_c, double jinv_norm3);

// Rounds value*2^scale_exp to the nearest Gaussian integer and returns it
// divided by 2^scale_exp when 2^scale_exp * delta < 1/2 and the value lies
// within the certified disk; nullopt otherwise.
std::optional<GaussianRational> lattice_round(const Complex& value, double delta, long scale_exp);

std::string to_string(const GaussianRational& g);

}  // namespace wedge
