#include "wedge/mpfloat.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <sstream>

namespace wedge {

Real::Real(mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_zero(v_, 1);
}

Real::Real(double v, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(const mpq_class& q, mpfr_prec_t prec) {
  mpfr_init2(v_, prec);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Real& o) {
  mpfr_init2(v_, o.prec());
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

void Real::set_prec(mpfr_prec_t p) { mpfr_prec_round(v_, p, MPFR_RNDN); }

long Real::exponent() const {
  if (!mpfr_regular_p(v_)) return LONG_MIN;
  return mpfr_get_exp(v_);
}

std::string Real::str(int digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", digits, v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
  return {a.re + b.re, a.im + b.im};
}

GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
  return {a.re - b.re, a.im - b.im};
}

GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussianRational gpow(const GaussianRational& a, unsigned e) {
  GaussianRational r{1, 0}, b = a;
  while (e) {
    if (e & 1u) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

void set(Complex& r, const Complex& a) {
  mpfr_set(r.re.get(), a.re.get(), MPFR_RNDN);
  mpfr_set(r.im.get(), a.im.get(), MPFR_RNDN);
}

void set(Complex& r, const GaussianRational& q) {
  mpfr_set_q(r.re.get(), q.re.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(r.im.get(), q.im.get_mpq_t(), MPFR_RNDN);
}

void set_si(Complex& r, long re, long im) {
  mpfr_set_si(r.re.get(), re, MPFR_RNDN);
  mpfr_set_si(r.im.get(), im, MPFR_RNDN);
}

void add(Complex& r, const Complex& a, const Complex& b) {
  mpfr_add(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void sub(Complex& r, const Complex& a, const Complex& b) {
  mpfr_sub(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_sub(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
}

void neg(Complex& r, const Complex& a) {
  mpfr_neg(r.re.get(), a.re.get(), MPFR_RNDN);
  mpfr_neg(r.im.get(), a.im.get(), MPFR_RNDN);
}

void mul(Complex& r, const Complex& a, const Complex& b) {
  if (&r == &a || &r == &b) {
    Complex t(r.prec());
    mul(t, a, b);
    std::swap(r.re, t.re);
    std::swap(r.im, t.im);
    return;
  }
  mpfr_fmms(r.re.get(), a.re.get(), b.re.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_fmma(r.im.get(), a.re.get(), b.im.get(), a.im.get(), b.re.get(), MPFR_RNDN);
}

void mul_si(Complex& r, const Complex& a, long s) {
  mpfr_mul_si(r.re.get(), a.re.get(), s, MPFR_RNDN);
  mpfr_mul_si(r.im.get(), a.im.get(), s, MPFR_RNDN);
}

void mul_z(Complex& r, const Complex& a, const mpz_class& s) {
  mpfr_mul_z(r.re.get(), a.re.get(), s.get_mpz_t(), MPFR_RNDN);
  mpfr_mul_z(r.im.get(), a.im.get(), s.get_mpz_t(), MPFR_RNDN);
}

void mul_q(Complex& r, const Complex& a, const mpq_class& s) {
  mpfr_mul_q(r.re.get(), a.re.get(), s.get_mpq_t(), MPFR_RNDN);
  mpfr_mul_q(r.im.get(), a.im.get(), s.get_mpq_t(), MPFR_RNDN);
}

void mul_2si(Complex& r, const Complex& a, long e) {
  mpfr_mul_2si(r.re.get(), a.re.get(), e, MPFR_RNDN);
  mpfr_mul_2si(r.im.get(), a.im.get(), e, MPFR_RNDN);
}

void inv(Complex& r, const Complex& a) {
  mpfr_prec_t p = r.prec() + 8;
  Real n(p), t(p);
  mpfr_sqr(n.get(), a.re.get(), MPFR_RNDN);
  mpfr_fma(n.get(), a.im.get(), a.im.get(), n.get(), MPFR_RNDN);
  mpfr_div(t.get(), a.re.get(), n.get(), MPFR_RNDN);
  mpfr_div(n.get(), a.im.get(), n.get(), MPFR_RNDN);
  mpfr_neg(n.get(), n.get(), MPFR_RNDN);
  mpfr_set(r.re.get(), t.get(), MPFR_RNDN);
  mpfr_set(r.im.get(), n.get(), MPFR_RNDN);
}

void div(Complex& r, const Complex& a, const Complex& b) {
  Complex t(r.prec() + 8);
  inv(t, b);
  mul(r, a, t);
}

void addmul(Complex& r, const Complex& a, const Complex& b, Complex& scratch) {
  mul(scratch, a, b);
  add(r, r, scratch);
}

void addmul_si(Complex& r, const Complex& a, long s, Complex& scratch) {
  mul_si(scratch, a, s);
  add(r, r, scratch);
}

void addmul_z(Complex& r, const Complex& a, const mpz_class& s, Complex& scratch) {
  mul_z(scratch, a, s);
  add(r, r, scratch);
}

void cexp(Complex& r, const Complex& a) {
  mpfr_prec_t p = r.prec() + 16;
  Real m(p), c(p), s(p);
  mpfr_exp(m.get(), a.re.get(), MPFR_RNDN);
  mpfr_sin_cos(s.get(), c.get(), a.im.get(), MPFR_RNDN);
  mpfr_mul(r.re.get(), m.get(), c.get(), MPFR_RNDN);
  mpfr_mul(r.im.get(), m.get(), s.get(), MPFR_RNDN);
}

void cpow_si(Complex& r, const Complex& a, long e) {
  Complex base(r.prec() + 16), acc(r.prec() + 16);
  set(base, a);
  if (e < 0) inv(base, base);
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  set_si(acc, 1);
  while (n) {
    if (n & 1ul) mul(acc, acc, base);
    n >>= 1;
    if (n) mul(base, base, base);
  }
  set(r, acc);
}

double abs_double(const Complex& a) {
  return std::hypot(a.re.to_double(), a.im.to_double());
}

double log2_abs(const Complex& a) {
  if (a.is_zero()) return -std::numeric_limits<double>::infinity();
  long e = exponent(a);
  // scale into double range before taking the modulus
  long er = 0, ei = 0;
  double mr = a.re.is_zero() ? 0.0 : mpfr_get_d_2exp(&er, a.re.get(), MPFR_RNDN);
  double mi = a.im.is_zero() ? 0.0 : mpfr_get_d_2exp(&ei, a.im.get(), MPFR_RNDN);
  double xr = a.re.is_zero() ? 0.0 : std::ldexp(mr, static_cast<int>(er - e));
  double xi = a.im.is_zero() ? 0.0 : std::ldexp(mi, static_cast<int>(ei - e));
  return std::log2(std::hypot(xr, xi)) + static_cast<double>(e);
}

long exponent(const Complex& a) { return std::max(a.re.exponent(), a.im.exponent()); }

namespace {
void check_range(const Real& x) {
  long e = x.exponent();
  if (e == LONG_MIN) return;
  if (e > INT16_MAX || e < INT16_MIN) throw RangeError("exponent out of storage range");
}
}  // namespace

Real rnd(const Real& x, long M) {
  Real r(M + 1);
  mpfr_set(r.get(), x.get(), MPFR_RNDN);
  if (!r.is_finite()) throw RangeError("non-finite value");
  check_range(r);
  return r;
}

Complex rnd(const Complex& x, long M) {
  Complex r(M + 1);
  r.re = rnd(x.re, M);
  r.im = rnd(x.im, M);
  return r;
}

double ulp_radius(const Complex& x, long M) {
  long e = exponent(x);
  if (e == LONG_MIN) return 0.0;
  return std::ldexp(1.0, static_cast<int>(e - M));
}

double monomial_envelope(const std::vector<double>& log2_absQ, double eps,
                         const std::vector<std::vector<int>>& exps,
                         const std::vector<double>& abs_coeffs) {
  const size_t r = log2_absQ.size();
  std::vector<double> rel(r);
  for (size_t l = 0; l < r; ++l) {
    double a = std::exp2(log2_absQ[l]);
    double e = eps / a;
    if (!(e < 0.5)) return std::numeric_limits<double>::infinity();
    // per-unit-exponent log growth of the relative deviation factor
    rel[l] = std::log1p(e) - std::log1p(-e);
  }
  double total = 0.0;
  for (size_t w = 0; w < exps.size(); ++w) {
    if (abs_coeffs[w] == 0.0) continue;
    double lg = 0.0, L = 0.0;
    for (size_t l = 0; l < r; ++l) {
      int p = exps[w][l];
      if (p == 0) continue;
      lg += p * log2_absQ[l];
      L += std::abs(p) * rel[l];
    }
    total += abs_coeffs[w] * std::exp2(lg) * std::expm1(L);
  }
  return total * (1.0 + 1e-10);
}

double harmonic_bound(int abs_c, double delta0_2eps) {
  if (abs_c == 0) return delta0_2eps;
  return std::pow(64.0 * abs_c, abs_c) * delta0_2eps;
}

double power_sum_bound(double direct, int abs_c, double delta0_2eps) {
  return std::max(direct, harmonic_bound(abs_c, delta0_2eps));
}

double product_sum_bound(const std::vector<ProductTerm>& terms, double scale) {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight * (t.a * t.db + t.da * t.b + t.da * t.db);
  return s * std::abs(scale) * (1.0 + 1e-10);
}

double chain_bound(double op_norm, const std::vector<double>& deltas) {
  double s = 0.0;
  for (double d : deltas) s += d * d;
  return op_norm * std::sqrt(s);
}

double jinv_norm3_bound(const std::vector<double>& absQ, double eps) {
  double s = 0.0;
  for (double q : absQ) s += (q + 2 * eps) * (q + 2 * eps);
  return 128.0 * s;
}

double apriori_operator_norm(int abs_c, double jinv_norm3) {
  double f = 1.0;
  for (int i = 2; i <= abs_c; ++i) f *= i;
  return f * std::pow(jinv_norm3, abs_c);
}

std::optional<GaussianRational> lattice_round(const Complex& value, double delta, long scale_exp) {
  if (!value.is_finite() || !(delta >= 0.0)) return std::nullopt;
  double sd = std::ldexp(delta, static_cast<int>(scale_exp));
  if (!(sd < 0.5)) return std::nullopt;
  mpfr_prec_t p = value.prec() + std::abs(scale_exp) + 8;
  GaussianRational out;
  double dist2 = 0.0;
  for (int part = 0; part < 2; ++part) {
    const Real& src = part == 0 ? value.re : value.im;
    Real s(p), n(p), d(p);
    mpfr_mul_2si(s.get(), src.get(), scale_exp, MPFR_RNDN);
    mpfr_rint(n.get(), s.get(), MPFR_RNDN);
    mpfr_sub(d.get(), s.get(), n.get(), MPFR_RNDN);
    double dd = d.to_double();
    dist2 += dd * dd;
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), n.get(), MPFR_RNDN);
    mpq_class q(z);
    if (scale_exp >= 0)
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(scale_exp));
    else
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-scale_exp));
    (part == 0 ? out.re : out.im) = q;
  }
  if (std::sqrt(dist2) > sd) return std::nullopt;
  return out;
}

std::string to_string(const GaussianRational& g) {
  std::ostringstream os;
  os << g.re.get_str();
  if (g.im != 0) os << (g.im > 0 ? "+" : "-") << mpq_class(abs(g.im)).get_str() << "i";
  return os.str();
}

}  // namespace wedge
