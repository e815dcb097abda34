#include "wedge/charpoly.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace wedge {

void trim(ZPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

ZPoly zpoly_mul(const ZPoly& a, const ZPoly& b) {
  if (a.empty() || b.empty()) return {};
  ZPoly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

bool zpoly_divide(const ZPoly& a_in, const ZPoly& b_in, ZPoly& q) {
  ZPoly a = a_in, b = b_in;
  trim(a);
  trim(b);
  if (b.empty()) throw std::domain_error("division by the zero polynomial");
  if (a.empty()) {
    q.clear();
    return true;
  }
  if (a.size() < b.size()) return false;
  ZPoly out(a.size() - b.size() + 1, 0);
  const mpz_class& lead = b.back();
  for (size_t i = out.size(); i-- > 0;) {
    const mpz_class& top = a[i + b.size() - 1];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lead.get_mpz_t())) return false;
    mpz_class c = top / lead;
    out[i] = c;
    for (size_t j = 0; j < b.size(); ++j) a[i + j] -= c * b[j];
  }
  for (const auto& x : a)
    if (x != 0) return false;
  q = std::move(out);
  return true;
}

ZPoly cyclotomic(int n) {
  if (n < 1) throw std::invalid_argument("cyclotomic: n >= 1");
  static std::mutex mu;
  static std::map<int, ZPoly> memo;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
  }
  ZPoly p(n + 1, 0);
  p[0] = -1;
  p[n] = 1;
  for (int d = 1; d < n; ++d) {
    if (n % d) continue;
    ZPoly q;
    if (!zpoly_divide(p, cyclotomic(d), q)) throw std::logic_error("cyclotomic recursion");
    p = std::move(q);
  }
  std::lock_guard<std::mutex> lock(mu);
  memo[n] = p;
  return p;
}

std::string zpoly_str(const ZPoly& p) {
  std::ostringstream os;
  bool first = true;
  for (size_t i = p.size(); i-- > 0;) {
    if (p[i] == 0) continue;
    mpz_class c = p[i];
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    c = abs(c);
    if (c != 1 || i == 0) os << c.get_str();
    if (i > 0) os << (c != 1 ? "*" : "") << "mu" << (i > 1 ? "^" + std::to_string(i) : "");
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

std::string CyclotomicFactorization::str() const {
  std::ostringstream os;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) os << " ";
    os << "Phi_" << factors[i].first;
    if (factors[i].second != 1) os << "^" << factors[i].second;
  }
  ZPoly one{1};
  if (remainder != one) os << (factors.empty() ? "" : " * ") << "(" << zpoly_str(remainder) << ")";
  return os.str();
}

CyclotomicFactorization cyclotomic_factor(const ZPoly& p_in, int max_n) {
  CyclotomicFactorization out;
  ZPoly p = p_in;
  trim(p);
  for (int n = 1; n <= max_n && p.size() > 1; ++n) {
    const ZPoly phi = cyclotomic(n);
    if (phi.size() > p.size()) continue;
    int e = 0;
    ZPoly q;
    while (p.size() >= phi.size() && zpoly_divide(p, phi, q)) {
      p = std::move(q);
      ++e;
    }
    if (e) out.factors.emplace_back(n, e);
  }
  out.remainder = p;
  return out;
}

std::vector<mpq_class> exterior_values(const std::vector<mpq_class>& chi, const DecompTable& table,
                                       const AdmissibleSet& set) {
  const int r = set.rank();
  if (static_cast<int>(chi.size()) != r) throw std::invalid_argument("character vector has the wrong rank");
  std::vector<std::vector<mpq_class>> pw(r);
  for (int j = 0; j < r; ++j) pw[j].push_back(1);
  std::vector<mpq_class> out(table.K() + 1, 0);
  mpq_class mono;
  for (size_t i = 0; i < set.size(); ++i) {
    const auto& e = set[i];
    mono = 1;
    for (int j = 0; j < r; ++j) {
      while (pw[j].size() <= e[j]) pw[j].push_back(pw[j].back() * chi[j]);
      if (e[j]) mono *= pw[j][e[j]];
    }
    for (int k = 0; k <= table.K(); ++k) {
      const auto& N = table.get(k, i);
      if (N != 0) out[k] += mono * N;
    }
  }
  return out;
}

CharPolyResult char_poly(const CharPolySpec& spec, const DecompTable& table, const AdmissibleSet& set, int n) {
  if (table.K() < n) throw std::invalid_argument("char_poly: table covers k <= " + std::to_string(table.K()) + " only");
  CharPolyResult res;
  res.exterior = exterior_values(spec.chi, table, set);
  res.exterior.resize(n + 1);
  res.det.assign(n + 1, 0);
  for (int k = 0; k <= n; ++k) res.det[n - k] = (k % 2) ? mpq_class(-res.exterior[k]) : res.exterior[k];
  const int d0 = spec.zero_multiplicity < 0 ? set.rank() : spec.zero_multiplicity;
  QPoly p = res.det;
  for (int t = 0; t < d0; ++t) {
    // synthetic division by (mu - 1)
    QPoly q(p.size() - 1);
    mpq_class carry = 0;
    for (size_t i = p.size(); i-- > 1;) {
      carry += p[i];
      q[i - 1] = carry;
    }
    if (carry + p[0] != 0) throw std::domain_error("(mu - 1)^d0 does not divide the characteristic polynomial");
    p = std::move(q);
  }
  res.reduced = std::move(p);
  return res;
}

std::vector<mpq_class> reduced_top_coefficients(const std::vector<mpq_class>& e, int d0, size_t count) {
  if (e.size() < count) throw std::invalid_argument("need e_0 .. e_{count-1}");
  auto binom = [](long a, long b) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(a), static_cast<unsigned long>(b));
    return r;
  };
  std::vector<mpq_class> c(count, 0);
  for (size_t j = 0; j < count; ++j)
    for (size_t i = 0; i <= j; ++i) {
      const long m = static_cast<long>(j - i);
      // coefficient of mu^-m in (1 - 1/mu)^(-d0)
      mpz_class w = d0 == 0 ? mpz_class(m == 0 ? 1 : 0) : binom(d0 - 1 + m, m);
      mpq_class t = e[i] * w;
      c[j] += (i % 2) ? mpq_class(-t) : t;
    }
  return c;
}

std::vector<mpq_class> trace_basis(const QPoly& p_in) {
  QPoly p = p_in;
  if (p.empty() || (p.size() - 1) % 2) throw std::invalid_argument("trace_basis: need even degree");
  const size_t m = (p.size() - 1) / 2;
  std::vector<mpq_class> q(m + 1, 0);
  for (size_t k = m + 1; k-- > 0;) {
    q[k] = p[m + k];
    if (q[k] == 0) continue;
    mpz_class b = 1;
    for (size_t t = 0; t <= k; ++t) {
      p[m + k - 2 * t] -= q[k] * b;  // C(k, t) mu^(m + k - 2t)
      b = b * (k - t) / (t + 1);
    }
  }
  for (const auto& x : p)
    if (x != 0) throw std::invalid_argument("trace_basis: polynomial is not palindromic");
  return q;
}

std::vector<mpq_class> trace_basis_top(const std::vector<mpq_class>& top, size_t m) {
  const size_t w = std::min(top.size(), m + 1);
  std::vector<mpq_class> p(top.begin(), top.begin() + static_cast<long>(w));  // p[j] ~ mu^(2m-j)
  std::vector<mpq_class> q(w);
  for (size_t j = 0; j < w; ++j) {
    q[j] = p[j];  // q_(m-j)
    if (q[j] == 0) continue;
    const size_t k = m - j;
    mpz_class b = 1;
    for (size_t t = 0; t <= k && j + 2 * t < w; ++t) {
      p[j + 2 * t] -= q[j] * b;
      b = b * (k - t) / (t + 1);
    }
  }
  return q;
}

std::vector<mpq_class> symmetric_basis(const QPoly& p) {
  if (p.empty() || (p.size() - 1) % 2) throw std::invalid_argument("symmetric_basis: need even degree");
  const size_t m = (p.size() - 1) / 2;
  std::vector<mpq_class> q(m + 1);
  for (size_t k = 0; k <= m; ++k) {
    if (p[m + k] != p[m - k]) throw std::invalid_argument("symmetric_basis: polynomial is not palindromic");
    q[k] = k == 0 ? mpq_class(p[m] / 2) : p[m + k];
  }
  return q;
}

}  // namespace wedge
