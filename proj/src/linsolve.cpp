#include "wedge/linsolve.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wedge {

namespace {

using i128 = __int128;

void set_i128(mpz_class& z, i128 v) {
  bool neg = v < 0;
  u128 a = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
  u64 w[2] = {static_cast<u64>(a), static_cast<u64>(a >> 64)};
  mpz_import(z.get_mpz_t(), 2, -1, sizeof(u64), 0, 0, w);
  if (neg) z = -z;
}

// LU factorisation mod p in Montgomery form, unit lower triangle.
struct ModLU {
  size_t n = 0;
  Montgomery mont{3};
  std::vector<u64> lu;
  std::vector<size_t> perm;  // row i of PA is row perm[i] of A

  // false when singular
  bool factor(const std::vector<u64>& a_mod, size_t n_, Exec exec) {
    n = n_;
    lu = a_mod;
    for (auto& x : lu) x = mont.to(x);
    perm.resize(n);
    for (size_t i = 0; i < n; ++i) perm[i] = i;
    const u64 p = mont.p;
    for (size_t k = 0; k < n; ++k) {
      size_t piv = k;
      while (piv < n && lu[piv * n + k] == 0) ++piv;
      if (piv == n) return false;
      if (piv != k) {
        std::swap_ranges(lu.begin() + piv * n, lu.begin() + (piv + 1) * n, lu.begin() + k * n);
        std::swap(perm[piv], perm[k]);
      }
      const u64 inv_piv = mont.to(invmod(mont.from(lu[k * n + k]), p));
      const u64* rowk = &lu[k * n];
      auto eliminate = [&](size_t i) {
        u64* rowi = &lu[i * n];
        if (rowi[k] == 0) return;
        const u64 f = mont.mul(rowi[k], inv_piv);
        rowi[k] = f;
        for (size_t j = k + 1; j < n; ++j) rowi[j] = submod(rowi[j], mont.mul(f, rowk[j]), p);
      };
      const long lo = static_cast<long>(k + 1), hi = static_cast<long>(n);
      if (exec == Exec::Parallel && hi - lo > 32) {
#pragma omp parallel for schedule(static)
        for (long i = lo; i < hi; ++i) eliminate(static_cast<size_t>(i));
      } else {
        for (long i = lo; i < hi; ++i) eliminate(static_cast<size_t>(i));
      }
    }
    return true;
  }

  // x = A^{-1} b mod p for plain residues b; returns plain residues.
  void solve(const u64* b, u64* x, size_t stride) const {
    const u64 p = mont.p;
    std::vector<u64> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = mont.to(b[perm[i] * stride]);
    for (size_t i = 0; i < n; ++i) {
      u64 s = y[i];
      const u64* row = &lu[i * n];
      for (size_t j = 0; j < i; ++j) s = submod(s, mont.mul(row[j], y[j]), p);
      y[i] = s;
    }
    for (size_t ii = n; ii-- > 0;) {
      u64 s = y[ii];
      const u64* row = &lu[ii * n];
      for (size_t j = ii + 1; j < n; ++j) s = submod(s, mont.mul(row[j], y[j]), p);
      // row[ii] != 0 by construction
      y[ii] = mont.mul(s, mont.to(invmod(mont.from(row[ii]), p)));
    }
    for (size_t i = 0; i < n; ++i) x[i * stride] = mont.from(y[i]);
  }
};

// sum_i d_i p^i for digits d_lo..d_hi-1 (offset by lo)
mpz_class combine_digits(const u64* d, size_t stride, size_t count, const std::vector<mpz_class>& ppow2) {
  if (count == 1) {
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, -1, sizeof(u64), 0, 0, d);
    return z;
  }
  size_t level = 0;
  while ((static_cast<size_t>(2) << level) < count) ++level;
  const size_t half = static_cast<size_t>(1) << level;  // largest power of two < count
  mpz_class lo = combine_digits(d, stride, half, ppow2);
  mpz_class hi = combine_digits(d + half * stride, stride, count - half, ppow2);
  return lo + hi * ppow2[level];
}

double log2_abs(const mpz_class& z) {
  if (z == 0) return -1e300;
  long e;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log2(std::fabs(m)) + static_cast<double>(e);
}

}  // namespace

mpq_class RationalSolution::value(size_t i, size_t j) const {
  mpq_class q(num.at(i, j), den);
  q.canonicalize();
  return q;
}

bool rational_reconstruct(const mpz_class& a, const mpz_class& m, const mpz_class& N, const mpz_class& D,
                          mpz_class& num, mpz_class& den) {
  mpz_class r0 = m, r1 = a % m, s0 = 0, s1 = 1, q, t;
  if (r1 < 0) r1 += m;
  while (r1 > N) {
    mpz_fdiv_q(q.get_mpz_t(), r0.get_mpz_t(), r1.get_mpz_t());
    t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (s1 == 0 || abs(s1) > D) return false;
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), s1.get_mpz_t());
  if (g != 1) return false;
  num = s1 < 0 ? mpz_class(-r1) : r1;
  den = abs(s1);
  return true;
}

bool check_solution(const ZMatrix& A, const ZMatrix& B, const RationalSolution& x) {
  const size_t n = A.rows, K = B.cols;
  if (x.num.rows != n || x.num.cols != K || x.den <= 0) return false;
  mpz_class acc;
  for (size_t i = 0; i < n; ++i)
    for (size_t c = 0; c < K; ++c) {
      acc = 0;
      for (size_t j = 0; j < n; ++j) mpz_addmul(acc.get_mpz_t(), A.at(i, j).get_mpz_t(), x.num.at(j, c).get_mpz_t());
      if (acc != B.at(i, c) * x.den) return false;
    }
  return true;
}

RationalSolution dixon_solve(const ZMatrix& A, const ZMatrix& B, const DixonOptions& opt) {
  const size_t n = A.rows, K = B.cols;
  if (A.cols != n || B.rows != n) throw std::invalid_argument("dixon_solve: shape mismatch");
  RationalSolution out;
  out.num = ZMatrix(n, K);
  if (n == 0) return out;

  bool small = true;
  for (const auto& z : A.a)
    if (!z.fits_slong_p()) small = false;
  std::vector<long> a64;
  if (small) {
    a64.resize(n * n);
    for (size_t i = 0; i < n * n; ++i) a64[i] = A.a[i].get_si();
  }

  // Hadamard bound on numerators and denominator of Cramer's rule
  double logH = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mpz_class s = 0;
    for (size_t j = 0; j < n; ++j) s += A.at(i, j) * A.at(i, j);
    mpz_class bmax = 0;
    for (size_t c = 0; c < K; ++c) bmax = std::max(bmax, mpz_class(abs(B.at(i, c))));
    s += bmax * bmax;
    logH += 0.5 * log2_abs(s);
  }

  ModLU lu;
  u64 p = 0;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= opt.max_primes) throw SingularSystem("matrix singular modulo " + std::to_string(opt.max_primes) + " primes");
    p = prime_from_key(opt.key, attempt);
    lu.mont = Montgomery(p);
    std::vector<u64> amod(n * n);
    for (size_t i = 0; i < n * n; ++i) amod[i] = mpz_fdiv_ui(A.a[i].get_mpz_t(), p);
    if (lu.factor(amod, n, opt.exec)) break;
  }
  out.prime = p;
  const double logp = std::log2(static_cast<double>(p));
  const size_t L_max = static_cast<size_t>(std::ceil((2.0 * logH + 2.0) / logp)) + 1;

  // residuals, one column per right-hand side
  std::vector<mpz_class> r(B.a);
  std::vector<u64> digits;  // [L][i][c]
  std::vector<u64> rmod(n * K);
  std::vector<mpz_class> ppow2{mpz_class(static_cast<unsigned long>(p))};

  std::vector<mpz_class> xmod(n * K, 0);  // x mod p^L_done
  size_t L_done = 0;
  mpz_class modulus = 1;

  auto lift_once = [&]() {
    const size_t L = digits.size() / (n * K);
    digits.resize((L + 1) * n * K);
    u64* y = &digits[L * n * K];
    for (size_t i = 0; i < n * K; ++i) rmod[i] = mpz_fdiv_ui(r[i].get_mpz_t(), p);
    auto solve_col = [&](size_t c) { lu.solve(&rmod[c], &y[c], K); };
    if (opt.exec == Exec::Parallel && K > 1) {
#pragma omp parallel for schedule(dynamic)
      for (long c = 0; c < static_cast<long>(K); ++c) solve_col(static_cast<size_t>(c));
    } else {
      for (size_t c = 0; c < K; ++c) solve_col(c);
    }
    // r = (r - A y) / p
    auto update_row = [&](size_t i) {
      mpz_class acc, t;
      for (size_t c = 0; c < K; ++c) {
        if (small) {
          // y = yh 2^31 + yl keeps each partial sum below 2^127
          i128 lo = 0, hi = 0;
          const long* row = &a64[i * n];
          for (size_t j = 0; j < n; ++j) {
            const u64 yj = y[j * K + c];
            lo += static_cast<i128>(row[j]) * static_cast<i128>(yj & 0x7fffffffULL);
            hi += static_cast<i128>(row[j]) * static_cast<i128>(yj >> 31);
          }
          set_i128(acc, hi);
          acc <<= 31;
          set_i128(t, lo);
          acc += t;
        } else {
          acc = 0;
          for (size_t j = 0; j < n; ++j) {
            const u64 yj = y[j * K + c];
            mpz_class yz;
            mpz_import(yz.get_mpz_t(), 1, -1, sizeof(u64), 0, 0, &yj);
            mpz_addmul(acc.get_mpz_t(), A.at(i, j).get_mpz_t(), yz.get_mpz_t());
          }
        }
        mpz_class& ri = r[i * K + c];
        ri -= acc;
        mpz_divexact_ui(ri.get_mpz_t(), ri.get_mpz_t(), p);
      }
    };
    if (opt.exec == Exec::Parallel && n > 16) {
#pragma omp parallel for schedule(static)
      for (long i = 0; i < static_cast<long>(n); ++i) update_row(static_cast<size_t>(i));
    } else {
      for (size_t i = 0; i < n; ++i) update_row(i);
    }
  };

  auto absorb = [&]() {
    const size_t L = digits.size() / (n * K);
    const size_t count = L - L_done;
    while ((static_cast<size_t>(1) << (ppow2.size() - 1)) < count) ppow2.push_back(ppow2.back() * ppow2.back());
    for (size_t e = 0; e < n * K; ++e)
      xmod[e] += combine_digits(&digits[L_done * n * K + e], n * K, count, ppow2) * modulus;
    mpz_class pz(static_cast<unsigned long>(p)), pc;
    mpz_pow_ui(pc.get_mpz_t(), pz.get_mpz_t(), count);
    modulus *= pc;
    L_done = L;
  };

  auto try_reconstruct = [&]() -> bool {
    ++out.checkpoints;
    mpz_class bound = sqrt(mpz_class(modulus / 2));
    mpz_class half = modulus / 2;
    mpz_class D = 1;
    std::vector<mpz_class> num(n * K), den_at(n * K);
    mpz_class s;
    for (size_t e = 0; e < n * K; ++e) {
      s = (D * xmod[e]) % modulus;
      if (s > half) s -= modulus;
      if (abs(s) <= bound) {
        num[e] = s;
        den_at[e] = D;
        continue;
      }
      mpz_class a = s, nn, dd;
      if (a < 0) a += modulus;
      if (!rational_reconstruct(a, modulus, bound, bound / D, nn, dd)) return false;
      D *= dd;
      num[e] = nn;
      den_at[e] = D;
    }
    mpz_class g = D;
    for (size_t e = 0; e < n * K; ++e) {
      num[e] *= D / den_at[e];
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num[e].get_mpz_t());
    }
    for (size_t e = 0; e < n * K; ++e) mpz_divexact(out.num.a[e].get_mpz_t(), num[e].get_mpz_t(), g.get_mpz_t());
    mpz_divexact(out.den.get_mpz_t(), D.get_mpz_t(), g.get_mpz_t());
    return check_solution(A, B, out);
  };

  size_t next_check = 1;
  while (true) {
    lift_once();
    const size_t L = digits.size() / (n * K);
    const bool last = L >= L_max;
    if (last || (opt.early_termination && L == next_check)) {
      absorb();
      out.lifts = L;
      if (try_reconstruct()) return out;
      if (last) throw std::logic_error("dixon_solve: reconstruction failed at the Hadamard bound");
      next_check *= 2;
    }
  }
}

RationalSolution dixon_solve(const std::vector<std::vector<mpq_class>>& A,
                             const std::vector<std::vector<mpq_class>>& B, const DixonOptions& opt) {
  const size_t n = A.size();
  const size_t K = n ? B.at(0).size() : 0;
  ZMatrix Az(n, n), Bz(n, K);
  for (size_t i = 0; i < n; ++i) {
    if (A[i].size() != n || B.at(i).size() != K) throw std::invalid_argument("dixon_solve: shape mismatch");
    mpz_class l = 1;
    for (const auto& q : A[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    for (const auto& q : B[i]) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
    for (size_t j = 0; j < n; ++j) Az.at(i, j) = A[i][j].get_num() * (l / A[i][j].get_den());
    for (size_t c = 0; c < K; ++c) Bz.at(i, c) = B[i][c].get_num() * (l / B[i][c].get_den());
  }
  return dixon_solve(Az, Bz, opt);
}

bool DecompTable::complete() const {
  return std::all_of(solved_.begin(), solved_.end(), [](uint8_t s) { return s != 0; });
}

size_t DecompTable::nonzero(int k) const {
  size_t c = 0;
  for (const auto& v : N_.at(k))
    if (v != 0) ++c;
  return c;
}

void DecompTable::resize_k(int K) {
  N_.resize(K + 1, std::vector<mpz_class>(solved_.size()));
  K_ = K;
}

std::vector<std::vector<mpq_class>> ClassSystem::A() const {
  std::vector<std::vector<mpq_class>> a;
  for (const auto& row : mono) {
    a.emplace_back();
    for (const auto& g : row) a.back().push_back(g.re);
  }
  return a;
}

std::vector<std::vector<mpq_class>> ClassSystem::B() const {
  std::vector<std::vector<mpq_class>> b;
  for (const auto& row : rhs) {
    b.emplace_back();
    for (const auto& g : row) b.back().push_back(g.re);
  }
  return b;
}

GaussianRational sample_monomial(const std::vector<GaussianRational>& u, const Exponent& kappa,
                                 const std::vector<int>& free_coords) {
  GaussianRational m{1, 0};
  for (int j : free_coords)
    if (kappa[j]) m = m * gpow(u[j], kappa[j]);
  return m;
}

ClassSystem assemble(const ClassInfo& cls, size_t class_index, const AdmissibleSet& set,
                     const std::vector<SamplePoint>& samples,
                     const std::vector<std::vector<GaussianRational>>& values, const std::vector<int>& ks,
                     const DecompTable& prior) {
  ClassSystem sys;
  sys.tag = cls.tag;
  sys.class_index = class_index;
  sys.unknowns = cls.members;
  sys.ks = ks;
  if (samples.size() != cls.members.size() || values.size() != samples.size())
    throw std::invalid_argument("assemble: need one sample and one value row per member");
  const auto priors = class_priors(set, cls);
  for (auto idx : priors)
    if (!prior.solved(idx))
      throw SchedulingError("class " + cls.tag.str(set.rank()) + " assembled before prior " +
                            exponent_str(set[idx], set.rank()));
  for (size_t row = 0; row < samples.size(); ++row) {
    const auto& s = samples[row];
    if (s.status != SampleStatus::Converged) throw std::invalid_argument("assemble: uncertified sample");
    const auto& u = s.u;
    std::vector<GaussianRational> mrow;
    for (auto idx : cls.members) mrow.push_back(sample_monomial(u, set[idx], cls.free_coords));
    sys.mono.push_back(std::move(mrow));
    std::vector<GaussianRational> pm;
    for (auto idx : priors) pm.push_back(sample_monomial(u, set[idx], cls.free_coords));
    std::vector<GaussianRational> b;
    for (size_t c = 0; c < ks.size(); ++c) {
      GaussianRational v = values[row].at(c);
      for (size_t t = 0; t < priors.size(); ++t) {
        const mpz_class& N = prior.get(ks[c], priors[t]);
        if (N == 0) continue;
        v.re -= N * pm[t].re;
        v.im -= N * pm[t].im;
      }
      b.push_back(v);
    }
    sys.rhs.push_back(std::move(b));
  }
  return sys;
}

ClassResult solve_class(const ClassSystem& sys, const DixonOptions& opt_in) {
  DixonOptions opt = opt_in;
  opt.key = opt_in.key + ":" + std::to_string(sys.class_index);
  const size_t n = sys.unknowns.size(), K = sys.ks.size();
  auto x = dixon_solve(sys.A(), sys.B(), opt);
  ClassResult res;
  res.class_index = sys.class_index;
  res.unknowns = sys.unknowns;
  res.ks = sys.ks;
  res.prime = x.prime;
  res.lifts = x.lifts;
  if (!x.integral()) {
    for (size_t c = 0; c < K; ++c)
      for (size_t j = 0; j < n; ++j)
        if (x.value(j, c).get_den() != 1) {
          std::ostringstream os;
          os << "non-integral N for class #" << sys.class_index << " k=" << sys.ks[c] << " unknown #" << j
             << ": " << x.value(j, c).get_str();
          throw NonIntegralSolution(os.str());
        }
  }
  res.N.assign(K, std::vector<mpz_class>(n));
  for (size_t c = 0; c < K; ++c)
    for (size_t j = 0; j < n; ++j) res.N[c][j] = x.num.at(j, c);
  // imaginary parts must agree exactly as well
  for (size_t row = 0; row < sys.mono.size(); ++row)
    for (size_t c = 0; c < K; ++c) {
      mpq_class im = 0;
      for (size_t j = 0; j < n; ++j) im += res.N[c][j] * sys.mono[row][j].im;
      if (im != sys.rhs[row][c].im) {
        std::ostringstream os;
        os << "imaginary part mismatch in class #" << sys.class_index << " row " << row << " k=" << sys.ks[c];
        throw NonIntegralSolution(os.str());
      }
    }
  return res;
}

DecompTable merge(const std::vector<ClassResult>& results, size_t n_items, int K, int n, int r,
                  const AdmissibleSet& set) {
  DecompTable t(n_items, K);
  for (const auto& res : results) {
    for (size_t j = 0; j < res.unknowns.size(); ++j) {
      const auto idx = res.unknowns[j];
      if (t.solved(idx))
        throw std::logic_error("merge: " + exponent_str(set[idx], set.rank()) + " solved in two classes");
      t.mark_solved(idx);
      for (size_t c = 0; c < res.ks.size(); ++c) t.set(res.ks[c], idx, res.N[c][j]);
    }
  }
  if (K < n && n > 0) {
    auto full = extend_exterior_range(to_decomposition(t, set), n, r);
    t.resize_k(n);
    for (int k = K + 1; k <= n; ++k)
      for (const auto& [e, c] : full[k]) {
        long idx = set.index_of(e);
        if (idx < 0) throw std::logic_error("merge: extension left the admissible set");
        t.set(k, static_cast<size_t>(idx), mpz_class(static_cast<long>(c)));
      }
  }
  return t;
}

ExteriorDecomposition to_decomposition(const DecompTable& t, const AdmissibleSet& set) {
  ExteriorDecomposition d(t.K() + 1);
  for (int k = 0; k <= t.K(); ++k)
    for (size_t i = 0; i < t.items(); ++i) {
      const auto& v = t.get(k, i);
      if (v == 0) continue;
      if (!v.fits_slong_p()) throw std::overflow_error("coefficient exceeds 64 bits");
      d[k][set[i]] = v.get_si();
    }
  return d;
}

}  // namespace wedge
