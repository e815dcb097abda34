#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/charcalc.hpp"
#include "wedge/inversion.hpp"
#include "wedge/modarith.hpp"

namespace wedge {

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonIntegralSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchedulingError : std::logic_error {
  using std::logic_error::logic_error;
};

// Dense row-major integer matrix.
struct ZMatrix {
  size_t rows = 0, cols = 0;
  std::vector<mpz_class> a;
  ZMatrix() = default;
  ZMatrix(size_t r, size_t c) : rows(r), cols(c), a(r * c) {}
  mpz_class& at(size_t i, size_t j) { return a[i * cols + j]; }
  const mpz_class& at(size_t i, size_t j) const { return a[i * cols + j]; }
};

// x = num / den with gcd(den, all num) = 1 and den > 0.
struct RationalSolution {
  mpz_class den = 1;
  ZMatrix num;  // n x K
  u64 prime = 0;
  size_t lifts = 0;       // p-adic digits computed
  size_t checkpoints = 0; // reconstruction attempts
  bool integral() const { return den == 1; }
  mpq_class value(size_t i, size_t j) const;
};

struct DixonOptions {
  std::string key = "dixon";  // seeds the prime choice
  int max_primes = 5;
  bool early_termination = true;
  Exec exec = Exec::Serial;
};

// Solves A X = B (A square) by p-adic lifting from one LU factorisation mod
// p and rational reconstruction; the result is always checked exactly.
// Throws SingularSystem when A is singular modulo max_primes primes.
RationalSolution dixon_solve(const ZMatrix& A, const ZMatrix& B, const DixonOptions& opt = {});
// Rational entries: each row of [A | B] is scaled to integers first.
RationalSolution dixon_solve(const std::vector<std::vector<mpq_class>>& A,
                             const std::vector<std::vector<mpq_class>>& B, const DixonOptions& opt = {});
bool check_solution(const ZMatrix& A, const ZMatrix& B, const RationalSolution& x);

// Wang's rational reconstruction of a mod m with |num| <= N, 0 < den <= D.
bool rational_reconstruct(const mpz_class& a, const mpz_class& m, const mpz_class& N, const mpz_class& D,
                          mpz_class& num, mpz_class& den);

// N^(k)_iota for k = 0..K over an admissible set; solved flags per iota.
class DecompTable {
 public:
  DecompTable() = default;
  DecompTable(size_t n_items, int K) : K_(K), N_(K + 1, std::vector<mpz_class>(n_items)), solved_(n_items, 0) {}
  int K() const { return K_; }
  size_t items() const { return solved_.size(); }
  const mpz_class& get(int k, size_t idx) const { return N_.at(k).at(idx); }
  // distinct idx may be written concurrently
  void set(int k, size_t idx, const mpz_class& v) { N_[k][idx] = v; }
  void mark_solved(size_t idx) { solved_[idx] = 1; }
  bool solved(size_t idx) const { return solved_[idx] != 0; }
  bool complete() const;
  size_t nonzero(int k) const;
  void resize_k(int K);

 private:
  int K_ = 0;
  std::vector<std::vector<mpz_class>> N_;  // [k][idx]
  std::vector<uint8_t> solved_;
};

// Per-class linear system. Rows are samples, columns the class members.
struct ClassSystem {
  ClassTag tag;
  size_t class_index = 0;
  std::vector<uint32_t> unknowns;
  std::vector<int> ks;  // exterior degrees of the right-hand side columns
  std::vector<std::vector<GaussianRational>> mono;  // [row][col] prod_free u^kappa
  std::vector<std::vector<GaussianRational>> rhs;   // [row][k] after prior subtraction
  std::vector<std::vector<mpq_class>> A() const;    // real parts of mono
  std::vector<std::vector<mpq_class>> B() const;    // real parts of rhs
};

// prod over free coordinates of u_j^kappa_j.
GaussianRational sample_monomial(const std::vector<GaussianRational>& u, const Exponent& kappa,
                                 const std::vector<int>& free_coords);

// values[row][col] are the rounded (1/deriv!) D^deriv chi_{wedge^k} values at
// the certified samples, k = ks[col]. Priors must be solved in table.
ClassSystem assemble(const ClassInfo& cls, size_t class_index, const AdmissibleSet& set,
                     const std::vector<SamplePoint>& samples,
                     const std::vector<std::vector<GaussianRational>>& values, const std::vector<int>& ks,
                     const DecompTable& prior);

struct ClassResult {
  size_t class_index = 0;
  std::vector<uint32_t> unknowns;
  std::vector<int> ks;
  std::vector<std::vector<mpz_class>> N;  // [k col][unknown]
  u64 prime = 0;
  size_t lifts = 0;
};

// Dixon solve plus integrality and the imaginary-part consistency check.
ClassResult solve_class(const ClassSystem& sys, const DixonOptions& opt);

// Writes every class result into one table and fills k up to n by the
// palindromic extension (adjoint case, rank r) when K < n.
DecompTable merge(const std::vector<ClassResult>& results, size_t n_items, int K, int n, int r,
                  const AdmissibleSet& set);

ExteriorDecomposition to_decomposition(const DecompTable& t, const AdmissibleSet& set);

}  // namespace wedge
