#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wedge {

// Weights are Dynkin labels, i.e. coordinates in the fundamental-weight basis.
using Weight = std::vector<int>;
using IntMatrix = std::vector<std::vector<int>>;

// Simple Lie algebra of type A-G. Node order is Bourbaki's except for E8,
// which uses the chain 1-2-3-4-5-6-7 with node 8 attached to node 3
// (omega_7 is the adjoint, omega_1 the 3875).
class RootSystem {
 public:
  static RootSystem make(char family, int rank);
  static RootSystem parse(const std::string& name);  // "A2", "G2", "D4", "E8", ...

  const std::string& name() const { return name_; }
  char family() const { return family_; }
  int rank() const { return rank_; }
  // A_ij = <alpha_i, alpha_j^vee>; row i holds the Dynkin labels of alpha_i.
  const IntMatrix& cartan() const { return cartan_; }
  const std::vector<std::vector<int>>& positive_roots_alpha() const { return pos_alpha_; }
  const std::vector<Weight>& positive_roots() const { return pos_omega_; }
  int num_positive_roots() const { return static_cast<int>(pos_alpha_.size()); }
  int coxeter_number() const { return 2 * num_positive_roots() / rank_; }
  Weight rho() const { return Weight(rank_, 1); }
  Weight highest_root() const;
  Weight fundamental(int i) const;  // 1-based
  Weight simple_root(int i) const;  // 1-based, omega coordinates

  std::vector<mpq_class> to_alpha(const Weight& w) const;
  Weight from_alpha(const std::vector<int>& a) const;
  // |det A|; alpha-coordinates of weights have this denominator.
  int lattice_denominator() const { return det_; }
  // (A^{-1})_{ij} = alpha_j-coordinate of omega_i.
  const std::vector<std::vector<mpq_class>>& inverse_cartan() const { return inv_; }
  // alpha-coordinates of rho
  std::vector<mpq_class> rho_alpha() const;
  // coroot coordinates of rho^vee (solves A c = 1)
  std::vector<mpq_class> rho_coroot() const;
  const std::vector<mpq_class>& root_lengths() const { return d_; }  // (alpha_i, alpha_i)/2

  mpq_class inner(const Weight& a, const Weight& b) const;
  bool is_dominant(const Weight& w) const;
  bool dominance_leq(const Weight& mu, const Weight& lambda) const;
  bool in_root_lattice(const Weight& w) const;
  Weight reflect(const Weight& w, int i) const;  // 0-based node
  Weight dominant_conjugate(const Weight& w) const;
  mpz_class weyl_dimension(const Weight& lambda) const;

 private:
  void finish();

  std::string name_;
  char family_ = 'A';
  int rank_ = 0;
  int det_ = 1;
  IntMatrix cartan_;
  std::vector<mpq_class> d_;
  std::vector<std::vector<mpq_class>> inv_;
  std::vector<std::vector<mpq_class>> gram_;  // (omega_i, omega_j)
  std::vector<std::vector<int>> pos_alpha_;
  std::vector<Weight> pos_omega_;
};

// Weights of an irreducible module with multiplicities. Every weight except
// the highest has a parent: weights[i] = weights[parent[i]] - alpha_{step[i]}.
struct WeightSystem {
  Weight highest;
  std::vector<Weight> weights;
  std::vector<int64_t> mult;
  std::vector<int> parent;
  std::vector<int> step;
  int64_t dim() const;
  size_t size() const { return weights.size(); }
};

std::map<Weight, int64_t> dominant_multiplicities(const RootSystem& rs, const Weight& highest);
std::vector<Weight> weyl_orbit(const RootSystem& rs, const Weight& dominant);
WeightSystem weight_system(const RootSystem& rs, const Weight& highest);
// Roots plus rank zero weights; equals weight_system(highest_root) as a multiset.
WeightSystem adjoint_weight_system(const RootSystem& rs);

// ASCII exchange format: header with type, highest weight, denominator D,
// then one row per distinct weight with alpha-coordinates times D and the
// multiplicity.
void write_weights_ascii(std::ostream& os, const RootSystem& rs, const WeightSystem& ws);
WeightSystem read_weights_ascii(std::istream& is, const RootSystem& rs);

std::string weight_str(const Weight& w);

}  // namespace wedge
