#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "wedge/liealg.hpp"

namespace wedge {

// Exponent vector iota of a monomial chi_1^iota_1 ... chi_r^iota_r (r <= 8).
using Exponent = std::array<uint8_t, 8>;

inline uint64_t exponent_key(const Exponent& e) {
  uint64_t k = 0;
  for (int i = 7; i >= 0; --i) k = (k << 8) | e[i];
  return k;
}
int exponent_degree(const Exponent& e);
uint8_t support_mask(const Exponent& e);
std::string exponent_str(const Exponent& e, int rank);

class AdmissibleSet {
 public:
  AdmissibleSet() = default;
  AdmissibleSet(int rank, std::vector<Exponent> items);

  int rank() const { return rank_; }
  size_t size() const { return items_.size(); }
  const Exponent& operator[](size_t i) const { return items_[i]; }
  const std::vector<Exponent>& items() const { return items_; }
  // -1 when absent
  long index_of(const Exponent& e) const;
  bool contains(const Exponent& e) const { return index_of(e) >= 0; }
  int max_degree() const;
  // items grouped by support mask
  const std::vector<std::vector<uint32_t>>& by_support() const { return by_support_; }

 private:
  int rank_ = 0;
  std::vector<Exponent> items_;
  std::unordered_map<uint64_t, uint32_t> index_;
  std::vector<std::vector<uint32_t>> by_support_;
};

// All iota with sum_j iota_j omega_j <= bound coordinatewise in the root basis
// and sum_j iota_j omega_j in the root lattice. Sorted lexicographically.
AdmissibleSet enumerate_admissible(const RootSystem& rs, const std::vector<mpq_class>& bound_alpha);
// Uniform bound 2 rho (dominance below 2 rho).
AdmissibleSet enumerate_admissible(const RootSystem& rs);
// Root-basis bound for exterior degrees <= K of a module: coordinatewise
// max over k <= K of the sum of the k largest coefficients among its weights.
std::vector<mpq_class> exterior_degree_bound(const RootSystem& rs, const WeightSystem& ws, int K);

enum class ClassKind : uint8_t { Pair = 0, Single = 1, Overflow = 2 };

struct ClassTag {
  uint8_t phi = 0;
  ClassKind kind = ClassKind::Overflow;
  uint8_t m1 = 0, m2 = 0;
  int8_t sigma1 = -1, sigma2 = -1;  // 0-based nodes, -1 when absent
  bool operator==(const ClassTag& o) const {
    return phi == o.phi && kind == o.kind && m1 == o.m1 && m2 == o.m2;
  }
  std::string str(int rank) const;
};

// sigma(phi,1), sigma(phi,2): support nodes of largest and next-largest
// fundamental dimension, lower index first on ties.
std::pair<int, int> class_sigma(uint8_t phi, const std::vector<mpz_class>& dims, int rank);
ClassTag classify(const Exponent& e, int d_max, const std::vector<mpz_class>& dims, int rank);
std::vector<mpz_class> fundamental_dimensions(const RootSystem& rs);

enum class Order { Less, Greater, Incomparable };
Order weak_order(const ClassTag& a, const ClassTag& b);
int class_stage(const ClassTag& t);

struct ClassInfo {
  ClassTag tag;
  std::vector<uint32_t> members;  // indices into the admissible set
  std::vector<int> free_coords;   // support coordinates sampled freely
  Exponent deriv{};               // derivative multi-index (pinned coordinates)
  int layer = 0;
};

struct Partition {
  std::vector<ClassInfo> classes;  // ordered by layer then tag
  std::vector<uint32_t> class_of;  // admissible index -> class index
  int num_layers = 0;
  int d_max = 0;
};

Partition partition_admissible(const AdmissibleSet& set, const RootSystem& rs, int d_max);
// Solved exponents that contribute to the rows of a class (support inside
// phi, pinned coordinates equal to the derivative order, not in the class).
std::vector<uint32_t> class_priors(const AdmissibleSet& set, const ClassInfo& cls);

}  // namespace wedge
