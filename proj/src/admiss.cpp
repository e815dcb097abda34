#include "wedge/admiss.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace wedge {

int exponent_degree(const Exponent& e) {
  int s = 0;
  for (auto x : e) s += x;
  return s;
}

uint8_t support_mask(const Exponent& e) {
  uint8_t m = 0;
  for (int i = 0; i < 8; ++i)
    if (e[i]) m |= static_cast<uint8_t>(1u << i);
  return m;
}

std::string exponent_str(const Exponent& e, int rank) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < rank; ++i) os << (i ? "," : "") << int(e[i]);
  os << ')';
  return os.str();
}

AdmissibleSet::AdmissibleSet(int rank, std::vector<Exponent> items)
    : rank_(rank), items_(std::move(items)), by_support_(256) {
  std::sort(items_.begin(), items_.end());
  index_.reserve(items_.size() * 2);
  for (uint32_t i = 0; i < items_.size(); ++i) {
    index_.emplace(exponent_key(items_[i]), i);
    by_support_[support_mask(items_[i])].push_back(i);
  }
}

long AdmissibleSet::index_of(const Exponent& e) const {
  auto it = index_.find(exponent_key(e));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

int AdmissibleSet::max_degree() const {
  int m = 0;
  for (const auto& e : items_) m = std::max(m, exponent_degree(e));
  return m;
}

AdmissibleSet enumerate_admissible(const RootSystem& rs, const std::vector<mpq_class>& bound_alpha) {
  const int n = rs.rank();
  if (n > 8) throw std::invalid_argument("rank > 8 not supported");
  const long D = rs.lattice_denominator();
  // integer coordinates scaled by D
  std::vector<std::vector<long>> W(n, std::vector<long>(n));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      mpq_class x = rs.inverse_cartan()[j][k] * D;
      W[j][k] = x.get_num().get_si();
    }
  std::vector<long> T(n);
  for (int k = 0; k < n; ++k) {
    mpq_class x = bound_alpha[k] * D;
    // floor for the bound
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    T[k] = f.get_si();
  }
  std::vector<Exponent> out;
  Exponent cur{};
  std::vector<long> acc(n, 0);
  auto rec = [&](auto&& self, int j) -> void {
    if (j == n) {
      for (int k = 0; k < n; ++k)
        if (acc[k] % D != 0) return;
      out.push_back(cur);
      return;
    }
    std::vector<long> save = acc;
    for (int m = 0;; ++m) {
      bool ok = true;
      for (int k = 0; k < n; ++k)
        if (acc[k] > T[k]) ok = false;
      if (!ok) break;
      if (m > 255) throw std::overflow_error("exponent exceeds 8 bits");
      cur[j] = static_cast<uint8_t>(m);
      self(self, j + 1);
      for (int k = 0; k < n; ++k) acc[k] += W[j][k];
    }
    acc = save;
    cur[j] = 0;
  };
  rec(rec, 0);
  return AdmissibleSet(n, std::move(out));
}

AdmissibleSet enumerate_admissible(const RootSystem& rs) {
  std::vector<mpq_class> b = rs.rho_alpha();
  for (auto& x : b) x *= 2;
  return enumerate_admissible(rs, b);
}

std::vector<mpq_class> exterior_degree_bound(const RootSystem& rs, const WeightSystem& ws, int K) {
  const int n = rs.rank();
  std::vector<std::vector<mpq_class>> coeff(n);
  for (size_t w = 0; w < ws.size(); ++w) {
    auto a = rs.to_alpha(ws.weights[w]);
    for (int i = 0; i < n; ++i)
      for (int64_t m = 0; m < ws.mult[w]; ++m) coeff[i].push_back(a[i]);
  }
  std::vector<mpq_class> bound(n, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(coeff[i].begin(), coeff[i].end(), std::greater<mpq_class>());
    mpq_class s = 0, best = 0;
    for (int k = 0; k < K && k < static_cast<int>(coeff[i].size()); ++k) {
      s += coeff[i][k];
      best = std::max(best, s);
    }
    bound[i] = best;
  }
  return bound;
}

std::string ClassTag::str(int rank) const {
  std::ostringstream os;
  os << "phi=";
  for (int i = 0; i < rank; ++i) os << ((phi >> i) & 1);
  switch (kind) {
    case ClassKind::Pair:
      os << " (" << int(m1) << "," << int(m2) << ")";
      break;
    case ClassKind::Single:
      os << " (" << int(m1) << ")";
      break;
    case ClassKind::Overflow:
      os << " (>d)";
      break;
  }
  return os.str();
}

std::vector<mpz_class> fundamental_dimensions(const RootSystem& rs) {
  std::vector<mpz_class> d;
  for (int i = 1; i <= rs.rank(); ++i) d.push_back(rs.weyl_dimension(rs.fundamental(i)));
  return d;
}

std::pair<int, int> class_sigma(uint8_t phi, const std::vector<mpz_class>& dims, int rank) {
  int s1 = -1, s2 = -1;
  for (int j = 0; j < rank; ++j) {
    if (!((phi >> j) & 1)) continue;
    if (s1 < 0 || dims[j] > dims[s1]) {
      s2 = s1;
      s1 = j;
    } else if (s2 < 0 || dims[j] > dims[s2]) {
      s2 = j;
    }
  }
  return {s1, s2};
}

ClassTag classify(const Exponent& e, int d_max, const std::vector<mpz_class>& dims, int rank) {
  ClassTag t;
  t.phi = support_mask(e);
  auto [s1, s2] = class_sigma(t.phi, dims, rank);
  t.sigma1 = static_cast<int8_t>(s1);
  t.sigma2 = static_cast<int8_t>(s2);
  if (s1 < 0) {
    t.kind = ClassKind::Overflow;
    return t;
  }
  int a = e[s1];
  if (a > d_max) {
    t.kind = ClassKind::Overflow;
    return t;
  }
  if (s2 < 0) {
    t.kind = ClassKind::Single;
    t.m1 = static_cast<uint8_t>(a);
    return t;
  }
  int b = e[s2];
  if (b > d_max - a) {
    t.kind = ClassKind::Single;
    t.m1 = static_cast<uint8_t>(a);
    return t;
  }
  t.kind = ClassKind::Pair;
  t.m1 = static_cast<uint8_t>(a);
  t.m2 = static_cast<uint8_t>(b);
  return t;
}

int class_stage(const ClassTag& t) { return static_cast<int>(t.kind); }

Order weak_order(const ClassTag& a, const ClassTag& b) {
  int pa = __builtin_popcount(a.phi), pb = __builtin_popcount(b.phi);
  if (pa != pb) return pa < pb ? Order::Less : Order::Greater;
  if (a.phi != b.phi) return Order::Incomparable;
  int sa = class_stage(a), sb = class_stage(b);
  if (sa == sb) return Order::Incomparable;
  return sa < sb ? Order::Less : Order::Greater;
}

Partition partition_admissible(const AdmissibleSet& set, const RootSystem& rs, int d_max) {
  const int n = rs.rank();
  auto dims = fundamental_dimensions(rs);
  auto key_of = [](const ClassTag& t) {
    return std::make_tuple(__builtin_popcount(t.phi), static_cast<int>(t.kind), t.phi, t.m1, t.m2);
  };
  std::map<decltype(key_of(ClassTag{})), ClassInfo> groups;
  for (uint32_t i = 0; i < set.size(); ++i) {
    ClassTag t = classify(set[i], d_max, dims, n);
    auto& g = groups[key_of(t)];
    if (g.members.empty()) g.tag = t;
    g.members.push_back(i);
  }
  Partition p;
  p.d_max = d_max;
  p.class_of.assign(set.size(), 0);
  int last_raw = -1, layer = -1;
  for (auto& [key, g] : groups) {
    int raw = 3 * std::get<0>(key) + std::get<1>(key);
    if (raw != last_raw) {
      ++layer;
      last_raw = raw;
    }
    g.layer = layer;
    const ClassTag& t = g.tag;
    for (int j = 0; j < n; ++j) {
      if (!((t.phi >> j) & 1)) continue;
      bool pinned = (t.kind != ClassKind::Overflow && j == t.sigma1) ||
                    (t.kind == ClassKind::Pair && j == t.sigma2);
      if (!pinned) g.free_coords.push_back(j);
    }
    g.deriv.fill(0);
    if (t.kind != ClassKind::Overflow) g.deriv[t.sigma1] = t.m1;
    if (t.kind == ClassKind::Pair) g.deriv[t.sigma2] = t.m2;
    for (auto m : g.members) p.class_of[m] = static_cast<uint32_t>(p.classes.size());
    p.classes.push_back(std::move(g));
  }
  p.num_layers = layer + 1;
  return p;
}

std::vector<uint32_t> class_priors(const AdmissibleSet& set, const ClassInfo& cls) {
  std::vector<uint32_t> out;
  const uint8_t phi = cls.tag.phi;
  std::vector<int> pinned;
  for (int j = 0; j < set.rank(); ++j)
    if (((phi >> j) & 1) && std::find(cls.free_coords.begin(), cls.free_coords.end(), j) ==
                                cls.free_coords.end())
      pinned.push_back(j);
  std::vector<uint32_t> sorted_members = cls.members;
  std::sort(sorted_members.begin(), sorted_members.end());
  // iterate over submasks of phi
  for (unsigned sub = phi;; sub = (sub - 1) & phi) {
    for (uint32_t idx : set.by_support()[sub]) {
      const Exponent& k = set[idx];
      bool ok = true;
      for (int j : pinned)
        if (k[j] != cls.deriv[j]) ok = false;
      if (!ok) continue;
      if (std::binary_search(sorted_members.begin(), sorted_members.end(), idx)) continue;
      out.push_back(idx);
    }
    if (sub == 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace wedge
