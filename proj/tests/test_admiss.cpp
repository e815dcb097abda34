#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "wedge/admiss.hpp"

using namespace wedge;

namespace {

// Brute force over a box using the dominance test directly.
std::set<Exponent> brute_admissible(const RootSystem& rs, int box) {
  Weight two_rho(rs.rank(), 2);
  std::set<Exponent> out;
  Exponent e{};
  auto rec = [&](auto&& self, int j) -> void {
    if (j == rs.rank()) {
      Weight w(rs.rank());
      for (int i = 0; i < rs.rank(); ++i) w[i] = e[i];
      if (rs.dominance_leq(w, two_rho)) out.insert(e);
      return;
    }
    for (int m = 0; m <= box; ++m) {
      e[j] = static_cast<uint8_t>(m);
      self(self, j + 1);
    }
    e[j] = 0;
  };
  rec(rec, 0);
  return out;
}

}  // namespace

TEST_CASE("A2 admissible set") {
  auto rs = RootSystem::parse("A2");
  auto set = enumerate_admissible(rs);
  std::set<Exponent> got(set.items().begin(), set.items().end());
  std::set<Exponent> want{{0, 0}, {1, 1}, {3, 0}, {0, 3}, {2, 2}};
  CHECK(got == want);
}

TEST_CASE("admissible sets agree with brute-force dominance") {
  for (auto name : {"A2", "A3", "B2", "G2", "D4", "C3"}) {
    auto rs = RootSystem::parse(name);
    auto set = enumerate_admissible(rs);
    auto brute = brute_admissible(rs, 12);
    std::set<Exponent> got(set.items().begin(), set.items().end());
    CHECK_MESSAGE(got == brute, name);
  }
}

TEST_CASE("E8 admissible set size and extremal degree") {
  auto rs = RootSystem::parse("E8");
  auto set = enumerate_admissible(rs);
  CHECK(set.size() == 950077);
  // k*omega_7 <= 2 rho forces k <= 29 via the coefficient of the end node
  CHECK(set.max_degree() == 29);
  Exponent e{};
  e[6] = 29;
  CHECK(set.contains(e));
  e[6] = 30;
  CHECK_FALSE(set.contains(e));
  auto dims = fundamental_dimensions(rs);
  Exponent big{};
  big[6] = 29;
  auto t = classify(big, 5, dims, 8);
  CHECK(t.kind == ClassKind::Overflow);
  CHECK(t.phi == (1u << 6));
}

TEST_CASE("classification and sigma") {
  auto rs = RootSystem::parse("E8");
  auto dims = fundamental_dimensions(rs);
  auto [s1, s2] = class_sigma(0b11110011, dims, 8);
  CHECK(s1 == 1);  // node 2, dim 6696000
  CHECK(s2 == 4);  // node 5, dim 2450240
  Exponent e{1, 1, 0, 0, 1, 1, 1, 1};
  auto t = classify(e, 5, dims, 8);
  CHECK(t.kind == ClassKind::Pair);
  CHECK(t.m1 == 1);
  CHECK(t.m2 == 1);
  Exponent f{1, 2, 0, 0, 4, 1, 1, 1};
  CHECK(classify(f, 5, dims, 8).kind == ClassKind::Single);
  Exponent g{1, 6, 0, 0, 1, 1, 1, 1};
  CHECK(classify(g, 5, dims, 8).kind == ClassKind::Overflow);
  // tie on equal dimensions goes to the lower index
  auto d4 = RootSystem::parse("D4");
  auto dd = fundamental_dimensions(d4);
  auto [a, b] = class_sigma(0b1101, dd, 4);
  CHECK(a == 0);
  CHECK(b == 2);
}

TEST_CASE("partition is a disjoint cover and priors precede their class") {
  for (auto name : {"A2", "A3", "G2", "D4", "B3"}) {
    auto rs = RootSystem::parse(name);
    auto set = enumerate_admissible(rs);
    for (int d : {2, 3, 5}) {
      auto part = partition_admissible(set, rs, d);
      std::vector<int> seen(set.size(), 0);
      for (const auto& c : part.classes)
        for (auto m : c.members) seen[m]++;
      for (int s : seen) CHECK(s == 1);
      for (size_t ci = 0; ci < part.classes.size(); ++ci) {
        const auto& c = part.classes[ci];
        for (auto p : class_priors(set, c)) {
          const auto& pc = part.classes[part.class_of[p]];
          CHECK(pc.layer < c.layer);
          CHECK(weak_order(pc.tag, c.tag) == Order::Less);
        }
        CHECK(static_cast<int>(c.members.size()) >= 1);
      }
    }
  }
}

TEST_CASE("weak order within a support") {
  ClassTag a{0b11, ClassKind::Pair, 1, 1, 0, 1};
  ClassTag b{0b11, ClassKind::Single, 2, 0, 0, 1};
  ClassTag c{0b11, ClassKind::Overflow, 0, 0, 0, 1};
  ClassTag d{0b111, ClassKind::Pair, 1, 1, 0, 1};
  CHECK(weak_order(a, b) == Order::Less);
  CHECK(weak_order(b, c) == Order::Less);
  CHECK(weak_order(c, a) == Order::Greater);
  CHECK(weak_order(c, d) == Order::Less);
  ClassTag e{0b101, ClassKind::Pair, 1, 1, 0, 2};
  CHECK(weak_order(a, e) == Order::Incomparable);
}

TEST_CASE("E8 partition size and layer count") {
  auto rs = RootSystem::parse("E8");
  auto set = enumerate_admissible(rs);
  auto part = partition_admissible(set, rs, 5);
  CHECK(part.classes.size() <= 16u * 256u);
  CHECK(part.num_layers <= 8 * 16);
  size_t biggest = 0;
  for (const auto& c : part.classes) biggest = std::max(biggest, c.members.size());
  CHECK(biggest == 7268);
  for (const auto& c : part.classes)
    if (c.tag.phi == 0b11110011 && c.tag.kind == ClassKind::Overflow) CHECK(c.members.size() == 1051);
}

TEST_CASE("exterior degree bound") {
  auto rs = RootSystem::parse("A2");
  auto adj = adjoint_weight_system(rs);
  auto b1 = exterior_degree_bound(rs, adj, 1);
  CHECK(b1[0] == 1);
  CHECK(b1[1] == 1);
  auto full = exterior_degree_bound(rs, adj, 8);
  CHECK(full[0] == 2);
  CHECK(full[1] == 2);
  auto set1 = enumerate_admissible(rs, b1);
  CHECK(set1.size() == 2);  // 1 and chi1 chi2
}
