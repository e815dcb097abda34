#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wedge/inversion.hpp"

using namespace wedge;

namespace {

NrConfig small_config() {
  NrConfig c;
  c.M = 200;
  return c;
}

double dist(const Complex& a, const Complex& b) {
  Complex d(std::max(a.prec(), b.prec()));
  sub(d, a, b);
  return abs_double(d);
}

std::vector<GaussianRational> gq(std::initializer_list<std::pair<mpq_class, mpq_class>> xs) {
  std::vector<GaussianRational> u;
  for (auto& [a, b] : xs) u.push_back({a, b});
  return u;
}

void check_round_trip(const CharacterEngine& eng, const SamplePoint& s, long M) {
  REQUIRE(s.status == SampleStatus::Converged);
  const mpfr_prec_t W = M + kGuardBits;
  std::vector<Complex> Qw;
  for (const auto& q : s.Q) {
    Qw.emplace_back(W);
    set(Qw.back(), q);
    CHECK(q.prec() == M + 1);
  }
  MultiIndexSet mis(eng.rank(), 0);
  auto jets = eng.fundamental_jets(TorusPoint{Qw, s.eps_Q}, mis, W);
  for (int i = 0; i < eng.rank(); ++i) {
    Complex u(W);
    set(u, s.u[i]);
    double r = dist(jets[i].v[0], u);
    CHECK(r <= jets[i].rad[0]);
    CHECK(r < std::ldexp(1.0, -static_cast<int>(M) + 8) * (1 + abs_double(u)) * 64);
  }
  CHECK(s.path.back().first == s.path.back().second);
  for (size_t k = 1; k < s.path.size(); ++k) {
    mpq_class a(s.path[k - 1].first, s.path[k - 1].second), b(s.path[k].first, s.path[k].second);
    CHECK(a < b);
  }
}

// exact rank over Q by fraction-based elimination
size_t rank_q(std::vector<std::vector<mpq_class>> a) {
  size_t rank = 0, cols = a.empty() ? 0 : a[0].size();
  for (size_t c = 0; c < cols && rank < a.size(); ++c) {
    size_t p = rank;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[rank]);
    for (size_t i = rank + 1; i < a.size(); ++i) {
      if (a[i][c] == 0) continue;
      mpq_class f = a[i][c] / a[rank][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST_CASE("sampling set") {
  auto S = sampling_set();
  CHECK(S.size() == 35);
  CHECK(S[0] == GaussianRational{0, 0});
  CHECK(S[1] == GaussianRational{mpq_class(-1, 2), 0});
  for (size_t i = 1; i < S.size(); ++i) {
    mpq_class a = S[i - 1].re * S[i - 1].re + S[i - 1].im * S[i - 1].im;
    mpq_class b = S[i].re * S[i].re + S[i].im * S[i].im;
    CHECK(a <= b);
  }
}

TEST_CASE("coordinate domains") {
  auto rs = RootSystem::parse("A2");
  auto set = enumerate_admissible(rs);
  auto part = partition_admissible(set, rs, 2);
  for (const auto& cls : part.classes) {
    auto dom = coordinate_domain(cls, rs, sampling_set());
    for (const auto& g : dom) CHECK_FALSE((g.re == 0 && g.im == 0));
    if (cls.tag.kind == ClassKind::Overflow && std::popcount(cls.tag.phi) == 1) {
      // rho = alpha_1 + alpha_2: window {-1, 1}
      CHECK(dom[0] == GaussianRational{-1, 0});
      CHECK(dom[1] == GaussianRational{1, 0});
    }
  }
}

TEST_CASE("A2 identity target converges to the identity and is flagged singular") {
  auto rs = RootSystem::parse("A2");
  CharacterEngine eng(rs);
  auto cfg = small_config();
  auto Q0 = homotopy_start(rs, cfg.M + cfg.guard);
  auto s = newton_raphson(eng, gq({{3, 0}, {3, 0}}), Q0, cfg);
  if (s.status == SampleStatus::Converged) certify(eng, s, cfg);
  CHECK(s.status == SampleStatus::Rejected);
  MESSAGE("reason: " << s.reason);
  // linear convergence towards the double root still lands near (1, 1)
  for (const auto& q : s.Q) CHECK(dist(q, Complex(1, 0, 64)) < 1e-6);
}

TEST_CASE("A2 Gaussian-rational target round-trips") {
  auto rs = RootSystem::parse("A2");
  CharacterEngine eng(rs);
  auto cfg = small_config();
  Inverter inv(eng, cfg);
  auto s = inv.solve(gq({{mpq_class(1, 2), 0}, {mpq_class(-1, 2), mpq_class(1, 2)}}));
  check_round_trip(eng, s, cfg.M);
  CHECK(s.eps_Q > 0);
  CHECK(s.det_rel > 1e-10);
}

TEST_CASE("random targets round-trip for small groups") {
  std::mt19937_64 gen(21);
  auto S = sampling_set();
  for (auto name : {"A2", "G2", "B2", "A3", "D4"}) {
    auto rs = RootSystem::parse(name);
    CharacterEngine eng(rs);
    auto cfg = small_config();
    Inverter inv(eng, cfg);
    for (int t = 0; t < 6; ++t) {
      std::vector<GaussianRational> u;
      for (int i = 0; i < rs.rank(); ++i) u.push_back(S[gen() % S.size()]);
      auto s = inv.solve(u);
      if (s.status == SampleStatus::Rejected) {
        MESSAGE(name << " target rejected: " << s.reason);
        continue;
      }
      check_round_trip(eng, s, cfg.M);
    }
  }
}

TEST_CASE("pre-images are deterministic and cached") {
  auto rs = RootSystem::parse("G2");
  CharacterEngine eng(rs);
  auto cfg = small_config();
  Inverter a(eng, cfg), b(eng, cfg);
  auto u = gq({{1, mpq_class(1, 2)}, {mpq_class(-3, 2), 0}});
  auto s1 = a.solve(u), s2 = b.solve(u), s3 = a.solve(u);
  CHECK(a.solves() == 1);
  CHECK(a.cache_size() == 1);
  for (int i = 0; i < 2; ++i) {
    CHECK(mpfr_equal_p(s1.Q[i].re.get(), s2.Q[i].re.get()));
    CHECK(mpfr_equal_p(s1.Q[i].im.get(), s2.Q[i].im.get()));
    CHECK(mpfr_equal_p(s1.Q[i].re.get(), s3.Q[i].re.get()));
  }
}

TEST_CASE("sample selection yields nonsingular class systems") {
  for (auto name : {"A2", "G2", "A3"}) {
    auto rs = RootSystem::parse(name);
    CharacterEngine eng(rs);
    auto set = enumerate_admissible(rs);
    auto part = partition_admissible(set, rs, 2);
    Inverter inv(eng, small_config());
    SamplingOptions opt;
    for (const auto& cls : part.classes) {
      auto cs = select_samples(cls, set, rs, inv, opt);
      REQUIRE(cs.points.size() == cls.members.size());
      std::vector<std::vector<mpq_class>> rows;
      for (const auto& p : cs.points) {
        CHECK(p.status == SampleStatus::Converged);
        for (int j = 0; j < rs.rank(); ++j) {
          bool free = std::find(cls.free_coords.begin(), cls.free_coords.end(), j) != cls.free_coords.end();
          if (!free) CHECK(p.u[j] == GaussianRational{0, 0});
        }
        rows.push_back(sample_row(cls, set, p.u));
      }
      CHECK(rank_q(rows) == cls.members.size());
    }
  }
}

TEST_CASE("selection does not depend on the batch size") {
  auto rs = RootSystem::parse("A3");
  CharacterEngine eng(rs);
  auto set = enumerate_admissible(rs);
  auto part = partition_admissible(set, rs, 2);
  const ClassInfo* big = &part.classes[0];
  for (const auto& c : part.classes)
    if (c.members.size() > big->members.size()) big = &c;
  Inverter i1(eng, small_config()), i2(eng, small_config());
  SamplingOptions o1, o2;
  o1.batch = 1;
  o2.batch = 5;
  o2.parallel = true;
  auto a = select_samples(*big, set, rs, i1, o1), b = select_samples(*big, set, rs, i2, o2);
  REQUIRE(a.points.size() == b.points.size());
  for (size_t k = 0; k < a.points.size(); ++k) CHECK(sample_key(a.points[k].u) == sample_key(b.points[k].u));
}

TEST_CASE("E8: zero target returns the start point") {
  auto rs = RootSystem::parse("E8");
  CharacterEngine eng(rs);
  NrConfig cfg;
  Inverter inv(eng, cfg);
  auto s = inv.solve(std::vector<GaussianRational>(8, GaussianRational{0, 0}));
  REQUIRE(s.status == SampleStatus::Converged);
  auto Q0 = homotopy_start(rs, cfg.M + cfg.guard);
  for (int i = 0; i < 8; ++i) CHECK(dist(s.Q[i], Q0[i]) <= s.eps_Q);
  CHECK(s.refinements == 0);
}

TEST_CASE("E8: degenerate target is detected") {
  auto rs = RootSystem::parse("E8");
  CharacterEngine eng(rs);
  NrConfig cfg;
  Inverter inv(eng, cfg);
  std::vector<GaussianRational> u(8, GaussianRational{0, 0});
  u[1].re = -1;
  u[4].re = 1;
  auto s = inv.solve(u);
  MESSAGE("status " << int(s.status) << " reason " << s.reason << " det_rel " << s.det_rel << " steps " << s.steps
                    << " refinements " << s.refinements);
  CHECK(s.status == SampleStatus::Rejected);
}

TEST_CASE("E8: generic Gaussian target certifies") {
  auto rs = RootSystem::parse("E8");
  CharacterEngine eng(rs);
  NrConfig cfg;
  Inverter inv(eng, cfg);
  std::vector<GaussianRational> u(8, GaussianRational{0, 0});
  u[6] = {mpq_class(1, 2), mpq_class(-1, 2)};
  u[2] = {mpq_class(-3, 2), 1};
  auto s = inv.solve(u);
  check_round_trip(eng, s, cfg.M);
}

TEST_CASE("singular zero fibre snaps to a verified torsion point") {
  auto rs = RootSystem::parse("D4");
  CharacterEngine eng(rs);
  NrConfig cfg;
  Inverter inv(eng, cfg);
  auto s = inv.solve(std::vector<GaussianRational>(4, GaussianRational{0, 0}));
  REQUIRE(s.status == SampleStatus::Converged);
  REQUIRE(s.torsion_order > 0);
  // numerical characters at the snapped point vanish to working precision
  auto chi = eng.values(s.Q, cfg.M + cfg.guard);
  for (const auto& c : chi) CHECK(abs_double(c) < std::ldexp(1.0, -static_cast<int>(cfg.M) + 16));

  // a wrong target is refused by the exact check
  SamplePoint t = s;
  t.u[0] = GaussianRational{1, 0};
  t.status = SampleStatus::Rejected;
  CHECK_FALSE(snap_torsion(rs, t, cfg));
  // non-integral targets are never torsion values
  t.u[0] = GaussianRational{mpq_class(1, 2), 0};
  CHECK_FALSE(snap_torsion(rs, t, cfg));
}
