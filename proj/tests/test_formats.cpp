#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wedge/formats.hpp"

using namespace wedge;

namespace {

// exact value of a block read by hand: m * 2^(e - 495), sign in the top bit
mpq_class block_value(const uint8_t* b) {
  int16_t e = static_cast<int16_t>(b[0] | (b[1] << 8));
  mpz_class m = 0;
  for (int i = 63; i >= 2; --i) m = m * 256 + (i == 63 ? (b[i] & 0x7f) : b[i]);
  mpq_class v(m);
  long s = e - 495;
  if (s >= 0)
    v *= mpq_class(mpz_class(1) << s);
  else
    v /= mpq_class(mpz_class(1) << -s);
  return (b[63] & 0x80) ? mpq_class(-v) : v;
}

mpq_class exact(const Real& x) {
  mpz_class m;
  long e = mpfr_get_z_2exp(m.get_mpz_t(), x.get());
  mpq_class v(m);
  if (e >= 0)
    v *= mpq_class(mpz_class(1) << e);
  else
    v /= mpq_class(mpz_class(1) << -e);
  return v;
}

Real random_real(std::mt19937_64& g, mpfr_prec_t prec) {
  Real x(prec);
  mpz_class m = 0;
  for (int i = 0; i < 8; ++i) m = (m << 64) + static_cast<unsigned long>(g());
  if (g() & 1) m = -m;
  long e = static_cast<long>(g() % 200) - 100 - 512;
  mpfr_set_z_2exp(x.get(), m.get_mpz_t(), e, MPFR_RNDN);
  return x;
}

}  // namespace

TEST_CASE("DictFile round trip") {
  std::vector<Exponent> items(3);
  items[0] = Exponent{};
  items[1] = Exponent{};
  items[1][0] = 2;
  items[1][2] = 1;
  items[2] = Exponent{};
  items[2][1] = 5;
  AdmissibleSet set(3, items);
  auto b = encode_dict(set);
  CHECK(b == std::vector<uint8_t>{0, 0, 0, 0, 5, 0, 2, 0, 1});
  auto back = decode_dict(b, 3);
  REQUIRE(back.size() == 3);
  CHECK(encode_dict(back) == b);
  CHECK_THROWS_AS(decode_dict({1, 2}, 3), FormatError);
}

TEST_CASE("SolFile round trip is byte identical") {
  std::vector<Exponent> items(4);
  for (int i = 0; i < 4; ++i) items[i][0] = static_cast<uint8_t>(i);
  AdmissibleSet set(2, items);
  DecompTable t(4, 3);
  t.set(0, 0, 1);
  t.set(1, 1, 1);
  t.set(2, 2, -7);
  t.set(3, 3, mpz_class("-9223372036854775808"));
  t.set(3, 0, mpz_class("9223372036854775807"));
  for (size_t i = 0; i < 4; ++i) t.mark_solved(i);
  auto b = encode_sol(t, 3);
  REQUIRE(b.size() == 4 * 3 * 8);
  // item 2, k = 2 at offset (2*3 + 1)*8, little-endian -7
  CHECK(b[56] == 0xf9);
  CHECK(b[63] == 0xff);
  auto back = decode_sol(b, set);
  CHECK(back.K() == 3);
  CHECK(back.get(0, 0) == 1);
  CHECK(back.get(2, 2) == -7);
  CHECK(back.get(3, 3) == mpz_class("-9223372036854775808"));
  CHECK(encode_sol(back, 3) == b);
  t.set(1, 2, mpz_class(1) << 70);
  CHECK_THROWS_AS(encode_sol(t, 3), FormatError);
}

TEST_CASE("USamples round trip") {
  std::vector<std::vector<GaussianRational>> u = {
      {{mpq_class(1, 2), mpq_class(-3, 4)}, {mpq_class(-1), mpq_class(0)}},
      {{mpq_class(0), mpq_class(1)}, {mpq_class(5, 8), mpq_class(-1, 8)}}};
  auto b = encode_usamples(u, 2);
  REQUIRE(b.size() == 16);
  CHECK(b[0] == 1);
  CHECK(b[1] == 2);
  CHECK(static_cast<int8_t>(b[2]) == -3);
  CHECK(b[3] == 4);
  CHECK(decode_usamples(b, 2) == u);
  CHECK(encode_usamples(decode_usamples(b, 2), 2) == b);
  std::vector<uint8_t> zero_den{1, 0, 1, 1};
  CHECK_THROWS_AS(decode_usamples(zero_den, 1), FormatError);
}

TEST_CASE("root blocks match a hand decoder") {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    Real x = random_real(g, 495);
    uint8_t blk[64];
    encode_root_block(x, blk, RootsLayout{});
    CHECK(block_value(blk) == exact(x));
    Real y = decode_root_block(blk, RootsLayout{});
    CHECK(exact(y) == exact(x));
  }
  uint8_t blk[64];
  encode_root_block(Real(0.0, 100), blk, RootsLayout{});
  for (auto c : blk) CHECK(c == 0);
  encode_root_block(Real(-1.0, 100), blk, RootsLayout{});
  CHECK(blk[0] == 1);  // exponent 1: 1 = 0.1b * 2^1
  CHECK(blk[63] == 0xc0);
}

TEST_CASE("AllRoots round trip in both layouts") {
  std::mt19937_64 g(5);
  std::vector<std::vector<Complex>> Q(3);
  for (auto& row : Q)
    for (int j = 0; j < 2; ++j) {
      Complex c(495);
      c.re = random_real(g, 495);
      c.im = random_real(g, 495);
      row.push_back(std::move(c));
    }
  for (RootsLayout lay : {RootsLayout{true, true}, RootsLayout{false, true}, RootsLayout{true, false}}) {
    auto b = encode_allroots(Q, 2, lay);
    REQUIRE(b.size() == 3 * 2 * 128);
    auto back = decode_allroots(b, 2, lay);
    REQUIRE(back.size() == 3);
    for (size_t i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(exact(back[i][j].re) == exact(Q[i][j].re));
        CHECK(exact(back[i][j].im) == exact(Q[i][j].im));
      }
    CHECK(encode_allroots(back, 2, lay) == b);
  }
  // a wrong layout guess gives different numbers
  auto b = encode_allroots(Q, 2, RootsLayout{true, true});
  auto swapped = decode_allroots(b, 2, RootsLayout{true, false});
  CHECK(exact(swapped[0][0].re) == exact(Q[0][0].im));
}

TEST_CASE("Delta round trip and digests") {
  std::vector<double> d = {0.0, 1e-300, 3.5, -0.0, 1.0 / 3.0};
  auto b = encode_delta(d);
  CHECK(b.size() == 40);
  CHECK(encode_delta(decode_delta(b)) == b);
  CHECK(b[16 + 7] == 0x40);  // 3.5 = 0x400c000000000000
  CHECK(b[16 + 6] == 0x0c);
  CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  std::vector<uint8_t> abc{'a', 'b', 'c'};
  CHECK(sha256_hex(abc) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
