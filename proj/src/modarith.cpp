#include "wedge/modarith.hpp"

#include <functional>
#include <stdexcept>

namespace wedge {

u64 powmod(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulmod(r, a, p);
    a = mulmod(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 invmod(u64 a, u64 p) {
  if (a % p == 0) throw std::domain_error("no inverse mod p");
  return powmod(a, p - 2, p);
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool comp = true;
    for (int r = 1; r < s && comp; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) comp = false;
    }
    if (comp) return false;
  }
  return true;
}

namespace {

// FNV-1a, stable across platforms (std::hash is not)
u64 fnv1a(std::string_view s) {
  u64 h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

u64 prime_from_key(std::string_view key, int attempt) {
  u64 top = (1ull << 62) - 1;
  u64 x = (1ull << 61) + fnv1a(key) % (1ull << 60);
  int found = -1;
  for (u64 c = x | 1; c > (1ull << 61); c -= 2) {
    if (c > top) continue;
    if (is_prime_u64(c) && ++found == attempt) return c;
  }
  throw std::runtime_error("prime search exhausted");
}

u64 mod_z(const mpz_class& z, u64 p) {
  mpz_class r, pp;
  mpz_import(pp.get_mpz_t(), 1, 1, sizeof(u64), 0, 0, &p);
  mpz_fdiv_r(r.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t());
  u64 out = 0;
  mpz_export(&out, nullptr, 1, sizeof(u64), 0, 0, r.get_mpz_t());
  return out;
}

u64 mod_q(const mpq_class& q, u64 p) {
  u64 d = mod_z(q.get_den(), p);
  if (d == 0) throw std::domain_error("denominator divisible by p");
  return mulmod(mod_z(q.get_num(), p), invmod(d, p), p);
}

Montgomery::Montgomery(u64 p_) : p(p_) {
  u64 inv = 1;
  for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
  pinv = ~inv + 1;
  u128 r = (static_cast<u128>(1) << 64) % p;
  r2 = static_cast<u64>(r * r % p);
}

}  // namespace wedge
