#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string_view>

namespace wedge {

using u64 = uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 p) { return static_cast<u64>(static_cast<u128>(a) * b % p); }
inline u64 addmod(u64 a, u64 b, u64 p) {
  u64 s = a + b;
  return s >= p ? s - p : s;
}
inline u64 submod(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
u64 powmod(u64 a, u64 e, u64 p);
u64 invmod(u64 a, u64 p);  // p prime, a != 0
bool is_prime_u64(u64 n);  // deterministic Miller-Rabin
// First prime below 2^62 reached by stepping down from a hash of the key;
// attempt selects the attempt-th such prime.
u64 prime_from_key(std::string_view key, int attempt = 0);

u64 mod_z(const mpz_class& z, u64 p);
// a/b mod p; throws std::domain_error when p divides the denominator
u64 mod_q(const mpq_class& q, u64 p);

// Montgomery form for odd p < 2^63.
struct Montgomery {
  u64 p, pinv, r2;  // pinv = -p^{-1} mod 2^64, r2 = 2^128 mod p
  explicit Montgomery(u64 p_);
  u64 reduce(u128 t) const {
    u64 m = static_cast<u64>(t) * pinv;
    u64 r = static_cast<u64>((t + static_cast<u128>(m) * p) >> 64);
    return r >= p ? r - p : r;
  }
  u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
  u64 to(u64 a) const { return mul(a % p, r2); }
  u64 from(u64 a) const { return reduce(a); }
};

}  // namespace wedge
