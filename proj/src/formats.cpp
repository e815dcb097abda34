#include "wedge/formats.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace wedge {

namespace {

void put_le(std::vector<uint8_t>& out, uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint64_t get_le(const uint8_t* p, int bytes) {
  uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

int8_t to_i8(const mpz_class& z, const char* what) {
  if (z < -128 || z > 127) throw FormatError(std::string(what) + " does not fit in 8 bits");
  return static_cast<int8_t>(z.get_si());
}

constexpr size_t kBlock = 64;
constexpr size_t kField = kBlock - 2;  // sign + mantissa bytes

}  // namespace

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to " + path);
}

std::vector<uint8_t> encode_dict(const AdmissibleSet& set) {
  std::vector<uint8_t> out;
  out.reserve(set.size() * set.rank());
  for (const auto& e : set.items())
    for (int j = 0; j < set.rank(); ++j) out.push_back(e[j]);
  return out;
}

AdmissibleSet decode_dict(const std::vector<uint8_t>& bytes, int rank) {
  if (rank <= 0 || bytes.size() % rank) throw FormatError("DictFile size is not a multiple of the rank");
  std::vector<Exponent> items(bytes.size() / rank);
  for (size_t i = 0; i < items.size(); ++i) {
    items[i].fill(0);
    for (int j = 0; j < rank; ++j) items[i][j] = bytes[i * rank + j];
  }
  return AdmissibleSet(rank, std::move(items));
}

std::vector<uint8_t> encode_sol(const DecompTable& t, int K) {
  if (K > t.K()) throw FormatError("SolFile: table has fewer rows than requested");
  std::vector<uint8_t> out;
  out.reserve(t.items() * K * 8);
  for (size_t i = 0; i < t.items(); ++i)
    for (int k = 1; k <= K; ++k) {
      const auto& v = t.get(k, i);
      if (!v.fits_slong_p()) throw FormatError("SolFile: coefficient exceeds 64 bits");
      put_le(out, static_cast<uint64_t>(v.get_si()), 8);
    }
  return out;
}

DecompTable decode_sol(const std::vector<uint8_t>& bytes, const AdmissibleSet& set) {
  const size_t n = set.size();
  if (n == 0 || bytes.size() % (8 * n)) throw FormatError("SolFile size does not match the DictFile");
  const int K = static_cast<int>(bytes.size() / (8 * n));
  DecompTable t(n, K);
  Exponent zero{};
  long z = set.index_of(zero);
  if (z >= 0) t.set(0, static_cast<size_t>(z), 1);
  const uint8_t* p = bytes.data();
  for (size_t i = 0; i < n; ++i) {
    t.mark_solved(i);
    for (int k = 1; k <= K; ++k, p += 8) {
      int64_t v = static_cast<int64_t>(get_le(p, 8));
      if (v) t.set(k, i, mpz_class(static_cast<long>(v)));
    }
  }
  return t;
}

std::vector<uint8_t> encode_usamples(const std::vector<std::vector<GaussianRational>>& u, int rank) {
  std::vector<uint8_t> out;
  out.reserve(u.size() * rank * 4);
  for (const auto& row : u) {
    if (static_cast<int>(row.size()) != rank) throw FormatError("USamples: row length differs from the rank");
    for (const auto& g : row) {
      out.push_back(static_cast<uint8_t>(to_i8(g.re.get_num(), "sample numerator")));
      out.push_back(static_cast<uint8_t>(to_i8(g.re.get_den(), "sample denominator")));
      out.push_back(static_cast<uint8_t>(to_i8(g.im.get_num(), "sample numerator")));
      out.push_back(static_cast<uint8_t>(to_i8(g.im.get_den(), "sample denominator")));
    }
  }
  return out;
}

std::vector<std::vector<GaussianRational>> decode_usamples(const std::vector<uint8_t>& bytes, int rank) {
  if (rank <= 0 || bytes.size() % (4 * rank)) throw FormatError("USamples size is not a multiple of 4*rank");
  std::vector<std::vector<GaussianRational>> u(bytes.size() / (4 * rank));
  const auto* p = reinterpret_cast<const int8_t*>(bytes.data());
  for (auto& row : u)
    for (int j = 0; j < rank; ++j, p += 4) {
      if (p[1] <= 0 || p[3] <= 0) throw FormatError("USamples: non-positive denominator");
      GaussianRational g{mpq_class(p[0], p[1]), mpq_class(p[2], p[3])};
      g.re.canonicalize();
      g.im.canonicalize();
      row.push_back(g);
    }
  return u;
}

void encode_root_block(const Real& x, uint8_t* out, const RootsLayout& layout) {
  std::memset(out, 0, kBlock);
  if (x.is_zero()) return;
  if (!x.is_finite()) throw FormatError("AllRoots: non-finite value");
  Real y(kRootMantissaBits);
  mpfr_set(y.get(), x.get(), MPFR_RNDN);
  long e = mpfr_get_exp(y.get());
  if (e < INT16_MIN || e > INT16_MAX) throw FormatError("AllRoots: exponent out of range");
  mpz_class m;
  mpfr_get_z_2exp(m.get_mpz_t(), y.get());
  const bool neg = m < 0;
  if (neg) m = -m;
  uint8_t field[kField] = {};
  size_t count = 0;
  mpz_export(field, &count, -1, 1, 0, 0, m.get_mpz_t());  // little-endian bytes
  if (neg) field[kField - 1] |= 0x80;
  const uint16_t eu = static_cast<uint16_t>(static_cast<int16_t>(e));
  if (layout.little_endian) {
    out[0] = static_cast<uint8_t>(eu);
    out[1] = static_cast<uint8_t>(eu >> 8);
    std::memcpy(out + 2, field, kField);
  } else {
    out[0] = static_cast<uint8_t>(eu >> 8);
    out[1] = static_cast<uint8_t>(eu);
    for (size_t i = 0; i < kField; ++i) out[2 + i] = field[kField - 1 - i];
  }
}

Real decode_root_block(const uint8_t* in, const RootsLayout& layout) {
  uint8_t field[kField];
  uint16_t eu;
  if (layout.little_endian) {
    eu = static_cast<uint16_t>(in[0] | (in[1] << 8));
    std::memcpy(field, in + 2, kField);
  } else {
    eu = static_cast<uint16_t>((in[0] << 8) | in[1]);
    for (size_t i = 0; i < kField; ++i) field[i] = in[2 + kField - 1 - i];
  }
  const bool neg = field[kField - 1] & 0x80;
  field[kField - 1] &= 0x7f;
  mpz_class m;
  mpz_import(m.get_mpz_t(), kField, -1, 1, 0, 0, field);
  Real x(kRootMantissaBits);
  if (m == 0) return x;
  const long e = static_cast<int16_t>(eu);
  mpfr_set_z_2exp(x.get(), m.get_mpz_t(), e - kRootMantissaBits, MPFR_RNDN);
  if (neg) mpfr_neg(x.get(), x.get(), MPFR_RNDN);
  return x;
}

std::vector<uint8_t> encode_allroots(const std::vector<std::vector<Complex>>& Q, int rank, const RootsLayout& layout) {
  std::vector<uint8_t> out(Q.size() * rank * 2 * kBlock);
  uint8_t* p = out.data();
  for (const auto& row : Q) {
    if (static_cast<int>(row.size()) != rank) throw FormatError("AllRoots: row length differs from the rank");
    for (const auto& q : row) {
      encode_root_block(layout.real_first ? q.re : q.im, p, layout);
      encode_root_block(layout.real_first ? q.im : q.re, p + kBlock, layout);
      p += 2 * kBlock;
    }
  }
  return out;
}

std::vector<std::vector<Complex>> decode_allroots(const std::vector<uint8_t>& bytes, int rank,
                                                  const RootsLayout& layout) {
  const size_t rec = static_cast<size_t>(rank) * 2 * kBlock;
  if (rank <= 0 || bytes.size() % rec) throw FormatError("AllRoots size is not a multiple of the record size");
  std::vector<std::vector<Complex>> Q(bytes.size() / rec);
  const uint8_t* p = bytes.data();
  for (auto& row : Q)
    for (int j = 0; j < rank; ++j, p += 2 * kBlock) {
      Complex q(kRootMantissaBits);
      Real a = decode_root_block(p, layout), b = decode_root_block(p + kBlock, layout);
      q.re = layout.real_first ? a : b;
      q.im = layout.real_first ? b : a;
      row.push_back(std::move(q));
    }
  return Q;
}

std::vector<uint8_t> encode_delta(const std::vector<double>& d) {
  std::vector<uint8_t> out;
  out.reserve(d.size() * 8);
  for (double x : d) {
    uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_le(out, bits, 8);
  }
  return out;
}

std::vector<double> decode_delta(const std::vector<uint8_t>& bytes) {
  if (bytes.size() % 8) throw FormatError("Delta size is not a multiple of 8");
  std::vector<double> d(bytes.size() / 8);
  for (size_t i = 0; i < d.size(); ++i) {
    uint64_t bits = get_le(bytes.data() + 8 * i, 8);
    std::memcpy(&d[i], &bits, 8);
  }
  return d;
}

std::string sha256_hex(const std::vector<uint8_t>& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

}  // namespace wedge
