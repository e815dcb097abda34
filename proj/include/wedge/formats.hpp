#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/linsolve.hpp"
#include "wedge/mpfloat.hpp"

// Headerless binary artifacts, one record per admissible exponent in
// enumeration order. Integers and doubles are little-endian.
//
//   DictFile.bin   rank x int8                iota_j
//   SolFile.bin    K x int64                  N^(k), k = 1..K
//   USamples.bin   rank x 4 x int8            u_j = p/q + i r/s
//   AllRoots.bin   rank x 2 x 64 bytes        Re Q_j, Im Q_j
//   Delta.bin      float64                    delta_max
//
// AllRoots block: int16 exponent e (|x| in [2^(e-1), 2^e)), then a 496-bit
// field holding the sign in its top bit and the 495-bit mantissa m below it,
// x = (-1)^s m 2^(e-495). Zero is all bits clear.

namespace wedge {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kRootMantissaBits = 495;

// Byte order of the multi-byte fields and the order of the two halves per
// coordinate; the defaults are what the writers emit.
struct RootsLayout {
  bool little_endian = true;
  bool real_first = true;
};

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<uint8_t>& bytes);

std::vector<uint8_t> encode_dict(const AdmissibleSet& set);
AdmissibleSet decode_dict(const std::vector<uint8_t>& bytes, int rank);

// Rows k = 1..K of the table; entries must fit in 64 bits.
std::vector<uint8_t> encode_sol(const DecompTable& t, int K);
// Sets N^(0) = [iota == 0] and marks every item solved.
DecompTable decode_sol(const std::vector<uint8_t>& bytes, const AdmissibleSet& set);

std::vector<uint8_t> encode_usamples(const std::vector<std::vector<GaussianRational>>& u, int rank);
std::vector<std::vector<GaussianRational>> decode_usamples(const std::vector<uint8_t>& bytes, int rank);

void encode_root_block(const Real& x, uint8_t* out, const RootsLayout& layout = {});
Real decode_root_block(const uint8_t* in, const RootsLayout& layout = {});
std::vector<uint8_t> encode_allroots(const std::vector<std::vector<Complex>>& Q, int rank,
                                     const RootsLayout& layout = {});
std::vector<std::vector<Complex>> decode_allroots(const std::vector<uint8_t>& bytes, int rank,
                                                  const RootsLayout& layout = {});

std::vector<uint8_t> encode_delta(const std::vector<double>& d);
std::vector<double> decode_delta(const std::vector<uint8_t>& bytes);

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::vector<uint8_t>& bytes);

}  // namespace wedge
