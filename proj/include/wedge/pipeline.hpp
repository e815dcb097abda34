#pragma once

#include <map>
#include <string>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/charcalc.hpp"
#include "wedge/faadibruno.hpp"
#include "wedge/formats.hpp"
#include "wedge/inversion.hpp"
#include "wedge/linsolve.hpp"

namespace wedge {

struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string group = "A2";
  int d_max = 5;
  long M = kDefaultPrecision;
  int k_max = -1;          // highest degree solved; -1: (n - r)/2, the rest by extension
  int exterior_bound = 0;  // > 0: reduced set J_K and k <= K only, no extension
  std::vector<GaussianRational> sampling;  // empty: default set
  int workers = 1;
  std::string output_dir;  // empty: nothing written
  bool resume = false;
  long stop_after_classes = -1;  // stop once this many classes are solved
};

// JSON keys match the field names; sampling is a list of ["re", "im"]
// rational strings with power-of-two denominators.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
// Fields that determine the artifacts, canonical key order.
std::string config_json(const RunConfig& c);

enum class ClassStatus : uint8_t { Pending, Sampling, Derived, Solved };
const char* status_name(ClassStatus s);

struct ClassRecord {
  size_t index = 0;
  ClassStatus status = ClassStatus::Pending;
  std::vector<SamplePoint> samples;  // row r belongs to member r
  std::vector<double> delta;         // per row, max over k
  ClassResult result;
  size_t candidates = 0, nr_failures = 0;
  u64 sample_prime = 0;
};

struct DerivedValues {
  std::vector<std::vector<GaussianRational>> values;  // [row][k column]
  std::vector<double> delta_max;
};

// D^c chi_{wedge^k}, k in ks, at pt with certified radii (chi-derivatives
// through the inverse Jacobian when |c| > 0).
std::vector<CertifiedValue> certified_exterior_derivatives(const CharacterEngine& eng, const TorusPoint& pt,
                                                          const Exponent& c, const std::vector<int>& ks,
                                                          mpfr_prec_t W);

// (1/deriv!) D^deriv chi_{wedge^k} at each certified sample, rounded onto
// the lattice 2^-scale_exp Z[i]. Throws CertificationError with the class,
// row and k when the certified radius is too wide.
DerivedValues derive_class(const CharacterEngine& eng, const ClassInfo& cls, const std::vector<SamplePoint>& samples,
                           const std::vector<int>& ks, long M, long scale_exp, Exec exec = Exec::Serial);

// Static shards of one schedule layer: classes by decreasing estimated cost
// to the least loaded worker, ties to the lower worker index.
std::vector<std::vector<size_t>> segment_and_dispatch(const Partition& part, int layer, int workers);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunResult {
  RunConfig config;
  AdmissibleSet set;
  Partition partition;
  DecompTable table;  // k = 0..n after extension, or 0..K
  int K = 0;          // highest degree solved directly
  int n = 0;          // dimension of the adjoint
  std::vector<ClassRecord> classes;
  std::vector<std::vector<std::vector<size_t>>> shards;  // [layer][worker]
  std::vector<StageTiming> timing;
  size_t nr_solves = 0;
  bool finished = false;
  std::map<std::string, std::string> files;  // artifact name -> sha256
};

RunResult run(const RunConfig& cfg);
// Enumerate, classify and schedule only; writes DictFile.bin and schedule.json.
RunResult dry_run(const RunConfig& cfg);

// "k<TAB>iota_1,...,iota_r<TAB>N" for every nonzero entry.
std::string table_tsv(const DecompTable& t, const AdmissibleSet& set);
std::string timing_tsv(const std::vector<StageTiming>& timing);

struct PublishedPaths {
  std::string dict, sol, usamples, allroots, delta;  // empty entries are skipped
  RootsLayout layout;
};

struct PublishedData {
  AdmissibleSet set;
  DecompTable table;
  std::vector<std::vector<GaussianRational>> u;
  std::vector<std::vector<Complex>> Q;
  std::vector<double> delta;
  std::vector<std::string> log;  // validation results
  bool valid = true;
};

// Reads the binary artifacts and validates shapes, |J| against the
// enumeration, and sum_iota N prod dim^iota = C(n, k) for every stored k.
PublishedData read_published(const PublishedPaths& paths, const RootSystem& rs);

// Reference rows: "k<TAB>coefficient<TAB>iota_1,...,iota_r" per line, '#' comments.
ExteriorDecomposition read_fixture(const std::string& path, int rank);

struct VerifyReport {
  int rows_checked = 0;
  int mismatches = 0;
  std::vector<std::string> lines;
  bool ok() const { return mismatches == 0; }
};
VerifyReport verify_table(const DecompTable& t, const AdmissibleSet& set, const ExteriorDecomposition& fixture);

}  // namespace wedge
