#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "wedge/admiss.hpp"
#include "wedge/charcalc.hpp"
#include "wedge/cmatrix.hpp"
#include "wedge/modarith.hpp"

namespace wedge {

enum class SampleStatus : uint8_t { Fresh, Converged, Rejected };

struct SamplePoint {
  std::vector<GaussianRational> u;
  std::vector<Complex> Q;  // M-bit values
  double eps_Q = 0.0;
  Complex det;
  double det_rel = 0.0;  // |det J| / prod ||row_i||
  SampleStatus status = SampleStatus::Fresh;
  std::string reason;     // set when rejected
  int refinements = 0;    // continuation refinements n -> n+1
  int steps = 0;          // Newton steps in total
  std::vector<std::pair<int, int>> path;  // converged l/n
  // Q_j = exp(2 pi i torsion[j] / torsion_order) exactly when torsion_order > 0;
  // such points have a singular Jacobian and serve value rows only.
  long torsion_order = 0;
  std::vector<long> torsion;
};

struct NrConfig {
  long M = kDefaultPrecision;
  long guard = kGuardBits;
  int max_steps = 512;        // per stage at the final target
  int intermediate_steps = 48;
  int max_refinements = 64;
  int intermediate_tol_bits = 60;
};

// Homotopy start: exp(2 pi i s) with s = -(6,3,15,1,12,-4,5,0)/31 for E8,
// the principal element otherwise.
std::vector<Complex> homotopy_start(const RootSystem& rs, mpfr_prec_t prec);

// Continuation from Q0 towards chi(Q) = u with targets
// (1 - l/n) chi(Q0) + (l/n) u; on a stall n -> n+1, l -> floor((n+1) l / n)
// where l counts the converged stages.
SamplePoint newton_raphson(const CharacterEngine& eng, const std::vector<GaussianRational>& u,
                           const std::vector<Complex>& Q0, const NrConfig& cfg);

// Rounds to M bits, sets eps_Q and det J, and rejects unless the Newton
// correction at the rounded point is below eps_Q / 4, the forward residual
// is inside the certified radius and |det J| >= 2^(-M/2) prod ||row_i||.
void certify(const CharacterEngine& eng, SamplePoint& s, const NrConfig& cfg);

std::string sample_key(const std::vector<GaussianRational>& u);

// Fallback for a pre-image rejected as singular: snaps every coordinate to a
// root of unity of order <= max_den and checks chi(Q) = u exactly in Z[zeta_N].
// On success s becomes a converged torsion sample with Q rounded to M bits.
bool snap_torsion(const RootSystem& rs, SamplePoint& s, const NrConfig& cfg, long max_den = 1000);

// Pre-image solver with a shared cache keyed by the target vector.
class Inverter {
 public:
  Inverter(const CharacterEngine& eng, NrConfig cfg);
  const CharacterEngine& engine() const { return eng_; }
  const NrConfig& config() const { return cfg_; }
  SamplePoint solve(const std::vector<GaussianRational>& u);
  size_t cache_size() const;
  size_t solves() const { return solves_; }

 private:
  const CharacterEngine& eng_;
  NrConfig cfg_;
  std::vector<Complex> Q0_;
  mutable std::mutex mu_;
  std::map<std::string, SamplePoint> cache_;
  size_t solves_ = 0;
};

// S = {l/2 + i m/2 : -3 <= l <= 3, -2 <= m <= 2} ordered by |u|, then Re, then Im.
std::vector<GaussianRational> sampling_set();

// Values tried for each free coordinate of a class: for a single-node
// (>d_max) class the integer window {-e..e} \ {0}, e = floor(rho_k), then
// the rest of S; otherwise S. Zero is never used for a free coordinate.
std::vector<GaussianRational> coordinate_domain(const ClassInfo& cls, const RootSystem& rs,
                                                const std::vector<GaussianRational>& S);

struct SamplingOptions {
  std::vector<GaussianRational> S = sampling_set();
  int batch = 8;                  // candidates solved together
  size_t max_candidates = 2'000'000;
  bool parallel = false;
};

struct ClassSamples {
  std::vector<SamplePoint> points;  // one per class member, selection order
  size_t candidates = 0;
  size_t nr_failures = 0;
  u64 prime = 0;
};

// Real part of prod_{j free} u_j^{kappa_j} for each member, as rationals.
std::vector<mpq_class> sample_row(const ClassInfo& cls, const AdmissibleSet& set,
                                  const std::vector<GaussianRational>& u);

// Candidate tuples are visited box by box (max domain index 0, 1, ...) and
// lexicographically inside a box; a tuple is kept when its row raises the
// rank mod a 62-bit prime and its pre-image certifies.
ClassSamples select_samples(const ClassInfo& cls, const AdmissibleSet& set, const RootSystem& rs,
                            Inverter& inv, const SamplingOptions& opt);

}  // namespace wedge
