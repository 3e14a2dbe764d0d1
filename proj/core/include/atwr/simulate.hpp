#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atwr/problems.hpp"

namespace atwr {

enum class Scheme { kBiCt, kBiCp, kOwr, kDirect };

std::string scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

enum class SolverMode { kGp, kCondense, kAuto };

enum class SweepScenario { kBalanced, kUnbalanced, kCoverageExtension, kCoverageHole };

/// One Monte Carlo comparison campaign: an axis (per-hop SNR in dB or
/// TUE-to-relay distance in meters), the schemes to evaluate, and everything
/// needed to reproduce it bit-for-bit from the master seed.
struct SweepSpec {
  SweepScenario scenario = SweepScenario::kUnbalanced;
  std::vector<double> axis;
  double snr_b_db = 20.0;  // fixed BS-side per-hop SNR for the unbalanced sweep
  int n_antennas = 4;
  int m_antennas = 2;
  std::vector<Scheme> schemes{Scheme::kBiCt};
  int realizations = 2000;
  std::uint64_t seed = 1;
  double weight_u = 1.5;
  double weight_b = 0.5;
  SolverMode solver = SolverMode::kAuto;
  ScenarioGeometry geometry = ScenarioGeometry::coverage_extension();

  void validate() const;
};

struct SweepCell {
  double mean_wsr = 0.0;
  double std_error = 0.0;
  int realizations = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<double> axis;
  std::vector<Scheme> schemes;
  std::vector<SweepCell> cells;  // axis-major: cells[a * schemes.size() + s]
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  const SweepCell& cell(std::size_t axis_idx, std::size_t scheme_idx) const {
    return cells[axis_idx * schemes.size() + scheme_idx];
  }
};

/// Runs the full campaign. Realizations fan out over `threads` workers
/// (0 = hardware concurrency); per-realization RNG substreams plus
/// fixed-order aggregation make the result identical for any worker count.
/// Scheme failures (e.g. ill-conditioned BI-CP inversions) are counted and
/// excluded from the mean, never silently zeroed.
SweepResult run_sweep(const SweepSpec& spec, int threads = 0);

/// Optimal non-regenerative one-way relaying over four time slots:
/// eigenmode-aligned relay precoders per direction with the diagonal power
/// allocation optimized by a concave water-filling-style routine.
/// Returns (1/4) (w_u R_u + w_b R_b).
double owr_wsr(const ChannelSet& ch, double w_u, double w_b);

struct DirectPowers {
  double p_b = 1.0;
  double p_u = 1.0;
  double p_r = 0.0;  // added to the BS power for fairness vs relaying
  double sigma2 = 1.0;
};

/// Two-slot single-hop transmission, log-det capacities with white inputs:
/// (1/2) (w_u log2|I + (p_b+p_r)/(M s2) H H^H| + w_b log2|I + p_u/(M s2) G G^H|).
double direct_wsr(const ComplexMatrix& h, const ComplexMatrix& g, const DirectPowers& powers,
                  double w_u, double w_b);

/// Writes axis,scheme,mean_wsr_bps_hz,stderr,realizations,failures,seed with
/// one row per (axis point, scheme), values at 9 significant digits.
void emit_csv(const SweepResult& result, const std::string& path);

/// Key = value sections per link class plus [power]/[noise]/[system]
/// overrides; unknown keys are rejected.
void apply_config_file(SweepSpec& spec, const std::string& path);

// ---- block-ZF (BI-CP) power allocation ---------------------------------
//
// The exact BS-side noise and relay power of the parallelized precoder carry
// sqrt-delta cross terms, so they are not posynomials. The allocation uses
// coefficient tables with those cross terms dropped, then the delta returned
// by the solver is rescaled so the exact relay power meets the budget with
// equality, and the reported WSR is always evaluated through the exact
// compound channel and noise covariance.

struct BiCpModels {
  SnrModel snr;    // diagonal approximation
  PowerModel power;  // diagonal of the exact quadratic form
};
BiCpModels bi_cp_models(const ChannelSet& ch, const BiCancellers& bc);

/// Exact per-stream SINRs of the parallelized precoder at the given delta.
StreamSnrEstimates bi_cp_exact_sinrs(const ChannelSet& ch, const BiCancellers& bc,
                                     const DeltaVector& delta);

double bi_cp_exact_wsr(const ChannelSet& ch, const BiCancellers& bc, const DeltaVector& delta,
                       const Weights& w);

/// Scales delta so relay_power(W(delta)) equals the budget exactly.
DeltaVector rescale_to_power(const ChannelSet& ch, const BiCancellers& bc,
                             const DeltaVector& delta, double p_r);

/// Evaluates one scheme on one realization; throws on scheme failure.
double evaluate_scheme(Scheme scheme, const ChannelSet& ch, const Weights& w, SolverMode mode,
                       double min_hop_snr_db, const ComplexMatrix* h_direct,
                       const ComplexMatrix* g_direct, const DirectPowers& direct_powers);

}  // namespace atwr
