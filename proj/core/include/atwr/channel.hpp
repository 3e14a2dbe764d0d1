#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "atwr/linalg.hpp"

namespace atwr {

/// Node and relay configuration for one two-way-relay cell. All powers and
/// noise variances are linear. Per-stream source powers are p/M.
struct SystemConfig {
  int m_antennas = 1;  // M at BS, TUE and RUE
  int n_antennas = 2;  // N at the relay, N >= 2M
  double p_u = 1.0;    // TUE transmit power
  double p_b = 1.0;    // BS transmit power
  double p_r = 1.0;    // relay transmit power budget
  double sigma2_r = 1.0;  // relay noise variance
  double sigma2 = 1.0;    // node noise variance
  RealVector weights_u;   // per-stream RUE (downlink) weights, size M
  RealVector weights_b;   // per-stream BS (uplink) weights, size M

  double rho_u() const { return p_u / m_antennas; }
  double rho_b() const { return p_b / m_antennas; }

  /// Throws InvalidInput on violated invariants (N < 2M, negative powers...).
  void validate() const;

  static SystemConfig make(int n_antennas, int m_antennas, double weight_u = 1.0,
                           double weight_b = 1.0);
};

/// Per-entry channel variances for the four fading links.
struct LinkGains {
  double h_u2 = 1.0;  // TUE -> RS
  double h_b2 = 1.0;  // BS -> RS
  double g_u2 = 1.0;  // RS -> RUE
  double g_b2 = 1.0;  // RS -> BS
};

/// One MAC+BC fading realization.
struct ChannelSet {
  ComplexMatrix h_u;  // N x M
  ComplexMatrix h_b;  // N x M
  ComplexMatrix g_u;  // M x N
  ComplexMatrix g_b;  // M x N
  SystemConfig config;
};

/// Deterministic random stream. Substreams derived from (master seed,
/// indices) are statistically independent, so Monte Carlo realizations can be
/// generated concurrently in any order without changing results.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  static RngStream substream(std::uint64_t master_seed, std::uint64_t index_a,
                             std::uint64_t index_b = 0);

  double normal();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// i.i.d. CN(0, variance) entries; per-entry second moment E|h|^2 = variance.
ComplexMatrix sample_rayleigh(Eigen::Index rows, Eigen::Index cols, double variance,
                              RngStream& rng);

/// Draws the four link matrices independently, in the fixed order
/// h_u, h_b, g_u, g_b.
ChannelSet build_channel_set(const SystemConfig& config, const LinkGains& gains,
                             RngStream& rng);

/// SNR-parameterized gains: unit powers and noise assumed by the caller,
/// h_b^2 = g_b^2 = 10^(snr_b_db/10) and h_u^2 = g_u^2 = 10^(snr_u_db/10).
LinkGains snr_parameterized_gains(double snr_b_db, double snr_u_db);

// ---- deployment geometry ----------------------------------------------

enum class ScenarioMode { kSnrParameterized, kCoverageExtension, kCoverageHole };

enum class LinkClass : int { kBsRs = 0, kRsTue = 1, kRsRue = 2, kBsUe = 3 };
constexpr int kNumLinkClasses = 4;

/// Log-distance path loss: loss_dB(d) = L0 + 10 a log10(d/d0) + L_pen.
/// A negative ref_loss_db means "derive from the free-space loss at d0 for
/// the configured carrier frequency".
struct PathLossParams {
  double ref_loss_db = -1.0;
  double ref_distance_m = 1.0;
  double exponent = 3.5;
  double penetration_db = 0.0;
};

/// Distances, per-link-class path loss and the radio bookkeeping needed to
/// turn a deployment into per-entry channel variances.
struct ScenarioGeometry {
  ScenarioMode mode = ScenarioMode::kCoverageExtension;
  double bs_rs_distance_m = 1000.0;
  double rs_tue_distance_m = 300.0;
  double rs_rue_distance_m = 500.0;
  std::array<PathLossParams, kNumLinkClasses> path_loss;
  bool per_hz_normalization = true;
  double carrier_ghz = 2.0;
  double bandwidth_hz = 10e6;
  double thermal_noise_dbm_per_hz = -174.0;
  double noise_figure_db = 7.0;
  double bs_power_dbm = 46.0;
  double ue_power_dbm = 24.0;
  double rs_power_dbm = 39.0;
  double bs_height_m = 30.0;
  double rs_height_m = 15.0;
  double ue_height_m = 1.0;

  void validate() const;

  static ScenarioGeometry coverage_extension();
  static ScenarioGeometry coverage_hole();
};

double dbm_to_mw(double dbm);
double db_to_linear(double db);

/// Free-space path loss in dB at distance d for carrier frequency f.
double free_space_loss_db(double distance_m, double carrier_ghz);

/// Per-Hz transmit power: power_dbm - 10 log10(bandwidth).
double per_hz_power_dbm(double power_dbm, double bandwidth_hz);

/// Receiver-referenced noise density: thermal + noise figure, in dBm/Hz.
double noise_floor_dbm_per_hz(const ScenarioGeometry& g);

/// Pure linear path gain 10^(-loss/10), penetration included.
double path_gain(const PathLossParams& p, double distance_m);

/// Per-entry channel variance for one link at the given distance. With
/// per-Hz normalization on, the canonical transmitter's per-Hz power over
/// the per-Hz noise floor is folded in (BS for bs-rs and bs-ue, UE for
/// rs-tue, RS for rs-rue), so a unit-power unit-noise SystemConfig sees the
/// correct per-hop SNR.
double link_gain(const ScenarioGeometry& g, LinkClass link, double distance_m);

/// The four relay-path variances for the configured distances. The RS->BS
/// link reuses the bs-rs path loss with the relay's transmit power.
LinkGains coverage_link_gains(const ScenarioGeometry& g);

/// Noise-normalized variances of the two direct (relay-free) channels,
/// excluding transmit power: BS<->RUE at bs_rs+rs_rue and BS<->TUE at
/// bs_rs+rs_tue, on the bs-ue link class. Distances are collinear.
struct DirectLinkVariances {
  double bs_rue;
  double bs_tue;
};
DirectLinkVariances coverage_direct_variances(const ScenarioGeometry& g);

const PathLossParams& params_for(const ScenarioGeometry& g, LinkClass link);

}  // namespace atwr
