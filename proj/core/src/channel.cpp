#include "atwr/channel.hpp"

#include <cmath>

namespace atwr {

void SystemConfig::validate() const {
  if (m_antennas < 1) throw InvalidInput("config: M must be at least 1");
  if (n_antennas < 2 * m_antennas) throw InvalidInput("config: relay needs N >= 2M antennas");
  if (p_u < 0 || p_b < 0 || p_r < 0) throw InvalidInput("config: negative transmit power");
  if (sigma2_r < 0 || sigma2 < 0) throw InvalidInput("config: negative noise variance");
  if (weights_u.size() != m_antennas || weights_b.size() != m_antennas) {
    throw InvalidInput("config: weight vectors must have M entries");
  }
  if ((weights_u.array() < 0).any() || (weights_b.array() < 0).any()) {
    throw InvalidInput("config: negative stream weight");
  }
}

SystemConfig SystemConfig::make(int n_antennas, int m_antennas, double weight_u,
                                double weight_b) {
  SystemConfig cfg;
  cfg.n_antennas = n_antennas;
  cfg.m_antennas = m_antennas;
  cfg.weights_u = RealVector::Constant(m_antennas, weight_u);
  cfg.weights_b = RealVector::Constant(m_antennas, weight_b);
  return cfg;
}

RngStream::RngStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

RngStream RngStream::substream(std::uint64_t master_seed, std::uint64_t index_a,
                               std::uint64_t index_b) {
  RngStream out(0);
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(index_a),     static_cast<std::uint32_t>(index_a >> 32),
      static_cast<std::uint32_t>(index_b),     static_cast<std::uint32_t>(index_b >> 32),
      0x9e3779b9u};
  out.engine_.seed(seq);
  return out;
}

double RngStream::normal() { return normal_(engine_); }

ComplexMatrix sample_rayleigh(Eigen::Index rows, Eigen::Index cols, double variance,
                              RngStream& rng) {
  if (variance < 0) throw InvalidInput("sample_rayleigh: negative variance");
  const double scale = std::sqrt(variance / 2.0);
  ComplexMatrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = Complex(scale * rng.normal(), scale * rng.normal());
    }
  }
  return out;
}

ChannelSet build_channel_set(const SystemConfig& config, const LinkGains& gains,
                             RngStream& rng) {
  config.validate();
  const Eigen::Index n = config.n_antennas;
  const Eigen::Index m = config.m_antennas;
  ChannelSet ch;
  ch.h_u = sample_rayleigh(n, m, gains.h_u2, rng);
  ch.h_b = sample_rayleigh(n, m, gains.h_b2, rng);
  ch.g_u = sample_rayleigh(m, n, gains.g_u2, rng);
  ch.g_b = sample_rayleigh(m, n, gains.g_b2, rng);
  ch.config = config;
  return ch;
}

LinkGains snr_parameterized_gains(double snr_b_db, double snr_u_db) {
  const double b = db_to_linear(snr_b_db);
  const double u = db_to_linear(snr_u_db);
  return {u, b, u, b};
}

// ---- deployment geometry ----------------------------------------------

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double free_space_loss_db(double distance_m, double carrier_ghz) {
  // 20 log10(4 pi d f / c)
  return 20.0 * std::log10(4.0 * M_PI * distance_m * carrier_ghz * 1e9 / 299792458.0);
}

double per_hz_power_dbm(double power_dbm, double bandwidth_hz) {
  return power_dbm - 10.0 * std::log10(bandwidth_hz);
}

double noise_floor_dbm_per_hz(const ScenarioGeometry& g) {
  return g.thermal_noise_dbm_per_hz + g.noise_figure_db;
}

void ScenarioGeometry::validate() const {
  if (bs_rs_distance_m <= 0 || rs_tue_distance_m <= 0 || rs_rue_distance_m <= 0) {
    throw InvalidInput("geometry: distances must be positive");
  }
  for (const PathLossParams& p : path_loss) {
    if (p.exponent <= 0) throw InvalidInput("geometry: path-loss exponent must be positive");
    if (p.ref_distance_m <= 0) throw InvalidInput("geometry: reference distance must be positive");
  }
  if (bandwidth_hz <= 0) throw InvalidInput("geometry: bandwidth must be positive");
}

const PathLossParams& params_for(const ScenarioGeometry& g, LinkClass link) {
  return g.path_loss[static_cast<int>(link)];
}

namespace {

double resolved_ref_loss_db(const ScenarioGeometry& g, const PathLossParams& p) {
  if (p.ref_loss_db >= 0) return p.ref_loss_db;
  return free_space_loss_db(p.ref_distance_m, g.carrier_ghz);
}

double tx_power_dbm(const ScenarioGeometry& g, LinkClass link) {
  switch (link) {
    case LinkClass::kBsRs:
    case LinkClass::kBsUe:
      return g.bs_power_dbm;
    case LinkClass::kRsTue:
      return g.ue_power_dbm;
    case LinkClass::kRsRue:
      return g.rs_power_dbm;
  }
  throw InvalidInput("unknown link class");
}

}  // namespace

double path_gain(const PathLossParams& p, double distance_m) {
  if (distance_m <= 0) throw InvalidInput("path_gain: distance must be positive");
  const double l0 = p.ref_loss_db < 0 ? 0.0 : p.ref_loss_db;
  const double loss_db =
      l0 + 10.0 * p.exponent * std::log10(distance_m / p.ref_distance_m) + p.penetration_db;
  return db_to_linear(-loss_db);
}

double link_gain(const ScenarioGeometry& g, LinkClass link, double distance_m) {
  if (distance_m <= 0) throw InvalidInput("link_gain: distance must be positive");
  PathLossParams p = params_for(g, link);
  p.ref_loss_db = resolved_ref_loss_db(g, p);
  double gain = path_gain(p, distance_m);
  if (g.per_hz_normalization) {
    const double tx_dbm = per_hz_power_dbm(tx_power_dbm(g, link), g.bandwidth_hz);
    gain *= dbm_to_mw(tx_dbm) / dbm_to_mw(noise_floor_dbm_per_hz(g));
  }
  return gain;
}

LinkGains coverage_link_gains(const ScenarioGeometry& g) {
  g.validate();
  LinkGains out;
  out.h_b2 = link_gain(g, LinkClass::kBsRs, g.bs_rs_distance_m);
  out.h_u2 = link_gain(g, LinkClass::kRsTue, g.rs_tue_distance_m);
  out.g_u2 = link_gain(g, LinkClass::kRsRue, g.rs_rue_distance_m);
  // RS -> BS: same path as BS -> RS but the relay transmits.
  out.g_b2 = out.h_b2;
  if (g.per_hz_normalization) {
    out.g_b2 *= dbm_to_mw(g.rs_power_dbm) / dbm_to_mw(g.bs_power_dbm);
  }
  return out;
}

DirectLinkVariances coverage_direct_variances(const ScenarioGeometry& g) {
  g.validate();
  PathLossParams p = params_for(g, LinkClass::kBsUe);
  p.ref_loss_db = resolved_ref_loss_db(g, p);
  const double noise = g.per_hz_normalization ? dbm_to_mw(noise_floor_dbm_per_hz(g)) : 1.0;
  return {path_gain(p, g.bs_rs_distance_m + g.rs_rue_distance_m) / noise,
          path_gain(p, g.bs_rs_distance_m + g.rs_tue_distance_m) / noise};
}

ScenarioGeometry ScenarioGeometry::coverage_extension() {
  ScenarioGeometry g;
  g.mode = ScenarioMode::kCoverageExtension;
  g.rs_rue_distance_m = 500.0;
  g.rs_tue_distance_m = 300.0;
  g.rs_power_dbm = 39.0;
  // Above-rooftop BS<->RS link, near line of sight.
  g.path_loss[static_cast<int>(LinkClass::kBsRs)] = {-1.0, 1.0, 2.35, 0.0};
  // Urban below-rooftop links to the users.
  g.path_loss[static_cast<int>(LinkClass::kRsTue)] = {-1.0, 1.0, 3.5, 0.0};
  g.path_loss[static_cast<int>(LinkClass::kRsRue)] = {-1.0, 1.0, 3.5, 0.0};
  g.path_loss[static_cast<int>(LinkClass::kBsUe)] = {-1.0, 1.0, 3.5, 0.0};
  return g;
}

ScenarioGeometry ScenarioGeometry::coverage_hole() {
  ScenarioGeometry g;
  g.mode = ScenarioMode::kCoverageHole;
  g.rs_rue_distance_m = 50.0;
  g.rs_tue_distance_m = 50.0;
  g.rs_power_dbm = 30.0;
  g.path_loss[static_cast<int>(LinkClass::kBsRs)] = {-1.0, 1.0, 2.35, 0.0};
  // Heavily shadowed links with penetration loss into the hole.
  g.path_loss[static_cast<int>(LinkClass::kRsTue)] = {-1.0, 1.0, 4.0, 10.0};
  g.path_loss[static_cast<int>(LinkClass::kRsRue)] = {-1.0, 1.0, 4.0, 10.0};
  g.path_loss[static_cast<int>(LinkClass::kBsUe)] = {-1.0, 1.0, 4.0, 10.0};
  return g;
}

}  // namespace atwr
