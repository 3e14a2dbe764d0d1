#pragma once

#include "atwr/gp.hpp"
#include "atwr/precoding.hpp"

namespace atwr {

/// Per-stream rate weights for the two destinations.
struct Weights {
  RealVector u;  // RUE (downlink) streams
  RealVector b;  // BS (uplink) streams

  static Weights uniform(int m, double w_u, double w_b) {
    return {RealVector::Constant(m, w_u), RealVector::Constant(m, w_b)};
  }
};

struct WsrResult {
  DeltaVector delta;
  double wsr_bits_per_hz = 0.0;   // exact weighted sum rate at delta
  double approx_objective = 0.0;  // surrogate optimum (ISNR product / ratio product / power)
  double relay_power = 0.0;
  SolveStatus status = SolveStatus::kOptimal;
  std::vector<int> degenerate_streams;   // (dest * M + s) of excluded zero-gain streams
  std::vector<double> objective_trace;  // condensation loop only: true objective per iterate
};

/// Exact weighted sum rate (1/2) sum w log2(1 + SNR) at the given delta.
double wsr_value(const SnrModel& sm, const DeltaVector& delta, const Weights& w);

/// High-SNR design: minimizes the weighted product of inverse SNRs (each a
/// posynomial) under the relay power budget, via the epigraph reduction.
WsrResult maximize_wsr_high_snr(const SnrModel& sm, const PowerModel& pm, const Weights& w,
                                double p_r, const SolverOptions& opts = {});

/// Low/medium-SNR design: minimizes prod (1/(1+SNR))^w, a ratio of
/// posynomials per stream, with the single-condensation loop.
WsrResult maximize_wsr_exact(const SnrModel& sm, const PowerModel& pm, const Weights& w,
                             double p_r, const CondensationOptions& opts = {});

/// Rate or per-stream-SNR quality-of-service targets. Zero-valued targets
/// mean "no requirement" for that destination or stream.
struct QosSpec {
  enum class Mode { kRate, kSnr };
  Mode mode = Mode::kRate;
  double r_u = 0.0;  // target sum log2-SNR (bits), rate mode
  double r_b = 0.0;
  RealVector s_u;  // per-stream linear SNR floors, snr mode
  RealVector s_b;

  static QosSpec rate(double r_u, double r_b);
  static QosSpec snr(RealVector s_u, RealVector s_b);
};

/// Minimizes relay transmit power subject to prod ISNR_i <= 2^{-r_i}.
WsrResult minimize_power_rate_qos(const SnrModel& sm, const PowerModel& pm, const QosSpec& qos,
                                  const SolverOptions& opts = {});

/// Minimizes relay transmit power subject to ISNR_{i,m} <= 1/s_{i,m}; convex
/// in every SNR regime, no high-SNR approximation involved.
WsrResult minimize_power_snr_qos(const SnrModel& sm, const PowerModel& pm, const QosSpec& qos,
                                 const SolverOptions& opts = {});

/// Inverse-SNR posynomial of one stream over the stacked [delta_u, delta_b]
/// variables (exposed for tests and the sweep harness).
Posynomial isnr_posynomial(const SnrModel& sm, Dest dest, int s);

/// Relay-power posynomial sum p_k delta_k / scale.
Posynomial power_posynomial(const PowerModel& pm, double scale);

}  // namespace atwr
