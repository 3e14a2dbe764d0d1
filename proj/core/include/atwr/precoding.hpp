#pragma once

#include "atwr/channel.hpp"
#include "atwr/linalg.hpp"

namespace atwr {

/// Destination of a broadcast-phase stream: the receiving user (downlink
/// data) or the base station (uplink data).
enum class Dest { kRue, kBs };

/// Uplink precoder F (2M x N, orthonormal rows) and downlink precoder M
/// (N x 2M, orthonormal columns). F_b annihilates H_u from the left and M_b
/// lies in the null-space of G_u, which makes the compound MAC and BC
/// channels block-triangular and removes the back-propagating interference
/// seen by the receiving user.
struct BiCancellers {
  ComplexMatrix f;  // [F_u; F_b]
  ComplexMatrix m;  // [M_u  M_b]
  int m_antennas = 0;

  auto f_u() const { return f.topRows(m_antennas); }
  auto f_b() const { return f.bottomRows(m_antennas); }
  auto m_u() const { return m.leftCols(m_antennas); }
  auto m_b() const { return m.rightCols(m_antennas); }
};

/// LQ/QR factors of the effective single-user channels plus the coupling
/// block G~_n Pi_u that feeds relay noise into the BS receiver.
struct TriangularFactors {
  ComplexMatrix l_u, l_b;          // lower-triangular, real nonnegative diagonal
  ComplexMatrix r_u, r_b;          // upper-triangular, real nonnegative diagonal
  ComplexMatrix pi_u, pi_b;        // unitary
  ComplexMatrix theta_u, theta_b;  // unitary
  ComplexMatrix g_n_pi_u;
};

/// Nonnegative per-stream power-distribution variables delta_{i,m}.
struct DeltaVector {
  RealVector u;
  RealVector b;

  static DeltaVector zero(int m) { return {RealVector::Zero(m), RealVector::Zero(m)}; }
  static DeltaVector constant(int m, double value) {
    return {RealVector::Constant(m, value), RealVector::Constant(m, value)};
  }
  bool nonnegative() const { return (u.array() >= 0).all() && (b.array() >= 0).all(); }
};

/// Per-stream SNR as an explicit rational function of delta:
///
///   snr(i, s) = a_i[s] * delta_i[own(s)]
///               / (sigma2_r * sum_k (b_i[s][k] du[k] + c_i[s][k] db[k]) + sigma2)
///
/// where s indexes the decoded stream (0-based version of the paper-style
/// reversed index) and own(s) = M-1-s is the power variable feeding it. All
/// coefficients are nonnegative and c_u is identically zero: the RUE
/// denominator carries only delta_u terms.
struct SnrModel {
  int m_streams = 0;
  double sigma2 = 1.0;
  double sigma2_r = 1.0;
  double rho_u = 1.0;
  double rho_b = 1.0;
  RealVector a_u, a_b;    // numerator coefficients, rho factors included
  RealMatrix b_u;         // RUE denominator vs delta_u
  RealMatrix b_b, c_b;    // BS denominator vs delta_u and delta_b

  int own_index(int s) const { return m_streams - 1 - s; }
  double denominator(Dest i, int s, const DeltaVector& d) const;
  double snr(Dest i, int s, const DeltaVector& d) const;
};

/// Relay transmit power as an exactly linear function of delta:
/// power = sum_m (p_u[m] du[m] + p_b[m] db[m]).
struct PowerModel {
  RealVector p_u, p_b;

  double eval(const DeltaVector& d) const { return p_u.dot(d.u) + p_b.dot(d.b); }
};

/// Builds F and M from the SVDs of H_u and G_u. Throws RankDeficient when
/// either channel loses full rank.
BiCancellers build_bi_cancellers(const ChannelSet& ch);

/// LQ-factors the BC-side blocks and QR-factors the MAC-side blocks of the
/// effective channels G~ = G M and H~ = F H.
TriangularFactors triangularize(const ChannelSet& ch, const BiCancellers& bc);

/// W = M Pi Delta Theta F with the anti-diagonal power block Delta built
/// from sqrt(delta). Throws InvalidInput on negative delta entries.
ComplexMatrix assemble_w(const BiCancellers& bc, const TriangularFactors& tf,
                         const DeltaVector& delta);

SnrModel snr_model(const TriangularFactors& tf, const SystemConfig& config);

/// Extracts the linear power coefficients by evaluating the exact relay
/// transmit power at unit delta vectors.
PowerModel power_model(const BiCancellers& bc, const TriangularFactors& tf,
                       const ChannelSet& ch);

/// Exact relay transmit power Tr(W H Q H^H W^H) + sigma2_r Tr(W W^H).
double relay_power(const ComplexMatrix& w, const ChannelSet& ch);

/// Block-ZF variant: D_i = G~_i^{-1} Delta_i H~_i^{-1}, which parallelizes
/// the end-to-end channels instead of triangulating them. Throws
/// IllConditioned when any inverted block has condition number above 1e12.
ComplexMatrix build_bi_cp(const ChannelSet& ch, const BiCancellers& bc,
                          const DeltaVector& delta);

/// Empirical per-stream SINR estimates from a symbol-level simulation of the
/// MAC phase, relay processing, BC phase, BS self-interference subtraction
/// and genie-aided successive interference cancellation (streams decoded
/// last-to-first).
struct StreamSnrEstimates {
  RealVector rue;  // stream s = 0..M-1
  RealVector bs;
};
StreamSnrEstimates simulate_transmission(const ChannelSet& ch, const ComplexMatrix& w,
                                         int num_symbols, RngStream& rng);

}  // namespace atwr
