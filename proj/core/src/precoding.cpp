#include "atwr/precoding.hpp"

#include <cmath>

namespace atwr {

namespace {

constexpr double kConditionLimit = 1e12;

void check_channel_rank(const RealVector& s, const char* which) {
  if (s(s.size() - 1) < 1e-12 * s(0)) {
    throw RankDeficient(std::string("build_bi_cancellers: ") + which + " is rank-deficient");
  }
}

// M x M anti-diagonal with [m, M-1-m] = sqrt(delta[m]).
ComplexMatrix anti_diagonal_sqrt(const RealVector& delta) {
  const Eigen::Index m = delta.size();
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) out(i, m - 1 - i) = std::sqrt(delta(i));
  return out;
}

}  // namespace

double SnrModel::denominator(Dest i, int s, const DeltaVector& d) const {
  double den = sigma2;
  if (i == Dest::kRue) {
    den += sigma2_r * b_u.row(s).dot(d.u);
  } else {
    den += sigma2_r * (b_b.row(s).dot(d.u) + c_b.row(s).dot(d.b));
  }
  return den;
}

double SnrModel::snr(Dest i, int s, const DeltaVector& d) const {
  const double num = (i == Dest::kRue ? a_u(s) * d.u(own_index(s)) : a_b(s) * d.b(own_index(s)));
  if (num == 0.0) return 0.0;
  return num / denominator(i, s, d);
}

BiCancellers build_bi_cancellers(const ChannelSet& ch) {
  ch.config.validate();
  const int m = ch.config.m_antennas;
  const int n = ch.config.n_antennas;

  SvdResult hu = svd(ch.h_u);  // N x M
  SvdResult gu = svd(ch.g_u);  // M x N
  check_channel_rank(hu.s, "H_u");
  check_channel_rank(gu.s, "G_u");

  BiCancellers bc;
  bc.m_antennas = m;
  bc.f.resize(2 * m, n);
  bc.f.topRows(m) = hu.u.leftCols(m).adjoint();          // F_u
  bc.f.bottomRows(m) = hu.u.middleCols(m, m).adjoint();  // F_b: first M null directions
  bc.m.resize(n, 2 * m);
  bc.m.leftCols(m) = gu.v.leftCols(m);           // M_u
  bc.m.rightCols(m) = gu.v.middleCols(m, m);     // M_b
  return bc;
}

TriangularFactors triangularize(const ChannelSet& ch, const BiCancellers& bc) {
  const ComplexMatrix g_tilde_u = ch.g_u * bc.m_u();
  const ComplexMatrix g_tilde_n = ch.g_b * bc.m_u();
  const ComplexMatrix g_tilde_b = ch.g_b * bc.m_b();
  const ComplexMatrix h_tilde_b = bc.f_u() * ch.h_u;
  const ComplexMatrix h_tilde_u = bc.f_b() * ch.h_b;

  LqResult lu = lq(g_tilde_u);
  LqResult lb = lq(g_tilde_b);
  QrResult qu = qr(h_tilde_u);
  QrResult qb = qr(h_tilde_b);

  TriangularFactors tf;
  tf.l_u = std::move(lu.l);
  tf.pi_u = lu.q.adjoint();
  tf.l_b = std::move(lb.l);
  tf.pi_b = lb.q.adjoint();
  tf.r_u = std::move(qu.r);
  tf.theta_u = qu.q.adjoint();
  tf.r_b = std::move(qb.r);
  tf.theta_b = qb.q.adjoint();
  tf.g_n_pi_u = g_tilde_n * tf.pi_u;
  return tf;
}

ComplexMatrix assemble_w(const BiCancellers& bc, const TriangularFactors& tf,
                         const DeltaVector& delta) {
  if (!delta.nonnegative()) throw InvalidInput("assemble_w: delta must be nonnegative");
  const int m = bc.m_antennas;
  ComplexMatrix d = ComplexMatrix::Zero(2 * m, 2 * m);
  d.topRightCorner(m, m) = tf.pi_u * anti_diagonal_sqrt(delta.u) * tf.theta_u;
  d.bottomLeftCorner(m, m) = tf.pi_b * anti_diagonal_sqrt(delta.b) * tf.theta_b;
  return bc.m * d * bc.f;
}

SnrModel snr_model(const TriangularFactors& tf, const SystemConfig& config) {
  const int m = config.m_antennas;
  SnrModel sm;
  sm.m_streams = m;
  sm.sigma2 = config.sigma2;
  sm.sigma2_r = config.sigma2_r;
  sm.rho_u = config.rho_u();
  sm.rho_b = config.rho_b();
  sm.a_u.resize(m);
  sm.a_b.resize(m);
  sm.b_u.resize(m, m);
  sm.b_b.resize(m, m);
  sm.c_b.resize(m, m);
  for (int s = 0; s < m; ++s) {
    const int row = m - 1 - s;  // receive row feeding stream s
    sm.a_u(s) = std::norm(tf.l_u(row, row) * tf.r_u(s, s)) * sm.rho_b;
    sm.a_b(s) = std::norm(tf.l_b(row, row) * tf.r_b(s, s)) * sm.rho_u;
    for (int k = 0; k < m; ++k) {
      sm.b_u(s, k) = std::norm(tf.l_u(row, k));
      sm.b_b(s, k) = std::norm(tf.g_n_pi_u(row, k));
      sm.c_b(s, k) = std::norm(tf.l_b(row, k));
    }
  }
  return sm;
}

double relay_power(const ComplexMatrix& w, const ChannelSet& ch) {
  const double rho_u = ch.config.rho_u();
  const double rho_b = ch.config.rho_b();
  return rho_u * (w * ch.h_u).squaredNorm() + rho_b * (w * ch.h_b).squaredNorm() +
         ch.config.sigma2_r * w.squaredNorm();
}

PowerModel power_model(const BiCancellers& bc, const TriangularFactors& tf,
                       const ChannelSet& ch) {
  const int m = bc.m_antennas;
  PowerModel pm;
  pm.p_u.resize(m);
  pm.p_b.resize(m);
  DeltaVector unit = DeltaVector::zero(m);
  for (int j = 0; j < m; ++j) {
    unit.u(j) = 1.0;
    pm.p_u(j) = relay_power(assemble_w(bc, tf, unit), ch);
    unit.u(j) = 0.0;
    unit.b(j) = 1.0;
    pm.p_b(j) = relay_power(assemble_w(bc, tf, unit), ch);
    unit.b(j) = 0.0;
  }
  return pm;
}

ComplexMatrix build_bi_cp(const ChannelSet& ch, const BiCancellers& bc,
                          const DeltaVector& delta) {
  if (!delta.nonnegative()) throw InvalidInput("build_bi_cp: delta must be nonnegative");
  const int m = bc.m_antennas;
  const ComplexMatrix g_tilde_u_inv = inverse_checked(ch.g_u * bc.m_u(), kConditionLimit);
  const ComplexMatrix g_tilde_b_inv = inverse_checked(ch.g_b * bc.m_b(), kConditionLimit);
  const ComplexMatrix h_tilde_u_inv = inverse_checked(bc.f_b() * ch.h_b, kConditionLimit);
  const ComplexMatrix h_tilde_b_inv = inverse_checked(bc.f_u() * ch.h_u, kConditionLimit);

  ComplexMatrix d = ComplexMatrix::Zero(2 * m, 2 * m);
  d.topRightCorner(m, m) = g_tilde_u_inv * anti_diagonal_sqrt(delta.u) * h_tilde_u_inv;
  d.bottomLeftCorner(m, m) = g_tilde_b_inv * anti_diagonal_sqrt(delta.b) * h_tilde_b_inv;
  return bc.m * d * bc.f;
}

StreamSnrEstimates simulate_transmission(const ChannelSet& ch, const ComplexMatrix& w,
                                         int num_symbols, RngStream& rng) {
  const int m = ch.config.m_antennas;
  const Eigen::Index t = num_symbols;
  const double rho_u = ch.config.rho_u();
  const double rho_b = ch.config.rho_b();

  // Payloads and noises for the whole block at once.
  const ComplexMatrix x_u = std::sqrt(rho_u) * sample_rayleigh(m, t, 1.0, rng);
  const ComplexMatrix x_b = std::sqrt(rho_b) * sample_rayleigh(m, t, 1.0, rng);
  const ComplexMatrix n_r = sample_rayleigh(ch.config.n_antennas, t, ch.config.sigma2_r, rng);
  const ComplexMatrix n_u = sample_rayleigh(m, t, ch.config.sigma2, rng);
  const ComplexMatrix n_b = sample_rayleigh(m, t, ch.config.sigma2, rng);

  // MAC phase, relay processing, BC phase.
  const ComplexMatrix x_r = w * (ch.h_u * x_u + ch.h_b * x_b + n_r);
  const ComplexMatrix y_u = ch.g_u * x_r + n_u;
  const ComplexMatrix y_b = ch.g_b * x_r + n_b;

  // Compound data channels; the BS subtracts its own contribution before
  // stream detection.
  const ComplexMatrix c_u = ch.g_u * w * ch.h_b;
  const ComplexMatrix c_b = ch.g_b * w * ch.h_u;
  const ComplexMatrix self_b = ch.g_b * w * ch.h_b;
  const ComplexMatrix y_b_clean = y_b - self_b * x_b;

  StreamSnrEstimates est;
  est.rue.resize(m);
  est.bs.resize(m);
  auto detect = [&](const ComplexMatrix& y, const ComplexMatrix& c, const ComplexMatrix& x,
                    RealVector& out) {
    // Stream s is read off row M-1-s after the already-decoded streams
    // (higher s) have been subtracted with genie-aided accuracy.
    for (int s = 0; s < m; ++s) {
      const int row = m - 1 - s;
      Eigen::RowVectorXcd residual = y.row(row);
      for (int k = s + 1; k < m; ++k) residual -= c(row, k) * x.row(k);
      const Eigen::RowVectorXcd signal = c(row, s) * x.row(s);
      const double sig_power = signal.squaredNorm();
      const double noise_power = (residual - signal).squaredNorm();
      out(s) = sig_power > 0 && noise_power > 0 ? sig_power / noise_power : 0.0;
    }
  };
  detect(y_u, c_u, x_b, est.rue);
  detect(y_b_clean, c_b, x_u, est.bs);
  return est;
}

}  // namespace atwr
