#include <doctest.h>

#include "atwr/problems.hpp"
#include "oracles.hpp"

using namespace atwr;

namespace {

struct Instance {
  ChannelSet ch;
  SnrModel sm;
  PowerModel pm;
};

Instance make_instance(int n, int m, double snr_b_db, double snr_u_db, std::uint64_t seed) {
  SystemConfig cfg = SystemConfig::make(n, m);
  RngStream rng = RngStream::substream(seed, 0);
  Instance inst;
  inst.ch = build_channel_set(cfg, snr_parameterized_gains(snr_b_db, snr_u_db), rng);
  const BiCancellers bc = build_bi_cancellers(inst.ch);
  const TriangularFactors tf = triangularize(inst.ch, bc);
  inst.sm = snr_model(tf, cfg);
  inst.pm = power_model(bc, tf, inst.ch);
  return inst;
}

// Minimal hand-built single-stream model: SNR_i = a_i * delta_i / sigma2
// (noiseless relay), unit power coefficients.
Instance make_scalar_model(double a_u, double a_b) {
  Instance inst;
  SnrModel& sm = inst.sm;
  sm.m_streams = 1;
  sm.sigma2 = 1.0;
  sm.sigma2_r = 0.0;
  sm.rho_u = 1.0;
  sm.rho_b = 1.0;
  sm.a_u = RealVector::Constant(1, a_u);
  sm.a_b = RealVector::Constant(1, a_b);
  sm.b_u = RealMatrix::Constant(1, 1, 1.0);
  sm.b_b = RealMatrix::Constant(1, 1, 1.0);
  sm.c_b = RealMatrix::Constant(1, 1, 1.0);
  inst.pm.p_u = RealVector::Constant(1, 1.0);
  inst.pm.p_b = RealVector::Constant(1, 1.0);
  return inst;
}

DeltaVector delta2(double du, double db) {
  DeltaVector d = DeltaVector::zero(1);
  d.u(0) = du;
  d.b(0) = db;
  return d;
}

// Weighted ISNR product straight from the rational SNR model (independent of
// the posynomial construction inside the solvers).
double isnr_product(const SnrModel& sm, const Weights& w, const DeltaVector& d) {
  double log_v = 0.0;
  for (int s = 0; s < sm.m_streams; ++s) {
    log_v -= w.u(s) * std::log(sm.snr(Dest::kRue, s, d));
    log_v -= w.b(s) * std::log(sm.snr(Dest::kBs, s, d));
  }
  return std::exp(log_v);
}

}  // namespace

TEST_CASE("wsr_value basics") {
  Instance inst = make_scalar_model(1.0, 1.0);
  const Weights w = Weights::uniform(1, 1.0, 1.0);
  CHECK(wsr_value(inst.sm, delta2(0, 0), w) == 0.0);
  // Both SNRs equal to one: (1/2)(log2 2 + log2 2) = 1 bit/s/Hz.
  CHECK(wsr_value(inst.sm, delta2(1, 1), w) == doctest::Approx(1.0));
}

TEST_CASE("wsr_value agrees with the covariance route") {
  Instance inst = make_instance(4, 2, 15.0, 10.0, 42);
  const BiCancellers bc = build_bi_cancellers(inst.ch);
  const TriangularFactors tf = triangularize(inst.ch, bc);
  DeltaVector d = DeltaVector::constant(2, 0.3);
  d.u(1) = 0.9;
  const oracle::CovarianceSnrs ref = oracle::snr_from_covariance(inst.ch, assemble_w(bc, tf, d));
  const Weights w = Weights::uniform(2, 1.5, 0.5);
  double expected = 0.0;
  for (int s = 0; s < 2; ++s) {
    expected += 1.5 * std::log2(1.0 + ref.rue(s)) + 0.5 * std::log2(1.0 + ref.bs(s));
  }
  CHECK(wsr_value(inst.sm, d, w) == doctest::Approx(0.5 * expected).epsilon(1e-8));
}

TEST_CASE("high-snr allocation splits power evenly for symmetric scalars") {
  Instance inst = make_scalar_model(4.0, 4.0);
  const WsrResult res =
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 1.0, 1.0), 1.0);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.delta.u(0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(res.delta.b(0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(res.relay_power <= 1.0 * (1 + 1e-8));
}

TEST_CASE("high-snr allocation follows the weights") {
  Instance inst = make_scalar_model(2.0, 8.0);
  const WsrResult res =
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 3.0, 1.0), 1.0);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.delta.u(0) / res.delta.b(0) == doctest::Approx(3.0).epsilon(1e-4));
  CHECK_THROWS_AS(
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 1.0, 1.0), 0.0),
      InvalidInput);
}

TEST_CASE("high-snr allocation beats equal power at high snr") {
  int wins = 0;
  const int trials = 500;
  const Weights w = Weights::uniform(1, 1.5, 0.5);
  for (int trial = 0; trial < trials; ++trial) {
    Instance inst = make_instance(2, 1, 30.0, 30.0, 1000 + trial);
    const WsrResult res = maximize_wsr_high_snr(inst.sm, inst.pm, w, inst.ch.config.p_r);
    if (res.status != SolveStatus::kOptimal) continue;
    const double coeff_sum = inst.pm.p_u.sum() + inst.pm.p_b.sum();
    const DeltaVector equal = DeltaVector::constant(1, inst.ch.config.p_r / coeff_sum);
    if (res.wsr_bits_per_hz >= wsr_value(inst.sm, equal, w) - 1e-9) ++wins;
  }
  CHECK(wins >= trials * 99 / 100);
}

TEST_CASE("solver optimum matches the grid oracle on its own objective") {
  const Weights w = Weights::uniform(1, 1.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    Instance inst = make_instance(2, 1, 18.0, 12.0, 2000 + trial);
    const double p_r = inst.ch.config.p_r;
    const WsrResult res = maximize_wsr_high_snr(inst.sm, inst.pm, w, p_r);
    REQUIRE(res.status == SolveStatus::kOptimal);
    const auto objective = [&](double du, double db) {
      const DeltaVector d = delta2(du, db);
      if (inst.pm.eval(d) > p_r) return std::nan("");
      return isnr_product(inst.sm, w, d);
    };
    const oracle::GridResult grid = oracle::grid_search_2d(objective, 1e-6, 1e6, 2000, 2);
    CHECK(res.approx_objective == doctest::Approx(grid.value).epsilon(1e-3));
  }
}

TEST_CASE("exact and high-snr designs agree at 40 dB") {
  const Weights w = Weights::uniform(1, 1.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = make_instance(2, 1, 40.0, 40.0, 3000 + trial);
    const WsrResult hi = maximize_wsr_high_snr(inst.sm, inst.pm, w, 1.0);
    const WsrResult ex = maximize_wsr_exact(inst.sm, inst.pm, w, 1.0);
    REQUIRE(hi.status == SolveStatus::kOptimal);
    REQUIRE(ex.status == SolveStatus::kOptimal);
    CHECK(ex.wsr_bits_per_hz == doctest::Approx(hi.wsr_bits_per_hz).epsilon(0.01));
  }
}

TEST_CASE("exact design wins at low snr") {
  const Weights w = Weights::uniform(1, 1.5, 0.5);
  int wins = 0;
  const int trials = 50;
  for (int trial = 0; trial < trials; ++trial) {
    Instance inst = make_instance(2, 1, 0.0, 0.0, 4000 + trial);
    const WsrResult hi = maximize_wsr_high_snr(inst.sm, inst.pm, w, 1.0);
    const WsrResult ex = maximize_wsr_exact(inst.sm, inst.pm, w, 1.0);
    if (hi.status != SolveStatus::kOptimal || ex.status != SolveStatus::kOptimal) continue;
    if (ex.wsr_bits_per_hz >= hi.wsr_bits_per_hz - 1e-9) ++wins;
  }
  CHECK(wins >= trials * 90 / 100);
}

TEST_CASE("exact design matches grid search on the true rate") {
  const Weights w = Weights::uniform(1, 1.0, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    Instance inst = make_instance(2, 1, 5.0, 5.0, 5000 + trial);
    const WsrResult ex = maximize_wsr_exact(inst.sm, inst.pm, w, 1.0);
    REQUIRE(ex.status == SolveStatus::kOptimal);
    const auto objective = [&](double du, double db) {
      const DeltaVector d = delta2(du, db);
      if (inst.pm.eval(d) > 1.0) return std::nan("");
      return -wsr_value(inst.sm, d, w);
    };
    const oracle::GridResult grid = oracle::grid_search_2d(objective, 1e-6, 1e6, 2000, 2);
    CHECK(ex.wsr_bits_per_hz == doctest::Approx(-grid.value).epsilon(0.005));
  }
}

TEST_CASE("scaling all weights leaves the allocation unchanged") {
  Instance inst = make_instance(2, 1, 20.0, 14.0, 6000);
  const WsrResult a =
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 1.5, 0.5), 1.0);
  const WsrResult b =
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 4.5, 1.5), 1.0);
  REQUIRE(a.status == SolveStatus::kOptimal);
  REQUIRE(b.status == SolveStatus::kOptimal);
  CHECK(a.delta.u(0) == doctest::Approx(b.delta.u(0)).epsilon(1e-4));
  CHECK(a.delta.b(0) == doctest::Approx(b.delta.b(0)).epsilon(1e-4));
}

TEST_CASE("rate-targeted power minimization") {
  SUBCASE("zero targets cost nothing") {
    Instance inst = make_scalar_model(2.0, 2.0);
    const WsrResult res = minimize_power_rate_qos(inst.sm, inst.pm, QosSpec::rate(0.0, 0.0));
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.relay_power == 0.0);
    CHECK(res.delta.u(0) == 0.0);
    CHECK(res.delta.b(0) == 0.0);
  }

  SUBCASE("scalar noiseless-relay target inverts exactly") {
    const double a_u = 5.0;
    Instance inst = make_scalar_model(a_u, 3.0);
    const double r_u = 2.0;  // SNR_u >= 4
    const WsrResult res = minimize_power_rate_qos(inst.sm, inst.pm, QosSpec::rate(r_u, 0.0));
    REQUIRE(res.status == SolveStatus::kOptimal);
    const double expected = std::pow(2.0, r_u) * inst.sm.sigma2 / a_u;
    CHECK(res.delta.u(0) == doctest::Approx(expected).epsilon(1e-6));
    CHECK(res.relay_power == doctest::Approx(expected).epsilon(1e-6));
  }

  SUBCASE("matches grid search and keeps one constraint active") {
    for (int trial = 0; trial < 5; ++trial) {
      Instance inst = make_instance(2, 1, 14.0, 11.0, 7000 + trial);
      // Pick achievable targets from an equal-power reference point.
      const double coeff_sum = inst.pm.p_u.sum() + inst.pm.p_b.sum();
      const DeltaVector ref = DeltaVector::constant(1, 1.0 / coeff_sum);
      const double r_u = 0.8 * std::log2(inst.sm.snr(Dest::kRue, 0, ref));
      const double r_b = 0.8 * std::log2(inst.sm.snr(Dest::kBs, 0, ref));
      if (r_u <= 0 || r_b <= 0) continue;
      const QosSpec qos = QosSpec::rate(r_u, r_b);
      const WsrResult res = minimize_power_rate_qos(inst.sm, inst.pm, qos);
      REQUIRE(res.status == SolveStatus::kOptimal);

      const auto objective = [&](double du, double db) {
        const DeltaVector d = delta2(du, db);
        if (std::log2(inst.sm.snr(Dest::kRue, 0, d)) < r_u) return std::nan("");
        if (std::log2(inst.sm.snr(Dest::kBs, 0, d)) < r_b) return std::nan("");
        return inst.pm.eval(d);
      };
      const oracle::GridResult grid = oracle::grid_search_2d(objective, 1e-6, 1e6, 2000, 2);
      CHECK(res.relay_power == doctest::Approx(grid.value).epsilon(0.005));

      const double act_u = std::log2(inst.sm.snr(Dest::kRue, 0, res.delta)) / r_u;
      const double act_b = std::log2(inst.sm.snr(Dest::kBs, 0, res.delta)) / r_b;
      CHECK(std::min(std::abs(act_u - 1.0), std::abs(act_b - 1.0)) < 1e-6);
    }
  }

  SUBCASE("unreachable rates are reported infeasible") {
    Instance inst = make_instance(2, 1, 10.0, 10.0, 7100);
    // The relay-noise coupling caps the achievable SNR; ask far beyond it.
    const double cap_u = inst.sm.a_u(0) / (inst.sm.sigma2_r * inst.sm.b_u(0, 0));
    const WsrResult res = minimize_power_rate_qos(
        inst.sm, inst.pm, QosSpec::rate(std::log2(cap_u) + 5.0, 0.0));
    CHECK(res.status == SolveStatus::kInfeasible);
  }
}

TEST_CASE("snr-floor power minimization") {
  SUBCASE("zero floors cost nothing") {
    Instance inst = make_scalar_model(2.0, 2.0);
    const QosSpec qos = QosSpec::snr(RealVector::Zero(1), RealVector::Zero(1));
    const WsrResult res = minimize_power_snr_qos(inst.sm, inst.pm, qos);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.relay_power == 0.0);
  }

  SUBCASE("scalar noiseless-relay floor inverts exactly") {
    const double a_u = 5.0;
    Instance inst = make_scalar_model(a_u, 3.0);
    const double floor = 7.0;
    const QosSpec qos = QosSpec::snr(RealVector::Constant(1, floor), RealVector::Zero(1));
    const WsrResult res = minimize_power_snr_qos(inst.sm, inst.pm, qos);
    REQUIRE(res.status == SolveStatus::kOptimal);
    CHECK(res.delta.u(0) == doctest::Approx(floor * inst.sm.sigma2 / a_u).epsilon(1e-6));
  }

  SUBCASE("floors hold at the optimum") {
    for (int trial = 0; trial < 5; ++trial) {
      Instance inst = make_instance(4, 2, 16.0, 12.0, 7200 + trial);
      const DeltaVector ref = DeltaVector::constant(2, 0.1);
      RealVector s_u(2), s_b(2);
      for (int s = 0; s < 2; ++s) {
        s_u(s) = 0.7 * inst.sm.snr(Dest::kRue, s, ref);
        s_b(s) = 0.7 * inst.sm.snr(Dest::kBs, s, ref);
      }
      const WsrResult res = minimize_power_snr_qos(inst.sm, inst.pm, QosSpec::snr(s_u, s_b));
      REQUIRE(res.status == SolveStatus::kOptimal);
      for (int s = 0; s < 2; ++s) {
        CHECK(inst.sm.snr(Dest::kRue, s, res.delta) >= s_u(s) * (1.0 - 1e-8));
        CHECK(inst.sm.snr(Dest::kBs, s, res.delta) >= s_b(s) * (1.0 - 1e-8));
      }
    }
  }

  SUBCASE("unreachable floors are reported infeasible") {
    Instance inst = make_instance(2, 1, 10.0, 10.0, 7300);
    const double cap_u = inst.sm.a_u(0) / (inst.sm.sigma2_r * inst.sm.b_u(0, 0));
    const QosSpec qos =
        QosSpec::snr(RealVector::Constant(1, 10.0 * cap_u), RealVector::Zero(1));
    CHECK(minimize_power_snr_qos(inst.sm, inst.pm, qos).status == SolveStatus::kInfeasible);
  }
}

TEST_CASE("wsr solution stays affordable when fed back as snr floors") {
  Instance inst = make_instance(4, 2, 18.0, 15.0, 7400);
  const Weights w = Weights::uniform(2, 1.5, 0.5);
  const double p_r = 1.0;
  const WsrResult wsr = maximize_wsr_high_snr(inst.sm, inst.pm, w, p_r);
  REQUIRE(wsr.status == SolveStatus::kOptimal);
  RealVector s_u(2), s_b(2);
  for (int s = 0; s < 2; ++s) {
    s_u(s) = inst.sm.snr(Dest::kRue, s, wsr.delta);
    s_b(s) = inst.sm.snr(Dest::kBs, s, wsr.delta);
  }
  const WsrResult qos = minimize_power_snr_qos(inst.sm, inst.pm, QosSpec::snr(s_u, s_b));
  REQUIRE(qos.status == SolveStatus::kOptimal);
  CHECK(qos.relay_power <= p_r * (1.0 + 1e-6));
}

TEST_CASE("degenerate streams are excluded with a warning") {
  Instance inst = make_scalar_model(0.0, 2.0);  // RUE stream has zero gain
  const WsrResult res =
      maximize_wsr_high_snr(inst.sm, inst.pm, Weights::uniform(1, 1.0, 1.0), 1.0);
  REQUIRE(res.status == SolveStatus::kOptimal);
  CHECK(res.delta.u(0) == 0.0);
  CHECK(res.delta.b(0) > 0.0);
  REQUIRE(res.degenerate_streams.size() == 1);
  CHECK(res.degenerate_streams[0] == 0);
}
