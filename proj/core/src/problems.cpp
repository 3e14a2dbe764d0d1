#include "atwr/problems.hpp"

#include <cmath>
#include <limits>

namespace atwr {

namespace {

constexpr double kDeltaFloor = 1e-12;

// Stacked variable layout [delta_u..., delta_b...], with the own-power
// variables of zero-gain streams excluded from the problem (their delta is
// pinned to zero and they disappear from every posynomial).
struct ActiveSet {
  int m = 0;
  std::vector<int> to_active;  // size 2M, -1 when pinned
  std::vector<int> to_global;
  std::vector<int> degenerate;  // dest * M + s for excluded streams

  int count() const { return static_cast<int>(to_global.size()); }
};

int global_index(const SnrModel& sm, Dest dest, int own) {
  return dest == Dest::kRue ? own : sm.m_streams + own;
}

ActiveSet make_active_set(const SnrModel& sm) {
  ActiveSet as;
  as.m = sm.m_streams;
  as.to_active.assign(2 * as.m, -1);
  std::vector<bool> pinned(2 * as.m, false);
  for (int s = 0; s < as.m; ++s) {
    if (!(sm.a_u(s) > 0)) {
      pinned[global_index(sm, Dest::kRue, sm.own_index(s))] = true;
      as.degenerate.push_back(0 * as.m + s);
    }
    if (!(sm.a_b(s) > 0)) {
      pinned[global_index(sm, Dest::kBs, sm.own_index(s))] = true;
      as.degenerate.push_back(1 * as.m + s);
    }
  }
  for (int g = 0; g < 2 * as.m; ++g) {
    if (pinned[g]) continue;
    as.to_active[g] = as.count();
    as.to_global.push_back(g);
  }
  return as;
}

bool stream_active(const ActiveSet& as, const SnrModel& sm, Dest dest, int s) {
  return as.to_active[global_index(sm, dest, sm.own_index(s))] >= 0;
}

std::vector<std::string> active_names(const ActiveSet& as) {
  std::vector<std::string> names;
  names.reserve(as.to_global.size());
  for (int g : as.to_global) {
    const int m = as.m;
    names.push_back(g < m ? "du" + std::to_string(g + 1) : "db" + std::to_string(g - m + 1));
  }
  return names;
}

// ISNR_{i,s} = denominator / (a_i[s] delta_own): every denominator term is
// divided by the own-power monomial, which keeps it a posynomial.
Posynomial isnr_active(const SnrModel& sm, Dest dest, int s, const ActiveSet& as) {
  const int n = as.count();
  const int own_global = global_index(sm, dest, sm.own_index(s));
  const int own = as.to_active[own_global];
  if (own < 0) throw InvalidInput("isnr: stream has zero gain");
  const double a = dest == Dest::kRue ? sm.a_u(s) : sm.a_b(s);

  Posynomial out;
  auto add = [&](double coeff, int var_global) {
    RealVector e = RealVector::Zero(n);
    e(own) -= 1.0;
    if (var_global >= 0) {
      const int v = as.to_active[var_global];
      if (v < 0) return;  // pinned variable: term vanishes
      e(v) += 1.0;
    }
    out.add_term(coeff / a, e);
  };
  for (int k = 0; k < sm.m_streams; ++k) {
    if (dest == Dest::kRue) {
      add(sm.sigma2_r * sm.b_u(s, k), k);
    } else {
      add(sm.sigma2_r * sm.b_b(s, k), k);
      add(sm.sigma2_r * sm.c_b(s, k), sm.m_streams + k);
    }
  }
  add(sm.sigma2, -1);
  if (out.empty()) throw InvalidInput("isnr: noiseless stream has no denominator terms");
  return out;
}

// Denominator posynomial alone (numerator of 1/(1+SNR)).
Posynomial denominator_active(const SnrModel& sm, Dest dest, int s, const ActiveSet& as) {
  const int n = as.count();
  Posynomial out;
  auto add = [&](double coeff, int var_global) {
    RealVector e = RealVector::Zero(n);
    if (var_global >= 0) {
      const int v = as.to_active[var_global];
      if (v < 0) return;
      e(v) += 1.0;
    }
    out.add_term(coeff, e);
  };
  for (int k = 0; k < sm.m_streams; ++k) {
    if (dest == Dest::kRue) {
      add(sm.sigma2_r * sm.b_u(s, k), k);
    } else {
      add(sm.sigma2_r * sm.b_b(s, k), k);
      add(sm.sigma2_r * sm.c_b(s, k), sm.m_streams + k);
    }
  }
  add(sm.sigma2, -1);
  return out;
}

Posynomial power_active(const PowerModel& pm, const ActiveSet& as, double scale) {
  const int n = as.count();
  Posynomial out;
  for (int v = 0; v < n; ++v) {
    const int g = as.to_global[v];
    const double coeff = g < as.m ? pm.p_u(g) : pm.p_b(g - as.m);
    RealVector e = RealVector::Zero(n);
    e(v) = 1.0;
    out.add_term(coeff / scale, e);
  }
  if (out.empty()) throw InvalidInput("power constraint has no terms");
  return out;
}

DeltaVector unpack_delta(const ActiveSet& as, const RealVector& x) {
  DeltaVector d = DeltaVector::zero(as.m);
  for (int v = 0; v < as.count(); ++v) {
    double value = x(v);
    if (value <= 10.0 * kDeltaFloor) value = 0.0;  // floor-pinned stream switched off
    const int g = as.to_global[v];
    if (g < as.m) {
      d.u(g) = value;
    } else {
      d.b(g - as.m) = value;
    }
  }
  return d;
}

WsrResult zero_result(const SnrModel& sm, const Weights* w, const ActiveSet& as) {
  WsrResult res;
  res.delta = DeltaVector::zero(sm.m_streams);
  res.wsr_bits_per_hz = w ? wsr_value(sm, res.delta, *w) : 0.0;
  res.approx_objective = 0.0;
  res.relay_power = 0.0;
  res.status = SolveStatus::kOptimal;
  res.degenerate_streams = as.degenerate;
  return res;
}

GpProblem base_problem(const SnrModel& sm, const PowerModel& pm, const ActiveSet& as,
                       double p_r, bool with_power) {
  GpProblem base;
  base.num_vars = as.count();
  base.var_names = active_names(as);
  if (with_power) base.constraints.push_back(power_active(pm, as, p_r));
  base.lower_bounds = RealVector::Constant(as.count(), kDeltaFloor);
  return base;
}

}  // namespace

double wsr_value(const SnrModel& sm, const DeltaVector& delta, const Weights& w) {
  double rate = 0.0;
  for (int s = 0; s < sm.m_streams; ++s) {
    rate += w.u(s) * std::log2(1.0 + sm.snr(Dest::kRue, s, delta));
    rate += w.b(s) * std::log2(1.0 + sm.snr(Dest::kBs, s, delta));
  }
  return 0.5 * rate;
}

Posynomial isnr_posynomial(const SnrModel& sm, Dest dest, int s) {
  ActiveSet all;
  all.m = sm.m_streams;
  all.to_active.resize(2 * all.m);
  for (int g = 0; g < 2 * all.m; ++g) {
    all.to_active[g] = g;
    all.to_global.push_back(g);
  }
  return isnr_active(sm, dest, s, all);
}

Posynomial power_posynomial(const PowerModel& pm, double scale) {
  const int m = static_cast<int>(pm.p_u.size());
  Posynomial out;
  for (int j = 0; j < 2 * m; ++j) {
    RealVector e = RealVector::Zero(2 * m);
    e(j) = 1.0;
    out.add_term((j < m ? pm.p_u(j) : pm.p_b(j - m)) / scale, e);
  }
  return out;
}

WsrResult maximize_wsr_high_snr(const SnrModel& sm, const PowerModel& pm, const Weights& w,
                                double p_r, const SolverOptions& opts) {
  if (!(p_r > 0)) throw InvalidInput("maximize_wsr_high_snr: p_r must be positive");
  const ActiveSet as = make_active_set(sm);
  if (as.count() == 0) return zero_result(sm, &w, as);

  std::vector<WeightedFactor> factors;
  for (int s = 0; s < sm.m_streams; ++s) {
    for (Dest dest : {Dest::kRue, Dest::kBs}) {
      if (!stream_active(as, sm, dest, s)) continue;
      const double weight = dest == Dest::kRue ? w.u(s) : w.b(s);
      if (weight <= 0) continue;
      factors.push_back({isnr_active(sm, dest, s, as), weight});
    }
  }
  if (factors.empty()) return zero_result(sm, &w, as);

  const GpProblem base = base_problem(sm, pm, as, p_r, true);
  double coeff_sum = 0.0;
  for (const Monomial& t : base.constraints.front().terms) coeff_sum += t.coeff;
  SolverOptions warm = opts;
  warm.initial_point =
      epigraph_start(factors, base, RealVector::Constant(as.count(), 0.5 / coeff_sum));
  const GpSolution sol = solve_gp(epigraph_reduce(factors, base), warm);

  WsrResult res;
  res.status = sol.status;
  res.degenerate_streams = as.degenerate;
  if (sol.status == SolveStatus::kInfeasible) {
    res.delta = DeltaVector::zero(sm.m_streams);
    return res;
  }
  res.delta = unpack_delta(as, sol.x.head(as.count()));
  res.wsr_bits_per_hz = wsr_value(sm, res.delta, w);
  res.approx_objective = sol.objective;
  res.relay_power = pm.eval(res.delta);
  return res;
}

WsrResult maximize_wsr_exact(const SnrModel& sm, const PowerModel& pm, const Weights& w,
                             double p_r, const CondensationOptions& opts) {
  if (!(p_r > 0)) throw InvalidInput("maximize_wsr_exact: p_r must be positive");
  const ActiveSet as = make_active_set(sm);
  if (as.count() == 0) return zero_result(sm, &w, as);

  RatioProblem rp;
  rp.num_vars = as.count();
  rp.var_names = active_names(as);
  rp.constraints.push_back(power_active(pm, as, p_r));
  rp.lower_bounds = RealVector::Constant(as.count(), kDeltaFloor);
  for (int s = 0; s < sm.m_streams; ++s) {
    for (Dest dest : {Dest::kRue, Dest::kBs}) {
      if (!stream_active(as, sm, dest, s)) continue;
      const double weight = dest == Dest::kRue ? w.u(s) : w.b(s);
      if (weight <= 0) continue;
      // 1/(1+SNR) = den / (den + a * delta_own)
      RatioFactor f;
      f.num = denominator_active(sm, dest, s, as);
      f.den = f.num;
      const double a = dest == Dest::kRue ? sm.a_u(s) : sm.a_b(s);
      const int own = as.to_active[global_index(sm, dest, sm.own_index(s))];
      RealVector e = RealVector::Zero(as.count());
      e(own) = 1.0;
      f.den.add_term(a, e);
      f.weight = weight;
      rp.factors.push_back(std::move(f));
    }
  }
  if (rp.factors.empty()) return zero_result(sm, &w, as);

  // Equal split meeting the power budget with equality.
  double coeff_sum = 0.0;
  for (const Monomial& t : rp.constraints.front().terms) coeff_sum += t.coeff;
  const RealVector x0 = RealVector::Constant(as.count(), 1.0 / coeff_sum);

  const CondensationResult cr = solve_condensed_ratio(rp, x0, opts);

  WsrResult res;
  res.status = cr.solution.status;
  res.degenerate_streams = as.degenerate;
  res.delta = unpack_delta(as, cr.solution.x);
  res.wsr_bits_per_hz = wsr_value(sm, res.delta, w);
  res.approx_objective = cr.solution.objective;
  res.relay_power = pm.eval(res.delta);
  res.objective_trace = cr.objective_trace;
  return res;
}

QosSpec QosSpec::rate(double r_u, double r_b) {
  QosSpec q;
  q.mode = Mode::kRate;
  q.r_u = r_u;
  q.r_b = r_b;
  return q;
}

QosSpec QosSpec::snr(RealVector s_u, RealVector s_b) {
  QosSpec q;
  q.mode = Mode::kSnr;
  q.s_u = std::move(s_u);
  q.s_b = std::move(s_b);
  return q;
}

WsrResult minimize_power_rate_qos(const SnrModel& sm, const PowerModel& pm, const QosSpec& qos,
                                  const SolverOptions& opts) {
  if (qos.r_u < 0 || qos.r_b < 0) throw InvalidInput("rate targets must be nonnegative");
  const ActiveSet as = make_active_set(sm);
  const bool want_u = qos.r_u > 0;
  const bool want_b = qos.r_b > 0;
  if (!want_u && !want_b) return zero_result(sm, nullptr, as);

  // A destination with a zero-gain stream cannot meet any positive sum-rate
  // target: that stream's SNR is pinned at zero.
  for (int s = 0; s < sm.m_streams; ++s) {
    if ((want_u && !stream_active(as, sm, Dest::kRue, s)) ||
        (want_b && !stream_active(as, sm, Dest::kBs, s))) {
      WsrResult res = zero_result(sm, nullptr, as);
      res.status = SolveStatus::kInfeasible;
      return res;
    }
  }

  // Variables: [active deltas..., t_{u,1..M}?, t_{b,1..M}?]; per destination
  // ISNR_{i,m} <= t_{i,m} and 2^{r_i} prod_m t_{i,m} <= 1.
  const int nd = as.count();
  const int n_aux = (want_u ? sm.m_streams : 0) + (want_b ? sm.m_streams : 0);
  GpProblem gp;
  gp.num_vars = nd + n_aux;
  gp.var_names = active_names(as);
  gp.var_names.resize(gp.num_vars, "t");
  gp.lower_bounds = RealVector::Zero(gp.num_vars);
  gp.lower_bounds.head(nd) = RealVector::Constant(nd, kDeltaFloor);

  Posynomial power = power_active(pm, as, 1.0);
  for (Monomial& t : power.terms) {
    RealVector e = RealVector::Zero(gp.num_vars);
    e.head(nd) = t.exponents;
    t.exponents = e;
  }
  gp.objective = power;

  int aux = nd;
  auto add_destination = [&](Dest dest, double r_target) {
    RealVector prod = RealVector::Zero(gp.num_vars);
    for (int s = 0; s < sm.m_streams; ++s) {
      Posynomial isnr = isnr_active(sm, dest, s, as);
      Posynomial con;
      for (const Monomial& t : isnr.terms) {
        RealVector e = RealVector::Zero(gp.num_vars);
        e.head(nd) = t.exponents;
        e(aux) = -1.0;
        con.add_term(t.coeff, e);
      }
      gp.constraints.push_back(std::move(con));
      prod(aux) = 1.0;
      ++aux;
    }
    Posynomial rate_con;
    rate_con.add_term(std::pow(2.0, r_target), prod);
    gp.constraints.push_back(std::move(rate_con));
  };
  if (want_u) add_destination(Dest::kRue, qos.r_u);
  if (want_b) add_destination(Dest::kBs, qos.r_b);

  const GpSolution sol = solve_gp(gp, opts);
  WsrResult res;
  res.status = sol.status;
  res.degenerate_streams = as.degenerate;
  if (sol.status == SolveStatus::kInfeasible) {
    res.delta = DeltaVector::zero(sm.m_streams);
    return res;
  }
  res.delta = unpack_delta(as, sol.x.head(nd));
  res.relay_power = pm.eval(res.delta);
  res.approx_objective = res.relay_power;
  res.wsr_bits_per_hz = wsr_value(sm, res.delta, Weights::uniform(sm.m_streams, 1.0, 1.0));
  return res;
}

WsrResult minimize_power_snr_qos(const SnrModel& sm, const PowerModel& pm, const QosSpec& qos,
                                 const SolverOptions& opts) {
  const int m = sm.m_streams;
  if (qos.s_u.size() != m || qos.s_b.size() != m) {
    throw InvalidInput("snr floors must have M entries per destination");
  }
  if ((qos.s_u.array() < 0).any() || (qos.s_b.array() < 0).any()) {
    throw InvalidInput("snr floors must be nonnegative");
  }
  const ActiveSet as = make_active_set(sm);
  if (qos.s_u.maxCoeff() <= 0 && qos.s_b.maxCoeff() <= 0) {
    return zero_result(sm, nullptr, as);
  }
  for (int s = 0; s < m; ++s) {
    if ((qos.s_u(s) > 0 && !stream_active(as, sm, Dest::kRue, s)) ||
        (qos.s_b(s) > 0 && !stream_active(as, sm, Dest::kBs, s))) {
      WsrResult res = zero_result(sm, nullptr, as);
      res.status = SolveStatus::kInfeasible;
      return res;
    }
  }

  GpProblem gp = base_problem(sm, pm, as, 1.0, false);
  gp.objective = power_active(pm, as, 1.0);
  for (int s = 0; s < m; ++s) {
    for (Dest dest : {Dest::kRue, Dest::kBs}) {
      const double floor = dest == Dest::kRue ? qos.s_u(s) : qos.s_b(s);
      if (floor <= 0) continue;
      Posynomial con = isnr_active(sm, dest, s, as);
      for (Monomial& t : con.terms) t.coeff *= floor;  // s * ISNR <= 1
      gp.constraints.push_back(std::move(con));
    }
  }

  const GpSolution sol = solve_gp(gp, opts);
  WsrResult res;
  res.status = sol.status;
  res.degenerate_streams = as.degenerate;
  if (sol.status == SolveStatus::kInfeasible) {
    res.delta = DeltaVector::zero(m);
    return res;
  }
  res.delta = unpack_delta(as, sol.x.head(as.count()));
  res.relay_power = pm.eval(res.delta);
  res.approx_objective = res.relay_power;
  res.wsr_bits_per_hz = wsr_value(sm, res.delta, Weights::uniform(m, 1.0, 1.0));
  return res;
}

}  // namespace atwr
