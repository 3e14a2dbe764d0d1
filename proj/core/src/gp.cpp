#include "atwr/gp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

// Temporary tracing for development.
static const bool kGpTrace = std::getenv("ATWR_GP_TRACE") != nullptr;

namespace atwr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A posynomial after the x = exp(y) substitution: f(y) = logsumexp(A y + b).
// Convex and smooth, which is all the barrier machinery needs.
struct LogSumExp {
  RealMatrix a;  // K x n term exponents
  RealVector b;  // K log coefficients

  double value(const RealVector& y) const {
    const RealVector u = a * y + b;
    const double umax = u.maxCoeff();
    return umax + std::log((u.array() - umax).exp().sum());
  }

  // Returns value; fills softmax weights.
  double value_probs(const RealVector& y, RealVector& p) const {
    const RealVector u = a * y + b;
    const double umax = u.maxCoeff();
    p = (u.array() - umax).exp();
    const double z = p.sum();
    p /= z;
    return umax + std::log(z);
  }

  double value_grad(const RealVector& y, RealVector& g) const {
    RealVector p;
    const double v = value_probs(y, p);
    g.noalias() = a.transpose() * p;
    return v;
  }

  double value_grad_hess(const RealVector& y, RealVector& g, RealMatrix& h) const {
    RealVector p;
    const double v = value_probs(y, p);
    g.noalias() = a.transpose() * p;
    h.noalias() = a.transpose() * p.asDiagonal() * a;
    h.noalias() -= g * g.transpose();
    return v;
  }
};

LogSumExp to_log(const Posynomial& p, Eigen::Index n) {
  LogSumExp out;
  const Eigen::Index k = static_cast<Eigen::Index>(p.terms.size());
  out.a.resize(k, n);
  out.b.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Monomial& t = p.terms[i];
    if (!(t.coeff > 0)) throw InvalidInput("posynomial term with nonpositive coefficient");
    if (t.exponents.size() != n) throw DimensionMismatch("posynomial term dimension mismatch");
    out.a.row(i) = t.exponents.transpose();
    out.b(i) = std::log(t.coeff);
  }
  return out;
}

struct LogProblem {
  Eigen::Index n = 0;
  LogSumExp objective;
  std::vector<LogSumExp> cons;  // f_i(y) <= 0
  RealMatrix eq_a;              // n x p, columns are equality exponent vectors
  RealVector eq_b;              // p, log coefficients: eq_a^T y + eq_b = 0
};

LogProblem build_log_problem(const GpProblem& gp) {
  if (gp.num_vars <= 0) throw InvalidInput("solve_gp: problem has no variables");
  if (gp.objective.empty()) throw InvalidInput("solve_gp: empty objective");
  LogProblem lp;
  lp.n = gp.num_vars;
  lp.objective = to_log(gp.objective, lp.n);
  for (const Posynomial& c : gp.constraints) {
    if (c.empty()) continue;
    lp.cons.push_back(to_log(c, lp.n));
  }
  if (gp.lower_bounds.size() == gp.num_vars) {
    for (Eigen::Index j = 0; j < gp.num_vars; ++j) {
      if (gp.lower_bounds(j) > 0) {
        LogSumExp floor;
        floor.a = RealMatrix::Zero(1, lp.n);
        floor.a(0, j) = -1.0;
        floor.b.resize(1);
        floor.b(0) = std::log(gp.lower_bounds(j));
        lp.cons.push_back(std::move(floor));
      }
    }
  } else if (gp.lower_bounds.size() != 0) {
    throw DimensionMismatch("solve_gp: lower_bounds size mismatch");
  }
  const Eigen::Index p = static_cast<Eigen::Index>(gp.equalities.size());
  lp.eq_a.resize(lp.n, p);
  lp.eq_b.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const Monomial& m = gp.equalities[i];
    if (!(m.coeff > 0)) throw InvalidInput("equality monomial with nonpositive coefficient");
    if (m.exponents.size() != lp.n) throw DimensionMismatch("equality dimension mismatch");
    lp.eq_a.col(i) = m.exponents;
    lp.eq_b(i) = std::log(m.coeff);
  }
  return lp;
}

// Newton step for minimize phi(z) s.t. eq_a^T z_y = const. `hess` and `grad`
// are for the full z; equality columns are padded with zeros by the caller.
// Returns false when no usable direction exists.
bool kkt_direction(const RealMatrix& hess, const RealVector& grad, const RealMatrix& eq,
                   RealVector& dz) {
  const Eigen::Index n = grad.size();
  const Eigen::Index p = eq.cols();
  double reg = 0.0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    if (p == 0) {
      Eigen::LLT<RealMatrix> fact(reg == 0.0 ? hess
                                             : (hess + reg * RealMatrix::Identity(n, n)).eval());
      if (fact.info() == Eigen::Success) {
        dz = fact.solve(-grad);
        if (dz.allFinite() && grad.dot(dz) < 0) return true;
      }
    } else {
      RealMatrix kkt = RealMatrix::Zero(n + p, n + p);
      kkt.topLeftCorner(n, n) = hess + reg * RealMatrix::Identity(n, n);
      kkt.topRightCorner(n, p) = eq;
      kkt.bottomLeftCorner(p, n) = eq.transpose();
      RealVector rhs = RealVector::Zero(n + p);
      rhs.head(n) = -grad;
      const RealVector sol = kkt.fullPivLu().solve(rhs);
      dz = sol.head(n);
      if (dz.allFinite() && grad.dot(dz) < 0) return true;
    }
    const double scale = 1.0 + std::abs(hess.trace()) / std::max<double>(n, 1.0);
    reg = reg == 0.0 ? 1e-12 * scale : reg * 100.0;
  }
  return false;
}

struct BarrierState {
  RealVector y;
  int iterations = 0;
};

void project_to_equalities(const LogProblem& lp, RealVector& y);

// Centering for minimize f0(y) + (1/t) * sum -log(-f_i(y)) with linear
// equalities. Scaling the barrier by 1/t (rather than the objective by t)
// keeps the Newton system's conditioning at O(t) instead of O(t^2). Returns
// false if the iteration budget ran out.
bool center(const LogProblem& lp, double t, BarrierState& st, int max_total_iters) {
  const Eigen::Index n = lp.n;
  RealVector g(n), gi(n);
  RealMatrix h(n, n), hi(n, n);
  const double inv_t = 1.0 / t;
  auto psi_at = [&](const RealVector& y, bool& interior) {
    double psi = lp.objective.value(y);
    interior = true;
    for (const LogSumExp& c : lp.cons) {
      const double fi = c.value(y);
      if (fi >= 0) {
        interior = false;
        return 0.0;
      }
      psi -= inv_t * std::log(-fi);
    }
    return psi;
  };

  const int stage_cap = st.iterations + 60;
  while (st.iterations < std::min(max_total_iters, stage_cap)) {
    double psi = lp.objective.value_grad_hess(st.y, g, h);
    bool interior = true;
    for (const LogSumExp& c : lp.cons) {
      const double fi = c.value_grad_hess(st.y, gi, hi);
      if (fi >= 0) {
        interior = false;
        break;
      }
      const double inv = -inv_t / fi;  // (1/t) / (-f_i) > 0
      psi -= inv_t * std::log(-fi);
      g += inv * gi;
      h += inv * hi + (t * inv * inv) * gi * gi.transpose();
    }
    if (!interior) return false;  // should not happen: line search keeps interior

    RealVector dy;
    if (!kkt_direction(h, g, lp.eq_a, dy)) {
      if (kGpTrace) std::printf("  center t=%g iter=%d: no direction\n", t, st.iterations);
      return true;  // stationary to numerics
    }
    const double decrement = -g.dot(dy);
    if (kGpTrace) {
      std::printf("  center t=%g iter=%d psi=%g dec=%g\n", t, st.iterations, psi, decrement);
    }
    // Residual centering error below a couple of constraints' worth of
    // duality gap is harmless; this also stops chasing directions that only
    // the barrier cares about (variables the objective never sees).
    if (decrement / 2.0 < std::max(2.0 * inv_t, 1e-12 * (1.0 + std::abs(psi)))) return true;
    if (dy.cwiseAbs().maxCoeff() < 1e-11 * (1.0 + st.y.cwiseAbs().maxCoeff())) return true;

    // Backtracking: stay strictly interior, then Armijo on psi.
    double alpha = 1.0;
    const RealVector y0 = st.y;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      st.y = y0 + alpha * dy;
      bool ok = true;
      const double psi_new = psi_at(st.y, ok);
      if (ok && psi_new <= psi - 0.25 * alpha * decrement) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    ++st.iterations;
    if (!accepted) {
      st.y = y0;
      return true;  // stalled; treat as centered
    }
  }
  return st.iterations < max_total_iters;  // stage cap reached: move to the next t
}

// Phase I: minimize s over (y, s) s.t. f_i(y) - s <= 0. Succeeds as soon as
// an iterate with s safely negative shows up.
bool phase_one(const LogProblem& lp, BarrierState& st, int max_total_iters, bool& feasible) {
  const Eigen::Index n = lp.n;
  double max_f = -kInf;
  for (const LogSumExp& c : lp.cons) max_f = std::max(max_f, c.value(st.y));
  if (lp.cons.empty() || max_f < -1e-8) {
    feasible = true;
    return true;
  }
  double s = max_f + 1.0;

  RealMatrix eq_ext = RealMatrix::Zero(n + 1, lp.eq_a.cols());
  eq_ext.topRows(n) = lp.eq_a;

  RealVector gi(n);
  RealMatrix hi(n, n);
  double t = 1.0;
  const double m = static_cast<double>(lp.cons.size());
  while (st.iterations < max_total_iters) {
    // One centering pass at this t, on s + (1/t) sum -log(s - f_i(y)).
    const double inv_t = 1.0 / t;
    auto phi_at = [&](const RealVector& yy, double ss, bool& ok) {
      double phi = ss;
      ok = true;
      for (const LogSumExp& c : lp.cons) {
        const double ui = ss - c.value(yy);
        if (ui <= 0) {
          ok = false;
          return 0.0;
        }
        phi -= inv_t * std::log(ui);
      }
      return phi;
    };
    const int stage_cap = st.iterations + 60;
    bool stage_converged = false;
    while (st.iterations < std::min(max_total_iters, stage_cap)) {
      RealVector g = RealVector::Zero(n + 1);
      RealMatrix h = RealMatrix::Zero(n + 1, n + 1);
      g(n) = 1.0;
      for (const LogSumExp& c : lp.cons) {
        const double ui = s - c.value_grad_hess(st.y, gi, hi);
        const double di = inv_t / ui;
        g.head(n) += di * gi;
        g(n) -= di;
        h.topLeftCorner(n, n) += di * hi + (t * di * di) * gi * gi.transpose();
        h.topRightCorner(n, 1) -= (t * di * di) * gi;
        h.bottomLeftCorner(1, n) -= (t * di * di) * gi.transpose();
        h(n, n) += t * di * di;
      }
      RealVector dz;
      if (!kkt_direction(h, g, eq_ext, dz)) {
        stage_converged = true;
        break;
      }
      const double decrement = -g.dot(dz);
      if (decrement / 2.0 < std::max(2.0 * inv_t, 1e-12 * (1.0 + std::abs(s)))) {
        stage_converged = true;
        break;
      }
      if (dz.cwiseAbs().maxCoeff() < 1e-11 * (1.0 + std::abs(s) + st.y.cwiseAbs().maxCoeff())) {
        stage_converged = true;
        break;
      }

      double alpha = 1.0;
      const RealVector y0 = st.y;
      const double s0 = s;
      bool accepted = false;
      bool ok0 = true;
      const double phi0 = phi_at(y0, s0, ok0);
      for (int ls = 0; ls < 60; ++ls) {
        st.y = y0 + alpha * dz.head(n);
        s = s0 + alpha * dz(n);
        bool ok = true;
        const double phi_new = phi_at(st.y, s, ok);
        if (ok && phi_new <= phi0 - 0.25 * alpha * decrement) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      ++st.iterations;
      if (!accepted) {
        st.y = y0;
        s = s0;
        break;
      }
      if (s < -1e-6) {
        feasible = true;
        return true;
      }
    }
    project_to_equalities(lp, st.y);
    if (s < -1e-6) {
      feasible = true;
      return true;
    }
    // Barrier duality at a centered point: the optimal slack is at least
    // s - m/t, so a safely positive value certifies infeasibility.
    if (stage_converged && s > 0 && s - 2.0 * m / t > 0 && t > 1e4) {
      feasible = false;
      return true;
    }
    if (m / t < 1e-10) {
      feasible = s < 0;
      return true;
    }
    t *= 20.0;
  }
  return false;
}

double kkt_residual(const LogProblem& lp, const RealVector& y, double t) {
  const Eigen::Index n = lp.n;
  const Eigen::Index m = static_cast<Eigen::Index>(lp.cons.size());
  const Eigen::Index p = lp.eq_a.cols();
  RealVector g0(n), gi(n);
  lp.objective.value_grad(y, g0);

  // Central-path multipliers, then a least-squares refinement over the
  // near-active constraints (the central formula alone is only O(1/sqrt(t))
  // accurate in stationarity).
  std::vector<RealVector> grads(m);
  RealVector fvals(m), lambda(m);
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < m; ++i) {
    fvals(i) = lp.cons[i].value_grad(y, grads[i]);
    lambda(i) = 1.0 / (t * (-fvals(i)));
    if (lambda(i) > 1e-6) active.push_back(i);
  }
  RealVector base = g0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lambda(i) <= 1e-6) base += lambda(i) * grads[i];
  }
  const Eigen::Index cols = static_cast<Eigen::Index>(active.size()) + p;
  if (cols > 0) {
    RealMatrix b(n, cols);
    for (std::size_t k = 0; k < active.size(); ++k) b.col(k) = grads[active[k]];
    if (p > 0) b.rightCols(p) = lp.eq_a;
    const RealVector z = b.colPivHouseholderQr().solve(-base);
    for (std::size_t k = 0; k < active.size(); ++k) {
      lambda(active[k]) = std::max(z(static_cast<Eigen::Index>(k)), 0.0);
    }
    RealVector r = base;
    for (std::size_t k = 0; k < active.size(); ++k) {
      r += lambda(active[k]) * grads[active[k]];
    }
    if (p > 0) r += lp.eq_a * z.tail(p);
    base = r;
  }

  double res = base.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < m; ++i) {
    res = std::max(res, lambda(i) * std::abs(fvals(i)));  // complementarity
  }
  if (p > 0) {
    res = std::max(res, (lp.eq_a.transpose() * y + lp.eq_b).cwiseAbs().maxCoeff());
  }
  return res;
}

// Removes numerical drift off the equality manifold.
void project_to_equalities(const LogProblem& lp, RealVector& y) {
  if (lp.eq_a.cols() == 0) return;
  const RealVector violation = lp.eq_a.transpose() * y + lp.eq_b;
  y -= lp.eq_a * (lp.eq_a.transpose() * lp.eq_a).ldlt().solve(violation);
}

}  // namespace

Posynomial Posynomial::constant(double c, Eigen::Index num_vars) {
  Posynomial p;
  p.add_term(c, RealVector::Zero(num_vars));
  return p;
}

void Posynomial::add_term(double coeff, const RealVector& exponents) {
  if (coeff < 0) throw InvalidInput("posynomial coefficients must be nonnegative");
  if (coeff == 0) return;
  terms.push_back({coeff, exponents});
}

double eval(const Monomial& m, const RealVector& x) {
  if ((x.array() <= 0).any()) throw DomainError("monomial eval: x must be positive");
  double v = m.coeff;
  for (Eigen::Index j = 0; j < m.exponents.size(); ++j) {
    if (m.exponents(j) != 0) v *= std::pow(x(j), m.exponents(j));
  }
  return v;
}

double eval(const Posynomial& p, const RealVector& x) {
  if (p.empty()) throw InvalidInput("posynomial eval: empty posynomial");
  double v = 0.0;
  for (const Monomial& t : p.terms) v += eval(t, x);
  return v;
}

double log_eval(const Posynomial& p, const RealVector& x) {
  if (p.empty()) throw InvalidInput("posynomial eval: empty posynomial");
  if ((x.array() <= 0).any()) throw DomainError("posynomial eval: x must be positive");
  return to_log(p, x.size()).value(x.array().log().matrix());
}

Monomial condense(const Posynomial& p, const RealVector& x0) {
  if (p.empty()) throw InvalidInput("condense: empty posynomial");
  if ((x0.array() <= 0).any()) throw DomainError("condense: x0 must be positive");
  if (p.terms.size() == 1) return p.terms.front();
  const Eigen::Index n = x0.size();
  std::vector<double> u(p.terms.size());
  double total = 0.0;
  for (std::size_t k = 0; k < p.terms.size(); ++k) {
    u[k] = eval(p.terms[k], x0);
    total += u[k];
  }
  Monomial out;
  out.exponents = RealVector::Zero(n);
  double log_coeff = 0.0;
  for (std::size_t k = 0; k < p.terms.size(); ++k) {
    const double alpha = u[k] / total;
    if (alpha <= 0) continue;
    out.exponents += alpha * p.terms[k].exponents;
    log_coeff += alpha * (std::log(p.terms[k].coeff) - std::log(alpha));
  }
  out.coeff = std::exp(log_coeff);
  return out;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kMaxIterations:
      return "max-iters";
  }
  return "unknown";
}

GpSolution solve_gp(const GpProblem& problem, const SolverOptions& opts) {
  LogProblem lp = build_log_problem(problem);
  GpSolution sol;

  BarrierState st;
  st.y = RealVector::Zero(lp.n);
  if (lp.eq_a.cols() > 0) {
    // Min-norm point on the equality manifold.
    st.y = lp.eq_a.transpose().colPivHouseholderQr().solve(-lp.eq_b);
  }
  if (problem.lower_bounds.size() == problem.num_vars) {
    for (Eigen::Index j = 0; j < problem.num_vars; ++j) {
      if (problem.lower_bounds(j) > 0 && lp.eq_a.cols() == 0) {
        st.y(j) = std::max(st.y(j), std::log(problem.lower_bounds(j)) + 2.0);
      }
    }
  }
  bool warm = false;
  if (opts.initial_point.size() == problem.num_vars &&
      (opts.initial_point.array() > 0).all()) {
    RealVector y0 = opts.initial_point.array().log();
    bool usable = y0.allFinite();
    for (const LogSumExp& c : lp.cons) {
      if (!usable || c.value(y0) >= 0) {
        usable = false;
        break;
      }
    }
    if (usable && lp.eq_a.cols() > 0) {
      usable = (lp.eq_a.transpose() * y0 + lp.eq_b).cwiseAbs().maxCoeff() < 1e-9;
    }
    if (usable) {
      st.y = std::move(y0);
      warm = true;
    }
  }

  bool feasible = false;
  if (!phase_one(lp, st, opts.max_iterations, feasible)) {
    sol.status = SolveStatus::kMaxIterations;
    sol.x = st.y.array().exp();
    sol.newton_iterations = st.iterations;
    return sol;
  }
  if (!feasible) {
    sol.status = SolveStatus::kInfeasible;
    sol.newton_iterations = st.iterations;
    return sol;
  }

  const double m = static_cast<double>(lp.cons.size());
  const double gap_target = std::min(opts.tol, 1e-8) * 0.1;
  // A usable warm start is assumed near-optimal: begin with a weak barrier
  // instead of dragging the iterate to the analytic center and back.
  double t = warm ? std::max(1.0, opts.initial_t) : 1.0;
  while (st.iterations < opts.max_iterations) {
    if (!center(lp, t, st, opts.max_iterations)) break;
    project_to_equalities(lp, st.y);
    if (m == 0 || m / t <= gap_target) {
      sol.status = SolveStatus::kOptimal;
      break;
    }
    t *= 20.0;
  }
  sol.x = st.y.array().exp();
  sol.objective = eval(problem.objective, sol.x);
  sol.kkt_residual = kkt_residual(lp, st.y, std::max(t, 1.0));
  sol.newton_iterations = st.iterations;
  return sol;
}

GpProblem epigraph_reduce(const std::vector<WeightedFactor>& factors, const GpProblem& base) {
  std::vector<const WeightedFactor*> active;
  for (const WeightedFactor& f : factors) {
    if (f.weight < 0) throw InvalidInput("epigraph_reduce: negative weight");
    if (f.weight > 0) active.push_back(&f);
  }
  const Eigen::Index n = base.num_vars;
  const Eigen::Index k = static_cast<Eigen::Index>(active.size());

  GpProblem out;
  out.num_vars = n + 1 + k;
  if (!base.var_names.empty()) {
    out.var_names = base.var_names;
    out.var_names.push_back("t");
    for (Eigen::Index i = 0; i < k; ++i) out.var_names.push_back("t" + std::to_string(i + 1));
  }
  auto extend = [&](const RealVector& e) {
    RealVector out_e = RealVector::Zero(out.num_vars);
    out_e.head(n) = e;
    return out_e;
  };

  // objective: t
  RealVector t_exp = RealVector::Zero(out.num_vars);
  t_exp(n) = 1.0;
  out.objective.add_term(1.0, t_exp);

  // prod t_i^{w_i} <= t
  RealVector prod_exp = RealVector::Zero(out.num_vars);
  prod_exp(n) = -1.0;
  for (Eigen::Index i = 0; i < k; ++i) prod_exp(n + 1 + i) = active[i]->weight;
  Posynomial prod_con;
  prod_con.add_term(1.0, prod_exp);
  out.constraints.push_back(std::move(prod_con));

  // f_i <= t_i
  for (Eigen::Index i = 0; i < k; ++i) {
    Posynomial con;
    for (const Monomial& term : active[i]->f.terms) {
      RealVector e = extend(term.exponents);
      e(n + 1 + i) = -1.0;
      con.add_term(term.coeff, e);
    }
    if (con.empty()) throw InvalidInput("epigraph_reduce: empty factor");
    out.constraints.push_back(std::move(con));
  }

  for (const Posynomial& c : base.constraints) {
    Posynomial con;
    for (const Monomial& term : c.terms) con.add_term(term.coeff, extend(term.exponents));
    out.constraints.push_back(std::move(con));
  }
  for (const Monomial& e : base.equalities) {
    out.equalities.push_back({e.coeff, extend(e.exponents)});
  }
  if (base.lower_bounds.size() == n) {
    out.lower_bounds = RealVector::Zero(out.num_vars);
    out.lower_bounds.head(n) = base.lower_bounds;
  }
  return out;
}

RealVector epigraph_start(const std::vector<WeightedFactor>& factors, const GpProblem& base,
                          const RealVector& x_base, double slack) {
  std::vector<const WeightedFactor*> active;
  for (const WeightedFactor& f : factors) {
    if (f.weight > 0) active.push_back(&f);
  }
  const Eigen::Index n = base.num_vars;
  RealVector x(n + 1 + static_cast<Eigen::Index>(active.size()));
  x.head(n) = x_base;
  double log_t = std::log(slack);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const double tk = slack * eval(active[k]->f, x_base);
    x(n + 1 + static_cast<Eigen::Index>(k)) = tk;
    log_t += active[k]->weight * std::log(tk);
  }
  x(n) = std::exp(log_t);
  if (!x.allFinite() || (x.array() <= 0).any()) return RealVector();
  return x;
}

double ratio_objective(const RatioProblem& problem, const RealVector& x) {
  double log_obj = 0.0;
  for (const RatioFactor& f : problem.factors) {
    if (f.weight == 0) continue;
    log_obj += f.weight * (log_eval(f.num, x) - log_eval(f.den, x));
  }
  return std::exp(log_obj);
}

CondensationResult solve_condensed_ratio(const RatioProblem& problem, const RealVector& x0,
                                         const CondensationOptions& opts) {
  if (x0.size() != problem.num_vars) throw DimensionMismatch("solve_condensed_ratio: x0 size");
  if ((x0.array() <= 0).any()) throw InvalidInput("solve_condensed_ratio: x0 must be positive");
  for (const RatioFactor& f : problem.factors) {
    if (f.weight < 0) throw InvalidInput("solve_condensed_ratio: negative weight");
  }
  for (const Posynomial& c : problem.constraints) {
    if (!c.empty() && eval(c, x0) > 1.0 + 1e-9) {
      throw InvalidInput("solve_condensed_ratio: x0 violates a constraint");
    }
  }

  GpProblem base;
  base.num_vars = problem.num_vars;
  base.var_names = problem.var_names;
  base.constraints = problem.constraints;
  base.equalities = problem.equalities;
  base.lower_bounds = problem.lower_bounds;

  CondensationResult res;
  RealVector x = x0;
  res.objective_trace.push_back(ratio_objective(problem, x));

  GpSolution last;
  last.x = x;
  last.status = SolveStatus::kOptimal;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    std::vector<WeightedFactor> factors;
    factors.reserve(problem.factors.size());
    for (const RatioFactor& f : problem.factors) {
      if (f.weight == 0) continue;
      const Monomial den_mono = condense(f.den, x);
      Posynomial surrogate;
      for (const Monomial& term : f.num.terms) {
        surrogate.add_term(term.coeff / den_mono.coeff, term.exponents - den_mono.exponents);
      }
      factors.push_back({std::move(surrogate), f.weight});
    }
    // Shrink the current iterate so it sits comfortably inside every
    // constraint, then use it to skip the subproblem's feasibility phase.
    RealVector interior = x * (1.0 - 1e-3);
    if (base.lower_bounds.size() == base.num_vars) {
      for (Eigen::Index j = 0; j < base.num_vars; ++j) {
        if (base.lower_bounds(j) > 0) {
          interior(j) = std::max(interior(j), base.lower_bounds(j) * 1.01);
        }
      }
    }
    SolverOptions gp_opts = opts.gp;
    gp_opts.initial_point = epigraph_start(factors, base, interior);
    GpSolution sol = solve_gp(epigraph_reduce(factors, base), gp_opts);
    ++res.iterations;
    if (sol.status != SolveStatus::kOptimal) {
      if (iter == 0) {
        last.status = sol.status;
      }
      break;
    }
    const RealVector x_new = sol.x.head(problem.num_vars);
    const double obj_new = ratio_objective(problem, x_new);
    if (kGpTrace) {
      std::printf("condense iter %d: newton=%d surrogate=%g true=%g x=", iter,
                  sol.newton_iterations, sol.objective, obj_new);
      for (Eigen::Index j = 0; j < x_new.size(); ++j) std::printf(" %.5g", x_new(j));
      std::printf("\n");
    }
    const double obj_prev = res.objective_trace.back();
    if (!(obj_new <= obj_prev)) break;  // no further progress; keep previous point
    res.objective_trace.push_back(obj_new);
    x = x_new;
    last = sol;
    last.x = x;
    if (std::abs(obj_prev - obj_new) <= opts.rel_tol * std::max(std::abs(obj_prev), 1e-300)) {
      break;
    }
  }
  res.solution = last;
  res.solution.x = x;
  res.solution.objective = res.objective_trace.back();
  return res;
}

}  // namespace atwr
