#pragma once

#include <string>
#include <vector>

#include "atwr/linalg.hpp"

namespace atwr {

/// c * x1^a1 ... xn^an with c > 0.
struct Monomial {
  double coeff = 1.0;
  RealVector exponents;
};

/// Sum of monomials, all with positive coefficients.
struct Posynomial {
  std::vector<Monomial> terms;

  static Posynomial constant(double c, Eigen::Index num_vars);
  static Posynomial from(Monomial m) { return {{std::move(m)}}; }

  /// Adds c * prod x_i^a_i; silently drops exact-zero coefficients so
  /// vanishing model entries never produce invalid terms. Negative
  /// coefficients throw InvalidInput.
  void add_term(double coeff, const RealVector& exponents);
  bool empty() const { return terms.empty(); }
};

double eval(const Monomial& m, const RealVector& x);
double eval(const Posynomial& p, const RealVector& x);
double log_eval(const Posynomial& p, const RealVector& x);

/// Arithmetic-geometric-mean condensation of p around x0: the returned
/// monomial satisfies m(x0) = p(x0) and m(x) <= p(x) for every x > 0.
Monomial condense(const Posynomial& p, const RealVector& x0);

/// min objective s.t. constraints <= 1, equalities == 1, x >= lower_bounds.
/// Lower-bound entries <= 0 mean "unbounded below" (beyond positivity).
struct GpProblem {
  Eigen::Index num_vars = 0;
  std::vector<std::string> var_names;  // optional; empty or num_vars entries
  Posynomial objective;
  std::vector<Posynomial> constraints;
  std::vector<Monomial> equalities;
  RealVector lower_bounds;  // size 0 or num_vars
};

enum class SolveStatus { kOptimal, kInfeasible, kMaxIterations };

const char* to_string(SolveStatus s);

struct GpSolution {
  RealVector x;
  double objective = 0.0;
  double kkt_residual = 0.0;
  SolveStatus status = SolveStatus::kMaxIterations;
  int newton_iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;        // KKT/duality-gap target (in log space)
  int max_iterations = 500;  // total Newton iterations across all phases
  RealVector initial_point;  // optional strictly feasible start; skips phase I
  double initial_t = 1e4;    // barrier path start when the warm start is used
};

/// Interior-point solve after the x = exp(y) change of variables: phase-I
/// feasibility search followed by a damped-Newton barrier path.
GpSolution solve_gp(const GpProblem& problem, const SolverOptions& opts = {});

/// One factor f^weight of a weighted-product objective.
struct WeightedFactor {
  Posynomial f;
  double weight = 1.0;
};

/// Lemma-style epigraph reduction of minimize prod_k f_k^{w_k} over the
/// feasible set of `base`: introduces t and one t_k per positive-weight
/// factor, minimizes t subject to prod t_k^{w_k} <= t and f_k <= t_k.
/// Variables are laid out as [base vars..., t, t_1, ..., t_K]; the reduced
/// optimum equals the original one. Zero-weight factors are dropped,
/// negative weights throw InvalidInput.
GpProblem epigraph_reduce(const std::vector<WeightedFactor>& factors, const GpProblem& base);

/// Strictly feasible start for an epigraph-reduced problem built from a
/// point satisfying the base constraints: aux variables get `slack` headroom
/// over their tight values. Returns an empty vector when the values overflow.
RealVector epigraph_start(const std::vector<WeightedFactor>& factors, const GpProblem& base,
                          const RealVector& x_base, double slack = 2.0);

/// One factor (num/den)^weight of a posynomial-ratio objective.
struct RatioFactor {
  Posynomial num;
  Posynomial den;
  double weight = 1.0;
};

/// minimize prod_k (num_k/den_k)^{w_k} subject to posynomial constraints.
struct RatioProblem {
  Eigen::Index num_vars = 0;
  std::vector<std::string> var_names;
  std::vector<RatioFactor> factors;
  std::vector<Posynomial> constraints;
  std::vector<Monomial> equalities;
  RealVector lower_bounds;
};

struct CondensationOptions {
  int max_iterations = 50;
  double rel_tol = 1e-6;  // stop when the true objective changes less than this
  SolverOptions gp;
};

struct CondensationResult {
  GpSolution solution;                 // x holds the original variables only
  std::vector<double> objective_trace;  // true ratio objective per accepted iterate
  int iterations = 0;
};

/// Single-condensation loop: condense each denominator at the current point,
/// solve the resulting GP, repeat. Iterates are only accepted when they do
/// not increase the true objective, so the recorded trace is non-increasing;
/// every returned point is feasible for the true constraints. Throws
/// InvalidInput when x0 is not a strictly positive feasible point.
CondensationResult solve_condensed_ratio(const RatioProblem& problem, const RealVector& x0,
                                         const CondensationOptions& opts = {});

double ratio_objective(const RatioProblem& problem, const RealVector& x);

}  // namespace atwr
