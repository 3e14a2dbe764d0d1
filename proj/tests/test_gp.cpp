#include <doctest.h>

#include <random>

#include "atwr/gp.hpp"
#include "oracles.hpp"

using namespace atwr;

namespace {

RealVector vec2(double a, double b) {
  RealVector v(2);
  v << a, b;
  return v;
}

Posynomial x_plus_inv_x() {
  Posynomial p;
  RealVector e(1);
  e << 1.0;
  p.add_term(1.0, e);
  e << -1.0;
  p.add_term(1.0, e);
  return p;
}

}  // namespace

TEST_CASE("posynomial evaluation") {
  const Posynomial p = x_plus_inv_x();
  RealVector x(1);
  x << 1.0;
  CHECK(eval(p, x) == doctest::Approx(2.0));

  Posynomial q;
  q.add_term(3.0, vec2(2.0, -1.0));
  CHECK(eval(q, vec2(2.0, 4.0)) == doctest::Approx(3.0));

  x << -1.0;
  CHECK_THROWS_AS(eval(p, x), DomainError);
  CHECK_THROWS_AS(q.add_term(-1.0, vec2(0, 0)), InvalidInput);
}

TEST_CASE("log_eval matches direct evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coeff(0.1, 5.0);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Posynomial p;
    for (int k = 0; k < 4; ++k) p.add_term(coeff(rng), vec2(expo(rng), expo(rng)));
    const RealVector x = vec2(coeff(rng), coeff(rng));
    CHECK(std::exp(log_eval(p, x)) == doctest::Approx(eval(p, x)).epsilon(1e-12));
  }
}

TEST_CASE("condensation at the symmetric point") {
  const Posynomial p = x_plus_inv_x();
  RealVector x0(1);
  x0 << 1.0;
  const Monomial m = condense(p, x0);
  CHECK(m.coeff == doctest::Approx(2.0));
  CHECK(m.exponents(0) == doctest::Approx(0.0));
}

TEST_CASE("condensation weights follow the term shares") {
  const Posynomial p = x_plus_inv_x();
  RealVector x0(1);
  x0 << 2.0;
  const Monomial m = condense(p, x0);
  // shares 2/2.5 and 0.5/2.5
  CHECK(m.exponents(0) == doctest::Approx(0.8 - 0.2));
  CHECK(eval(m, x0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("condensing a monomial returns it unchanged") {
  Posynomial p;
  p.add_term(3.0, vec2(1.5, -0.5));
  RealVector x0 = vec2(0.7, 1.3);
  const Monomial m = condense(p, x0);
  CHECK(m.coeff == doctest::Approx(3.0));
  CHECK(m.exponents(0) == doctest::Approx(1.5));
  CHECK(m.exponents(1) == doctest::Approx(-0.5));
}

TEST_CASE("condensation is a global under-estimator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coeff(0.2, 3.0);
  std::uniform_real_distribution<double> expo(-2.0, 2.0);
  std::lognormal_distribution<double> point(0.0, 1.5);
  Posynomial p;
  for (int k = 0; k < 5; ++k) p.add_term(coeff(rng), vec2(expo(rng), expo(rng)));
  const RealVector x0 = vec2(point(rng), point(rng));
  const Monomial m = condense(p, x0);
  CHECK(eval(m, x0) == doctest::Approx(eval(p, x0)).epsilon(1e-10));
  for (int probe = 0; probe < 10000; ++probe) {
    const RealVector x = vec2(point(rng), point(rng));
    CHECK(eval(m, x) <= eval(p, x) * (1.0 + 1e-10));
  }
}

TEST_CASE("solve_gp on textbook instances") {
  SUBCASE("min x subject to 1/x <= 1") {
    GpProblem gp;
    gp.num_vars = 1;
    RealVector e(1);
    e << 1.0;
    gp.objective.add_term(1.0, e);
    Posynomial con;
    e << -1.0;
    con.add_term(1.0, e);
    gp.constraints.push_back(con);
    const GpSolution sol = solve_gp(gp);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.kkt_residual < 1e-8);
  }

  SUBCASE("min x+y subject to 1/(xy) <= 1") {
    GpProblem gp;
    gp.num_vars = 2;
    gp.objective.add_term(1.0, vec2(1, 0));
    gp.objective.add_term(1.0, vec2(0, 1));
    Posynomial con;
    con.add_term(1.0, vec2(-1, -1));
    gp.constraints.push_back(con);
    const GpSolution sol = solve_gp(gp);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(sol.x(1) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
  }

  SUBCASE("min xy subject to 1/x + 1/y <= 1") {
    GpProblem gp;
    gp.num_vars = 2;
    gp.objective.add_term(1.0, vec2(1, 1));
    Posynomial con;
    con.add_term(1.0, vec2(-1, 0));
    con.add_term(1.0, vec2(0, -1));
    gp.constraints.push_back(con);
    const GpSolution sol = solve_gp(gp);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.x(0) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(sol.x(1) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(sol.objective == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(eval(gp.constraints[0], sol.x) <= 1.0 + 1e-8);
  }
}

TEST_CASE("solve_gp handles monomial equalities") {
  // min x s.t. x y = 1, y <= 4  ->  y = 4, x = 1/4.
  GpProblem gp;
  gp.num_vars = 2;
  gp.objective.add_term(1.0, vec2(1, 0));
  Posynomial con;
  con.add_term(0.25, vec2(0, 1));
  gp.constraints.push_back(con);
  gp.equalities.push_back({1.0, vec2(1, 1)});
  const GpSolution sol = solve_gp(gp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.x(0) == doctest::Approx(0.25).epsilon(1e-5));
  CHECK(sol.x(1) == doctest::Approx(4.0).epsilon(1e-5));
  CHECK(sol.x(0) * sol.x(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve_gp reports infeasibility") {
  // x >= 2 and x <= 1 cannot hold together.
  GpProblem gp;
  gp.num_vars = 1;
  RealVector e(1);
  e << 1.0;
  gp.objective.add_term(1.0, e);
  Posynomial lo;
  e << -1.0;
  lo.add_term(2.0, e);
  Posynomial hi;
  e << 1.0;
  hi.add_term(1.0, e);
  gp.constraints.push_back(lo);
  gp.constraints.push_back(hi);
  CHECK(solve_gp(gp).status == SolveStatus::kInfeasible);
}

TEST_CASE("solve_gp honors variable lower bounds") {
  GpProblem gp;
  gp.num_vars = 1;
  RealVector e(1);
  e << 1.0;
  gp.objective.add_term(1.0, e);
  gp.lower_bounds = RealVector::Constant(1, 3.0);
  const GpSolution sol = solve_gp(gp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.x(0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("solve_gp matches a grid oracle on random 2-variable instances") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> coeff(0.2, 4.0);
  std::uniform_real_distribution<double> expo(0.2, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    // min sum of mixed terms s.t. x + y <= budget, inside a box.
    GpProblem gp;
    gp.num_vars = 2;
    gp.objective.add_term(coeff(rng), vec2(-expo(rng), 0));
    gp.objective.add_term(coeff(rng), vec2(0, -expo(rng)));
    gp.objective.add_term(coeff(rng), vec2(expo(rng), expo(rng)));
    const double budget = 5.0 + 10.0 * expo(rng);
    Posynomial power;
    power.add_term(1.0 / budget, vec2(1, 0));
    power.add_term(1.0 / budget, vec2(0, 1));
    gp.constraints.push_back(power);
    const GpSolution sol = solve_gp(gp);
    REQUIRE(sol.status == SolveStatus::kOptimal);

    const GpProblem& ref = gp;
    const auto objective = [&](double x0, double x1) {
      const RealVector x = vec2(x0, x1);
      if (eval(ref.constraints[0], x) > 1.0) return std::nan("");
      return eval(ref.objective, x);
    };
    const oracle::GridResult grid = oracle::grid_search_2d(objective, 1e-4, 1e4, 600, 2);
    CHECK(sol.objective == doctest::Approx(grid.value).epsilon(1e-3));
  }
}

TEST_CASE("epigraph reduction preserves the optimum") {
  SUBCASE("single factor with unit weight") {
    GpProblem base;
    base.num_vars = 1;
    base.lower_bounds = RealVector::Constant(1, 0.1);
    Posynomial box;
    RealVector e(1);
    e << 1.0;
    box.add_term(0.1, e);  // x <= 10
    base.constraints.push_back(box);

    base.objective = x_plus_inv_x();
    const GpSolution direct = solve_gp(base);

    GpProblem reduced = epigraph_reduce({{x_plus_inv_x(), 1.0}}, base);
    const GpSolution via_t = solve_gp(reduced);
    REQUIRE(direct.status == SolveStatus::kOptimal);
    REQUIRE(via_t.status == SolveStatus::kOptimal);
    CHECK(via_t.objective == doctest::Approx(direct.objective).epsilon(1e-6));
    CHECK(direct.objective == doctest::Approx(2.0).epsilon(1e-6));
  }

  SUBCASE("fractional weights against the grid oracle") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> coeff(0.2, 3.0);
    std::uniform_real_distribution<double> expo(-1.5, 1.5);
    for (int trial = 0; trial < 5; ++trial) {
      Posynomial f1, f2;
      for (int k = 0; k < 3; ++k) {
        f1.add_term(coeff(rng), vec2(expo(rng), expo(rng)));
        f2.add_term(coeff(rng), vec2(expo(rng), expo(rng)));
      }
      GpProblem base;
      base.num_vars = 2;
      base.lower_bounds = RealVector::Constant(2, 0.1);
      Posynomial box;
      box.add_term(0.1, vec2(1, 0));
      base.constraints.push_back(box);
      Posynomial box2;
      box2.add_term(0.1, vec2(0, 1));
      base.constraints.push_back(box2);

      const double w1 = 1.5, w2 = 0.5;
      const GpSolution sol = solve_gp(epigraph_reduce({{f1, w1}, {f2, w2}}, base));
      REQUIRE(sol.status == SolveStatus::kOptimal);

      const auto objective = [&](double x0, double x1) {
        if (x0 < 0.1 || x0 > 10.0 || x1 < 0.1 || x1 > 10.0) return std::nan("");
        const RealVector x = vec2(x0, x1);
        return std::pow(eval(f1, x), w1) * std::pow(eval(f2, x), w2);
      };
      const oracle::GridResult grid = oracle::grid_search_2d(objective, 0.1, 10.0, 600, 2);
      CHECK(sol.objective == doctest::Approx(grid.value).epsilon(1e-3));
    }
  }

  SUBCASE("all-zero weights make the objective constant") {
    GpProblem base;
    base.num_vars = 1;
    base.lower_bounds = RealVector::Constant(1, 0.5);
    const GpSolution sol = solve_gp(epigraph_reduce({{x_plus_inv_x(), 0.0}}, base));
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-6));
  }

  SUBCASE("negative weight is rejected") {
    GpProblem base;
    base.num_vars = 1;
    CHECK_THROWS_AS(epigraph_reduce({{x_plus_inv_x(), -1.0}}, base), InvalidInput);
  }
}

TEST_CASE("condensation loop with trivial denominators equals one GP solve") {
  RatioProblem rp;
  rp.num_vars = 2;
  for (int k = 0; k < 2; ++k) {
    RatioFactor f;
    f.num.add_term(1.0, vec2(k == 0 ? -1.0 : 0.0, k == 0 ? 0.0 : -1.0));
    f.den = Posynomial::constant(1.0, 2);
    f.weight = 1.0;
    rp.factors.push_back(f);
  }
  Posynomial power;
  power.add_term(1.0, vec2(1, 0));
  power.add_term(1.0, vec2(0, 1));
  rp.constraints.push_back(power);
  rp.lower_bounds = RealVector::Constant(2, 1e-12);

  const CondensationResult res = solve_condensed_ratio(rp, vec2(0.5, 0.5));
  REQUIRE(res.solution.status == SolveStatus::kOptimal);
  CHECK(res.iterations <= 2);
  CHECK(res.solution.x(0) == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(res.solution.x(1) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("condensation loop keeps the true objective non-increasing") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coeff(0.2, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    RatioProblem rp;
    rp.num_vars = 2;
    for (int k = 0; k < 2; ++k) {
      RatioFactor f;
      const RealVector own = k == 0 ? vec2(1, 0) : vec2(0, 1);
      f.num.add_term(coeff(rng), RealVector::Zero(2));
      f.num.add_term(coeff(rng), own);
      f.den = f.num;
      f.den.add_term(5.0 * coeff(rng), own);
      f.weight = k == 0 ? 1.5 : 0.5;
      rp.factors.push_back(f);
    }
    Posynomial power;
    power.add_term(0.7, vec2(1, 0));
    power.add_term(1.3, vec2(0, 1));
    rp.constraints.push_back(power);
    rp.lower_bounds = RealVector::Constant(2, 1e-12);

    const CondensationResult res = solve_condensed_ratio(rp, vec2(0.5, 0.25));
    REQUIRE(res.solution.status == SolveStatus::kOptimal);
    for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
      CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] * (1.0 + 1e-12));
    }
    // Returned point satisfies the true constraints.
    CHECK(eval(rp.constraints[0], res.solution.x) <= 1.0 + 1e-8);
  }
}

TEST_CASE("condensation loop rejects infeasible starting points") {
  RatioProblem rp;
  rp.num_vars = 1;
  RatioFactor f;
  RealVector e(1);
  e << -1.0;
  f.num.add_term(1.0, e);
  f.den = Posynomial::constant(1.0, 1);
  rp.factors.push_back(f);
  Posynomial con;
  e << 1.0;
  con.add_term(1.0, e);  // x <= 1
  rp.constraints.push_back(con);
  RealVector x0(1);
  x0 << 5.0;
  CHECK_THROWS_AS(solve_condensed_ratio(rp, x0), InvalidInput);
}
