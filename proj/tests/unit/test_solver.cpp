#include "fixtures.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/fairness.hpp"
#include "fairtopo/solver.hpp"

#include <doctest.h>

using namespace fairtopo;
using doctest::Approx;

namespace {

CovarianceEstimate path_instance() {
  return analytic_covariance({{0.5, 0.3}}, testing::path(3));
}

bool feasible(const SolveReport& r, double epsilon, const Matrix& c) {
  const ConstraintSet cset;
  return cset.contains(r.a_hat.weights(), 1e-9) &&
         r.commut_residual <= epsilon + 1e-6 * c.norm();
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("config validation") {
    SolveConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.beta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.rho = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.over_relaxation = 2.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.tol_abs = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
  }

  TEST_CASE("path instance is recovered exactly") {
    const CovarianceEstimate cov = path_instance();
    const GroupAssignment g({0, 0, 1}, 2);
    const SolveReport r = solve_convex(cov, g, {});
    REQUIRE(r.converged);
    CHECK(r.a_hat(0, 2) < 1e-5);
    CHECK(r.a_hat(0, 1) > 0.1);
    CHECK(r.a_hat(1, 2) > 0.1);
    CHECK(r.a_hat.weights().row(0).sum() == Approx(1.0).epsilon(1e-9));
    CHECK(r.objective_l1 == Approx(r.a_hat.weights().sum()).epsilon(1e-12));

    const L0Result l0 = solve_l0_bruteforce(cov, g, 0.0, Penalty::None, {}, 3);
    REQUIRE(l0.feasible);
    CHECK(l0.support == std::vector<int>{0, 2});
  }

  TEST_CASE("two nodes: the single edge is forced to one") {
    Matrix c(2, 2);
    c << 2.0, 0.5, 0.5, 2.0;
    SolveConfig cfg;
    cfg.epsilon = 10.0;
    const SolveReport r = solve_convex({c, 0}, GroupAssignment({0, 1}, 2), cfg);
    REQUIRE(r.converged);
    CHECK(r.a_hat(0, 1) == Approx(1.0).epsilon(1e-9));
    CHECK(r.objective_l1 == Approx(2.0).epsilon(1e-9));
  }

  TEST_CASE("a single node has no feasible graph") {
    CHECK_THROWS_AS(solve_convex({Matrix::Identity(1, 1), 0}, GroupAssignment({0}, 1), {}),
                    DomainError);
  }

  TEST_CASE("identity covariance: the minimal support is one first-row edge") {
    const L0Result r =
        solve_l0_bruteforce({Matrix::Identity(4, 4), 0}, GroupAssignment({0, 0, 1, 1}, 2), 0.0,
                            Penalty::None, {}, 6);
    REQUIRE(r.feasible);
    REQUIRE(r.support.size() == 1);
    CHECK(PairIndex(4).pair(r.support[0]).first == 0);
  }

  TEST_CASE("brute force refuses large instances") {
    CHECK_THROWS_AS(solve_l0_bruteforce({Matrix::Identity(8, 8), 0},
                                        GroupAssignment({0, 0, 0, 0, 1, 1, 1, 1}, 2), 0.0,
                                        Penalty::None, {}, 3),
                    DomainError);
  }

  TEST_CASE("beta = 0 solutions do not depend on the groups") {
    Rng rng(3);
    const AdjacencyMatrix a(testing::random_weights(7, rng, 0.6));
    const CovarianceEstimate cov{analytic_covariance({{1.0, 0.4, 0.1}}, a).c, 1000};
    SolveConfig cfg;
    cfg.epsilon = 1.5 * minimum_commutativity_residual(cov, {}) + 0.05;
    const SolveReport r1 = solve_convex(cov, GroupAssignment({0, 0, 0, 1, 1, 1, 1}, 2), cfg);
    const SolveReport r2 = solve_convex(cov, GroupAssignment({1, 0, 2, 1, 0, 2, 0}, 3), cfg);
    CHECK(r1.a_hat == r2.a_hat);
    CHECK(r1.iterations == r2.iterations);
  }

  TEST_CASE("fairness term does not increase with beta") {
    Rng rng(21);
    const auto labelled = testing::random_groups(8, 2, rng);
    Matrix w = Matrix::Zero(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j)
        if (labelled.label(i) == labelled.label(j) || rng.uniform() < 0.15) w(i, j) = w(j, i) = 1.0;
    const AdjacencyMatrix a(w);
    const CovarianceEstimate cov = simulate_covariance({{1.0, 0.3, 0.05}}, a, 20000, 4);
    for (Penalty pen : {Penalty::DP, Penalty::DPNode}) {
      SolveConfig cfg;
      cfg.penalty = pen;
      cfg.epsilon = 1.5 * minimum_commutativity_residual(cov, {}) + 0.3 * default_epsilon(cov);
      double previous = std::numeric_limits<double>::infinity();
      for (double beta : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        cfg.beta = beta;
        const SolveReport r = solve_convex(cov, labelled, cfg);
        REQUIRE(r.converged);
        const double fair = penalty_value(r.a_hat.weights(), labelled, pen);
        CHECK(fair <= previous + 1e-4 * (1.0 + previous));
        previous = fair;
      }
    }
  }

  TEST_CASE("converged solutions are feasible and beat random feasible points") {
    Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
      const AdjacencyMatrix a(testing::random_weights(6, rng, 0.7));
      const CovarianceEstimate cov{analytic_covariance({{1.0, 0.5}}, a).c, 500};
      const auto g = testing::random_groups(6, 2, rng);
      SolveConfig cfg;
      cfg.beta = 2.0;
      cfg.penalty = Penalty::DP;
      cfg.epsilon = 0.2 * cov.c.norm();
      const SolveReport r = solve_convex(cov, g, cfg);
      REQUIRE(r.converged);
      CHECK(feasible(r, cfg.epsilon, cov.c));
      const double obj = r.objective_l1 + cfg.beta * r.objective_fair;
      int checked = 0;
      for (int k = 0; k < 2000 && checked < 100; ++k) {
        Matrix m = testing::random_weights(6, rng, 0.8);
        if (m.row(0).sum() == 0.0) continue;
        m /= m.row(0).sum();
        if (commutativity_residual(m, cov, false) > cfg.epsilon) continue;
        ++checked;
        CHECK(obj <= m.sum() + cfg.beta * delta_dp(m, g) + 1e-6);
      }
    }
  }

  TEST_CASE("non-convergence is reported, not thrown") {
    const CovarianceEstimate cov = path_instance();
    SolveConfig cfg;
    cfg.max_iters = 2;
    const SolveReport r = solve_convex(cov, GroupAssignment({0, 0, 1}, 2), cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 2);
  }

  TEST_CASE("minimum residual is zero for exact polynomial covariances") {
    const CovarianceEstimate cov = path_instance();
    CHECK(minimum_commutativity_residual(cov, {}) < 1e-6);
  }

  TEST_CASE("default epsilon rule") {
    CHECK(default_epsilon(path_instance()) == 0.0);
    const CovarianceEstimate cov{Matrix::Identity(4, 4), 100};
    CHECK(default_epsilon(cov) == Approx(0.1 * 2.0 * 4.0 / 10.0));
  }
}
