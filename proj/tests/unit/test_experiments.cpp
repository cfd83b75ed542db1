#include "fixtures.hpp"
#include "tempdir.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/experiments.hpp"

#include <doctest.h>

#include <cstdlib>

using namespace fairtopo;
using doctest::Approx;
using fairtopo::testing::TempDir;

namespace {

EdgeRatioConfig tiny_edge_ratio() {
  EdgeRatioConfig cfg;
  cfg.ratios = {0.25, 0.5};
  cfg.trials = 2;
  cfg.n = 10;
  cfg.p = 0.5;
  cfg.beta = 10.0;
  cfg.est.samples = 20000;
  cfg.est.solver.max_iters = 5000;
  return cfg;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("estimation error examples") {
    const Matrix a = testing::path(4).weights();
    CHECK(estimation_error(a, a) == Approx(0.0).epsilon(1e-15));
    CHECK(estimation_error(a, Matrix(2.0 * a)) == Approx(0.0).epsilon(1e-15));
    Matrix orth = Matrix::Zero(4, 4);
    orth(0, 2) = orth(2, 0) = 1.0;
    CHECK(estimation_error(a, orth) == Approx(1.0));
    CHECK_THROWS_AS(estimation_error(a, Matrix::Zero(4, 4)), DomainError);
    CHECK_THROWS_AS(estimation_error(a, Matrix::Zero(3, 3)), DomainError);
  }

  TEST_CASE("estimation error is symmetric and matches the normalized distance") {
    Rng rng(4);
    for (int k = 0; k < 20; ++k) {
      const Matrix x = testing::random_weights(6, rng) + Matrix::Identity(6, 6) * 0.0;
      const Matrix y = testing::random_weights(6, rng);
      const double direct = 0.5 * (x / x.norm() - y / y.norm()).squaredNorm();
      CHECK(estimation_error(x, y) == Approx(direct).epsilon(1e-12));
      CHECK(estimation_error(x, y) == Approx(estimation_error(y, x)).epsilon(1e-14));
      CHECK(estimation_error(Matrix(3.0 * x), y) == Approx(estimation_error(x, y)).epsilon(1e-12));
    }
  }

  TEST_CASE("method names") {
    CHECK(to_string(Method::TrueGraph) == "true");
    CHECK(to_string(Method::NonePenalty) == "none");
    CHECK(to_string(Method::DP) == "dp");
    CHECK(to_string(Method::DPNode) == "node");
  }

  TEST_CASE("epsilon rule") {
    EstimationSettings est;
    CHECK(experiment_epsilon({Matrix::Identity(3, 3), 0}, est) == 0.0);
    const CovarianceEstimate cov{Matrix::Identity(3, 3), 400};
    // The identity commutes with everything, so only the scaled rule applies.
    CHECK(experiment_epsilon(cov, est) == Approx(0.3 * default_epsilon(cov)));
  }

  TEST_CASE("worker count resolution") {
    CHECK(resolve_jobs(3) == 3);
    ::setenv("FAIR_TOPO_JOBS", "2", 1);
    CHECK(resolve_jobs(0) == 2);
    ::unsetenv("FAIR_TOPO_JOBS");
    CHECK(resolve_jobs(0) >= 1);
  }

  TEST_CASE("bootstrap interval") {
    const std::vector<double> constant(30, 2.0);
    const Interval c = bootstrap_mean_interval(constant, 500, 0.95, 1);
    CHECK(c.lo == 2.0);
    CHECK(c.hi == 2.0);
    Rng rng(9);
    std::vector<double> v;
    for (int k = 0; k < 200; ++k) v.push_back(rng.normal());
    const Interval i = bootstrap_mean_interval(v, 2000, 0.95, 3);
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    CHECK(i.lo < mean);
    CHECK(i.hi > mean);
    // Width close to 2 * 1.96 / sqrt(200).
    CHECK(i.hi - i.lo == Approx(2 * 1.96 / std::sqrt(200.0)).epsilon(0.25));
    const Interval again = bootstrap_mean_interval(v, 2000, 0.95, 3);
    CHECK(again.lo == i.lo);
    CHECK(again.hi == i.hi);
  }

  TEST_CASE("edge-ratio sweep is deterministic and independent of the worker count") {
    EdgeRatioConfig cfg = tiny_edge_ratio();
    cfg.jobs = 1;
    const EdgeRatioResult one = run_edge_ratio_sweep(cfg);
    cfg.jobs = 2;
    const EdgeRatioResult two = run_edge_ratio_sweep(cfg);
    REQUIRE(one.rows.size() == 2);
    CHECK(one.trials.size() == 2 * 2 * 4);
    TempDir d1, d2;
    write_edge_ratio(d1.path(), one);
    write_edge_ratio(d2.path(), two);
    for (const char* f : {"edgeratio.csv", "edgeratio_counts.csv", "edgeratio_trials.csv"}) {
      CHECK(io::read_text(d1 / f) == io::read_text(d2 / f));
    }
    const io::Table t = io::read_table_csv(d1 / "edgeratio.csv");
    CHECK(t.header == std::vector<std::string>{"Edge_Ratio", "Bias_True", "Bias_NTI", "Bias_DP",
                                               "Bias_NW", "Frob_NTI", "Frob_DP", "Frob_NW"});
    CHECK(t.rows.size() == 2);
    for (const auto& row : one.rows) {
      CHECK(row.trials == 2);
      CHECK(row.bias_true >= 0.0);
    }
  }

  TEST_CASE("group-label study shares the unpenalized solve") {
    GroupLabelConfig cfg;
    cfg.trials = 2;
    cfg.n = 10;
    cfg.p = 0.5;
    cfg.betas = {10.0};
    cfg.jobs = 1;
    cfg.est.samples = 20000;
    cfg.est.solver.max_iters = 5000;
    const GroupLabelResult r = run_group_label_study(cfg);
    // Per setting: true, none, dp@10, node@10.
    REQUIRE(r.rows.size() == 8);
    CHECK(r.rows[0].setting == "unfair");
    CHECK(r.rows[0].method == Method::TrueGraph);
    CHECK_FALSE(r.rows[0].error.has_value());
    CHECK(r.rows[4].setting == "fair");
    // The none estimate is the same graph under both labelings, so its error agrees.
    CHECK(*r.rows[1].error == Approx(*r.rows[5].error).epsilon(1e-14));
    TempDir dir;
    write_group_labels(dir.path(), r);
    const io::Table t = io::read_table_csv(dir / "grouplabels.csv");
    CHECK(t.header == std::vector<std::string>{"setting", "method", "beta", "bias", "error", "count"});
    CHECK(t.rows[0][4].empty());
  }

  TEST_CASE("senate sweep on synthetic votes") {
    Rng rng(6);
    const int n = 9;
    Matrix x(n, 300);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(rng.below(5)) - 2.0;
    const GroupAssignment g({0, 0, 0, 1, 1, 1, 2, 2, 2}, 3);
    SenateConfig cfg;
    cfg.betas = {1.0, 100.0};
    cfg.jobs = 1;
    cfg.solver.max_iters = 5000;
    const SenateResult r = run_senate_sweep(x, g, cfg);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.epsilon > 0.0);
    CHECK(r.rows[0].bias_nti == r.rows[1].bias_nti);
    TempDir dir;
    write_senate(dir.path(), r);
    for (const char* f : {"senate_bias.csv", "senate_error.csv"}) {
      const io::Table t = io::read_table_csv(dir / f);
      CHECK(t.header == std::vector<std::string>{"beta", "nti", "fnti", "nfnti"});
      CHECK(t.rows.size() == 2);
    }
  }

  TEST_CASE("default senate grid") {
    const auto b = default_senate_betas();
    REQUIRE(b.size() == 13);
    CHECK(b.front() == Approx(1e2));
    CHECK(b.back() == Approx(1e5));
    CHECK(b[4] == Approx(1e3));
  }
}
