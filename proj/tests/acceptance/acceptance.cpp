// Acceptance checks. Prints one PASS/FAIL line per criterion on stdout;
// supporting numbers go to stderr.

#include "fairtopo/certify.hpp"
#include "fairtopo/errors.hpp"
#include "fairtopo/experiments.hpp"
#include "fairtopo/fairness.hpp"
#include "fairtopo/ingest.hpp"
#include "fairtopo/io.hpp"
#include "fairtopo/rng.hpp"
#include "fairtopo/solver.hpp"
#include "fairtopo/synth.hpp"
#include "fairtopo/vectorize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

using namespace fairtopo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << x;
  return s.str();
}

void note(const std::string& line) { std::cerr << "  " << line << '\n'; }

void progress_line(const char* label, int done, int total) {
  if (done == total || done % std::max(1, total / 10) == 0)
    std::cerr << "  " << label << ' ' << done << '/' << total << '\n';
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  const GroupAssignment g({0, 0, 1, 1}, 2);
  const AdjacencyMatrix within = AdjacencyMatrix::from_edges(4, {{0, 1}, {2, 3}});
  Matrix k4w = Matrix::Ones(4, 4);
  k4w.diagonal().setZero();
  const AdjacencyMatrix k4(k4w);

  struct Check {
    const char* name;
    double got;
    double want;
  };
  const Check checks[] = {
      {"within-only delta_dp", delta_dp(within, g), 2.0},
      {"within-only delta_dp_node", delta_dp_node(within, g), 4.0},
      {"K4 delta_dp", delta_dp(k4, g), 0.0},
      {"K4 delta_dp_node", delta_dp_node(k4, g), 4.0},
  };
  const double elapsed = seconds_since(t0);
  bool ok = elapsed < 1.0;
  double worst = 0.0;
  for (const auto& c : checks) {
    const double err = std::abs(c.got - c.want);
    worst = std::max(worst, err);
    note(std::string(c.name) + " = " + fmt(c.got, 17));
    ok = ok && err <= 1e-12;
  }
  return {ok, "max deviation " + fmt(worst) + ", " + fmt(elapsed * 1e3) + " ms"};
}

// ---------------------------------------------------------------------------

Matrix random_graph_weights(int n, Rng& rng, double density) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) w(i, j) = w(j, i) = rng.uniform(0.1, 2.0);
  return w;
}

GroupAssignment random_labels(int n, int g, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % g;
  for (int i = n - 1; i > 0; --i)
    std::swap(labels[static_cast<std::size_t>(i)],
              labels[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return GroupAssignment(labels, g);
}

Outcome criterion2() {
  Rng rng(20240602);
  double worst = 0.0;
  int count = 0;
  for (Penalty pen : {Penalty::DP, Penalty::DPNode}) {
    for (int k = 0; k < 100; ++k) {
      const int n = 4 + static_cast<int>(rng.below(9));
      const int g = 2 + static_cast<int>(rng.below(std::min<std::uint64_t>(3, n / 2 - 1)));
      const GroupAssignment groups = random_labels(n, g, rng);
      const Matrix a = random_graph_weights(n, rng, rng.uniform(0.2, 1.0));
      const double beta = std::pow(10.0, rng.uniform(-2.0, 3.0));
      const VectorizedProblem vp =
          build_vectorized({Matrix::Identity(n, n), 0}, groups, beta, pen, {});
      const double lhs = (vp.psi * vec_upper(a)).lpNorm<1>();
      const double gap = pen == Penalty::DP ? delta_dp(a, groups) : delta_dp_node(a, groups);
      const double rhs = a.cwiseAbs().sum() + beta * gap;
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      ++count;
    }
  }
  return {worst <= 1e-10, std::to_string(count) + " triples, max relative deviation " + fmt(worst)};
}

// ---------------------------------------------------------------------------

std::vector<int> support_of(const Vector& v, double rel) {
  const double tol = rel * v.cwiseAbs().maxCoeff();
  std::vector<int> s;
  for (int k = 0; k < v.size(); ++k)
    if (std::abs(v(k)) > tol) s.push_back(k);
  return s;
}

struct RecoveryInstance {
  AdjacencyMatrix truth = AdjacencyMatrix::zeros(0);
  GroupAssignment groups{{0}, 1};
  CovarianceEstimate cov;
};

// Connected-at-node-0 random graph with covariance (alpha I + gamma A)^2.
RecoveryInstance recovery_instance(Rng& rng) {
  const int n = 4 + static_cast<int>(rng.below(3));
  Matrix w;
  do {
    w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng.uniform() < 0.5) w(i, j) = w(j, i) = 1.0;
  } while (w.row(0).sum() == 0.0);
  const double alpha = rng.uniform(0.5, 1.5);
  const double gamma = rng.uniform(0.1, 0.6);
  RecoveryInstance inst;
  inst.truth = AdjacencyMatrix(w);
  inst.groups = random_labels(n, 2, rng);
  inst.cov = analytic_covariance({{alpha, gamma}}, inst.truth);
  return inst;
}

// The certificate is evaluated at the planted graph (scaled to the
// normalization). Instances whose planted graph is not the sparsest feasible
// graph cannot be certified there and are counted separately.
Outcome criterion3() {
  const auto t0 = Clock::now();
  Rng rng(7);
  int certified = 0, agreed = 0, attempts = 0, planted_not_sparsest = 0;
  double worst_error = 0.0;
  std::vector<std::string> problems;
  while (certified < 25 && attempts < 200) {
    ++attempts;
    const RecoveryInstance inst = recovery_instance(rng);
    const Matrix& w = inst.truth.weights();
    const int e = inst.truth.size() * (inst.truth.size() - 1) / 2;
    const L0Result l0 = solve_l0_bruteforce(inst.cov, inst.groups, 0.0, Penalty::None, {}, e);
    const std::vector<int> planted = support_of(vec_upper(w), 1e-6);
    if (l0.feasible && l0.support.size() < planted.size()) ++planted_not_sparsest;
    const VectorizedProblem vp = build_vectorized(inst.cov, inst.groups, 0.0, Penalty::None, {});
    const CertificateReport cert = certify(vp, Matrix(w / w.row(0).sum()));
    if (!cert.certified()) continue;
    ++certified;
    const SolveReport convex = solve_convex(inst.cov, inst.groups, {});
    const std::vector<int> support = support_of(vec_upper(convex.a_hat), 1e-6);
    const double err = estimation_error(inst.truth, convex.a_hat);
    worst_error = std::max(worst_error, err);
    if (convex.converged && l0.feasible && support == l0.support && err < 1e-6) {
      ++agreed;
    } else {
      problems.push_back("attempt " + std::to_string(attempts) + ": converged=" +
                         std::to_string(convex.converged) + " |convex support|=" +
                         std::to_string(support.size()) + " |l0 support|=" +
                         std::to_string(l0.support.size()) + " error=" + fmt(err));
    }
  }
  for (const auto& p : problems) note(p);
  note(std::to_string(planted_not_sparsest) + " drawn instances had a sparser graph than the planted one");
  const double elapsed = seconds_since(t0);
  const bool ok = certified >= 20 && agreed == certified && elapsed < 300.0;
  return {ok, std::to_string(agreed) + "/" + std::to_string(certified) + " certified instances agree (" +
                  std::to_string(attempts) + " drawn), max error " + fmt(worst_error) + ", " +
                  fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------------------

Outcome criterion4(const fs::path& work) {
  const auto t0 = Clock::now();
  EdgeRatioConfig cfg;
  const EdgeRatioResult r =
      run_edge_ratio_sweep(cfg, [](int d, int t) { progress_line("fig2", d, t); });
  write_edge_ratio(work / "fig2", r);
  const double elapsed = seconds_since(t0);

  std::size_t argmin = 0;
  bool b_ok = true;
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const auto& row = r.rows[k];
    note("ratio " + fmt(row.ratio) + ": bias true/nti/dp/nw = " + fmt(row.bias_true) + "/" +
         fmt(row.bias_nti) + "/" + fmt(row.bias_dp) + "/" + fmt(row.bias_nw) +
         "  frob nti/dp/nw = " + fmt(row.frob_nti) + "/" + fmt(row.frob_dp) + "/" + fmt(row.frob_nw) +
         "  kept " + std::to_string(row.conv_nti) + "/" + std::to_string(row.conv_dp) + "/" +
         std::to_string(row.conv_nw));
    if (row.bias_true < r.rows[argmin].bias_true) argmin = k;
    b_ok = b_ok && row.bias_dp <= row.bias_nti && row.bias_nw <= row.bias_nti;
  }
  const bool a_ok = std::abs(r.rows[argmin].ratio - 0.5) < 1e-12;
  bool c_ok = false;
  for (const auto& row : r.rows) {
    if (std::abs(row.ratio - 0.5) < 1e-12)
      c_ok = std::abs(row.frob_dp - row.frob_nti) < 0.3 * std::abs(row.frob_nw - row.frob_nti);
  }
  const bool t_ok = elapsed < 1800.0;
  return {a_ok && b_ok && c_ok && t_ok,
          std::string("(a) ") + (a_ok ? "ok" : "fail") + " (b) " + (b_ok ? "ok" : "fail") + " (c) " +
              (c_ok ? "ok" : "fail") + ", " + fmt(elapsed / 60.0, 3) + " min"};
}

// ---------------------------------------------------------------------------

struct PairedTrend {
  std::string name;
  // Per-trial value expected to be larger, and the one expected to be smaller.
  std::function<std::optional<double>(int)> larger, smaller;
};

Outcome criterion5(const fs::path& work) {
  const auto t0 = Clock::now();
  GroupLabelConfig cfg;
  const GroupLabelResult r =
      run_group_label_study(cfg, [](int d, int t) { progress_line("table1", d, t); });
  write_group_labels(work / "table1", r);
  for (const auto& row : r.rows) {
    note(row.setting + " " + std::string(to_string(row.method)) + " beta=" + fmt(row.beta) +
         " bias=" + fmt(row.bias) + " error=" + (row.error ? fmt(*row.error) : std::string("-")) +
         " n=" + std::to_string(row.count));
  }

  // Index trials by (trial, setting, method, beta).
  std::map<std::tuple<int, std::string, Method, double>, const TrialResult*> index;
  for (const auto& t : r.trials) index[{t.trial, t.setting, t.method, t.beta}] = &t;
  auto value = [&](const std::string& setting, Method m, double beta, bool error) {
    return [&, setting, m, beta, error](int trial) -> std::optional<double> {
      const auto it = index.find({trial, setting, m, beta});
      if (it == index.end() || !it->second->converged) return std::nullopt;
      if (error) return it->second->error;
      return it->second->bias;
    };
  };

  std::vector<PairedTrend> trends;
  for (Method m : {Method::DP, Method::DPNode}) {
    const std::string tag(to_string(m));
    trends.push_back({"unfair " + tag + " bias none>b100", value("unfair", Method::NonePenalty, 0.0, false),
                      value("unfair", m, 100.0, false)});
    trends.push_back({"unfair " + tag + " bias b100>b1000", value("unfair", m, 100.0, false),
                      value("unfair", m, 1000.0, false)});
    trends.push_back({"unfair " + tag + " error b100>none", value("unfair", m, 100.0, true),
                      value("unfair", Method::NonePenalty, 0.0, true)});
    trends.push_back({"unfair " + tag + " error b1000>b100", value("unfair", m, 1000.0, true),
                      value("unfair", m, 100.0, true)});
  }
  trends.push_back({"fair b1000 error node>dp", value("fair", Method::DPNode, 1000.0, true),
                    value("fair", Method::DP, 1000.0, true)});

  bool ok = true;
  int failed = 0;
  for (std::size_t k = 0; k < trends.size(); ++k) {
    std::vector<double> diffs;
    for (int t = 0; t < cfg.trials; ++t) {
      const auto hi = trends[k].larger(t);
      const auto lo = trends[k].smaller(t);
      if (hi && lo) diffs.push_back(*hi - *lo);
    }
    double mean = 0.0;
    for (double d : diffs) mean += d / static_cast<double>(diffs.size());
    const Interval ci = bootstrap_mean_interval(diffs, 10000, 0.95, derive_seed(99, k));
    const bool holds = !diffs.empty() && ci.lo > 0.0;
    note(trends[k].name + ": mean diff " + fmt(mean) + ", 95% CI [" + fmt(ci.lo) + ", " + fmt(ci.hi) +
         "] over " + std::to_string(diffs.size()) + " paired trials -> " + (holds ? "ok" : "FAIL"));
    ok = ok && holds;
    failed += holds ? 0 : 1;
  }
  const double elapsed = seconds_since(t0);
  return {ok, std::to_string(trends.size() - failed) + "/" + std::to_string(trends.size()) +
                  " trends confirmed at 95%, " + fmt(elapsed / 60.0, 3) + " min"};
}

// ---------------------------------------------------------------------------

std::optional<std::pair<fs::path, fs::path>> find_senate_files(const fs::path& source_dir) {
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("FAIRTOPO_SENATE_DIR")) dirs.emplace_back(env);
  dirs.push_back(source_dir / "tests" / "data" / "senate");
  for (const auto& d : dirs) {
    const fs::path votes = d / "S113_votes.csv";
    const fs::path members = d / "S113_members.csv";
    if (fs::exists(votes) && fs::exists(members)) return std::make_pair(votes, members);
  }
  return std::nullopt;
}

int violations_of_decrease(const std::vector<double>& v) {
  int bad = 0;
  for (std::size_t k = 1; k < v.size(); ++k) bad += v[k] > v[k - 1] ? 1 : 0;
  return bad;
}

// Mean over the grid of bias / unpenalized bias.
double relative_area(const std::vector<double>& bias, const std::vector<double>& base) {
  double s = 0.0;
  for (std::size_t k = 0; k < bias.size(); ++k) s += bias[k] / std::max(base[k], 1e-300);
  return s / static_cast<double>(bias.size());
}

// Linear interpolation of err as a function of bias, for bias within range.
std::optional<double> error_at_bias(const std::vector<double>& bias, const std::vector<double>& err,
                                    double target) {
  for (std::size_t k = 1; k < bias.size(); ++k) {
    const double b0 = bias[k - 1], b1 = bias[k];
    if ((target - b0) * (target - b1) <= 0.0 && b0 != b1) {
      const double t = (target - b0) / (b1 - b0);
      return err[k - 1] + t * (err[k] - err[k - 1]);
    }
  }
  return std::nullopt;
}

Outcome criterion6(const fs::path& work, const fs::path& source_dir) {
  const auto t0 = Clock::now();
  const auto files = find_senate_files(source_dir);
  if (!files) {
    return {false,
            "113th Congress roll-call files (S113_votes.csv, S113_members.csv) not found; set "
            "FAIRTOPO_SENATE_DIR"};
  }
  const SenateDataset d = ingest_rollcalls(files->first, files->second, 113);
  for (const auto& n : d.notes) note("ingest: " + n);
  export_dataset(d, work / "senate_data");
  const bool shape_ok = d.node_count() == 51 && d.vote_count() == 657;
  note("dataset " + std::to_string(d.node_count()) + " x " + std::to_string(d.vote_count()));

  SenateConfig cfg;
  const SenateResult r =
      run_senate_sweep(d.x, d.groups, cfg, [](int dn, int t) { progress_line("senate", dn, t); });
  write_senate(work / "senate", r);

  std::vector<double> b_nti, b_dp, b_node, e_dp, e_node;
  double max_err = 0.0;
  for (const auto& row : r.rows) {
    b_nti.push_back(row.bias_nti);
    b_dp.push_back(row.bias_fnti);
    b_node.push_back(row.bias_nfnti);
    e_dp.push_back(row.err_fnti);
    e_node.push_back(row.err_nfnti);
    max_err = std::max({max_err, row.err_nti, row.err_fnti, row.err_nfnti});
    note("beta " + fmt(row.beta) + ": bias " + fmt(row.bias_nti) + "/" + fmt(row.bias_fnti) + "/" +
         fmt(row.bias_nfnti) + " error " + fmt(row.err_nti) + "/" + fmt(row.err_fnti) + "/" +
         fmt(row.err_nfnti));
  }
  const bool mono = violations_of_decrease(b_dp) <= 1 && violations_of_decrease(b_node) <= 1;
  const bool faster = relative_area(b_node, b_nti) < relative_area(b_dp, b_nti);
  bool matched = true;
  int compared = 0;
  for (std::size_t k = 0; k < b_dp.size(); ++k) {
    const auto other = error_at_bias(b_node, e_node, b_dp[k]);
    if (!other) continue;
    ++compared;
    matched = matched && e_dp[k] <= *other + 1e-12;
  }
  const bool range = max_err < 2.5e-2;
  const double elapsed = seconds_since(t0);
  const bool ok = shape_ok && mono && faster && matched && range && elapsed < 1200.0;
  return {ok, std::string("shape ") + (shape_ok ? "ok" : "fail") + ", monotone " + (mono ? "ok" : "fail") +
                  ", node faster " + (faster ? "ok" : "fail") + ", matched-bias error " +
                  (matched ? "ok" : "fail") + " (" + std::to_string(compared) + " points), max error " +
                  fmt(max_err) + ", " + fmt(elapsed / 60.0, 3) + " min"};
}

// ---------------------------------------------------------------------------

Outcome criterion7() {
  const auto t0 = Clock::now();
  int solves = 0, converged = 0, violations = 0;
  double worst_membership = 0.0, worst_excess = 0.0;

  auto check = [&](const CovarianceEstimate& cov, const GroupAssignment& g, const SolveConfig& cfg,
                   const ConstraintSet& cset) {
    const SolveReport r = solve_convex(cov, g, cfg, cset);
    ++solves;
    if (!r.converged) return;
    ++converged;
    const Matrix& a = r.a_hat.weights();
    const double membership =
        std::max({(a - a.transpose()).cwiseAbs().maxCoeff(), a.diagonal().cwiseAbs().maxCoeff(),
                  std::max(0.0, -a.minCoeff()), cset.normalization_gap(a)});
    const double excess = commutativity_residual(a, cov, false) - cfg.epsilon;
    const double allowance = 1e-6 * cov.c.norm();
    worst_membership = std::max(worst_membership, membership);
    worst_excess = std::max(worst_excess, excess / cov.c.norm());
    if (membership > 1e-9 || excess > allowance) ++violations;
  };

  // Exact covariances at epsilon = 0.
  Rng rng(31);
  for (int k = 0; k < 10; ++k) {
    const RecoveryInstance inst = recovery_instance(rng);
    check(inst.cov, inst.groups, {}, {});
  }
  // Sample covariances across sizes, penalties, weights and both normalizations.
  const Penalty penalties[] = {Penalty::None, Penalty::DP, Penalty::DPNode};
  const double betas[] = {0.0, 10.0, 1000.0};
  int case_id = 0;
  for (int n : {8, 16, 30}) {
    for (std::size_t m : {std::size_t{10000}, std::size_t{1000000}}) {
      RewireSpec spec;
      spec.n = n;
      spec.p = n <= 8 ? 0.6 : 0.3;
      spec.across_ratio = 0.25;
      spec.seed = derive_seed(5, static_cast<std::uint64_t>(case_id++));
      const LabeledGraph lg = generate_two_group_graph(spec);
      const FilterSpec f = default_experiment_filter(lg.adjacency, spec.seed);
      const CovarianceEstimate cov = simulate_covariance(f, lg.adjacency, m, spec.seed + 1);
      for (Normalization norm : {Normalization::FirstRowSum1, Normalization::TotalSumN}) {
        ConstraintSet cset;
        cset.normalization = norm;
        EstimationSettings est;
        est.cset = cset;
        const double eps = experiment_epsilon(cov, est);
        for (Penalty p : penalties) {
          for (double beta : betas) {
            if ((p == Penalty::None) != (beta == 0.0)) continue;
            SolveConfig cfg;
            cfg.penalty = p;
            cfg.beta = beta;
            cfg.epsilon = eps;
            check(cov, lg.groups, cfg, cset);
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  return {converged > 0 && violations == 0,
          std::to_string(converged) + "/" + std::to_string(solves) + " solves converged, " +
              std::to_string(violations) + " violations; worst membership " + fmt(worst_membership) +
              ", worst residual excess " + fmt(worst_excess) + " x ||C||_F, " + fmt(elapsed, 3) + " s"};
}

// ---------------------------------------------------------------------------

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

int shell(const std::string& cmd) {
  note("$ " + cmd);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  return fs::exists(a) && fs::exists(b) && io::read_text(a) == io::read_text(b);
}

Outcome criterion8(const fs::path& work, const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) return {false, "fair-topo binary not available"};
  const fs::path root = work / "determinism";
  fs::remove_all(root);
  io::ensure_directory(root);

  // Synthetic vote matrix for the senate experiment.
  {
    Rng rng(3);
    Matrix x(10, 120);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = static_cast<double>(rng.below(5)) - 2.0;
    SenateDataset d;
    d.x = x;
    d.groups = GroupAssignment({0, 0, 0, 1, 1, 1, 2, 2, 2, 0}, 3);
    for (int i = 0; i < 10; ++i) d.node_names.push_back("n" + std::to_string(i));
    export_dataset(d, root / "votes");
  }

  const std::string q = quote(cli) + " --quiet ";
  struct Run {
    std::string name;
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Run> runs = {
      {"fig2", "experiment fig2 --ratios 0.25,0.5,0.75 --trials 2 --n 10 --p 0.5 --samples 20000 --jobs 2",
       {"edgeratio.csv", "edgeratio_counts.csv", "edgeratio_trials.csv"}},
      {"table1", "experiment table1 --trials 2 --n 10 --p 0.5 --betas 10,100 --samples 20000 --jobs 2",
       {"grouplabels.csv", "grouplabels_trials.csv"}},
      {"senate", "experiment senate --data " + quote(root / "votes") + " --betas 100,1000,10000 --jobs 2",
       {"senate_bias.csv", "senate_error.csv", "senate_convergence.csv"}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& r : runs) {
    const fs::path first = root / (r.name + "_a");
    const fs::path second = root / (r.name + "_b");
    bool same = shell(q + r.args + " --out " + quote(first)) == 0 &&
                shell(q + "replay --manifest " + quote(first / "manifest.json") + " --out " + quote(second)) == 0;
    for (const auto& f : r.files) same = same && same_bytes(first / f, second / f);
    ok = ok && same;
    detail += r.name + (same ? " identical" : " DIFFERS") + "; ";
  }
  // File-producing subcommands replay in place.
  const fs::path adj = root / "synth.csv";
  bool synth_same = shell(q + "synth --n 12 --ratio 0.4 --seed 9 --out-adj " + quote(adj) +
                          " --out-groups " + quote(root / "groups.csv")) == 0;
  if (synth_same) {
    const std::string before = io::read_text(adj);
    fs::remove(adj);
    synth_same = shell(q + "replay --manifest " + quote(root / "synth.csv.manifest.json")) == 0 &&
                 fs::exists(adj) && io::read_text(adj) == before;
  }
  ok = ok && synth_same;
  detail += std::string("synth ") + (synth_same ? "identical" : "DIFFERS");
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for fairtopo"};
  std::vector<int> criteria;
  std::string work = "acceptance_work";
  std::string cli =
#ifdef FAIRTOPO_CLI_PATH
      FAIRTOPO_CLI_PATH;
#else
      "";
#endif
  std::string source_dir =
#ifdef FAIRTOPO_SOURCE_DIR
      FAIRTOPO_SOURCE_DIR;
#else
      ".";
#endif
  app.add_option("--criterion", criteria, "Criteria to run (default: all)")->check(CLI::Range(1, 8));
  app.add_option("--work", work, "Scratch directory for experiment outputs");
  app.add_option("--cli", cli, "Path to the fair-topo binary");
  app.add_option("--source-dir", source_dir, "Repository root (for bundled data)");
  CLI11_PARSE(app, argc, argv);
  if (criteria.empty()) criteria = {1, 2, 3, 4, 5, 6, 7, 8};

  const fs::path w = fs::absolute(work);
  io::ensure_directory(w);

  const std::map<int, std::string> names = {
      {1, "metric exactness"},          {2, "penalty/metric consistency"},
      {3, "exact recovery + certificate"}, {4, "edge-ratio trends"},
      {5, "group-label trends"},        {6, "senate reproduction"},
      {7, "solver feasibility"},        {8, "manifest determinism"}};

  bool all = true;
  for (int c : criteria) {
    Outcome o;
    try {
      switch (c) {
        case 1: o = criterion1(); break;
        case 2: o = criterion2(); break;
        case 3: o = criterion3(); break;
        case 4: o = criterion4(w); break;
        case 5: o = criterion5(w); break;
        case 6: o = criterion6(w, source_dir); break;
        case 7: o = criterion7(); break;
        case 8: o = criterion8(w, cli); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c << " (" << names.at(c)
              << "): " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
