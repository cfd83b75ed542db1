#include "fairtopo/experiments.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/fairness.hpp"
#include "fairtopo/rng.hpp"
#include "fairtopo/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace fairtopo {

namespace {

// Runs body(k) for k in [0, count) on up to `jobs` threads. Each task must
// write only to its own output slot; the first exception is rethrown.
template <class Body>
void parallel_for(int count, int jobs, const Body& body, const ProgressFn& progress) {
  std::atomic<int> next{0};
  int done = 0;
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const int k = next.fetch_add(1);
      if (k >= count) return;
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      try {
        body(k);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      std::lock_guard lock(mu);
      ++done;
      if (progress) progress(done, count);
    }
  };
  const int threads = std::max(1, std::min(jobs, count));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::string cell(double x) { return io::format_double(x); }

std::string cell(const std::optional<double>& x) { return x ? io::format_double(*x) : ""; }

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

SolveReport solve_with(const CovarianceEstimate& cov, const GroupAssignment& groups,
                       const EstimationSettings& est, double epsilon, Penalty penalty,
                       double beta) {
  SolveConfig cfg = est.solver;
  cfg.epsilon = epsilon;
  cfg.penalty = penalty;
  cfg.beta = penalty == Penalty::None ? 0.0 : beta;
  return solve_convex(cov, groups, cfg, est.cset);
}

Penalty penalty_of(Method m) {
  switch (m) {
    case Method::DP: return Penalty::DP;
    case Method::DPNode: return Penalty::DPNode;
    default: return Penalty::None;
  }
}

io::Table trial_table(const std::vector<TrialResult>& trials) {
  io::Table t;
  t.header = {"setting", "x",         "trial",   "method",     "beta",
              "bias",    "error",     "converged", "iterations", "epsilon", "seed"};
  for (const auto& r : trials) {
    t.add_row({r.setting, cell(r.x), std::to_string(r.trial), std::string(to_string(r.method)),
               cell(r.beta), cell(r.bias), cell(r.error), r.converged ? "1" : "0",
               std::to_string(r.iterations), cell(r.epsilon), std::to_string(r.seed)});
  }
  return t;
}

}  // namespace

double estimation_error(const Matrix& truth, const Matrix& est) {
  if (truth.rows() != est.rows() || truth.cols() != est.cols()) {
    throw DomainError("estimation_error needs matrices of the same shape");
  }
  const double nt = truth.norm();
  const double ne = est.norm();
  if (nt == 0.0 || ne == 0.0) throw DomainError("estimation_error is undefined for a zero matrix");
  return 0.5 * (truth / nt - est / ne).squaredNorm();
}

double estimation_error(const AdjacencyMatrix& truth, const AdjacencyMatrix& est) {
  return estimation_error(truth.weights(), est.weights());
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::TrueGraph: return "true";
    case Method::NonePenalty: return "none";
    case Method::DP: return "dp";
    case Method::DPNode: return "node";
  }
  return "?";
}

double experiment_epsilon(const CovarianceEstimate& cov, const EstimationSettings& est) {
  if (cov.analytic()) return 0.0;
  const double rule = est.epsilon_scale * default_epsilon(cov);
  const double floor = est.epsilon_floor * minimum_commutativity_residual(cov, est.cset);
  return std::max(rule, floor);
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FAIR_TOPO_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

EdgeRatioResult run_edge_ratio_sweep(const EdgeRatioConfig& cfg, const ProgressFn& progress) {
  if (cfg.trials < 1) throw DomainError("need at least one trial");
  for (double r : cfg.ratios) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("edge ratios must lie in [0, 1]");
  }
  const int ratio_count = static_cast<int>(cfg.ratios.size());
  const int tasks = ratio_count * cfg.trials;
  constexpr int kPerTask = 4;
  std::vector<TrialResult> slots(static_cast<std::size_t>(tasks * kPerTask));

  parallel_for(
      tasks, resolve_jobs(cfg.jobs),
      [&](int k) {
        const int ri = k / cfg.trials;
        const int trial = k % cfg.trials;
        const double ratio = cfg.ratios[static_cast<std::size_t>(ri)];
        const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
        RewireSpec spec;
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.across_ratio = ratio;
        spec.seed = trial_seed;
        const LabeledGraph g = generate_two_group_graph(spec);
        const auto stream = static_cast<std::uint64_t>(ri);
        const FilterSpec filter = default_experiment_filter(g.adjacency, derive_seed(trial_seed, 1000 + stream));
        const CovarianceEstimate cov = wishart_covariance(filter, g.adjacency, cfg.est.samples,
                                                           derive_seed(trial_seed, 2000 + stream));
        const double eps = experiment_epsilon(cov, cfg.est);

        TrialResult base;
        base.x = ratio;
        base.trial = trial;
        base.epsilon = eps;
        base.seed = trial_seed;

        auto* out = &slots[static_cast<std::size_t>(k * kPerTask)];
        out[0] = base;
        out[0].method = Method::TrueGraph;
        out[0].bias = bias_report(g.adjacency, g.groups).normalized_bias.value_or(0.0);

        const Method methods[] = {Method::NonePenalty, Method::DP, Method::DPNode};
        for (int m = 0; m < 3; ++m) {
          const SolveReport rep = solve_with(cov, g.groups, cfg.est, eps, penalty_of(methods[m]), cfg.beta);
          TrialResult& r = out[m + 1];
          r = base;
          r.method = methods[m];
          r.beta = methods[m] == Method::NonePenalty ? 0.0 : cfg.beta;
          r.bias = bias_report(rep.a_hat, g.groups).normalized_bias.value_or(0.0);
          r.error = estimation_error(g.adjacency, rep.a_hat);
          r.converged = rep.converged;
          r.iterations = rep.iterations;
        }
      },
      progress);

  EdgeRatioResult result;
  result.trials = std::move(slots);
  for (int ri = 0; ri < ratio_count; ++ri) {
    EdgeRatioRow row;
    row.ratio = cfg.ratios[static_cast<std::size_t>(ri)];
    row.trials = cfg.trials;
    std::vector<double> bt, b[3], f[3];
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const auto* rec = &result.trials[static_cast<std::size_t>((ri * cfg.trials + trial) * kPerTask)];
      bt.push_back(rec[0].bias);
      for (int m = 0; m < 3; ++m) {
        if (!rec[m + 1].converged) continue;
        b[m].push_back(rec[m + 1].bias);
        f[m].push_back(*rec[m + 1].error);
      }
    }
    row.bias_true = mean(bt);
    row.bias_nti = mean(b[0]);
    row.bias_dp = mean(b[1]);
    row.bias_nw = mean(b[2]);
    row.frob_nti = mean(f[0]);
    row.frob_dp = mean(f[1]);
    row.frob_nw = mean(f[2]);
    row.conv_nti = static_cast<int>(b[0].size());
    row.conv_dp = static_cast<int>(b[1].size());
    row.conv_nw = static_cast<int>(b[2].size());
    result.rows.push_back(row);
  }
  return result;
}

void write_edge_ratio(const io::fs::path& dir, const EdgeRatioResult& r) {
  io::ensure_directory(dir);
  io::Table main;
  main.header = {"Edge_Ratio", "Bias_True", "Bias_NTI", "Bias_DP",
                 "Bias_NW",    "Frob_NTI",  "Frob_DP",  "Frob_NW"};
  io::Table counts;
  counts.header = {"Edge_Ratio", "Trials", "Converged_NTI", "Converged_DP", "Converged_NW"};
  for (const auto& row : r.rows) {
    main.add_row({cell(row.ratio), cell(row.bias_true), cell(row.bias_nti), cell(row.bias_dp),
                  cell(row.bias_nw), cell(row.frob_nti), cell(row.frob_dp), cell(row.frob_nw)});
    counts.add_row({cell(row.ratio), std::to_string(row.trials), std::to_string(row.conv_nti),
                    std::to_string(row.conv_dp), std::to_string(row.conv_nw)});
  }
  io::write_table_csv(dir / "edgeratio.csv", main);
  io::write_table_csv(dir / "edgeratio_counts.csv", counts);
  io::write_table_csv(dir / "edgeratio_trials.csv", trial_table(r.trials));
}

GroupLabelResult run_group_label_study(const GroupLabelConfig& cfg, const ProgressFn& progress) {
  if (cfg.trials < 1) throw DomainError("need at least one trial");
  for (double b : cfg.betas) {
    if (!(b >= 0.0)) throw DomainError("beta must be nonnegative");
  }
  const char* settings[] = {"unfair", "fair"};
  const int beta_count = static_cast<int>(cfg.betas.size());
  // Per setting: true, none, then dp and node for every beta.
  const int per_setting = 2 + 2 * beta_count;
  const int per_trial = 2 * per_setting;
  std::vector<TrialResult> slots(static_cast<std::size_t>(cfg.trials * per_trial));

  parallel_for(
      cfg.trials, resolve_jobs(cfg.jobs),
      [&](int trial) {
        const std::uint64_t trial_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
        RewireSpec spec;
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.across_ratio = cfg.ratio;
        spec.seed = trial_seed;
        const LabeledGraph g = generate_two_group_graph(spec);
        const GroupAssignment labelings[] = {
            assign_groups(cfg.n, 2, AssignMode::ByCommunity, g.groups.labels(), 0),
            assign_groups(cfg.n, 2, AssignMode::Uniform, std::nullopt, derive_seed(trial_seed, 1))};
        const FilterSpec filter = default_experiment_filter(g.adjacency, derive_seed(trial_seed, 2));
        const CovarianceEstimate cov =
            wishart_covariance(filter, g.adjacency, cfg.est.samples, derive_seed(trial_seed, 3));
        const double eps = experiment_epsilon(cov, cfg.est);

        TrialResult base;
        base.trial = trial;
        base.epsilon = eps;
        base.seed = trial_seed;

        // The unpenalized estimate does not depend on the labels.
        const SolveReport none = solve_with(cov, labelings[0], cfg.est, eps, Penalty::None, 0.0);
        auto* out = &slots[static_cast<std::size_t>(trial * per_trial)];
        for (int s = 0; s < 2; ++s) {
          const GroupAssignment& labels = labelings[s];
          auto* o = out + s * per_setting;
          o[0] = base;
          o[0].setting = settings[s];
          o[0].method = Method::TrueGraph;
          o[0].bias = delta_dp(g.adjacency, labels);

          o[1] = base;
          o[1].setting = settings[s];
          o[1].method = Method::NonePenalty;
          o[1].bias = delta_dp(none.a_hat, labels);
          o[1].error = estimation_error(g.adjacency, none.a_hat);
          o[1].converged = none.converged;
          o[1].iterations = none.iterations;

          for (int bi = 0; bi < beta_count; ++bi) {
            const double beta = cfg.betas[static_cast<std::size_t>(bi)];
            const Method methods[] = {Method::DP, Method::DPNode};
            for (int m = 0; m < 2; ++m) {
              const SolveReport rep = solve_with(cov, labels, cfg.est, eps, penalty_of(methods[m]), beta);
              TrialResult& r = o[2 + 2 * bi + m];
              r = base;
              r.setting = settings[s];
              r.method = methods[m];
              r.beta = beta;
              r.bias = delta_dp(rep.a_hat, labels);
              r.error = estimation_error(g.adjacency, rep.a_hat);
              r.converged = rep.converged;
              r.iterations = rep.iterations;
            }
          }
        }
      },
      progress);

  GroupLabelResult result;
  result.trials = std::move(slots);
  for (int s = 0; s < 2; ++s) {
    for (int slot = 0; slot < per_setting; ++slot) {
      std::vector<double> bias, err;
      const TrialResult* first = nullptr;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const TrialResult& r =
            result.trials[static_cast<std::size_t>(trial * per_trial + s * per_setting + slot)];
        if (!first) first = &r;
        if (!r.converged) continue;
        bias.push_back(r.bias);
        if (r.error) err.push_back(*r.error);
      }
      GroupLabelRow row;
      row.setting = settings[s];
      row.method = first->method;
      row.beta = first->beta;
      row.bias = mean(bias);
      if (first->method != Method::TrueGraph) row.error = mean(err);
      row.count = static_cast<int>(bias.size());
      result.rows.push_back(row);
    }
  }
  return result;
}

void write_group_labels(const io::fs::path& dir, const GroupLabelResult& r) {
  io::ensure_directory(dir);
  io::Table t;
  t.header = {"setting", "method", "beta", "bias", "error", "count"};
  for (const auto& row : r.rows) {
    t.add_row({row.setting, std::string(to_string(row.method)), cell(row.beta), cell(row.bias),
               cell(row.error), std::to_string(row.count)});
  }
  io::write_table_csv(dir / "grouplabels.csv", t);
  io::write_table_csv(dir / "grouplabels_trials.csv", trial_table(r.trials));
}

std::vector<double> default_senate_betas() {
  std::vector<double> betas;
  for (int k = 0; k <= 12; ++k) betas.push_back(std::pow(10.0, 2.0 + 3.0 * k / 12.0));
  return betas;
}

SenateResult run_senate_sweep(const Matrix& x, const GroupAssignment& groups,
                              const SenateConfig& cfg, const ProgressFn& progress) {
  if (x.rows() != groups.size()) {
    throw DomainError("signals have " + std::to_string(x.rows()) + " rows but " +
                      std::to_string(groups.size()) + " nodes are labeled");
  }
  if (cfg.betas.empty()) throw DomainError("empty beta grid");
  const CovarianceEstimate cov = sample_covariance(x);
  EstimationSettings est;
  est.epsilon_scale = cfg.epsilon_scale;
  est.epsilon_floor = cfg.epsilon_floor;
  est.solver = cfg.solver;
  est.cset = cfg.cset;
  const double eps = cfg.epsilon ? *cfg.epsilon : experiment_epsilon(cov, est);

  const int beta_count = static_cast<int>(cfg.betas.size());
  std::vector<std::optional<SolveReport>> reports(static_cast<std::size_t>(1 + 2 * beta_count));
  parallel_for(
      1 + 2 * beta_count, resolve_jobs(cfg.jobs),
      [&](int k) {
        if (k == 0) {
          reports[0] = solve_with(cov, groups, est, eps, Penalty::None, 0.0);
          return;
        }
        const double beta = cfg.betas[static_cast<std::size_t>((k - 1) / 2)];
        const Penalty p = (k - 1) % 2 == 0 ? Penalty::DP : Penalty::DPNode;
        reports[static_cast<std::size_t>(k)] = solve_with(cov, groups, est, eps, p, beta);
      },
      progress);

  SenateResult result;
  result.epsilon = eps;
  const SolveReport& none = *reports[0];
  for (int bi = 0; bi < beta_count; ++bi) {
    const SolveReport& dp = *reports[static_cast<std::size_t>(1 + 2 * bi)];
    const SolveReport& node = *reports[static_cast<std::size_t>(2 + 2 * bi)];
    SenateRow row;
    row.beta = cfg.betas[static_cast<std::size_t>(bi)];
    row.bias_nti = delta_dp(none.a_hat, groups);
    row.bias_fnti = delta_dp(dp.a_hat, groups);
    row.bias_nfnti = delta_dp(node.a_hat, groups);
    row.err_nti = commutativity_residual(none.a_hat, cov, true);
    row.err_fnti = commutativity_residual(dp.a_hat, cov, true);
    row.err_nfnti = commutativity_residual(node.a_hat, cov, true);
    row.conv_nti = none.converged;
    row.conv_fnti = dp.converged;
    row.conv_nfnti = node.converged;
    result.rows.push_back(row);
  }
  return result;
}

void write_senate(const io::fs::path& dir, const SenateResult& r) {
  io::ensure_directory(dir);
  io::Table bias, err, conv;
  bias.header = err.header = conv.header = {"beta", "nti", "fnti", "nfnti"};
  for (const auto& row : r.rows) {
    bias.add_row({cell(row.beta), cell(row.bias_nti), cell(row.bias_fnti), cell(row.bias_nfnti)});
    err.add_row({cell(row.beta), cell(row.err_nti), cell(row.err_fnti), cell(row.err_nfnti)});
    conv.add_row({cell(row.beta), row.conv_nti ? "1" : "0", row.conv_fnti ? "1" : "0",
                  row.conv_nfnti ? "1" : "0"});
  }
  io::write_table_csv(dir / "senate_bias.csv", bias);
  io::write_table_csv(dir / "senate_error.csv", err);
  io::write_table_csv(dir / "senate_convergence.csv", conv);
}

Interval bootstrap_mean_interval(const std::vector<double>& values, int resamples, double level,
                                 std::uint64_t seed) {
  if (values.empty()) throw DomainError("bootstrap of an empty sample");
  if (resamples < 1) throw DomainError("need at least one bootstrap resample");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  Rng rng(seed);
  const auto n = values.size();
  std::vector<double> means(static_cast<std::size_t>(resamples));
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += values[rng.below(n)];
    m = s / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double tail = 0.5 * (1.0 - level);
  auto at = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        std::clamp(std::floor(q * static_cast<double>(resamples - 1) + 0.5), 0.0,
                   static_cast<double>(resamples - 1)));
    return means[idx];
  };
  return {at(tail), at(1.0 - tail)};
}

}  // namespace fairtopo
