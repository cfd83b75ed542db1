#pragma once

#include "fairtopo/graph.hpp"
#include "fairtopo/io.hpp"
#include "fairtopo/signals.hpp"
#include "fairtopo/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fairtopo {

// 1/2 || A/||A||_F - B/||B||_F ||_F^2, which equals 1 - <A, B> / (||A|| ||B||).
// Throws DomainError if either matrix is zero or the shapes differ.
double estimation_error(const Matrix& truth, const Matrix& est);
double estimation_error(const AdjacencyMatrix& truth, const AdjacencyMatrix& est);

enum class Method { TrueGraph, NonePenalty, DP, DPNode };
std::string_view to_string(Method m);

// How a synthetic trial turns a graph into a sample covariance (drawn with
// wishart_covariance) and picks the commutativity radius.
struct EstimationSettings {
  std::size_t samples = 1'000'000;
  // epsilon = max(epsilon_scale * default_epsilon(C), epsilon_floor * e_min),
  // where e_min is the smallest residual reachable in the constraint set.
  double epsilon_scale = 0.3;
  double epsilon_floor = 1.5;
  // beta, epsilon and penalty are set per solve.
  SolveConfig solver;
  ConstraintSet cset;
};

double experiment_epsilon(const CovarianceEstimate& cov, const EstimationSettings& est);

struct TrialResult {
  Method method = Method::TrueGraph;
  // Free-form setting tag: "unfair"/"fair" for the label study, empty otherwise.
  std::string setting;
  // Sweep coordinate: the across-group ratio (edge sweep) or 0.
  double x = 0.0;
  int trial = 0;
  double beta = 0.0;
  double bias = 0.0;
  // Absent for the true graph.
  std::optional<double> error;
  bool converged = true;
  int iterations = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

using ProgressFn = std::function<void(int done, int total)>;

// Worker count: `requested` if positive, else FAIR_TOPO_JOBS, else the number
// of hardware threads.
int resolve_jobs(int requested);

// ---- Edge-ratio sweep -----------------------------------------------------

struct EdgeRatioConfig {
  std::vector<double> ratios{0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  int trials = 50;
  double beta = 1000.0;
  int n = 30;
  double p = 0.3;
  std::uint64_t seed = 1;
  int jobs = 0;
  EstimationSettings est;
};

struct EdgeRatioRow {
  double ratio = 0.0;
  double bias_true = 0.0;
  double bias_nti = 0.0;
  double bias_dp = 0.0;
  double bias_nw = 0.0;
  double frob_nti = 0.0;
  double frob_dp = 0.0;
  double frob_nw = 0.0;
  int trials = 0;
  int conv_nti = 0;
  int conv_dp = 0;
  int conv_nw = 0;
};

struct EdgeRatioResult {
  std::vector<TrialResult> trials;
  std::vector<EdgeRatioRow> rows;
};

// Bias is delta_dp / edge density for every method. Means skip trials whose
// solve did not converge; the conv_* counts say how many were kept.
EdgeRatioResult run_edge_ratio_sweep(const EdgeRatioConfig& cfg, const ProgressFn& progress = {});

// edgeratio.csv (Edge_Ratio,Bias_True,Bias_NTI,Bias_DP,Bias_NW,Frob_NTI,Frob_DP,Frob_NW),
// edgeratio_counts.csv and edgeratio_trials.csv.
void write_edge_ratio(const io::fs::path& dir, const EdgeRatioResult& r);

// ---- Fair versus unfair labels --------------------------------------------

struct GroupLabelConfig {
  int trials = 100;
  std::vector<double> betas{100.0, 1000.0};
  // Across-group ratio of the fixed two-community graph.
  double ratio = 0.2;
  int n = 30;
  double p = 0.3;
  std::uint64_t seed = 1;
  int jobs = 0;
  EstimationSettings est;
};

struct GroupLabelRow {
  std::string setting;  // "unfair" (labels = communities) or "fair" (uniform labels)
  Method method = Method::TrueGraph;
  double beta = 0.0;
  double bias = 0.0;
  std::optional<double> error;
  int count = 0;
};

struct GroupLabelResult {
  std::vector<TrialResult> trials;
  std::vector<GroupLabelRow> rows;
};

// Bias is raw delta_dp under the setting's labels.
GroupLabelResult run_group_label_study(const GroupLabelConfig& cfg,
                                       const ProgressFn& progress = {});

// grouplabels.csv (setting,method,beta,bias,error,count) and
// grouplabels_trials.csv.
void write_group_labels(const io::fs::path& dir, const GroupLabelResult& r);

// ---- Senate ---------------------------------------------------------------

std::vector<double> default_senate_betas();

struct SenateConfig {
  std::vector<double> betas = default_senate_betas();
  // Radius rule applied to the sample covariance of the votes.
  double epsilon_scale = 0.3;
  double epsilon_floor = 1.5;
  // Overrides the rule when set.
  std::optional<double> epsilon;
  SolveConfig solver;
  ConstraintSet cset;
  int jobs = 0;
};

struct SenateRow {
  double beta = 0.0;
  // Raw delta_dp of the estimate.
  double bias_nti = 0.0;
  double bias_fnti = 0.0;
  double bias_nfnti = 0.0;
  // ||C A - A C||_F / ||C||_F.
  double err_nti = 0.0;
  double err_fnti = 0.0;
  double err_nfnti = 0.0;
  bool conv_nti = false;
  bool conv_fnti = false;
  bool conv_nfnti = false;
};

struct SenateResult {
  double epsilon = 0.0;
  std::vector<SenateRow> rows;
};

// nti: no penalty, fnti: delta_dp penalty, nfnti: delta_dp_node penalty.
SenateResult run_senate_sweep(const Matrix& x, const GroupAssignment& groups,
                              const SenateConfig& cfg, const ProgressFn& progress = {});

// senate_bias.csv and senate_error.csv, both `beta,nti,fnti,nfnti`, plus
// senate_convergence.csv.
void write_senate(const io::fs::path& dir, const SenateResult& r);

// ---- Statistics ------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap interval for the mean of `values` at two-sided
// confidence `level`.
Interval bootstrap_mean_interval(const std::vector<double>& values, int resamples, double level,
                                 std::uint64_t seed);

}  // namespace fairtopo
