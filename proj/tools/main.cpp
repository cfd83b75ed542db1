#include "manifest.hpp"

#include "fairtopo/certify.hpp"
#include "fairtopo/errors.hpp"
#include "fairtopo/experiments.hpp"
#include "fairtopo/fairness.hpp"
#include "fairtopo/ingest.hpp"
#include "fairtopo/io.hpp"
#include "fairtopo/rng.hpp"
#include "fairtopo/signals.hpp"
#include "fairtopo/solver.hpp"
#include "fairtopo/synth.hpp"
#include "fairtopo/vectorize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>

#ifndef FAIRTOPO_VERSION
#define FAIRTOPO_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace fairtopo::cli {
namespace {

constexpr const char* kVersion = FAIRTOPO_VERSION;

struct Common {
  std::string config;
  std::string manifest;
  bool strict = false;
  bool quiet = false;
};

struct SolverFlags {
  double rho = 2.0;
  int max_iters = 50000;
  double tol_abs = 1e-7;
  double tol_rel = 1e-5;
  bool fixed_rho = false;
  std::string normalization = "first-row";

  void add(CLI::App* app) {
    app->add_option("--rho", rho, "Initial splitting penalty")->check(CLI::PositiveNumber);
    app->add_option("--max-iters", max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--tol-abs", tol_abs, "Absolute stopping tolerance")->check(CLI::PositiveNumber);
    app->add_option("--tol-rel", tol_rel, "Relative stopping tolerance")->check(CLI::PositiveNumber);
    app->add_flag("--fixed-rho", fixed_rho, "Disable residual balancing");
    app->add_option("--normalization", normalization, "first-row or total-sum")
        ->check(CLI::IsMember({"first-row", "total-sum"}));
  }

  SolveConfig config() const {
    SolveConfig cfg;
    cfg.rho = rho;
    cfg.max_iters = max_iters;
    cfg.tol_abs = tol_abs;
    cfg.tol_rel = tol_rel;
    cfg.adaptive_rho = !fixed_rho;
    return cfg;
  }

  ConstraintSet cset() const {
    ConstraintSet c;
    c.normalization = normalization == "total-sum" ? Normalization::TotalSumN : Normalization::FirstRowSum1;
    if (c.normalization == Normalization::TotalSumN) {
      std::cerr << "warning: with total-sum normalization the l1 term is constant on the "
                   "feasible set, so only the fairness term shapes the estimate\n";
    }
    return c;
  }
};

void print_json(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ordered_json report_json(const SolveReport& r) {
  ordered_json j;
  j["objective_l1"] = r.objective_l1;
  j["objective_fair"] = r.objective_fair;
  j["commut_residual"] = r.commut_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

ordered_json certificate_json(const CertificateReport& c) {
  ordered_json j;
  j["support_I"] = c.support_i;
  j["support_J"] = c.support_j;
  j["vacuous"] = c.vacuous;
  j["cond1_full_rank"] = c.cond1_full_rank;
  j["cond2_min_norm"] = json_number(c.cond2_min_norm);
  j["cond2_holds"] = c.cond2_holds;
  j["psi_star"] = json_number(c.psi_star);
  j["skipped_psi"] = c.skipped_psi;
  j["cond2_indeterminate"] = c.cond2_indeterminate;
  j["certified"] = c.certified();
  return j;
}

ProgressFn progress_printer(const Common& common, const std::string& label) {
  if (common.quiet) return {};
  return [label, last = -1](int done, int total) mutable {
    const int pct = 100 * done / total;
    if (pct / 5 != last / 5 || done == total) {
      std::cerr << label << ": " << done << "/" << total << '\n';
      last = pct;
    }
  };
}

}  // namespace

int run(int argc, char** argv);

namespace {

struct Dispatcher {
  CLI::App app{"Fair network topology inference from stationary graph signals", "fair-topo"};
  Common common;
  SolverFlags solver_flags;

  // metrics
  std::string adj, groups;
  // solve / certify
  std::string cov;
  std::size_t cov_samples = 0;
  double beta = 0.0;
  std::optional<double> epsilon;
  std::string penalty = "none";
  std::string out, report, dump_problem;
  std::optional<double> zero_tol;
  // synth
  int n = 30;
  double ratio = 0.0, p = 0.3;
  std::uint64_t seed = 1;
  std::string out_adj, out_groups, labels = "community";
  // simulate
  std::size_t samples = 100000;
  bool analytic = false;
  std::vector<double> filter;
  std::string out_cov, out_signals;
  // ingest
  std::string votes, members;
  int congress = 113;
  // experiments
  EdgeRatioConfig fig2;
  GroupLabelConfig table1;
  SenateConfig senate;
  std::string data_dir;
  // replay
  std::string replay_manifest, replay_out;

  std::map<std::string, CLI::App*> leaves;

  Dispatcher() {
    app.set_version_flag("--version", std::string("fair-topo ") + kVersion);
    app.set_config("--config", "", "TOML/INI file supplying option values (flags take precedence)");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.add_flag("--strict", common.strict, "Treat solver non-convergence as an error (exit 1)");
    app.add_flag("--quiet", common.quiet, "Suppress progress messages");

    auto* metrics = app.add_subcommand("metrics", "Bias report of a graph as JSON");
    metrics->add_option("--adj", adj, "Adjacency CSV")->required()->check(CLI::ExistingFile);
    metrics->add_option("--groups", groups, "Groups CSV")->required()->check(CLI::ExistingFile);
    add_manifest(metrics);
    leaves["metrics"] = metrics;

    auto* solve = app.add_subcommand("solve", "Estimate a fair sparse graph from a covariance");
    solve->add_option("--cov", cov, "Covariance CSV")->required()->check(CLI::ExistingFile);
    solve->add_option("--groups", groups, "Groups CSV")->required()->check(CLI::ExistingFile);
    solve->add_option("--samples", cov_samples,
                      "Sample count behind the covariance (0 = exact); sets the default epsilon");
    solve->add_option("--beta", beta, "Fairness weight")->check(CLI::NonNegativeNumber);
    solve->add_option("--epsilon", epsilon, "Commutativity radius")->check(CLI::NonNegativeNumber);
    solve->add_option("--penalty", penalty, "none, dp or node")
        ->check(CLI::IsMember({"none", "dp", "node", "dpnode"}));
    solve->add_option("--out", out, "Output adjacency CSV")->required();
    solve->add_option("--report", report, "Output report JSON");
    solve->add_option("--dump-problem", dump_problem, "Directory for psi/phi/b triplet CSVs");
    solver_flags.add(solve);
    add_manifest(solve);
    leaves["solve"] = solve;

    auto* cert = app.add_subcommand("certify", "Check the exact-recovery certificate for an estimate");
    cert->add_option("--cov", cov, "Covariance CSV")->required()->check(CLI::ExistingFile);
    cert->add_option("--groups", groups, "Groups CSV")->required()->check(CLI::ExistingFile);
    cert->add_option("--adj", adj, "Candidate adjacency CSV")->required()->check(CLI::ExistingFile);
    cert->add_option("--beta", beta, "Fairness weight")->check(CLI::NonNegativeNumber);
    cert->add_option("--penalty", penalty, "none, dp or node")
        ->check(CLI::IsMember({"none", "dp", "node", "dpnode"}));
    cert->add_option("--zero-tol", zero_tol, "Support threshold (default 1e-6 x largest entry)");
    cert->add_option("--normalization", solver_flags.normalization, "first-row or total-sum")
        ->check(CLI::IsMember({"first-row", "total-sum"}));
    add_manifest(cert);
    leaves["certify"] = cert;

    auto* synth = app.add_subcommand("synth", "Two-group graph with rewired across-group edges");
    synth->add_option("--n", n, "Node count (even)");
    synth->add_option("--ratio", ratio, "Fraction of edges moved across groups")
        ->check(CLI::Range(0.0, 1.0));
    synth->add_option("--p", p, "Edge probability inside each group")->check(CLI::Range(0.0, 1.0));
    synth->add_option("--seed", seed, "Random seed");
    synth->add_option("--labels", labels, "community (unfair) or uniform (fair) group labels")
        ->check(CLI::IsMember({"community", "uniform"}));
    synth->add_option("--out-adj", out_adj, "Output adjacency CSV")->required();
    synth->add_option("--out-groups", out_groups, "Output groups CSV")->required();
    add_manifest(synth);
    leaves["synth"] = synth;

    auto* sim = app.add_subcommand("simulate", "Stationary signals and their covariance on a graph");
    sim->add_option("--adj", adj, "Adjacency CSV")->required()->check(CLI::ExistingFile);
    sim->add_option("--samples", samples, "Number of signals M")->check(CLI::PositiveNumber);
    sim->add_option("--seed", seed, "Random seed");
    sim->add_flag("--analytic", analytic, "Write the exact covariance instead of a sample estimate");
    sim->add_option("--filter", filter, "Filter coefficients h0,h1,... (default: seeded random)")
        ->delimiter(',');
    sim->add_option("--out-cov", out_cov, "Output covariance CSV")->required();
    sim->add_option("--out-signals", out_signals, "Output signals CSV (N x M)");
    add_manifest(sim);
    leaves["simulate"] = sim;

    auto* ingest = app.add_subcommand("ingest-votes", "Build the senate dataset from roll-call files");
    ingest->add_option("--votes", votes, "Votes CSV")->required()->check(CLI::ExistingFile);
    ingest->add_option("--members", members, "Members CSV")->required()->check(CLI::ExistingFile);
    ingest->add_option("--congress", congress, "Congress number");
    ingest->add_option("--out", out, "Output directory")->required();
    add_manifest(ingest);
    leaves["ingest-votes"] = ingest;

    auto* exp = app.add_subcommand("experiment", "Run one of the reproduction experiments");
    exp->require_subcommand(1);
    auto* f2 = exp->add_subcommand("fig2", "Bias and error versus across-group edge ratio");
    f2->add_option("--ratios", fig2.ratios, "Across-group ratios")->delimiter(',');
    f2->add_option("--trials", fig2.trials, "Trials per ratio")->check(CLI::PositiveNumber);
    f2->add_option("--beta", fig2.beta, "Fairness weight of the penalized methods");
    f2->add_option("--n", fig2.n, "Node count");
    f2->add_option("--p", fig2.p, "Edge probability inside each group");
    f2->add_option("--seed", fig2.seed, "Base seed");
    add_estimation(f2, fig2.est);
    f2->add_option("--jobs", fig2.jobs, "Worker threads (default FAIR_TOPO_JOBS or all cores)");
    f2->add_option("--out", out, "Output directory")->required();
    add_manifest(f2);
    leaves["experiment fig2"] = f2;

    auto* t1 = exp->add_subcommand("table1", "Fair versus unfair group labels");
    t1->add_option("--trials", table1.trials, "Graph realizations")->check(CLI::PositiveNumber);
    t1->add_option("--betas", table1.betas, "Fairness weights")->delimiter(',');
    t1->add_option("--ratio", table1.ratio, "Across-group ratio of the community graph");
    t1->add_option("--n", table1.n, "Node count");
    t1->add_option("--p", table1.p, "Edge probability inside each group");
    t1->add_option("--seed", table1.seed, "Base seed");
    add_estimation(t1, table1.est);
    t1->add_option("--jobs", table1.jobs, "Worker threads (default FAIR_TOPO_JOBS or all cores)");
    t1->add_option("--out", out, "Output directory")->required();
    add_manifest(t1);
    leaves["experiment table1"] = t1;

    auto* se = exp->add_subcommand("senate", "Bias and commutativity error versus beta on senate votes");
    se->add_option("--data", data_dir, "Directory with signals.csv and groups.csv")
        ->required()
        ->check(CLI::ExistingDirectory);
    se->add_option("--betas", senate.betas, "Fairness weights")->delimiter(',');
    se->add_option("--epsilon", senate.epsilon, "Commutativity radius (default: scaled rule)");
    se->add_option("--epsilon-scale", senate.epsilon_scale, "Multiple of the default radius rule");
    se->add_option("--epsilon-floor", senate.epsilon_floor, "Multiple of the least feasible radius");
    se->add_option("--jobs", senate.jobs, "Worker threads (default FAIR_TOPO_JOBS or all cores)");
    se->add_option("--out", out, "Output directory")->required();
    solver_flags.add(se);
    add_manifest(se);
    leaves["experiment senate"] = se;

    auto* rp = app.add_subcommand("replay", "Re-run a recorded manifest");
    rp->add_option("--manifest", replay_manifest, "manifest.json to replay")
        ->required()
        ->check(CLI::ExistingFile);
    rp->add_option("--out", replay_out, "Replace the recorded output location");
    leaves["replay"] = rp;
  }

  void add_manifest(CLI::App* sub) {
    sub->add_option("--manifest", common.manifest, "Where to write the run manifest");
  }

  void add_estimation(CLI::App* sub, EstimationSettings& est) {
    sub->add_option("--samples", est.samples, "Signals per trial")->check(CLI::PositiveNumber);
    sub->add_option("--epsilon-scale", est.epsilon_scale, "Multiple of the default radius rule");
    sub->add_option("--epsilon-floor", est.epsilon_floor, "Multiple of the least feasible radius");
    sub->add_option("--max-iters", est.solver.max_iters, "Solver iteration cap");
  }

  std::pair<std::string, CLI::App*> selected() {
    for (auto& [name, sub] : leaves)
      if (sub->parsed()) return {name, sub};
    throw CLI::CallForHelp();
  }

  void write_manifest(const std::string& name, CLI::App* sub, const fs::path& fallback) {
    static const std::set<std::string> inputs{"adj", "groups", "cov", "votes", "members", "data"};
    std::vector<std::string> path;
    std::string part;
    for (char ch : name + ' ') {
      if (ch == ' ') {
        path.push_back(part);
        part.clear();
      } else {
        part += ch;
      }
    }
    RunManifest m = collect_manifest(*sub, path, inputs, kVersion);
    const fs::path target = common.manifest.empty() ? fallback : fs::path(common.manifest);
    if (!common.quiet) std::cerr << "resolved configuration: " << m.config.dump() << '\n';
    if (target.empty()) return;
    io::write_text(target, m.to_json().dump(2) + "\n");
  }

  void check_converged(const SolveReport& r) const {
    if (r.converged) return;
    const std::string msg = "solver stopped after " + std::to_string(r.iterations) +
                            " iterations without converging";
    if (common.strict) throw DomainError(msg);
    std::cerr << "warning: " << msg << '\n';
  }

  int execute() {
    const auto [name, sub] = selected();
    if (name == "metrics") return do_metrics(sub);
    if (name == "solve") return do_solve(sub);
    if (name == "certify") return do_certify(sub);
    if (name == "synth") return do_synth(sub);
    if (name == "simulate") return do_simulate(sub);
    if (name == "ingest-votes") return do_ingest(sub);
    if (name == "experiment fig2") return do_fig2(sub);
    if (name == "experiment table1") return do_table1(sub);
    if (name == "experiment senate") return do_senate(sub);
    if (name == "replay") return do_replay();
    return 2;
  }

  int do_metrics(CLI::App* sub) {
    write_manifest("metrics", sub, {});
    const AdjacencyMatrix a = io::read_adjacency_csv(adj);
    const GroupAssignment g = io::read_groups_csv(groups);
    const BiasReport r = bias_report(a, g);
    ordered_json j;
    j["delta_dp"] = r.delta_dp;
    j["delta_dp_node"] = r.delta_dp_node;
    j["edge_density"] = r.edge_density;
    j["normalized_bias"] = r.normalized_bias ? ordered_json(*r.normalized_bias) : ordered_json(nullptr);
    print_json(j);
    return 0;
  }

  CovarianceEstimate load_cov(std::size_t samples_behind) const {
    CovarianceEstimate c{io::read_matrix_csv(cov), samples_behind};
    validate_covariance(c);
    return c;
  }

  int do_solve(CLI::App* sub) {
    write_manifest("solve", sub, fs::path(out + ".manifest.json"));
    const CovarianceEstimate c = load_cov(cov_samples);
    const GroupAssignment g = io::read_groups_csv(groups);
    SolveConfig cfg = solver_flags.config();
    cfg.beta = beta;
    cfg.penalty = parse_penalty(penalty);
    cfg.epsilon = epsilon ? *epsilon : default_epsilon(c);
    const ConstraintSet cs = solver_flags.cset();
    if (!dump_problem.empty()) {
      const VectorizedProblem vp = build_vectorized(c, g, beta, cfg.penalty, cs);
      io::ensure_directory(dump_problem);
      io::write_triplets_csv(fs::path(dump_problem) / "psi.csv", vp.psi);
      io::write_triplets_csv(fs::path(dump_problem) / "phi.csv", vp.phi);
      io::write_vector_csv(fs::path(dump_problem) / "b.csv", vp.b);
    }
    const SolveReport r = solve_convex(c, g, cfg, cs);
    io::write_matrix_csv(out, r.a_hat.weights());
    if (!report.empty()) io::write_text(report, report_json(r).dump(2) + "\n");
    check_converged(r);
    return 0;
  }

  int do_certify(CLI::App* sub) {
    write_manifest("certify", sub, {});
    const CovarianceEstimate c = load_cov(0);
    const GroupAssignment g = io::read_groups_csv(groups);
    const AdjacencyMatrix a = io::read_adjacency_csv(adj);
    const VectorizedProblem vp = build_vectorized(c, g, beta, parse_penalty(penalty), solver_flags.cset());
    print_json(certificate_json(certify(vp, a.weights(), zero_tol)));
    return 0;
  }

  int do_synth(CLI::App* sub) {
    write_manifest("synth", sub, fs::path(out_adj + ".manifest.json"));
    RewireSpec spec;
    spec.n = n;
    spec.p = p;
    spec.across_ratio = ratio;
    spec.seed = seed;
    const LabeledGraph lg = generate_two_group_graph(spec);
    const GroupAssignment g =
        labels == "uniform" ? assign_groups(n, 2, AssignMode::Uniform, std::nullopt, derive_seed(seed, 7))
                            : lg.groups;
    io::write_matrix_csv(out_adj, lg.adjacency.weights());
    io::write_groups_csv(out_groups, g);
    return 0;
  }

  int do_simulate(CLI::App* sub) {
    write_manifest("simulate", sub, fs::path(out_cov + ".manifest.json"));
    const AdjacencyMatrix a = io::read_adjacency_csv(adj);
    const FilterSpec spec = filter.empty() ? default_experiment_filter(a, derive_seed(seed, 0))
                                           : FilterSpec{filter};
    if (analytic) {
      io::write_matrix_csv(out_cov, analytic_covariance(spec, a).c);
      return 0;
    }
    if (!out_signals.empty()) {
      const Matrix x = sample_signals(spec, a, samples, derive_seed(seed, 1));
      io::write_matrix_csv(out_signals, x);
      io::write_matrix_csv(out_cov, sample_covariance(x).c);
    } else {
      io::write_matrix_csv(out_cov, simulate_covariance(spec, a, samples, derive_seed(seed, 1)).c);
    }
    return 0;
  }

  int do_ingest(CLI::App* sub) {
    io::ensure_directory(out);
    write_manifest("ingest-votes", sub, fs::path(out) / "manifest.json");
    const SenateDataset d = ingest_rollcalls(votes, members, congress);
    for (const auto& note : d.notes) std::cerr << "note: " << note << '\n';
    std::cerr << "ingested " << d.node_count() << " nodes x " << d.vote_count() << " roll calls\n";
    export_dataset(d, out);
    return 0;
  }

  void check_trials(const std::vector<TrialResult>& trials) const {
    int failed = 0;
    for (const auto& t : trials) failed += t.converged ? 0 : 1;
    if (failed == 0) return;
    const std::string msg = std::to_string(failed) + " solves did not converge";
    if (common.strict) throw DomainError(msg);
    std::cerr << "warning: " << msg << " (excluded from the means)\n";
  }

  int do_fig2(CLI::App* sub) {
    io::ensure_directory(out);
    write_manifest("experiment fig2", sub, fs::path(out) / "manifest.json");
    const EdgeRatioResult r = run_edge_ratio_sweep(fig2, progress_printer(common, "fig2"));
    write_edge_ratio(out, r);
    check_trials(r.trials);
    return 0;
  }

  int do_table1(CLI::App* sub) {
    io::ensure_directory(out);
    write_manifest("experiment table1", sub, fs::path(out) / "manifest.json");
    const GroupLabelResult r = run_group_label_study(table1, progress_printer(common, "table1"));
    write_group_labels(out, r);
    check_trials(r.trials);
    return 0;
  }

  int do_senate(CLI::App* sub) {
    io::ensure_directory(out);
    write_manifest("experiment senate", sub, fs::path(out) / "manifest.json");
    const LoadedSignals data = load_dataset(data_dir);
    senate.solver = solver_flags.config();
    senate.cset = solver_flags.cset();
    const SenateResult r = run_senate_sweep(data.x, data.groups, senate, progress_printer(common, "senate"));
    write_senate(out, r);
    int failed = 0;
    for (const auto& row : r.rows) failed += !row.conv_nti + !row.conv_fnti + !row.conv_nfnti;
    if (failed > 0) {
      const std::string msg = std::to_string(failed) + " senate solves did not converge";
      if (common.strict) throw DomainError(msg);
      std::cerr << "warning: " << msg << '\n';
    }
    return 0;
  }

  int do_replay() {
    const RunManifest m = RunManifest::from_json(nlohmann::json::parse(io::read_text(replay_manifest)));
    if (m.subcommand.empty() || m.subcommand.front() == "replay") {
      throw IoError("manifest does not name a replayable subcommand");
    }
    if (m.version != kVersion) {
      std::cerr << "warning: manifest written by version " << m.version << ", running " << kVersion
                << '\n';
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!replay_out.empty()) overrides.emplace_back("out", fs::absolute(replay_out).string());
    const fs::path previous = fs::current_path();
    if (!m.cwd.empty()) fs::current_path(m.cwd);
    verify_inputs(m);
    std::vector<std::string> args = replay_arguments(m, overrides);
    if (common.quiet) args.insert(args.begin(), "--quiet");
    if (common.strict) args.insert(args.begin(), "--strict");
    std::vector<char*> cargv{const_cast<char*>("fair-topo")};
    for (auto& a : args) cargv.push_back(a.data());
    const int status = run(static_cast<int>(cargv.size()), cargv.data());
    fs::current_path(previous);
    return status;
  }
};

}  // namespace

int run(int argc, char** argv) {
  Dispatcher d;
  try {
    d.app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return d.app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return d.app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return d.app.exit(e);
  } catch (const CLI::ParseError& e) {
    d.app.exit(e);
    return 2;
  }
  try {
    return d.execute();
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fairtopo::cli

int main(int argc, char** argv) { return fairtopo::cli::run(argc, argv); }
