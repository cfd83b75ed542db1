#include "fairtopo/certify.hpp"
#include "fairtopo/errors.hpp"
#include "fairtopo/experiments.hpp"
#include "fairtopo/fairness.hpp"
#include "fairtopo/signals.hpp"
#include "fairtopo/solver.hpp"
#include "fairtopo/synth.hpp"
#include "fairtopo/vectorize.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fairtopo;

namespace {

GroupAssignment make_groups(const std::vector<int>& labels, std::optional<int> group_count) {
  int g = 0;
  for (int l : labels) g = std::max(g, l + 1);
  return GroupAssignment(labels, group_count.value_or(g));
}

ConstraintSet make_cset(const std::string& normalization) {
  ConstraintSet c;
  if (normalization == "first-row") {
    c.normalization = Normalization::FirstRowSum1;
  } else if (normalization == "total-sum") {
    c.normalization = Normalization::TotalSumN;
  } else {
    throw DomainError("normalization must be 'first-row' or 'total-sum'");
  }
  return c;
}

CovarianceEstimate make_cov(const Matrix& c, std::size_t samples) {
  CovarianceEstimate cov{c, samples};
  validate_covariance(cov);
  return cov;
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["a_hat"] = r.a_hat.weights();
  d["objective_l1"] = r.objective_l1;
  d["objective_fair"] = r.objective_fair;
  d["commut_residual"] = r.commut_residual;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["primal_residual"] = r.primal_residual;
  d["dual_residual"] = r.dual_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fairtopo, m) {
  m.doc() = "Fair network topology inference from stationary graph signals";

  static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
  static py::exception<IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      py::set_error(domain_error, e.what());
    } catch (const IoError& e) {
      py::set_error(io_error, e.what());
    }
  });

  m.def("indicator_matrix",
        [](const std::vector<int>& labels, std::optional<int> g) {
          return indicator_matrix(make_groups(labels, g));
        },
        py::arg("labels"), py::arg("group_count") = py::none());

  m.def("project_to_constraint_set",
        [](const Matrix& a) { return project_to_constraint_set(a, {}).weights(); }, py::arg("m"));

  m.def("delta_dp",
        [](const Matrix& a, const std::vector<int>& labels, std::optional<int> g) {
          return delta_dp(AdjacencyMatrix(a), make_groups(labels, g));
        },
        py::arg("a"), py::arg("labels"), py::arg("group_count") = py::none());

  m.def("delta_dp_node",
        [](const Matrix& a, const std::vector<int>& labels, std::optional<int> g) {
          return delta_dp_node(AdjacencyMatrix(a), make_groups(labels, g));
        },
        py::arg("a"), py::arg("labels"), py::arg("group_count") = py::none());

  m.def("build_b",
        [](const std::vector<int>& labels, std::optional<int> g) {
          return build_b(make_groups(labels, g));
        },
        py::arg("labels"), py::arg("group_count") = py::none());

  m.def("bias_report",
        [](const Matrix& a, const std::vector<int>& labels, std::optional<int> g) {
          const BiasReport r = bias_report(AdjacencyMatrix(a), make_groups(labels, g));
          py::dict d;
          d["delta_dp"] = r.delta_dp;
          d["delta_dp_node"] = r.delta_dp_node;
          d["edge_density"] = r.edge_density;
          d["normalized_bias"] = r.normalized_bias ? py::object(py::float_(*r.normalized_bias)) : py::none();
          return d;
        },
        py::arg("a"), py::arg("labels"), py::arg("group_count") = py::none());

  m.def("apply_filter",
        [](const std::vector<double>& coeffs, const Matrix& s) {
          return apply_filter(FilterSpec{coeffs}, AdjacencyMatrix(s));
        },
        py::arg("coeffs"), py::arg("s"));

  m.def("analytic_covariance",
        [](const std::vector<double>& coeffs, const Matrix& s) {
          return analytic_covariance(FilterSpec{coeffs}, AdjacencyMatrix(s)).c;
        },
        py::arg("coeffs"), py::arg("s"));

  m.def("sample_signals",
        [](const std::vector<double>& coeffs, const Matrix& s, std::size_t samples, std::uint64_t seed) {
          return sample_signals(FilterSpec{coeffs}, AdjacencyMatrix(s), samples, seed);
        },
        py::arg("coeffs"), py::arg("s"), py::arg("samples"), py::arg("seed"));

  m.def("sample_covariance", [](const Matrix& x) { return sample_covariance(x).c; }, py::arg("x"));

  m.def("default_experiment_filter",
        [](const Matrix& s, std::uint64_t seed) {
          return default_experiment_filter(AdjacencyMatrix(s), seed).coeffs;
        },
        py::arg("s"), py::arg("seed"));

  m.def("commutativity_residual",
        [](const Matrix& a, const Matrix& c, bool normalized) {
          return commutativity_residual(a, CovarianceEstimate{c, 0}, normalized);
        },
        py::arg("a"), py::arg("c"), py::arg("normalized") = false);

  m.def("vec_upper", [](const Matrix& a) { return vec_upper(a); }, py::arg("a"));
  m.def("unvec_upper", &unvec_upper, py::arg("a"), py::arg("n"));

  m.def("build_vectorized",
        [](const Matrix& c, const std::vector<int>& labels, double beta, const std::string& penalty,
           const std::string& normalization) {
          const VectorizedProblem vp = build_vectorized(CovarianceEstimate{c, 0}, make_groups(labels, {}),
                                                        beta, parse_penalty(penalty),
                                                        make_cset(normalization));
          py::dict d;
          d["psi"] = vp.psi;
          d["phi"] = vp.phi;
          d["b"] = vp.b;
          return d;
        },
        py::arg("c"), py::arg("labels"), py::arg("beta") = 0.0, py::arg("penalty") = "none",
        py::arg("normalization") = "first-row");

  m.def("default_epsilon",
        [](const Matrix& c, std::size_t samples) { return default_epsilon(CovarianceEstimate{c, samples}); },
        py::arg("c"), py::arg("samples"));

  m.def("minimum_commutativity_residual",
        [](const Matrix& c, const std::string& normalization) {
          return minimum_commutativity_residual(make_cov(c, 1), make_cset(normalization));
        },
        py::arg("c"), py::arg("normalization") = "first-row");

  m.def("solve_convex",
        [](const Matrix& c, const std::vector<int>& labels, double beta, double epsilon,
           const std::string& penalty, int max_iters, const std::string& normalization) {
          SolveConfig cfg;
          cfg.beta = beta;
          cfg.epsilon = epsilon;
          cfg.penalty = parse_penalty(penalty);
          cfg.max_iters = max_iters;
          SolveReport r;
          {
            py::gil_scoped_release release;
            r = solve_convex(make_cov(c, 0), make_groups(labels, {}), cfg, make_cset(normalization));
          }
          return report_dict(r);
        },
        py::arg("c"), py::arg("labels"), py::arg("beta") = 0.0, py::arg("epsilon") = 0.0,
        py::arg("penalty") = "none", py::arg("max_iters") = 50000,
        py::arg("normalization") = "first-row");

  m.def("solve_l0_bruteforce",
        [](const Matrix& c, const std::vector<int>& labels, double beta, const std::string& penalty,
           int max_support) -> py::object {
          const L0Result r = solve_l0_bruteforce(make_cov(c, 0), make_groups(labels, {}), beta,
                                                 parse_penalty(penalty), {}, max_support);
          if (!r.feasible) return py::none();
          py::dict d = report_dict(*r.report);
          d["support"] = r.support;
          return std::move(d);
        },
        py::arg("c"), py::arg("labels"), py::arg("beta") = 0.0, py::arg("penalty") = "none",
        py::arg("max_support") = 20);

  m.def("certify",
        [](const Matrix& c, const std::vector<int>& labels, const Matrix& a_hat, double beta,
           const std::string& penalty, std::optional<double> zero_tol) {
          const VectorizedProblem vp = build_vectorized(CovarianceEstimate{c, 0}, make_groups(labels, {}),
                                                        beta, parse_penalty(penalty), {});
          const CertificateReport r = certify(vp, a_hat, zero_tol);
          py::dict d;
          d["support_I"] = r.support_i;
          d["support_J"] = r.support_j;
          d["vacuous"] = r.vacuous;
          d["cond1_full_rank"] = r.cond1_full_rank;
          d["cond2_min_norm"] = r.cond2_min_norm;
          d["cond2_holds"] = r.cond2_holds;
          d["psi_star"] = r.psi_star;
          d["certified"] = r.certified();
          return d;
        },
        py::arg("c"), py::arg("labels"), py::arg("a_hat"), py::arg("beta") = 0.0,
        py::arg("penalty") = "none", py::arg("zero_tol") = py::none());

  m.def("generate_two_group_graph",
        [](int n, double ratio, double p, std::uint64_t seed) {
          RewireSpec spec;
          spec.n = n;
          spec.across_ratio = ratio;
          spec.p = p;
          spec.seed = seed;
          const LabeledGraph g = generate_two_group_graph(spec);
          return py::make_tuple(g.adjacency.weights(), g.groups.labels());
        },
        py::arg("n") = 30, py::arg("ratio") = 0.0, py::arg("p") = 0.3, py::arg("seed") = 0);

  m.def("assign_uniform_groups",
        [](int n, int g, std::uint64_t seed) {
          return assign_groups(n, g, AssignMode::Uniform, std::nullopt, seed).labels();
        },
        py::arg("n"), py::arg("group_count"), py::arg("seed"));

  m.def("estimation_error",
        [](const Matrix& truth, const Matrix& est) { return estimation_error(truth, est); },
        py::arg("truth"), py::arg("est"));
}
