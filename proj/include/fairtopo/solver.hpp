#pragma once

#include "fairtopo/graph.hpp"
#include "fairtopo/signals.hpp"
#include "fairtopo/vectorize.hpp"

#include <optional>
#include <vector>

namespace fairtopo {

struct SolveConfig {
  double beta = 0.0;
  // Radius of the commutativity ball ||A C - C A||_F <= epsilon.
  double epsilon = 0.0;
  Penalty penalty = Penalty::None;
  double rho = 2.0;
  int max_iters = 50000;
  double tol_abs = 1e-7;
  double tol_rel = 1e-5;
  bool adaptive_rho = true;
  double over_relaxation = 1.6;

  // Throws DomainError on negative beta/epsilon, non-positive rho or
  // tolerances, or an over-relaxation factor outside (0, 2).
  void validate() const;
};

struct SolveReport {
  AdjacencyMatrix a_hat = AdjacencyMatrix::zeros(0);
  // ||A||_1 (entrywise, both triangles).
  double objective_l1 = 0.0;
  // Value of the selected gap metric, without the beta weight. Zero for
  // Penalty::None.
  double objective_fair = 0.0;
  // ||A C - C A||_F against the covariance passed to the solver.
  double commut_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
};

// Default commutativity radius for a sample covariance:
// 0.1 ||C||_F N / sqrt(M). Zero for analytic covariances.
double default_epsilon(const CovarianceEstimate& cov);

// Smallest ||A C - C A||_F over nonnegative symmetric hollow A satisfying the
// normalization of `cset`: the least epsilon for which solve_convex is
// feasible.
double minimum_commutativity_residual(const CovarianceEstimate& cov, const ConstraintSet& cset,
                                      int max_iters = 20000);

// Minimizes ||A||_1 + beta * gap(A) subject to ||A C - C A||_F <= epsilon and
// A in the constraint set, by over-relaxed ADMM on the upper-triangle
// parameterization. Never throws on non-convergence: the report carries
// converged == false instead.
SolveReport solve_convex(const CovarianceEstimate& cov, const GroupAssignment& groups,
                         const SolveConfig& cfg, const ConstraintSet& cset = {});

struct L0Result {
  bool feasible = false;
  // Positions into vec_upper order.
  std::vector<int> support;
  // Present iff feasible.
  std::optional<SolveReport> report;
};

// Exact solution of the sparsest-graph problem for epsilon = 0 by support
// enumeration in order of cardinality. Ties at the minimal cardinality are
// broken by beta * gap, then by lexicographic support. Limited to
// N (N - 1) / 2 <= 20 free parameters.
L0Result solve_l0_bruteforce(const CovarianceEstimate& cov, const GroupAssignment& groups,
                             double beta, Penalty penalty, const ConstraintSet& cset,
                             int max_support);

// Gap metric selected by `penalty` (zero for Penalty::None).
double penalty_value(const Matrix& a, const GroupAssignment& groups, Penalty penalty);

}  // namespace fairtopo
