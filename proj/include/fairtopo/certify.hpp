#pragma once

#include "fairtopo/graph.hpp"
#include "fairtopo/vectorize.hpp"

#include <optional>
#include <vector>

namespace fairtopo {

// Sufficient conditions under which the l1 relaxation returns the sparsest
// feasible graph, evaluated against a VectorizedProblem's Psi and Phi.
struct CertificateReport {
  // supp(a) and supp(Psi a).
  std::vector<int> support_i;
  std::vector<int> support_j;
  // The candidate is the zero matrix; nothing to certify.
  bool vacuous = false;
  bool cond1_full_rank = false;
  // Minimum over the psi grid of the dual-certificate norm; +inf when every
  // grid point was singular.
  double cond2_min_norm = 0.0;
  bool cond2_holds = false;
  double psi_star = 0.0;
  std::vector<double> skipped_psi;
  // Every grid point was singular.
  bool cond2_indeterminate = false;

  bool certified() const { return !vacuous && cond1_full_rank && cond2_holds; }
};

struct Condition2Result {
  double min_norm = 0.0;
  bool holds = false;
  double psi_star = 0.0;
  std::vector<double> skipped_psi;
  bool indeterminate = false;
};

// 61 log-spaced points on [1e-3, 1e3].
std::vector<double> default_psi_grid();

// Phi restricted to the columns in `support_i` has full column rank
// (singular values above max(Q, E) * sigma_max * 1e-12). Vacuously true for an
// empty support.
bool check_condition1(const Matrix& phi, const std::vector<int>& support_i);
bool check_condition1(const VectorizedProblem& vp, const std::vector<int>& support_i);

// min over psi of || Psi_Jc (psi^-2 Phi'Phi + Psi_Jc' Psi_Jc)^-1 Psi_J' ||_inf
// (max absolute row sum). Holds iff the minimum is below 1.
Condition2Result check_condition2(const Matrix& psi, const Matrix& phi,
                                  const std::vector<int>& support_j,
                                  const std::vector<double>& psi_grid);
Condition2Result check_condition2(const VectorizedProblem& vp, const std::vector<int>& support_j,
                                  const std::vector<double>& psi_grid);

// Supports use |x| > zero_tol; the default is 1e-6 times the largest entry of
// the candidate.
CertificateReport certify(const VectorizedProblem& vp, const Matrix& a_hat,
                          std::optional<double> zero_tol = std::nullopt,
                          const std::vector<double>& psi_grid = default_psi_grid());

}  // namespace fairtopo
