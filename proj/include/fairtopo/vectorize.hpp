#pragma once

#include "fairtopo/graph.hpp"
#include "fairtopo/signals.hpp"

#include <string_view>
#include <utility>

namespace fairtopo {

enum class Penalty { None, DP, DPNode };

std::string_view to_string(Penalty p);
// Accepts "none", "dp", "node" (also "dpnode"); throws DomainError otherwise.
Penalty parse_penalty(std::string_view name);

// Bijection between the strictly-upper-triangle pairs (i < j) of an N x N
// matrix, in lexicographic order, and positions 0..E-1, E = N (N - 1) / 2.
class PairIndex {
 public:
  explicit PairIndex(int n);

  int nodes() const { return n_; }
  int size() const { return n_ * (n_ - 1) / 2; }
  int index(int i, int j) const;
  std::pair<int, int> pair(int k) const { return pairs_[static_cast<std::size_t>(k)]; }

 private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

Vector vec_upper(const Matrix& a);
Vector vec_upper(const AdjacencyMatrix& a);
// Symmetric hollow matrix with the given upper triangle.
Matrix unvec_upper(const Vector& a, int n);

// Linear form of min ||Psi a||_1 s.t. Phi a = b over the upper-triangle
// parameterization a = vec_upper(A).
//
// psi rows: E sparsity rows (2 I, each pair appears twice in ||A||_1), then the
// beta-weighted fairness rows: one per ordered group pair (DP) or one per
// (group, node) in group-major order (DPNode).
// phi rows: N^2 rows of a -> vec(A C - C A) in column-major order, then the
// normalization row. b is zero except for the normalization entry.
struct VectorizedProblem {
  int n = 0;
  PairIndex pairs{0};
  Penalty penalty = Penalty::None;
  double beta = 0.0;
  ConstraintSet cset;
  Matrix psi;
  Matrix phi;
  Vector b;

  int parameter_count() const { return pairs.size(); }
  int sparsity_rows() const { return pairs.size(); }
  int fairness_rows() const { return static_cast<int>(psi.rows()) - pairs.size(); }
  int commutator_rows() const { return n * n; }
};

// Unweighted fairness rows for `penalty` (beta = 1); empty for Penalty::None.
// DP mode throws DegenerateGroupError when some N_g < 2.
Matrix fairness_operator(const GroupAssignment& groups, Penalty penalty);

// N^2 x E matrix of a -> vec(A C - C A).
Matrix commutator_operator(const Matrix& c);

// Row vector n and right-hand side so that n . a = rhs encodes the
// normalization of `cset`.
std::pair<Vector, double> normalization_row(int n, const ConstraintSet& cset);

VectorizedProblem build_vectorized(const CovarianceEstimate& cov, const GroupAssignment& groups,
                                   double beta, Penalty penalty, const ConstraintSet& cset);

}  // namespace fairtopo
