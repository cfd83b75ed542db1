#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace fairtopo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weighted undirected graph without self-loops. Also serves as the graph shift
// operator. Symmetry, zero diagonal and nonnegativity are checked exactly on
// construction; use project_to_constraint_set() to clean up solver output.
class AdjacencyMatrix {
 public:
  explicit AdjacencyMatrix(Matrix weights);

  static AdjacencyMatrix zeros(int n);
  // Unit-weight graph from an undirected edge list.
  static AdjacencyMatrix from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return static_cast<int>(w_.rows()); }
  const Matrix& weights() const { return w_; }
  double operator()(int i, int j) const { return w_(i, j); }

  double total_weight() const { return w_.sum(); }
  // Number of (i<j) pairs carrying nonzero weight.
  int edge_count() const;

  friend bool operator==(const AdjacencyMatrix& a, const AdjacencyMatrix& b) {
    return a.w_.rows() == b.w_.rows() && a.w_ == b.w_;
  }

 private:
  Matrix w_;
};

// Partition of N nodes into G groups with dense ids 0..G-1, each non-empty.
class GroupAssignment {
 public:
  GroupAssignment(std::vector<int> labels, int group_count);

  int size() const { return static_cast<int>(labels_.size()); }
  int group_count() const { return group_count_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int node) const { return labels_[static_cast<std::size_t>(node)]; }
  // N_g for every group.
  const std::vector<int>& group_sizes() const { return sizes_; }
  int group_size(int g) const { return sizes_[static_cast<std::size_t>(g)]; }

  friend bool operator==(const GroupAssignment&, const GroupAssignment&) = default;

 private:
  std::vector<int> labels_;
  int group_count_;
  std::vector<int> sizes_;
};

enum class Normalization { FirstRowSum1, TotalSumN };

// The feasible set of valid nontrivial adjacency matrices. Symmetry, hollowness
// and nonnegativity always apply; `normalization` rules out the zero matrix.
struct ConstraintSet {
  Normalization normalization = Normalization::FirstRowSum1;

  // Membership test with absolute tolerance `tol` on every condition.
  bool contains(const Matrix& m, double tol) const;
  // Violation of the normalization equality for `m`.
  double normalization_gap(const Matrix& m) const;
};

// Binary N x G matrix with Z(i, g) = 1 iff node i is in group g.
Matrix indicator_matrix(const GroupAssignment& groups);

// Symmetrize, zero the diagonal and clamp negatives. Normalization is left to
// the solver, where it is an equality constraint.
AdjacencyMatrix project_to_constraint_set(const Matrix& m, const ConstraintSet& c);

}  // namespace fairtopo
