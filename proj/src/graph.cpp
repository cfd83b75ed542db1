#include "fairtopo/graph.hpp"

#include "fairtopo/errors.hpp"

#include <cmath>
#include <string>

namespace fairtopo {

AdjacencyMatrix::AdjacencyMatrix(Matrix weights) : w_(std::move(weights)) {
  if (w_.rows() != w_.cols()) {
    throw DomainError("adjacency matrix must be square, got " + std::to_string(w_.rows()) +
                      "x" + std::to_string(w_.cols()));
  }
  const Eigen::Index n = w_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (w_(i, i) != 0.0) {
      throw DomainError("adjacency matrix has a self-loop at node " + std::to_string(i));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(w_(i, j))) throw DomainError("adjacency matrix has a non-finite entry");
      if (w_(i, j) < 0.0) throw DomainError("adjacency matrix has a negative entry");
      if (w_(i, j) != w_(j, i)) throw DomainError("adjacency matrix is not symmetric");
    }
  }
}

AdjacencyMatrix AdjacencyMatrix::zeros(int n) { return AdjacencyMatrix(Matrix::Zero(n, n)); }

AdjacencyMatrix AdjacencyMatrix::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n || i == j) {
      throw DomainError("invalid edge (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    w(i, j) = 1.0;
    w(j, i) = 1.0;
  }
  return AdjacencyMatrix(std::move(w));
}

int AdjacencyMatrix::edge_count() const {
  int count = 0;
  for (Eigen::Index i = 0; i < w_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < w_.cols(); ++j)
      if (w_(i, j) != 0.0) ++count;
  return count;
}

GroupAssignment::GroupAssignment(std::vector<int> labels, int group_count)
    : labels_(std::move(labels)), group_count_(group_count) {
  if (group_count_ < 1) throw DomainError("group count must be at least 1");
  sizes_.assign(static_cast<std::size_t>(group_count_), 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int g = labels_[i];
    if (g < 0 || g >= group_count_) {
      throw DomainError("node " + std::to_string(i) + " has group id " + std::to_string(g) +
                        " outside [0, " + std::to_string(group_count_) + ")");
    }
    ++sizes_[static_cast<std::size_t>(g)];
  }
  for (int g = 0; g < group_count_; ++g) {
    if (sizes_[static_cast<std::size_t>(g)] == 0) {
      throw DomainError("group " + std::to_string(g) + " has no members");
    }
  }
}

double ConstraintSet::normalization_gap(const Matrix& m) const {
  switch (normalization) {
    case Normalization::FirstRowSum1:
      return std::abs(m.row(0).sum() - 1.0);
    case Normalization::TotalSumN:
      return std::abs(m.sum() - static_cast<double>(m.rows()));
  }
  return 0.0;
}

bool ConstraintSet::contains(const Matrix& m, double tol) const {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  if (m.diagonal().cwiseAbs().maxCoeff() > tol) return false;
  if (m.minCoeff() < -tol) return false;
  return normalization_gap(m) <= tol;
}

Matrix indicator_matrix(const GroupAssignment& groups) {
  Matrix z = Matrix::Zero(groups.size(), groups.group_count());
  for (int i = 0; i < groups.size(); ++i) z(i, groups.label(i)) = 1.0;
  return z;
}

AdjacencyMatrix project_to_constraint_set(const Matrix& m, const ConstraintSet& /*c*/) {
  if (m.rows() != m.cols()) {
    throw DomainError("cannot project a non-square " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + " matrix");
  }
  Matrix w = (0.5 * (m + m.transpose())).cwiseMax(0.0);
  w.diagonal().setZero();
  return AdjacencyMatrix(std::move(w));
}

}  // namespace fairtopo
