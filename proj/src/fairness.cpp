#include "fairtopo/fairness.hpp"

#include "fairtopo/errors.hpp"

#include <cmath>
#include <string>

namespace fairtopo {

namespace {

void check_dimensions(const Matrix& a, const GroupAssignment& groups) {
  if (a.rows() != a.cols() || a.rows() != groups.size()) {
    throw DomainError("adjacency is " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " but groups cover " +
                      std::to_string(groups.size()) + " nodes");
  }
}

void require_two_groups(const GroupAssignment& groups) {
  if (groups.group_count() < 2) {
    throw DegenerateGroupError("demographic parity gap needs at least two groups");
  }
}

// W(g, h) = z_g' A z_h, accumulated node-major within each group pair so the
// result depends only on the inputs.
Matrix group_weights(const Matrix& a, const GroupAssignment& groups) {
  const int n = groups.size();
  Matrix w = Matrix::Zero(groups.group_count(), groups.group_count());
  for (int i = 0; i < n; ++i) {
    const int gi = groups.label(i);
    for (int j = 0; j < n; ++j) w(gi, groups.label(j)) += a(i, j);
  }
  return w;
}

}  // namespace

double delta_dp(const Matrix& a, const GroupAssignment& groups) {
  check_dimensions(a, groups);
  require_two_groups(groups);
  for (int g = 0; g < groups.group_count(); ++g) {
    if (groups.group_size(g) < 2) {
      throw DegenerateGroupError("group " + std::to_string(g) + " has " +
                                 std::to_string(groups.group_size(g)) +
                                 " member(s); the within-group edge rate needs at least 2");
    }
  }
  const Matrix w = group_weights(a, groups);
  double gap = 0.0;
  for (int g = 0; g < groups.group_count(); ++g) {
    const double ng = groups.group_size(g);
    const double within = w(g, g) / (ng * ng - ng);
    for (int h = 0; h < groups.group_count(); ++h) {
      if (h == g) continue;
      const double across = w(g, h) / (ng * groups.group_size(h));
      gap += std::abs(within - across);
    }
  }
  return gap;
}

double delta_dp(const AdjacencyMatrix& a, const GroupAssignment& groups) {
  return delta_dp(a.weights(), groups);
}

Matrix build_b(const GroupAssignment& groups) {
  require_two_groups(groups);
  const int g_count = groups.group_count();
  Matrix b(g_count, groups.size());
  for (int g = 0; g < g_count; ++g) {
    for (int i = 0; i < groups.size(); ++i) {
      const int own = groups.label(i);
      b(g, i) = own == g ? static_cast<double>(g_count - 1) / groups.group_size(g)
                         : -1.0 / groups.group_size(own);
    }
  }
  return b;
}

double delta_dp_node(const Matrix& a, const GroupAssignment& groups) {
  check_dimensions(a, groups);
  const Matrix b = build_b(groups);
  double total = 0.0;
  for (Eigen::Index g = 0; g < b.rows(); ++g) {
    for (Eigen::Index i = 0; i < a.cols(); ++i) {
      double entry = 0.0;
      for (Eigen::Index j = 0; j < a.rows(); ++j) entry += b(g, j) * a(j, i);
      total += std::abs(entry);
    }
  }
  return total;
}

double delta_dp_node(const AdjacencyMatrix& a, const GroupAssignment& groups) {
  return delta_dp_node(a.weights(), groups);
}

double edge_density(const Matrix& a) {
  const double n = static_cast<double>(a.rows());
  if (n < 2) return 0.0;
  return a.sum() / (n * (n - 1.0));
}

BiasReport bias_report(const Matrix& a, const GroupAssignment& groups) {
  BiasReport report;
  report.delta_dp = delta_dp(a, groups);
  report.delta_dp_node = delta_dp_node(a, groups);
  report.edge_density = edge_density(a);
  if (report.edge_density > 0.0) report.normalized_bias = report.delta_dp / report.edge_density;
  return report;
}

BiasReport bias_report(const AdjacencyMatrix& a, const GroupAssignment& groups) {
  return bias_report(a.weights(), groups);
}

}  // namespace fairtopo
