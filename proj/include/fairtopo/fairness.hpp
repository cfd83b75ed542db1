#pragma once

#include "fairtopo/graph.hpp"

#include <optional>

namespace fairtopo {

// Groupwise demographic-parity gap: for every ordered pair of distinct groups
// (g, h), the absolute difference between the within-g edge rate
// z_g' A z_g / (N_g^2 - N_g) and the g-h edge rate z_g' A z_h / (N_g N_h),
// summed. Requires G >= 2 and N_g >= 2 for every group; throws
// DegenerateGroupError otherwise.
double delta_dp(const AdjacencyMatrix& a, const GroupAssignment& groups);
double delta_dp(const Matrix& a, const GroupAssignment& groups);

// G x N contrast matrix: (G-1)/N_g on the columns of group g, -1/N_h on the
// columns of any other group h.
Matrix build_b(const GroupAssignment& groups);

// Nodewise gap: entrywise l1 norm of B A. Allows singleton groups.
double delta_dp_node(const AdjacencyMatrix& a, const GroupAssignment& groups);
double delta_dp_node(const Matrix& a, const GroupAssignment& groups);

// Total weight over ordered pairs, divided by N (N - 1).
double edge_density(const Matrix& a);

struct BiasReport {
  double delta_dp = 0.0;
  double delta_dp_node = 0.0;
  double edge_density = 0.0;
  // delta_dp / edge_density; empty when the graph carries no weight.
  std::optional<double> normalized_bias;
};

BiasReport bias_report(const AdjacencyMatrix& a, const GroupAssignment& groups);
BiasReport bias_report(const Matrix& a, const GroupAssignment& groups);

}  // namespace fairtopo
