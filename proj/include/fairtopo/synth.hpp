#pragma once

#include "fairtopo/graph.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace fairtopo {

struct RewireSpec {
  int n = 30;
  int g_count = 2;
  // Edge probability of the Erdos-Renyi graph drawn inside each group.
  double p = 0.3;
  // Fraction of edges moved across groups.
  double across_ratio = 0.0;
  std::uint64_t seed = 0;
};

struct LabeledGraph {
  AdjacencyMatrix adjacency;
  GroupAssignment groups;
};

// Two equal groups (nodes [0, n/2) and [n/2, n)), each a connected ER(p)
// graph, then ceil(across_ratio * |E|) distinct within-group edges rewired:
// one endpoint is kept and the other replaced by a node of the other group.
// The edge count is preserved. The base graph depends only on `seed`, so a
// sweep over across_ratio with a fixed seed shares one edge count.
LabeledGraph generate_two_group_graph(const RewireSpec& spec);

// Number of edges joining nodes of different groups.
int across_group_edges(const AdjacencyMatrix& a, const GroupAssignment& groups);

enum class AssignMode { Uniform, ByCommunity };

// Uniform: a uniformly random balanced labeling (group sizes differ by at most
// one). ByCommunity: labels copied from `communities`.
GroupAssignment assign_groups(int n, int g_count, AssignMode mode,
                              const std::optional<std::vector<int>>& communities,
                              std::uint64_t seed);

}  // namespace fairtopo
