#pragma once

#include "fairtopo/graph.hpp"
#include "fairtopo/rng.hpp"

#include <vector>

namespace fairtopo::testing {

// Groups {0,1} and {2,3}.
inline GroupAssignment pairs_groups() { return GroupAssignment({0, 0, 1, 1}, 2); }

// Edges (0,1) and (2,3) only.
inline AdjacencyMatrix within_only() { return AdjacencyMatrix::from_edges(4, {{0, 1}, {2, 3}}); }

inline AdjacencyMatrix complete(int n) {
  Matrix w = Matrix::Ones(n, n);
  w.diagonal().setZero();
  return AdjacencyMatrix(w);
}

inline AdjacencyMatrix path(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return AdjacencyMatrix::from_edges(n, edges);
}

// Symmetric hollow matrix with entries uniform on [0, 1), each kept with
// probability `density`.
inline Matrix random_weights(int n, Rng& rng, double density = 1.0) {
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < density) w(i, j) = w(j, i) = rng.uniform();
  return w;
}

// Balanced random labels over `g` groups, each with at least `min_size` members.
inline GroupAssignment random_groups(int n, int g, Rng& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % g;
  for (int i = n - 1; i > 0; --i)
    std::swap(labels[static_cast<std::size_t>(i)], labels[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  return GroupAssignment(labels, g);
}

}  // namespace fairtopo::testing
