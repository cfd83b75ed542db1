#include "fairtopo/synth.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace fairtopo {

namespace {

constexpr int kMaxConnectAttempts = 1000;
constexpr int kMaxRewireAttempts = 1000;

bool connected(const Matrix& w, const std::vector<int>& nodes) {
  if (nodes.size() <= 1) return true;
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      if (!seen[v] && w(nodes[u], nodes[v]) != 0.0) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == nodes.size();
}

void connected_er_block(Matrix& w, const std::vector<int>& nodes, double p, Rng& rng) {
  for (int attempt = 0; attempt < kMaxConnectAttempts; ++attempt) {
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        const double edge = rng.uniform() < p ? 1.0 : 0.0;
        w(nodes[a], nodes[b]) = edge;
        w(nodes[b], nodes[a]) = edge;
      }
    }
    if (connected(w, nodes)) return;
  }
  throw DomainError("could not draw a connected ER graph with p = " + std::to_string(p) + " on " +
                    std::to_string(nodes.size()) + " nodes in " +
                    std::to_string(kMaxConnectAttempts) + " attempts");
}

}  // namespace

LabeledGraph generate_two_group_graph(const RewireSpec& spec) {
  if (spec.g_count != 2) throw DomainError("the rewiring generator builds exactly two groups");
  if (spec.n < 4 || spec.n % 2 != 0) {
    throw DomainError("two equal groups need an even node count >= 4");
  }
  if (!(spec.p > 0.0 && spec.p <= 1.0)) throw DomainError("edge probability must lie in (0, 1]");
  if (!(spec.across_ratio >= 0.0 && spec.across_ratio <= 1.0)) {
    throw DomainError("across-group ratio must lie in [0, 1]");
  }

  const int half = spec.n / 2;
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  std::vector<std::vector<int>> members(2);
  for (int i = 0; i < spec.n; ++i) {
    labels[static_cast<std::size_t>(i)] = i < half ? 0 : 1;
    members[static_cast<std::size_t>(i < half ? 0 : 1)].push_back(i);
  }

  Matrix w = Matrix::Zero(spec.n, spec.n);
  Rng base_rng(derive_seed(spec.seed, 0));
  for (const auto& block : members) connected_er_block(w, block, spec.p, base_rng);

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < spec.n; ++i)
    for (int j = i + 1; j < spec.n; ++j)
      if (w(i, j) != 0.0) edges.emplace_back(i, j);
  const auto edge_total = static_cast<int>(edges.size());
  const int to_rewire =
      static_cast<int>(std::ceil(spec.across_ratio * edge_total - 1e-9 * edge_total));

  // Partial Fisher-Yates: the first `to_rewire` entries are a uniform sample
  // without replacement.
  Rng rewire_rng(derive_seed(spec.seed, 1));
  for (int k = 0; k < to_rewire; ++k) {
    const auto pick = k + static_cast<int>(rewire_rng.below(static_cast<std::uint64_t>(edge_total - k)));
    std::swap(edges[static_cast<std::size_t>(k)], edges[static_cast<std::size_t>(pick)]);
  }

  for (int k = 0; k < to_rewire; ++k) {
    const auto [u, v] = edges[static_cast<std::size_t>(k)];
    const auto& other = members[static_cast<std::size_t>(1 - labels[static_cast<std::size_t>(u)])];
    bool moved = false;
    for (int attempt = 0; attempt < kMaxRewireAttempts && !moved; ++attempt) {
      const int keep = rewire_rng.below(2) == 0 ? u : v;
      const int target = other[static_cast<std::size_t>(rewire_rng.below(other.size()))];
      if (w(keep, target) != 0.0) continue;
      w(u, v) = w(v, u) = 0.0;
      w(keep, target) = w(target, keep) = 1.0;
      moved = true;
    }
    if (!moved) {
      throw DomainError("could not rewire edge (" + std::to_string(u) + ", " +
                        std::to_string(v) + ") without creating a duplicate");
    }
  }

  return {AdjacencyMatrix(std::move(w)), GroupAssignment(std::move(labels), 2)};
}

int across_group_edges(const AdjacencyMatrix& a, const GroupAssignment& groups) {
  int count = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = i + 1; j < a.size(); ++j)
      if (a(i, j) != 0.0 && groups.label(i) != groups.label(j)) ++count;
  return count;
}

GroupAssignment assign_groups(int n, int g_count, AssignMode mode,
                              const std::optional<std::vector<int>>& communities,
                              std::uint64_t seed) {
  if (n < g_count) throw DomainError("fewer nodes than groups");
  if (mode == AssignMode::ByCommunity) {
    if (!communities) throw DomainError("community assignment needs a partition");
    if (static_cast<int>(communities->size()) != n) {
      throw DomainError("partition covers " + std::to_string(communities->size()) +
                        " nodes, expected " + std::to_string(n));
    }
    int blocks = 0;
    for (int c : *communities) blocks = std::max(blocks, c + 1);
    if (blocks != g_count) {
      throw DomainError("partition has " + std::to_string(blocks) + " blocks, expected " +
                        std::to_string(g_count));
    }
    return GroupAssignment(*communities, g_count);
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % g_count;
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(labels[static_cast<std::size_t>(i)], labels[j]);
  }
  return GroupAssignment(std::move(labels), g_count);
}

}  // namespace fairtopo
