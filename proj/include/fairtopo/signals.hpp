#pragma once

#include "fairtopo/graph.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fairtopo {

// Graph filter H = sum_k coeffs[k] S^k.
struct FilterSpec {
  std::vector<double> coeffs;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Covariance matrix together with the number of samples it was estimated
// from. samples == 0 marks an exact (analytic) covariance.
struct CovarianceEstimate {
  Matrix c;
  std::size_t samples = 0;

  int size() const { return static_cast<int>(c.rows()); }
  bool analytic() const { return samples == 0; }
};

// Throws DomainError unless `c` is square, symmetric to 1e-12 (relative) and
// has no eigenvalue below -1e-9 * ||C||.
void validate_covariance(const CovarianceEstimate& cov);

Matrix apply_filter(const FilterSpec& spec, const AdjacencyMatrix& s);

// C = H H' for x = H w with white w.
CovarianceEstimate analytic_covariance(const FilterSpec& spec, const AdjacencyMatrix& s);

// N x M matrix whose columns are H w, w ~ N(0, I), from a generator seeded
// with `seed`.
Matrix sample_signals(const FilterSpec& spec, const AdjacencyMatrix& s, std::size_t m,
                      std::uint64_t seed);

// (1/M) X X'.
CovarianceEstimate sample_covariance(const Matrix& x);

// Same draws as sample_covariance(sample_signals(spec, s, m, seed)), but
// accumulated in column blocks so X is never held in memory. Agrees with the
// two-step route to rounding error.
CovarianceEstimate simulate_covariance(const FilterSpec& spec, const AdjacencyMatrix& s,
                                       std::size_t m, std::uint64_t seed);

// A draw from the same distribution as simulate_covariance at O(N^2) cost
// independent of m: (1/m) H W H with W ~ Wishart(I, m) built from its Bartlett
// factor. The random stream differs from the signal-level route.
CovarianceEstimate wishart_covariance(const FilterSpec& spec, const AdjacencyMatrix& s,
                                      std::size_t m, std::uint64_t seed);

// ||A C - C A||_F, divided by ||C||_F when `normalized`.
double commutativity_residual(const Matrix& a, const CovarianceEstimate& cov, bool normalized);
double commutativity_residual(const AdjacencyMatrix& a, const CovarianceEstimate& cov,
                              bool normalized);

// Order-3 filter used by the experiments. The coefficient of S^k is drawn
// uniform on [-1, 1] and divided by lambda_max(S)^k, then the constant term is
// raised by |lambda_min(H)| + 0.1 so that H, and hence C = H^2, is well
// conditioned.
FilterSpec default_experiment_filter(const AdjacencyMatrix& s, std::uint64_t seed);

}  // namespace fairtopo
