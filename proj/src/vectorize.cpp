#include "fairtopo/vectorize.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/fairness.hpp"

#include <string>

namespace fairtopo {

std::string_view to_string(Penalty p) {
  switch (p) {
    case Penalty::None: return "none";
    case Penalty::DP: return "dp";
    case Penalty::DPNode: return "node";
  }
  return "none";
}

Penalty parse_penalty(std::string_view name) {
  if (name == "none") return Penalty::None;
  if (name == "dp") return Penalty::DP;
  if (name == "node" || name == "dpnode") return Penalty::DPNode;
  throw DomainError("unknown penalty '" + std::string(name) + "' (expected none, dp or node)");
}

PairIndex::PairIndex(int n) : n_(n) {
  if (n < 0) throw DomainError("negative node count");
  pairs_.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs_.emplace_back(i, j);
}

int PairIndex::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

Vector vec_upper(const Matrix& a) {
  const PairIndex pairs(static_cast<int>(a.rows()));
  Vector v(pairs.size());
  for (int k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs.pair(k);
    v(k) = a(i, j);
  }
  return v;
}

Vector vec_upper(const AdjacencyMatrix& a) { return vec_upper(a.weights()); }

Matrix unvec_upper(const Vector& a, int n) {
  const PairIndex pairs(n);
  if (a.size() != pairs.size()) {
    throw DomainError("vector of length " + std::to_string(a.size()) + " does not match " +
                      std::to_string(n) + " nodes");
  }
  Matrix m = Matrix::Zero(n, n);
  for (int k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs.pair(k);
    m(i, j) = a(k);
    m(j, i) = a(k);
  }
  return m;
}

Matrix fairness_operator(const GroupAssignment& groups, Penalty penalty) {
  const int n = groups.size();
  const PairIndex pairs(n);
  const int g_count = groups.group_count();
  switch (penalty) {
    case Penalty::None:
      return Matrix(0, pairs.size());
    case Penalty::DP: {
      // Validation (G >= 2, N_g >= 2) is shared with the metric.
      (void)delta_dp(Matrix::Zero(n, n), groups);
      Matrix rows = Matrix::Zero(g_count * (g_count - 1), pairs.size());
      int row = 0;
      for (int g = 0; g < g_count; ++g) {
        const double ng = groups.group_size(g);
        for (int h = 0; h < g_count; ++h) {
          if (h == g) continue;
          const double nh = groups.group_size(h);
          for (int k = 0; k < pairs.size(); ++k) {
            const auto [i, j] = pairs.pair(k);
            const int gi = groups.label(i);
            const int gj = groups.label(j);
            if (gi == g && gj == g) {
              rows(row, k) = 2.0 / (ng * ng - ng);
            } else if ((gi == g && gj == h) || (gi == h && gj == g)) {
              rows(row, k) = -1.0 / (ng * nh);
            }
          }
          ++row;
        }
      }
      return rows;
    }
    case Penalty::DPNode: {
      const Matrix b = build_b(groups);
      Matrix rows = Matrix::Zero(g_count * n, pairs.size());
      for (int g = 0; g < g_count; ++g) {
        for (int k = 0; k < pairs.size(); ++k) {
          const auto [i, j] = pairs.pair(k);
          // (B A)(g, i) picks up B(g, j) A(j, i) and (B A)(g, j) picks up B(g, i) A(i, j).
          rows(g * n + i, k) = b(g, j);
          rows(g * n + j, k) = b(g, i);
        }
      }
      return rows;
    }
  }
  return Matrix(0, pairs.size());
}

Matrix commutator_operator(const Matrix& c) {
  const int n = static_cast<int>(c.rows());
  const PairIndex pairs(n);
  Matrix op = Matrix::Zero(static_cast<Eigen::Index>(n) * n, pairs.size());
  for (int k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs.pair(k);
    // A = e_i e_j' + e_j e_i'. (A C)(r, col) is C(j, col) on row i and C(i, col)
    // on row j; (C A)(r, col) is C(r, i) on column j and C(r, j) on column i.
    auto column = op.col(k);
    for (int col = 0; col < n; ++col) {
      column(i + col * n) += c(j, col);
      column(j + col * n) += c(i, col);
    }
    for (int r = 0; r < n; ++r) {
      column(r + j * n) -= c(r, i);
      column(r + i * n) -= c(r, j);
    }
  }
  return op;
}

std::pair<Vector, double> normalization_row(int n, const ConstraintSet& cset) {
  const PairIndex pairs(n);
  Vector row = Vector::Zero(pairs.size());
  switch (cset.normalization) {
    case Normalization::FirstRowSum1:
      for (int j = 1; j < n; ++j) row(pairs.index(0, j)) = 1.0;
      return {row, 1.0};
    case Normalization::TotalSumN:
      row.setConstant(2.0);
      return {row, static_cast<double>(n)};
  }
  return {row, 1.0};
}

VectorizedProblem build_vectorized(const CovarianceEstimate& cov, const GroupAssignment& groups,
                                   double beta, Penalty penalty, const ConstraintSet& cset) {
  const int n = cov.size();
  if (groups.size() != n) {
    throw DomainError("covariance has " + std::to_string(n) + " nodes but groups cover " +
                      std::to_string(groups.size()));
  }
  if (!(beta >= 0.0)) throw DomainError("beta must be nonnegative");
  if (n < 2) throw DomainError("need at least two nodes");

  VectorizedProblem vp;
  vp.n = n;
  vp.pairs = PairIndex(n);
  vp.penalty = penalty;
  vp.beta = beta;
  vp.cset = cset;

  const int e = vp.pairs.size();
  const Matrix fair = fairness_operator(groups, penalty);
  vp.psi.resize(e + fair.rows(), e);
  vp.psi.topRows(e) = 2.0 * Matrix::Identity(e, e);
  vp.psi.bottomRows(fair.rows()) = beta * fair;

  const auto [norm_row, rhs] = normalization_row(n, cset);
  vp.phi.resize(static_cast<Eigen::Index>(n) * n + 1, e);
  vp.phi.topRows(static_cast<Eigen::Index>(n) * n) = commutator_operator(cov.c);
  vp.phi.bottomRows(1) = norm_row.transpose();
  vp.b = Vector::Zero(vp.phi.rows());
  vp.b(vp.b.size() - 1) = rhs;
  return vp;
}

}  // namespace fairtopo
