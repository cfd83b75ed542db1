#include "fairtopo/signals.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fairtopo {

void validate_covariance(const CovarianceEstimate& cov) {
  const Matrix& c = cov.c;
  if (c.rows() != c.cols() || c.rows() == 0) {
    throw DomainError("covariance must be a non-empty square matrix");
  }
  if (!c.allFinite()) throw DomainError("covariance has non-finite entries");
  const double scale = std::max(c.norm(), 1.0);
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9 * c.norm()) {
    throw DomainError("covariance is not positive semidefinite");
  }
}

Matrix apply_filter(const FilterSpec& spec, const AdjacencyMatrix& s) {
  const int n = s.size();
  if (spec.coeffs.empty()) throw DomainError("filter needs at least one coefficient");
  for (double h : spec.coeffs) {
    if (!std::isfinite(h)) throw DomainError("filter coefficient is not finite");
  }
  // Horner: H = (...(h_L S + h_{L-1} I) S + ...) + h_0 I
  Matrix h = spec.coeffs.back() * Matrix::Identity(n, n);
  for (auto k = spec.coeffs.size() - 1; k-- > 0;) {
    h = h * s.weights();
    h.diagonal().array() += spec.coeffs[k];
  }
  return h;
}

CovarianceEstimate analytic_covariance(const FilterSpec& spec, const AdjacencyMatrix& s) {
  const Matrix h = apply_filter(spec, s);
  Matrix c = h * h.transpose();
  // H is a polynomial of a symmetric S, so C is symmetric in exact arithmetic.
  c = 0.5 * (c + c.transpose()).eval();
  return {std::move(c), 0};
}

Matrix sample_signals(const FilterSpec& spec, const AdjacencyMatrix& s, std::size_t m,
                      std::uint64_t seed) {
  if (m == 0) throw DomainError("need at least one sample");
  const Matrix h = apply_filter(spec, s);
  const int n = s.size();
  Rng rng(seed);
  Matrix w(n, static_cast<Eigen::Index>(m));
  for (Eigen::Index col = 0; col < w.cols(); ++col)
    for (int row = 0; row < n; ++row) w(row, col) = rng.normal();
  return h * w;
}

CovarianceEstimate sample_covariance(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw DomainError("sample covariance of an empty matrix");
  Matrix c = Matrix::Zero(x.rows(), x.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(x.cols()));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return {std::move(c), static_cast<std::size_t>(x.cols())};
}

CovarianceEstimate simulate_covariance(const FilterSpec& spec, const AdjacencyMatrix& s,
                                       std::size_t m, std::uint64_t seed) {
  if (m == 0) throw DomainError("need at least one sample");
  constexpr std::size_t kBlock = 8192;
  const Matrix h = apply_filter(spec, s);
  const int n = s.size();
  Rng rng(seed);
  Matrix c = Matrix::Zero(n, n);
  Matrix w(n, static_cast<Eigen::Index>(std::min(m, kBlock)));
  for (std::size_t start = 0; start < m; start += kBlock) {
    const auto cols = static_cast<Eigen::Index>(std::min(kBlock, m - start));
    for (Eigen::Index col = 0; col < cols; ++col)
      for (int row = 0; row < n; ++row) w(row, col) = rng.normal();
    const Matrix x = h * w.leftCols(cols);
    c.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(m));
  }
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return {std::move(c), m};
}

CovarianceEstimate wishart_covariance(const FilterSpec& spec, const AdjacencyMatrix& s,
                                      std::size_t m, std::uint64_t seed) {
  const int n = s.size();
  if (m < static_cast<std::size_t>(n)) {
    throw DomainError("Wishart sampling needs at least as many samples as nodes");
  }
  const Matrix h = apply_filter(spec, s);
  Rng rng(seed);
  Matrix l = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    l(i, i) = std::sqrt(rng.chi_squared(static_cast<double>(m) - i));
    for (int j = 0; j < i; ++j) l(i, j) = rng.normal();
  }
  const Matrix hl = h * l;
  Matrix c = Matrix::Zero(n, n);
  c.selfadjointView<Eigen::Lower>().rankUpdate(hl, 1.0 / static_cast<double>(m));
  c.triangularView<Eigen::StrictlyUpper>() = c.transpose();
  return {std::move(c), m};
}

double commutativity_residual(const Matrix& a, const CovarianceEstimate& cov, bool normalized) {
  if (a.rows() != cov.c.rows() || a.cols() != cov.c.cols()) {
    throw DomainError("adjacency is " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " but covariance is " +
                      std::to_string(cov.c.rows()) + "x" + std::to_string(cov.c.cols()));
  }
  const double residual = (a * cov.c - cov.c * a).norm();
  if (!normalized) return residual;
  const double scale = cov.c.norm();
  if (scale == 0.0) throw DomainError("cannot normalize by a zero covariance");
  return residual / scale;
}

double commutativity_residual(const AdjacencyMatrix& a, const CovarianceEstimate& cov,
                              bool normalized) {
  return commutativity_residual(a.weights(), cov, normalized);
}

FilterSpec default_experiment_filter(const AdjacencyMatrix& s, std::uint64_t seed) {
  Rng rng(seed);
  FilterSpec spec;
  spec.coeffs.resize(4);
  // Coefficients act on S / lambda_max(S) so every power contributes on the
  // same scale.
  const Eigen::SelfAdjointEigenSolver<Matrix> s_eig(s.weights(), Eigen::EigenvaluesOnly);
  const double radius = s_eig.eigenvalues().cwiseAbs().maxCoeff();
  const double unit = radius > 0.0 ? 1.0 / radius : 1.0;
  double power = 1.0;
  for (double& h : spec.coeffs) {
    h = rng.uniform(-1.0, 1.0) * power;
    power *= unit;
  }
  const Matrix h = apply_filter(spec, s);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  spec.coeffs[0] += std::abs(eig.eigenvalues().minCoeff()) + 0.1;
  return spec;
}

}  // namespace fairtopo
