#include "fairtopo/solver.hpp"

#include "fairtopo/errors.hpp"
#include "fairtopo/fairness.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace fairtopo {

void SolveConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 0");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw DomainError("epsilon must be finite and >= 0");
  }
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  if (max_iters < 1) throw DomainError("max_iters must be at least 1");
  if (!(tol_abs > 0.0) || !(tol_rel > 0.0)) throw DomainError("tolerances must be positive");
  if (!(over_relaxation > 0.0 && over_relaxation < 2.0)) {
    throw DomainError("over-relaxation must lie in (0, 2)");
  }
}

double default_epsilon(const CovarianceEstimate& cov) {
  if (cov.analytic()) return 0.0;
  return 0.1 * cov.c.norm() * cov.size() / std::sqrt(static_cast<double>(cov.samples));
}

double penalty_value(const Matrix& a, const GroupAssignment& groups, Penalty penalty) {
  switch (penalty) {
    case Penalty::None: return 0.0;
    case Penalty::DP: return delta_dp(a, groups);
    case Penalty::DPNode: return delta_dp_node(a, groups);
  }
  return 0.0;
}

namespace {

constexpr double kRhoMin = 1e-3;
constexpr double kRhoMax = 1e3;
constexpr int kCheckEvery = 5;
constexpr int kAdaptEvery = 10;
constexpr int kPolishSteps = 200;
constexpr int kPolishSpacing = 50;
// Eigenvalues of M'M below this fraction of the largest are treated as the
// commutant (exact null space of the commutator).
constexpr double kNullTolerance = 1e-12;

// Euclidean projection onto {w : n.w = rhs, ||M w||_2 <= radius}, where M is
// the commutator map, through the eigendecomposition M'M = Q diag(s) Q'. In
// that basis the KKT system (I + mu M'M) w = x - lambda n is diagonal, lambda
// follows from the hyperplane, and mu >= 0 is found by bisection on the
// monotone ball residual.
class StationarityProjector {
 public:
  StationarityProjector(const Matrix& gram, const Vector& norm_row, double rhs, double radius)
      : rhs_(rhs), radius_(radius) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw DomainError("eigendecomposition of M'M failed");
    q_ = eig.eigenvectors();
    s_ = eig.eigenvalues();
    const double s_max = std::max(s_.maxCoeff(), 0.0);
    for (Eigen::Index i = 0; i < s_.size(); ++i)
      if (s_(i) <= kNullTolerance * s_max) s_(i) = 0.0;
    n_hat_ = q_.transpose() * norm_row;

    // Smallest ||M w|| on the hyperplane decides feasibility.
    double null_weight = 0.0, range_weight = 0.0;
    for (Eigen::Index i = 0; i < s_.size(); ++i) {
      if (s_(i) == 0.0) null_weight += n_hat_(i) * n_hat_(i);
      else range_weight += n_hat_(i) * n_hat_(i) / s_(i);
    }
    const double floor_residual =
        null_weight > 1e-24 ? 0.0 : std::abs(rhs_) / std::sqrt(range_weight);
    if (floor_residual > radius_) {
      throw DomainError("no adjacency matrix satisfies both the normalization and the "
                        "commutativity bound (minimum residual " +
                        std::to_string(floor_residual) + " > epsilon " + std::to_string(radius_) +
                        ")");
    }
    exact_ = radius_ == 0.0;
  }

  const Matrix& basis() const { return q_; }
  const Vector& spectrum() const { return s_; }
  const Vector& normal() const { return n_hat_; }

  Vector project(const Vector& x) const {
    const Vector x_hat = q_.transpose() * x;
    Vector w_hat(x_hat.size());
    if (exact_) {
      double num = -rhs_, den = 0.0;
      for (Eigen::Index i = 0; i < s_.size(); ++i) {
        if (s_(i) != 0.0) continue;
        num += n_hat_(i) * x_hat(i);
        den += n_hat_(i) * n_hat_(i);
      }
      const double lambda = num / den;
      for (Eigen::Index i = 0; i < s_.size(); ++i)
        w_hat(i) = s_(i) == 0.0 ? x_hat(i) - lambda * n_hat_(i) : 0.0;
      return q_ * w_hat;
    }
    if (excess(0.0, x_hat, w_hat) > 0.0) {
      auto f = [&](double mu) { return excess(mu, x_hat, w_hat); };
      double lo = 0.0;
      double hi = last_mu_ > 0.0 ? 2.0 * last_mu_ : 1.0 / std::max(s_.maxCoeff(), 1e-300);
      if (last_mu_ > 0.0 && f(0.5 * last_mu_) > 0.0) lo = 0.5 * last_mu_;
      while (f(hi) > 0.0) {
        lo = hi;
        hi *= 10.0;
      }
      std::uintmax_t max_steps = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          f, lo, hi, boost::math::tools::eps_tolerance<double>(43), max_steps);
      last_mu_ = bracket.second;
      excess(bracket.second, x_hat, w_hat);
    }
    return q_ * w_hat;
  }

 private:
  // Fills w_hat for multiplier mu and returns ||M w||^2 - radius^2.
  double excess(double mu, const Vector& x_hat, Vector& w_hat) const {
    double num = -rhs_, den = 0.0;
    for (Eigen::Index i = 0; i < s_.size(); ++i) {
      const double d = 1.0 / (1.0 + mu * s_(i));
      num += n_hat_(i) * x_hat(i) * d;
      den += n_hat_(i) * n_hat_(i) * d;
    }
    const double lambda = num / den;
    double value = 0.0;
    for (Eigen::Index i = 0; i < s_.size(); ++i) {
      w_hat(i) = (x_hat(i) - lambda * n_hat_(i)) / (1.0 + mu * s_(i));
      value += s_(i) * w_hat(i) * w_hat(i);
    }
    return value - radius_ * radius_;
  }

  Matrix q_;
  Vector s_;
  Vector n_hat_;
  double rhs_;
  double radius_;
  bool exact_ = false;
  mutable double last_mu_ = 0.0;
};

Vector soft_threshold(const Vector& x, const Vector& thresholds) {
  Vector out(x.size());
  for (Eigen::Index p = 0; p < x.size(); ++p) {
    const double mag = std::abs(x(p)) - thresholds(p);
    out(p) = mag > 0.0 ? std::copysign(mag, x(p)) : 0.0;
  }
  return out;
}

SolveReport make_report(const Vector& params, const CovarianceEstimate& cov,
                        const GroupAssignment& groups, Penalty penalty) {
  SolveReport report;
  report.a_hat = AdjacencyMatrix(unvec_upper(params, cov.size()));
  report.objective_l1 = report.a_hat.weights().cwiseAbs().sum();
  report.objective_fair = penalty_value(report.a_hat.weights(), groups, penalty);
  report.commut_residual = commutativity_residual(report.a_hat, cov, false);
  return report;
}

Matrix commutator_gram(const Matrix& c) {
  const Matrix comm = commutator_operator(c);
  Matrix gram = Matrix::Zero(comm.cols(), comm.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(comm.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return gram;
}

// For epsilon = 0: re-solve the equality constraints on the support of `x`
// (entries above 1e-4 of the largest) and keep the result if it is a strictly
// positive, feasible point that does not raise the objective.
std::optional<Vector> refine_support(const Vector& x, const CovarianceEstimate& cov,
                                     const GroupAssignment& groups, Penalty penalty, double beta,
                                     const Vector& norm_row, double norm_rhs, double budget) {
  const int n = cov.size();
  const double x_max = x.maxCoeff();
  if (!(x_max > 0.0)) return std::nullopt;
  std::vector<Eigen::Index> support;
  for (Eigen::Index k = 0; k < x.size(); ++k)
    if (x(k) > 1e-4 * x_max) support.push_back(k);
  const Matrix comm = commutator_operator(cov.c);
  Matrix sub(comm.rows() + 1, static_cast<Eigen::Index>(support.size()));
  for (std::size_t q = 0; q < support.size(); ++q) {
    const auto col = static_cast<Eigen::Index>(q);
    sub.col(col).head(comm.rows()) = comm.col(support[q]);
    sub(comm.rows(), col) = norm_row(support[q]);
  }
  Vector rhs = Vector::Zero(sub.rows());
  rhs(comm.rows()) = norm_rhs;
  const Vector z = Eigen::CompleteOrthogonalDecomposition<Matrix>(sub).solve(rhs);
  if (!(z.minCoeff() > 0.0)) return std::nullopt;
  Vector refined = Vector::Zero(x.size());
  for (std::size_t q = 0; q < support.size(); ++q) refined(support[q]) = z(static_cast<Eigen::Index>(q));
  if (std::abs(norm_row.dot(refined) - norm_rhs) > 1e-12 * std::max(1.0, std::abs(norm_rhs))) {
    return std::nullopt;
  }
  const Matrix a_new = unvec_upper(refined, n);
  if (commutativity_residual(a_new, cov, false) > budget) return std::nullopt;
  const Matrix a_old = unvec_upper(x, n);
  const double before = a_old.sum() + beta * penalty_value(a_old, groups, penalty);
  const double after = a_new.sum() + beta * penalty_value(a_new, groups, penalty);
  if (after > before + 1e-6 * std::abs(before)) return std::nullopt;
  return refined;
}

}  // namespace

double minimum_commutativity_residual(const CovarianceEstimate& cov, const ConstraintSet& cset,
                                      int max_iters) {
  const int n = cov.size();
  if (n < 2) throw DomainError("normalization is infeasible for fewer than two nodes");
  const auto [norm_row, norm_rhs] = normalization_row(n, cset);
  // Infinite radius: only the eigendecomposition is used.
  const StationarityProjector basis(commutator_gram(cov.c), norm_row, norm_rhs,
                                    std::numeric_limits<double>::infinity());
  const Matrix& q = basis.basis();
  const Vector& s = basis.spectrum();
  const Vector& n_hat = basis.normal();

  // ADMM on min 1/2 ||M a||^2 s.t. n.a = rhs, a = v, v >= 0, with the a-update
  // diagonal in the eigenbasis of M'M.
  const double rho = std::max(s.maxCoeff(), 1e-300) * 1e-3;
  const Vector denom = (s.array() + rho).matrix();
  const double n_quad = (n_hat.array().square() / denom.array()).sum();
  Vector v = Vector::Zero(s.size()), u = Vector::Zero(s.size());
  double best = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= max_iters; ++iter) {
    const Vector target = q.transpose() * (rho * (v - u));
    const double lambda = ((target.array() * n_hat.array() / denom.array()).sum() - norm_rhs) / n_quad;
    const Vector a = q * ((target - lambda * n_hat).array() / denom.array()).matrix();
    const Vector v_old = v;
    v = (a + u).cwiseMax(0.0);
    u += a - v;
    if (iter % 10 == 0) {
      const double norm_value = norm_row.dot(v);
      if (norm_value > 0.0) {
        const Vector candidate = v * (norm_rhs / norm_value);
        best = std::min(best, commutativity_residual(unvec_upper(candidate, n), cov, false));
      }
      if ((a - v).norm() <= 1e-10 * std::max(1.0, v.norm()) &&
          (v - v_old).norm() <= 1e-10 * std::max(1.0, v.norm())) {
        break;
      }
    }
  }
  return best;
}

SolveReport solve_convex(const CovarianceEstimate& cov, const GroupAssignment& groups,
                         const SolveConfig& cfg, const ConstraintSet& cset) {
  cfg.validate();
  const int n = cov.size();
  if (n < 2) throw DomainError("normalization is infeasible for fewer than two nodes");
  if (groups.size() != n) {
    throw DomainError("covariance has " + std::to_string(n) + " nodes but groups cover " +
                      std::to_string(groups.size()));
  }
  const PairIndex pairs(n);
  const int e = pairs.size();

  // Fairness block: rows scaled to unit norm, the norm moved into the l1 weight.
  const bool fair_active = cfg.penalty != Penalty::None && cfg.beta > 0.0;
  Matrix fair(0, e);
  Vector fair_weight(0);
  if (fair_active) {
    const Matrix raw = fairness_operator(groups, cfg.penalty);
    std::vector<Eigen::Index> kept;
    for (Eigen::Index p = 0; p < raw.rows(); ++p)
      if (raw.row(p).norm() > 0.0) kept.push_back(p);
    fair.resize(static_cast<Eigen::Index>(kept.size()), e);
    fair_weight.resize(fair.rows());
    for (std::size_t q = 0; q < kept.size(); ++q) {
      const double norm = raw.row(kept[q]).norm();
      fair.row(static_cast<Eigen::Index>(q)) = raw.row(kept[q]) / norm;
      fair_weight(static_cast<Eigen::Index>(q)) = cfg.beta * norm;
    }
  }
  const bool has_fair = fair.rows() > 0;

  // With a >= 0 the l1 term is linear: ||A||_1 = 2 * sum(a). The objective is
  // rescaled so the largest weight is 1; the minimizer is unchanged.
  const double weight_max = has_fair ? fair_weight.maxCoeff() : 0.0;
  const double objective_scale = 1.0 / std::max(2.0, weight_max);
  const double linear_cost = 2.0 * objective_scale;
  fair_weight *= objective_scale;

  const auto [norm_row, norm_rhs] = normalization_row(n, cset);
  const StationarityProjector projector(commutator_gram(cov.c), norm_row, norm_rhs, cfg.epsilon);

  // a-update: (2 I + F'F) a = rhs, inverted by Woodbury through the small
  // system S = 2 I + F F'.
  Eigen::LLT<Matrix> small_llt;
  if (has_fair) {
    Matrix small = fair * fair.transpose();
    small.diagonal().array() += 2.0;
    small_llt.compute(small);
  }
  auto solve_a = [&](const Vector& rhs) -> Vector {
    if (!has_fair) return 0.5 * rhs;
    const Vector correction = fair.transpose() * small_llt.solve(fair * rhs);
    return 0.5 * (rhs - correction);
  };

  const double alpha = cfg.over_relaxation;
  const double comm_budget = cfg.epsilon + 1e-7 * cov.c.norm();
  double rho = cfg.rho;

  Vector a = Vector::Zero(e);
  Vector v = Vector::Zero(e), uv = Vector::Zero(e);  // a >= 0
  Vector w = Vector::Zero(e), uw = Vector::Zero(e);  // stationarity + normalization
  Vector y = Vector::Zero(fair.rows()), uy = Vector::Zero(fair.rows());
  Vector fa;

  // Alternating projections between the stationarity set and the nonnegative
  // orthant, started from the ADMM iterate. Returns a point that satisfies
  // every constraint to the reporting tolerance, or nothing.
  auto polish = [&](const Vector& start) -> std::optional<Vector> {
    Vector x = start;
    for (int step = 0; step < kPolishSteps; ++step) {
      x = projector.project(x).cwiseMax(0.0);
      const double norm_value = norm_row.dot(x);
      if (norm_value <= 0.0) return std::nullopt;
      Vector candidate = x * (norm_rhs / norm_value);
      if (commutativity_residual(unvec_upper(candidate, n), cov, false) <= comm_budget) {
        return candidate;
      }
    }
    return std::nullopt;
  };

  Vector solution;
  int last_polish = -kPolishSpacing;
  int iter = 0;
  bool converged = false;
  double primal = 0.0, dual = 0.0;
  for (iter = 1; iter <= cfg.max_iters; ++iter) {
    Vector rhs = (v - uv) + (w - uw);
    rhs.array() -= linear_cost / rho;
    if (has_fair) rhs.noalias() += fair.transpose() * (y - uy);
    a = solve_a(rhs);

    const Vector v_old = v;
    const Vector v_relaxed = alpha * a + (1.0 - alpha) * v;
    v = (v_relaxed + uv).cwiseMax(0.0);
    uv += v_relaxed - v;

    const Vector w_old = w;
    const Vector w_relaxed = alpha * a + (1.0 - alpha) * w;
    w = projector.project(w_relaxed + uw);
    uw += w_relaxed - w;

    Vector y_old;
    if (has_fair) {
      fa.noalias() = fair * a;
      const Vector y_relaxed = alpha * fa + (1.0 - alpha) * y;
      y_old = y;
      y = soft_threshold(y_relaxed + uy, fair_weight / rho);
      uy += y_relaxed - y;
    }

    const bool check = iter % kCheckEvery == 0 || iter == cfg.max_iters;
    const bool adapt = cfg.adaptive_rho && iter % kAdaptEvery == 0;
    if (!check && !adapt) continue;

    double primal_sq = (a - v).squaredNorm() + (a - w).squaredNorm();
    double image_sq = 2.0 * a.squaredNorm();
    double target_sq = v.squaredNorm() + w.squaredNorm();
    Vector dual_vec = (v - v_old) + (w - w_old);
    Vector dual_scale = uv + uw;
    if (has_fair) {
      primal_sq += (fa - y).squaredNorm();
      image_sq += fa.squaredNorm();
      target_sq += y.squaredNorm();
      dual_vec.noalias() += fair.transpose() * (y - y_old);
      dual_scale.noalias() += fair.transpose() * uy;
    }
    primal = std::sqrt(primal_sq);
    dual = rho * dual_vec.norm();

    if (check) {
      const double eps_primal =
          cfg.tol_abs + cfg.tol_rel * std::sqrt(std::max(image_sq, target_sq));
      const double eps_dual = cfg.tol_abs + cfg.tol_rel * rho * dual_scale.norm();
      if (primal < eps_primal && dual < eps_dual && iter - last_polish >= kPolishSpacing) {
        last_polish = iter;
        if (auto feasible = polish(v)) {
          solution = std::move(*feasible);
          if (cfg.epsilon == 0.0) {
            const double beta = cfg.penalty == Penalty::None ? 0.0 : cfg.beta;
            if (auto exact = refine_support(solution, cov, groups, cfg.penalty, beta, norm_row,
                                            norm_rhs, comm_budget)) {
              solution = std::move(*exact);
            }
          }
          converged = true;
          break;
        }
      }
    }
    if (adapt) {
      const double rp = primal, rd = dual;
      if (rp > 10.0 * rd && rho * 2.0 <= kRhoMax) {
        rho *= 2.0;
        uv /= 2.0;
        uw /= 2.0;
        uy /= 2.0;
      } else if (rd > 10.0 * rp && rho / 2.0 >= kRhoMin) {
        rho /= 2.0;
        uv *= 2.0;
        uw *= 2.0;
        uy *= 2.0;
      }
    }
  }

  if (!converged) {
    const double norm_value = norm_row.dot(v);
    solution = norm_value > 0.0 ? Vector(v * (norm_rhs / norm_value)) : v;
  }
  SolveReport report = make_report(solution, cov, groups, cfg.penalty);
  report.iterations = std::min(iter, cfg.max_iters);
  report.converged = converged;
  report.primal_residual = primal;
  report.dual_residual = dual;
  return report;
}

L0Result solve_l0_bruteforce(const CovarianceEstimate& cov, const GroupAssignment& groups,
                             double beta, Penalty penalty, const ConstraintSet& cset,
                             int max_support) {
  const int n = cov.size();
  if (n < 2) throw DomainError("normalization is infeasible for fewer than two nodes");
  const VectorizedProblem vp = build_vectorized(cov, groups, beta, penalty, cset);
  const int e = vp.parameter_count();
  if (e > 20) {
    throw DomainError("support enumeration is limited to 20 free parameters, got " +
                      std::to_string(e));
  }
  const double phi_scale = std::max(1.0, vp.phi.norm());
  const int top = std::min(max_support, e);

  L0Result result;
  double best_fair = 0.0;
  std::vector<int> support;
  for (int card = 1; card <= top && !result.feasible; ++card) {
    // Lexicographic combinations of `card` indices out of e.
    support.resize(static_cast<std::size_t>(card));
    for (int q = 0; q < card; ++q) support[static_cast<std::size_t>(q)] = q;
    while (true) {
      Matrix sub(vp.phi.rows(), card);
      for (int q = 0; q < card; ++q) sub.col(q) = vp.phi.col(support[static_cast<std::size_t>(q)]);
      const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
      const Vector x = cod.solve(vp.b);
      const double residual = (sub * x - vp.b).norm();
      const double x_max = x.cwiseAbs().maxCoeff();
      const bool solves = residual <= 1e-9 * phi_scale * std::max(1.0, x.norm());
      const bool exact_support = x.minCoeff() > 1e-9 * x_max;
      if (solves && exact_support) {
        Vector params = Vector::Zero(e);
        for (int q = 0; q < card; ++q) params(support[static_cast<std::size_t>(q)]) = x(q);
        const Matrix a = unvec_upper(params, n);
        const double fair = beta * penalty_value(a, groups, penalty);
        if (!result.feasible || fair < best_fair) {
          result.feasible = true;
          result.support = support;
          best_fair = fair;
          result.report = make_report(params, cov, groups, penalty);
          result.report->converged = true;
        }
      }
      // Advance to the next combination.
      int pos = card - 1;
      while (pos >= 0 && support[static_cast<std::size_t>(pos)] == e - card + pos) --pos;
      if (pos < 0) break;
      ++support[static_cast<std::size_t>(pos)];
      for (int q = pos + 1; q < card; ++q)
        support[static_cast<std::size_t>(q)] = support[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return result;
}

}  // namespace fairtopo
