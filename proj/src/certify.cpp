#include "fairtopo/certify.hpp"

#include "fairtopo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fairtopo {

namespace {

Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t q = 0; q < rows.size(); ++q) out.row(static_cast<Eigen::Index>(q)) = m.row(rows[q]);
  return out;
}

void check_indices(const std::vector<int>& idx, Eigen::Index bound, const char* what) {
  for (int k : idx) {
    if (k < 0 || k >= bound) {
      throw DomainError(std::string(what) + " index " + std::to_string(k) + " outside [0, " +
                        std::to_string(bound) + ")");
    }
  }
}

}  // namespace

std::vector<double> default_psi_grid() {
  std::vector<double> grid(61);
  for (int k = 0; k < 61; ++k) grid[static_cast<std::size_t>(k)] = std::pow(10.0, -3.0 + 0.1 * k);
  return grid;
}

bool check_condition1(const Matrix& phi, const std::vector<int>& support_i) {
  check_indices(support_i, phi.cols(), "support");
  if (support_i.empty()) return true;
  Matrix sub(phi.rows(), static_cast<Eigen::Index>(support_i.size()));
  for (std::size_t q = 0; q < support_i.size(); ++q)
    sub.col(static_cast<Eigen::Index>(q)) = phi.col(support_i[q]);
  const Eigen::JacobiSVD<Matrix> svd(sub);
  const Vector& sv = svd.singularValues();
  if (sv.size() < static_cast<Eigen::Index>(support_i.size())) return false;
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  if (sigma_max == 0.0) return false;
  const double threshold =
      static_cast<double>(std::max(phi.rows(), phi.cols())) * sigma_max * 1e-12;
  return sv(sv.size() - 1) > threshold;
}

bool check_condition1(const VectorizedProblem& vp, const std::vector<int>& support_i) {
  return check_condition1(vp.phi, support_i);
}

Condition2Result check_condition2(const Matrix& psi, const Matrix& phi,
                                  const std::vector<int>& support_j,
                                  const std::vector<double>& psi_grid) {
  if (psi_grid.empty()) throw DomainError("psi grid is empty");
  for (double p : psi_grid) {
    if (!(p > 0.0)) throw DomainError("psi grid values must be positive");
  }
  if (psi.cols() != phi.cols()) throw DomainError("Psi and Phi disagree on the parameter count");
  check_indices(support_j, psi.rows(), "penalty support");

  std::vector<bool> in_j(static_cast<std::size_t>(psi.rows()), false);
  for (int p : support_j) in_j[static_cast<std::size_t>(p)] = true;
  std::vector<int> complement;
  for (int p = 0; p < psi.rows(); ++p)
    if (!in_j[static_cast<std::size_t>(p)]) complement.push_back(p);

  Condition2Result result;
  if (complement.empty() || support_j.empty()) {
    result.min_norm = 0.0;
    result.holds = true;
    result.psi_star = psi_grid.front();
    return result;
  }

  const Matrix psi_jc = select_rows(psi, complement);
  const Matrix psi_j_t = select_rows(psi, support_j).transpose();
  const Matrix gram_phi = phi.transpose() * phi;
  const Matrix gram_psi = psi_jc.transpose() * psi_jc;

  result.min_norm = std::numeric_limits<double>::infinity();
  for (double p : psi_grid) {
    const Matrix inner = gram_phi / (p * p) + gram_psi;
    const Eigen::LDLT<Matrix> ldlt(inner);
    const Vector d = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 1e-13 * d.cwiseAbs().maxCoeff())) {
      result.skipped_psi.push_back(p);
      continue;
    }
    const Matrix product = psi_jc * ldlt.solve(psi_j_t);
    const double norm = product.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm < result.min_norm) {
      result.min_norm = norm;
      result.psi_star = p;
    }
  }
  result.indeterminate = result.skipped_psi.size() == psi_grid.size();
  result.holds = !result.indeterminate && result.min_norm < 1.0;
  return result;
}

Condition2Result check_condition2(const VectorizedProblem& vp, const std::vector<int>& support_j,
                                  const std::vector<double>& psi_grid) {
  return check_condition2(vp.psi, vp.phi, support_j, psi_grid);
}

CertificateReport certify(const VectorizedProblem& vp, const Matrix& a_hat,
                          std::optional<double> zero_tol, const std::vector<double>& psi_grid) {
  if (a_hat.rows() != vp.n || a_hat.cols() != vp.n) {
    throw DomainError("candidate is " + std::to_string(a_hat.rows()) + "x" +
                      std::to_string(a_hat.cols()) + " but the problem has " +
                      std::to_string(vp.n) + " nodes");
  }
  const Vector a = vec_upper(a_hat);
  const double largest = a.size() > 0 ? a.cwiseAbs().maxCoeff() : 0.0;
  const double tol = zero_tol.value_or(1e-6 * largest);

  CertificateReport report;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (std::abs(a(k)) > tol) report.support_i.push_back(static_cast<int>(k));
  const Vector image = vp.psi * a;
  for (Eigen::Index p = 0; p < image.size(); ++p)
    if (std::abs(image(p)) > tol) report.support_j.push_back(static_cast<int>(p));

  report.vacuous = report.support_i.empty();
  report.cond1_full_rank = check_condition1(vp, report.support_i);
  const Condition2Result c2 = check_condition2(vp, report.support_j, psi_grid);
  report.cond2_min_norm = c2.min_norm;
  report.cond2_holds = c2.holds;
  report.psi_star = c2.psi_star;
  report.skipped_psi = c2.skipped_psi;
  report.cond2_indeterminate = c2.indeterminate;
  return report;
}

}  // namespace fairtopo
