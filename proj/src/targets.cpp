#include "bbvi/targets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bbvi {

double Target::log_lik(const Eigen::VectorXd&) const {
  throw std::logic_error("Target: log_lik not available for this target");
}

GaussianTarget::GaussianTarget(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance,
                               double log_offset)
    : mean_(std::move(mean)), log_offset_(log_offset) {
  const int d = static_cast<int>(mean_.size());
  if (covariance.rows() != d || covariance.cols() != d) {
    throw std::invalid_argument("GaussianTarget: covariance dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("GaussianTarget: covariance is not positive definite");
  }
  chol_ = llt.matrixL();
}

GaussianTarget GaussianTarget::from_cholesky(Eigen::VectorXd mean,
                                             Eigen::MatrixXd chol_lower,
                                             double log_offset) {
  const int d = static_cast<int>(mean.size());
  if (chol_lower.rows() != d || chol_lower.cols() != d) {
    throw std::invalid_argument("GaussianTarget: Cholesky factor dimension mismatch");
  }
  for (int i = 0; i < d; ++i) {
    if (!(chol_lower(i, i) > 0.0)) {
      throw std::invalid_argument("GaussianTarget: Cholesky diagonal must be positive");
    }
  }
  GaussianTarget out(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), log_offset);
  out.mean_ = std::move(mean);
  out.chol_ = chol_lower.triangularView<Eigen::Lower>();
  return out;
}

GaussianTarget GaussianTarget::spectrum(int dim, double condition_number) {
  if (dim < 1 || !(condition_number >= 1.0)) {
    throw std::invalid_argument("GaussianTarget::spectrum: need dim >= 1 and kappa >= 1");
  }
  if (dim == 1 && condition_number != 1.0) {
    throw std::invalid_argument("GaussianTarget::spectrum: kappa must be 1 when dim is 1");
  }
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double frac = dim == 1 ? 1.0 : static_cast<double>(i) / (dim - 1);
    // Geometric interpolation of variances from 1/kappa to 1.
    const double variance = std::pow(condition_number, frac - 1.0);
    chol(i, i) = std::sqrt(variance);
  }
  return from_cholesky(Eigen::VectorXd::Zero(dim), std::move(chol));
}

GaussianTarget GaussianTarget::equicorrelated(int dim, double rho, double variance) {
  if (dim < 1 || !(variance > 0.0)) {
    throw std::invalid_argument("GaussianTarget::equicorrelated: bad arguments");
  }
  if (!(rho > -1.0 / std::max(1, dim - 1) && rho < 1.0)) {
    throw std::invalid_argument("GaussianTarget::equicorrelated: rho out of the SPD range");
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(dim, dim, variance * rho);
  cov.diagonal().setConstant(variance);
  return GaussianTarget(Eigen::VectorXd::Zero(dim), cov);
}

Eigen::VectorXd GaussianTarget::solve_covariance(const Eigen::VectorXd& v) const {
  Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(v);
  return chol_.triangularView<Eigen::Lower>().transpose().solve(w);
}

Eigen::VectorXd GaussianTarget::grad_log_lik(const Eigen::VectorXd& z) const {
  return -solve_covariance(z - mean_);
}

double GaussianTarget::log_lik(const Eigen::VectorXd& z) const {
  const Eigen::VectorXd w = chol_.triangularView<Eigen::Lower>().solve(z - mean_);
  double log_det = 0.0;
  for (int i = 0; i < dim(); ++i) log_det += std::log(chol_(i, i));
  return -0.5 * w.squaredNorm() - 0.5 * dim() * std::log(2.0 * std::numbers::pi) -
         log_det + log_offset_;
}

RegularityConstants regularity(const GaussianTarget& target) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(target.covariance());
  const double sigma_min = solver.eigenvalues().minCoeff();
  const double sigma_max = solver.eigenvalues().maxCoeff();
  const double mu = 1.0 / sigma_max;
  const double l = 1.0 / sigma_min;
  return RegularityConstants{mu, l, l / mu, 1.0 / mu};
}

WorstCaseInstance worst_case_instance(int dim, double l_smooth, double mean_offset) {
  if (dim < 2) throw std::invalid_argument("worst_case_instance: need dim >= 2");
  if (!(l_smooth >= 1.0)) {
    throw std::invalid_argument("worst_case_instance: the construction needs L >= 1");
  }
  Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(dim, dim);
  chol(0, 0) = std::sqrt(1.0 / l_smooth);
  for (int i = 1; i < dim; ++i) chol(i, i) = std::sqrt(l_smooth);
  GaussianTarget target = GaussianTarget::from_cholesky(Eigen::VectorXd::Zero(dim), chol);

  Eigen::MatrixXd scale =
      Eigen::MatrixXd::Identity(dim, dim) / std::sqrt(l_smooth);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
  m.tail(dim - 1).setConstant(mean_offset);
  VarParams params = VarParams::full_rank(std::move(m), scale);
  return WorstCaseInstance{std::move(target), std::move(params)};
}

VarParams optimal_params(const GaussianTarget& target, ScaleKind kind) {
  if (kind == ScaleKind::FullRank) {
    return VarParams::full_rank(target.mean(), target.chol());
  }
  // Stationarity of the KL over diagonal scales: (C C)^{-1} = diag(Sigma^{-1}),
  // so C_ii = (Sigma^{-1})_ii^{-1/2}. Equals diag(Sigma)^{1/2} only when
  // Sigma is diagonal.
  const int d = target.dim();
  Eigen::VectorXd diag(d);
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) {
    basis[i] = 1.0;
    diag[i] = 1.0 / std::sqrt(target.solve_covariance(basis)[i]);
    basis[i] = 0.0;
  }
  return VarParams::mean_field(target.mean(), std::move(diag));
}

}  // namespace bbvi
