#pragma once

#include <Eigen/Dense>

#include "bbvi/family.hpp"

namespace bbvi {

// A target posterior exposed through its unnormalized log density gradient.
// log_lik is optional; estimators that need it check has_log_lik first.
class Target {
 public:
  virtual ~Target() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd grad_log_lik(const Eigen::VectorXd& z) const = 0;
  virtual bool has_log_lik() const { return false; }
  virtual double log_lik(const Eigen::VectorXd& z) const;
};

// Regularity constants of a strongly log-concave target: strong
// log-concavity mu, log-smoothness L, condition number kappa = L / mu, and
// the log-Sobolev constant 1 / mu.
struct RegularityConstants {
  double mu_strong;
  double l_smooth;
  double kappa;
  double c_lsi;
};

// Gaussian target N(mu, Sigma). log_lik is the exact normalized log density
// (plus an optional constant offset), so the negative ELBO equals
// KL(q || pi) when the offset is zero. The Cholesky factor of Sigma is the
// stored ground truth; all solves go through it.
class GaussianTarget : public Target {
 public:
  GaussianTarget(Eigen::VectorXd mean, const Eigen::MatrixXd& covariance,
                 double log_offset = 0.0);

  static GaussianTarget from_cholesky(Eigen::VectorXd mean, Eigen::MatrixXd chol_lower,
                                      double log_offset = 0.0);

  // (d, kappa) spectrum recipe: zero mean, diagonal covariance with
  // eigenvalues geometrically spaced from 1/kappa up to 1, so that
  // mu = 1, L = kappa.
  static GaussianTarget spectrum(int dim, double condition_number);

  // Equicorrelated covariance: Sigma = variance * ((1 - rho) I + rho 11^T).
  static GaussianTarget equicorrelated(int dim, double rho, double variance = 1.0);

  int dim() const override { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  Eigen::MatrixXd covariance() const { return chol_ * chol_.transpose(); }
  double log_offset() const { return log_offset_; }

  // Sigma^{-1} v via two triangular solves on the stored factor.
  Eigen::VectorXd solve_covariance(const Eigen::VectorXd& v) const;

  Eigen::VectorXd grad_log_lik(const Eigen::VectorXd& z) const override;
  bool has_log_lik() const override { return true; }
  double log_lik(const Eigen::VectorXd& z) const override;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;
  double log_offset_;
};

// Eigenvalue-derived constants: mu = lambda_min(Sigma^{-1}),
// L = lambda_max(Sigma^{-1}).
RegularityConstants regularity(const GaussianTarget& target);

struct WorstCaseInstance {
  GaussianTarget target;
  VarParams params;
};

// The ill-conditioned instance behind the STL variance lower bound:
// pi = N(0, diag(1/L, L, ..., L)) and lambda~ = (m~, C~) with
// C~ = L^{-1/2} I, which sits on the boundary of the feasible set for S = L.
// m~ matches the target mean exactly by default; mean_offset shifts
// coordinates 2..d of m~ for exploration (the first coordinate always
// equals the mode).
WorstCaseInstance worst_case_instance(int dim, double l_smooth, double mean_offset = 0.0);

// KL-optimal parameters: exact fit (mu, chol(Sigma)) for full-rank; for
// mean-field the stationary point of the KL over diagonal scales,
// C_ii = (Sigma^{-1})_ii^{-1/2} (the marginal-precision fit, which
// underestimates marginal variances whenever Sigma is correlated).
VarParams optimal_params(const GaussianTarget& target, ScaleKind kind);

}  // namespace bbvi
