#include "bbvi/divergences.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbvi/parallel.hpp"

namespace bbvi {

CorrelationDecomposition correlation_decomposition(const Eigen::MatrixXd& covariance) {
  const int d = static_cast<int>(covariance.rows());
  if (covariance.cols() != d) {
    throw std::invalid_argument("correlation_decomposition: matrix must be square");
  }
  Eigen::VectorXd variances = covariance.diagonal();
  Eigen::VectorXd inv_sd = variances.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd correlation = inv_sd.asDiagonal() * covariance * inv_sd.asDiagonal();
  // Pin the unit diagonal; the scaling only leaves rounding noise there.
  correlation.diagonal().setOnes();
  return CorrelationDecomposition{std::move(variances), std::move(correlation)};
}

double kl_gaussian(const VarParams& q, const GaussianTarget& target) {
  const int d = q.dim();
  if (target.dim() != d) throw std::invalid_argument("kl_gaussian: dimension mismatch");
  const Eigen::VectorXd diff = q.mean() - target.mean();
  const double quad = diff.dot(target.solve_covariance(diff));

  const Eigen::MatrixXd c = q.scale_matrix();
  double trace = 0.0;
  for (int j = 0; j < d; ++j) {
    trace += c.col(j).dot(target.solve_covariance(c.col(j)));
  }
  double log_det_q = 0.0;
  for (int i = 0; i < d; ++i) log_det_q += 2.0 * std::log(q.diag_entry(i));
  double log_det_target = 0.0;
  for (int i = 0; i < d; ++i) log_det_target += 2.0 * std::log(target.chol()(i, i));

  return 0.5 * (quad + trace - log_det_q + log_det_target - d);
}

double fisher_gaussian(const VarParams& q, const GaussianTarget& target) {
  const int d = q.dim();
  if (target.dim() != d) throw std::invalid_argument("fisher_gaussian: dimension mismatch");
  const Eigen::MatrixXd c = q.scale_matrix();
  Eigen::MatrixXd mismatch(d, d);
  for (int j = 0; j < d; ++j) mismatch.col(j) = target.solve_covariance(c.col(j));
  // Subtract C^{-T} column by column via back substitution.
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < d; ++j) {
    basis[j] = 1.0;
    mismatch.col(j) -= q.solve_scale_transpose(basis);
    basis[j] = 0.0;
  }
  const Eigen::VectorXd mean_term =
      target.solve_covariance(q.mean() - target.mean());
  return mismatch.squaredNorm() + mean_term.squaredNorm();
}

McEstimate fisher4_mc(const VarParams& q, const GaussianTarget& target, long count,
                      std::uint64_t seed, int threads) {
  if (count < 2) throw std::invalid_argument("fisher4_mc: need count >= 2");
  if (target.dim() != q.dim()) throw std::invalid_argument("fisher4_mc: dimension mismatch");
  std::vector<double> values(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](long i) {
    const Eigen::VectorXd u = draw_base(q.dim(), seed, static_cast<std::uint64_t>(i));
    const Eigen::VectorXd z = reparameterize(q, u);
    const double sq = (target.grad_log_lik(z) - score(q, z)).squaredNorm();
    values[static_cast<std::size_t>(i)] = sq * sq;
  });
  const double n = static_cast<double>(count);
  const double mean = pairwise_sum(values) / n;
  std::vector<double> sq_dev(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dev = values[i] - mean;
    sq_dev[i] = dev * dev;
  }
  const double variance = pairwise_sum(sq_dev) / (n - 1.0);
  return McEstimate{mean, std::sqrt(variance / n)};
}

VarParams kl_minimizer_meanfield(const GaussianTarget& target) {
  return optimal_params(target, ScaleKind::MeanField);
}

FisherSandwich fisher_sandwich(const GaussianTarget& target) {
  const CorrelationDecomposition decomp = correlation_decomposition(target.covariance());
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(target.dim(), target.dim());
  Eigen::LLT<Eigen::MatrixXd> llt(decomp.correlation);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("fisher_sandwich: correlation matrix not positive definite");
  }
  const Eigen::MatrixXd inv_correlation = llt.solve(identity);
  const double gap = (inv_correlation - identity).squaredNorm();
  // The bracketed quantity is the Fisher divergence of the variance-matched
  // mean-field profile (m, C) = (mu, diag(Sigma)^{1/2}); the exact value is
  // computed through the generic closed form, not the R^{-1} route.
  const VarParams matched =
      VarParams::mean_field(target.mean(), decomp.variances.cwiseSqrt());
  const double exact = fisher_gaussian(matched, target);
  return FisherSandwich{gap / decomp.variances.maxCoeff(), exact,
                        gap / decomp.variances.minCoeff()};
}

}  // namespace bbvi
