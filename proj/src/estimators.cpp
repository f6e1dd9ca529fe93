#include "bbvi/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bbvi/parallel.hpp"

namespace bbvi {
namespace {

// Scale block of the parameter gradient induced by a z-space vector g at
// base draw u: the lower triangle of g u^T for full-rank, g_i u_i for
// mean-field.
Eigen::VectorXd scale_block_from(const Eigen::VectorXd& g, const Eigen::VectorXd& u,
                                 ScaleKind kind) {
  const int d = static_cast<int>(g.size());
  if (kind == ScaleKind::MeanField) return g.cwiseProduct(u);
  Eigen::VectorXd out(scale_entry_count(kind, d));
  for (int i = 0; i < d; ++i) {
    const int row = VarParams::tril_index(i, 0);
    for (int j = 0; j <= i; ++j) out[row + j] = g[i] * u[j];
  }
  return out;
}

}  // namespace

const char* estimator_name(EstimatorKind kind) {
  return kind == EstimatorKind::Cfe ? "cfe" : "stl";
}

GradientSample grad_cfe(const Target& target, const VarParams& params,
                        const Eigen::VectorXd& u) {
  if (u.size() != params.dim() || target.dim() != params.dim()) {
    throw std::invalid_argument("grad_cfe: dimension mismatch");
  }
  const Eigen::VectorXd z = reparameterize(params, u);
  const Eigen::VectorXd g = target.grad_log_lik(z);
  GradientSample out{g, scale_block_from(g, u, params.kind())};
  out += entropy_grad(params);
  return out;
}

GradientSample grad_stl(const Target& target, const VarParams& params,
                        const Eigen::VectorXd& u) {
  if (u.size() != params.dim() || target.dim() != params.dim()) {
    throw std::invalid_argument("grad_stl: dimension mismatch");
  }
  const Eigen::VectorXd z = reparameterize(params, u);
  const Eigen::VectorXd r = target.grad_log_lik(z) - score(params, z);
  return GradientSample{r, scale_block_from(r, u, params.kind())};
}

GradientSample estimator_grad(EstimatorKind kind, const Target& target,
                              const VarParams& params, const Eigen::VectorXd& u) {
  return kind == EstimatorKind::Cfe ? grad_cfe(target, params, u)
                                    : grad_stl(target, params, u);
}

double elbo_estimate(const Target& target, const VarParams& params, long count,
                     std::uint64_t seed) {
  if (!target.has_log_lik()) {
    throw std::invalid_argument("elbo_estimate: target has no log_lik");
  }
  if (count < 1) throw std::invalid_argument("elbo_estimate: need count >= 1");
  std::vector<double> values(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const Eigen::VectorXd u = draw_base(params.dim(), seed, static_cast<std::uint64_t>(i));
    values[static_cast<std::size_t>(i)] = target.log_lik(reparameterize(params, u));
  }
  const double mean_log_lik = pairwise_sum(values) / static_cast<double>(count);
  return -mean_log_lik - entropy(params);
}

McEstimate expected_grad_norm_sq(EstimatorKind kind, const Target& target,
                                 const VarParams& params, long count,
                                 std::uint64_t seed, int threads) {
  if (count < 2) throw std::invalid_argument("expected_grad_norm_sq: need count >= 2");
  std::vector<double> norms(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](long i) {
    const Eigen::VectorXd u = draw_base(params.dim(), seed, static_cast<std::uint64_t>(i));
    norms[static_cast<std::size_t>(i)] =
        estimator_grad(kind, target, params, u).squared_norm();
  });
  const double n = static_cast<double>(count);
  const double mean = pairwise_sum(norms) / n;
  std::vector<double> sq_dev(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double dev = norms[i] - mean;
    sq_dev[i] = dev * dev;
  }
  const double variance = pairwise_sum(sq_dev) / (n - 1.0);
  return McEstimate{mean, std::sqrt(variance / n)};
}

GradientSample analytic_grad_gaussian(const GaussianTarget& target,
                                      const VarParams& params) {
  if (target.dim() != params.dim()) {
    throw std::invalid_argument("analytic_grad_gaussian: dimension mismatch");
  }
  const int d = params.dim();
  GradientSample out = GradientSample::zero(params.kind(), d);
  out.mean_block = target.solve_covariance(params.mean() - target.mean());

  // Gradient of  tr(Sigma^{-1} C C^T)/2 - sum_i log C_ii  on stored entries.
  const Eigen::MatrixXd precision_scale =
      [&] {
        Eigen::MatrixXd c = params.scale_matrix();
        Eigen::MatrixXd result(d, d);
        for (int j = 0; j < d; ++j) result.col(j) = target.solve_covariance(c.col(j));
        return result;
      }();
  if (params.kind() == ScaleKind::FullRank) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) {
        double v = precision_scale(i, j);
        if (i == j) v -= 1.0 / params.diag_entry(i);
        out.scale_block[VarParams::tril_index(i, j)] = v;
      }
    }
  } else {
    for (int i = 0; i < d; ++i) {
      out.scale_block[i] = precision_scale(i, i) - 1.0 / params.diag_entry(i);
    }
  }
  return out;
}

}  // namespace bbvi
