#pragma once

#include <cstdint>

#include "bbvi/family.hpp"
#include "bbvi/targets.hpp"

namespace bbvi {

enum class EstimatorKind { Cfe, Stl };

const char* estimator_name(EstimatorKind kind);

// Both estimators return the ascent direction of the ELBO; their Monte Carlo
// mean is minus the gradient of the negative-ELBO objective (see
// analytic_grad_gaussian for the objective-gradient convention).

// Closed-form entropy estimator at base draw u: the reparameterization
// gradient of log lik plus the deterministic entropy gradient.
GradientSample grad_cfe(const Target& target, const VarParams& params,
                        const Eigen::VectorXd& u);

// Sticking-the-landing estimator at base draw u: the reparameterization
// gradient of log lik minus that of log q evaluated at frozen parameters.
// The stop-gradient is realized through the analytic score, so no entropy
// term appears.
GradientSample grad_stl(const Target& target, const VarParams& params,
                        const Eigen::VectorXd& u);

GradientSample estimator_grad(EstimatorKind kind, const Target& target,
                              const VarParams& params, const Eigen::VectorXd& u);

// Monte Carlo estimate of the negative ELBO
//   F(lambda) = -mean_i log lik(T_lambda(u_i)) - H(q_lambda),
// which equals KL(q || pi) when log lik is the normalized density.
double elbo_estimate(const Target& target, const VarParams& params, long count,
                     std::uint64_t seed);

struct McEstimate {
  double mean;
  double std_err;
};

// Monte Carlo mean and standard error of |g(lambda)|^2 over `count` draws.
// Per-index substreams plus a fixed-order reduction keep the result
// byte-identical for any thread count.
McEstimate expected_grad_norm_sq(EstimatorKind kind, const Target& target,
                                 const VarParams& params, long count,
                                 std::uint64_t seed, int threads = 1);

// Closed-form gradient of F(lambda) = KL(q_lambda || pi) for Gaussian
// targets; the unbiasedness oracle for both estimators.
GradientSample analytic_grad_gaussian(const GaussianTarget& target,
                                      const VarParams& params);

}  // namespace bbvi
