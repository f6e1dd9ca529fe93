#pragma once

#include <cstdint>

#include "bbvi/estimators.hpp"
#include "bbvi/family.hpp"
#include "bbvi/targets.hpp"

namespace bbvi {

// Decomposition Sigma = D^{1/2} R D^{1/2} with D the diagonal of marginal
// variances and R the correlation matrix.
struct CorrelationDecomposition {
  Eigen::VectorXd variances;
  Eigen::MatrixXd correlation;
};

CorrelationDecomposition correlation_decomposition(const Eigen::MatrixXd& covariance);

// KL(q || pi) between q = N(m, C C^T) and the Gaussian target, in closed form.
double kl_gaussian(const VarParams& q, const GaussianTarget& target);

// Second-order Fisher divergence between Gaussians:
// |Sigma^{-1} C - C^{-T}|_F^2 + |Sigma^{-1} (m - mu)|^2.
double fisher_gaussian(const VarParams& q, const GaussianTarget& target);

// Monte Carlo estimate of the 4th-order Fisher divergence
// E_q |grad log pi - grad log q|^4. No closed form is attempted.
McEstimate fisher4_mc(const VarParams& q, const GaussianTarget& target, long count,
                      std::uint64_t seed, int threads = 1);

// Mean-field KL minimizer (delegates to optimal_params): m = mu,
// C_ii = (Sigma^{-1})_ii^{-1/2}.
VarParams kl_minimizer_meanfield(const GaussianTarget& target);

struct FisherSandwich {
  double lower;
  double exact;
  double upper;
};

// Sandwich on the Fisher divergence of the variance-matched mean-field
// profile q_D = N(mu, diag(Sigma)):
//  max-variance^{-1} |R^{-1} - I|_F^2 <= D_F(q_D, pi) <= min-variance^{-1} |R^{-1} - I|_F^2.
// `exact` is D_F(q_D, pi) through the generic closed form.
FisherSandwich fisher_sandwich(const GaussianTarget& target);

}  // namespace bbvi
