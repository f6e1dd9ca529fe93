#include <doctest.h>

#include <cmath>

#include "bbvi/divergences.hpp"
#include "bbvi/estimators.hpp"
#include "bbvi/targets.hpp"
#include "support.hpp"

using namespace bbvi;
using testsupport::TestRng;

TEST_CASE("regularity constants from the covariance spectrum") {
  const GaussianTarget iso(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  const RegularityConstants r = regularity(iso);
  CHECK(r.mu_strong == doctest::Approx(1.0));
  CHECK(r.l_smooth == doctest::Approx(1.0));
  CHECK(r.kappa == doctest::Approx(1.0));
  CHECK(r.c_lsi == doctest::Approx(1.0));

  const double l0 = 3.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(3, 3);
  cov.diagonal() << 1.0 / l0, l0, l0;
  const RegularityConstants rw = regularity(GaussianTarget(Eigen::VectorXd::Zero(3), cov));
  CHECK(rw.mu_strong == doctest::Approx(1.0 / l0).epsilon(1e-12));
  CHECK(rw.l_smooth == doctest::Approx(l0).epsilon(1e-12));
  CHECK(rw.kappa == doctest::Approx(l0 * l0).epsilon(1e-12));

  Eigen::MatrixXd cov2 = Eigen::MatrixXd::Zero(2, 2);
  cov2.diagonal() << 4.0, 1.0;
  const RegularityConstants r2 = regularity(GaussianTarget(Eigen::VectorXd::Zero(2), cov2));
  CHECK(r2.mu_strong == doctest::Approx(0.25));
  CHECK(r2.l_smooth == doctest::Approx(1.0));
  CHECK(r2.kappa == doctest::Approx(4.0));
}

TEST_CASE("spectrum recipe pins mu = 1, L = kappa") {
  const GaussianTarget t = GaussianTarget::spectrum(5, 4.0);
  const RegularityConstants r = regularity(t);
  CHECK(r.mu_strong == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.l_smooth == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(regularity(GaussianTarget::spectrum(30, 1.0)).kappa == doctest::Approx(1.0));
  CHECK_THROWS_AS(GaussianTarget::spectrum(1, 4.0), std::invalid_argument);
}

TEST_CASE("worst-case instance layout") {
  const WorstCaseInstance degenerate = worst_case_instance(2, 1.0);
  CHECK(degenerate.target.covariance().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(degenerate.params.scale_matrix().isApprox(Eigen::MatrixXd::Identity(2, 2)));

  const WorstCaseInstance inst = worst_case_instance(3, 4.0);
  Eigen::MatrixXd expect_cov = Eigen::MatrixXd::Zero(3, 3);
  expect_cov.diagonal() << 0.25, 4.0, 4.0;
  CHECK(inst.target.covariance().isApprox(expect_cov, 1e-12));
  CHECK(inst.params.scale_matrix().isApprox(0.5 * Eigen::MatrixXd::Identity(3, 3)));
  CHECK(in_domain(inst.params, DomainSpec{4.0, ScaleKind::FullRank}));

  for (auto [d, l] : {std::pair<int, double>{2, 2.0}, {5, 10.0}, {10, 7.0}}) {
    const WorstCaseInstance w = worst_case_instance(d, l);
    CHECK(w.params.scale().squaredNorm() == doctest::Approx(d / l).epsilon(1e-12));
    const RegularityConstants r = regularity(w.target);
    CHECK(r.mu_strong == doctest::Approx(1.0 / l).epsilon(1e-10));
    CHECK(r.l_smooth == doctest::Approx(l).epsilon(1e-10));
    CHECK(r.kappa == doctest::Approx(l * l).epsilon(1e-10));
    // Boundary of the feasible set: every diagonal at the threshold.
    const DomainSpec dom{l, ScaleKind::FullRank};
    for (int i = 0; i < d; ++i) {
      CHECK(w.params.diag_entry(i) == doctest::Approx(dom.threshold()).epsilon(1e-14));
    }
  }

  CHECK_THROWS_AS(worst_case_instance(1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(worst_case_instance(3, 0.5), std::invalid_argument);
}

TEST_CASE("optimal parameters per family") {
  Eigen::MatrixXd diag_cov = Eigen::MatrixXd::Zero(2, 2);
  diag_cov.diagonal() << 2.0, 0.5;
  const GaussianTarget diag_target(Eigen::Vector2d(1.0, -1.0), diag_cov);
  const VarParams full = optimal_params(diag_target, ScaleKind::FullRank);
  const VarParams mf = optimal_params(diag_target, ScaleKind::MeanField);
  CHECK(full.scale_matrix().isApprox(mf.scale_matrix(), 1e-12));
  CHECK(fisher_gaussian(mf, diag_target) == doctest::Approx(0.0).epsilon(1e-12));

  // Correlated case: the stationary condition (CC)^{-1} = diag(Sigma^{-1})
  // gives C_ii = sqrt(1 - rho^2) for the unit-variance equicorrelated pair.
  Eigen::MatrixXd corr(2, 2);
  corr << 1.0, 0.5, 0.5, 1.0;
  const GaussianTarget corr_target(Eigen::VectorXd::Zero(2), corr);
  const VarParams mf_corr = optimal_params(corr_target, ScaleKind::MeanField);
  const double shrunk = std::sqrt(1.0 - 0.25);
  CHECK(mf_corr.scale().isApprox(Eigen::Vector2d(shrunk, shrunk), 1e-12));

  // First-order optimality of the mean-field minimizer.
  TestRng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    const GaussianTarget t(rng.gaussian_vector(3), testsupport::random_spd(rng, 3));
    const GradientSample g =
        analytic_grad_gaussian(t, optimal_params(t, ScaleKind::MeanField));
    CHECK(g.mean_block.norm() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(g.scale_block.norm() == doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("gradient of the log likelihood matches finite differences") {
  TestRng rng(32);
  const GaussianTarget t(rng.gaussian_vector(3), testsupport::random_spd(rng, 3));
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::VectorXd z = rng.gaussian_vector(3) * 2.0;
    const Eigen::VectorXd numeric = testsupport::finite_difference(
        [&](const Eigen::VectorXd& x) { return t.log_lik(x); }, z);
    CHECK((t.grad_log_lik(z) - numeric).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("log offset moves log_lik but not its gradient") {
  TestRng rng(33);
  const Eigen::VectorXd mean = rng.gaussian_vector(2);
  const Eigen::MatrixXd cov = testsupport::random_spd(rng, 2);
  const GaussianTarget plain(mean, cov, 0.0);
  const GaussianTarget shifted(mean, cov, 3.25);
  const Eigen::VectorXd z = rng.gaussian_vector(2);
  CHECK(shifted.log_lik(z) == doctest::Approx(plain.log_lik(z) + 3.25));
  CHECK(shifted.grad_log_lik(z) == plain.grad_log_lik(z));
}
