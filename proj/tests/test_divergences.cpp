#include <doctest.h>

#include <cmath>

#include "bbvi/divergences.hpp"
#include "support.hpp"

using namespace bbvi;
using testsupport::TestRng;

TEST_CASE("Gaussian KL closed form") {
  TestRng rng(61);
  const GaussianTarget t(rng.gaussian_vector(3), testsupport::random_spd(rng, 3));
  CHECK(kl_gaussian(optimal_params(t, ScaleKind::FullRank), t) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const GaussianTarget line(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  const VarParams shifted = VarParams::mean_field(Eigen::VectorXd::Constant(1, 1.0),
                                                  Eigen::VectorXd::Constant(1, 1.0));
  CHECK(kl_gaussian(shifted, line) == doctest::Approx(0.5).epsilon(1e-12));

  // Quadrature oracle in one dimension.
  const GaussianTarget t1(Eigen::VectorXd::Constant(1, 0.4),
                          Eigen::MatrixXd::Constant(1, 1, 2.25));
  const VarParams q1 = VarParams::mean_field(Eigen::VectorXd::Constant(1, -0.3),
                                             Eigen::VectorXd::Constant(1, 0.8));
  const double quad = testsupport::simpson(
      [&](double z) {
        const Eigen::VectorXd zv = Eigen::VectorXd::Constant(1, z);
        const double log_q = log_density(q1, zv);
        return std::exp(log_q) * (log_q - t1.log_lik(zv));
      },
      -25.0, 25.0, 20000);
  CHECK(kl_gaussian(q1, t1) == doctest::Approx(quad).epsilon(1e-5));
}

TEST_CASE("Gaussian Fisher divergence closed form") {
  TestRng rng(62);
  const GaussianTarget t(rng.gaussian_vector(2), testsupport::random_spd(rng, 2));
  CHECK(fisher_gaussian(optimal_params(t, ScaleKind::FullRank), t) ==
        doctest::Approx(0.0).epsilon(1e-12));

  const GaussianTarget line(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  const VarParams shifted = VarParams::mean_field(Eigen::VectorXd::Constant(1, 1.0),
                                                  Eigen::VectorXd::Constant(1, 1.0));
  CHECK(fisher_gaussian(shifted, line) == doctest::Approx(1.0).epsilon(1e-12));

  // Monte Carlo oracle E_q |grad log pi - grad log q|^2.
  for (int rep = 0; rep < 3; ++rep) {
    const GaussianTarget tr(rng.gaussian_vector(3), testsupport::random_spd(rng, 3));
    const VarParams q = testsupport::random_feasible(rng, ScaleKind::FullRank, 3, 1.0);
    testsupport::MeanAccumulator acc;
    for (long i = 0; i < 200000; ++i) {
      const Eigen::VectorXd u = draw_base(3, 620 + rep, static_cast<std::uint64_t>(i));
      const Eigen::VectorXd z = reparameterize(q, u);
      acc.add((tr.grad_log_lik(z) - score(q, z)).squaredNorm());
    }
    CHECK(std::abs(acc.mean - fisher_gaussian(q, tr)) <= 5.0 * acc.std_err());
  }
}

TEST_CASE("fourth-order Fisher divergence by Monte Carlo") {
  TestRng rng(63);
  const GaussianTarget t(rng.gaussian_vector(2), testsupport::random_spd(rng, 2));
  const McEstimate zero = fisher4_mc(optimal_params(t, ScaleKind::FullRank), t, 1000, 1);
  CHECK(zero.mean == 0.0);
  CHECK(zero.std_err == 0.0);

  // Unit-variance mean shift: the integrand is the constant 1.
  const GaussianTarget line(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  const VarParams shifted = VarParams::mean_field(Eigen::VectorXd::Constant(1, 1.0),
                                                  Eigen::VectorXd::Constant(1, 1.0));
  const McEstimate unit = fisher4_mc(shifted, line, 1000, 2);
  CHECK(unit.mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.std_err == doctest::Approx(0.0).epsilon(1e-9));

  // Scale mismatch: integrand (3z/4)^4 with z ~ N(0, 4), expectation
  // (3/4)^4 * 3 * 16 = 15.1875.
  const VarParams wide = VarParams::mean_field(Eigen::VectorXd::Zero(1),
                                               Eigen::VectorXd::Constant(1, 2.0));
  const McEstimate scaled = fisher4_mc(wide, line, 2000000, 3);
  CHECK(std::abs(scaled.mean - 15.1875) <= 5.0 * scaled.std_err);
}

TEST_CASE("mean-field KL minimizer") {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.7, 0.7, 1.0;
  const GaussianTarget t(Eigen::VectorXd::Zero(2), cov);
  const VarParams q_star = kl_minimizer_meanfield(t);
  const double shrunk = std::sqrt(1.0 - 0.49);
  CHECK(q_star.scale().isApprox(Eigen::Vector2d(shrunk, shrunk), 1e-12));

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag.diagonal() << 0.6, 2.5;
  const GaussianTarget dt(Eigen::Vector2d(1.0, -2.0), diag);
  CHECK(kl_gaussian(kl_minimizer_meanfield(dt), dt) == doctest::Approx(0.0).epsilon(1e-12));

  // Local optimality against random mean-field perturbations.
  TestRng rng(64);
  const GaussianTarget rt(rng.gaussian_vector(3), testsupport::random_spd(rng, 3));
  const VarParams minimizer = kl_minimizer_meanfield(rt);
  const double at_min = kl_gaussian(minimizer, rt);
  for (int rep = 0; rep < 1000; ++rep) {
    VarParams perturbed = minimizer;
    perturbed.mutable_mean() += 0.3 * rng.gaussian_vector(3);
    for (int i = 0; i < 3; ++i) {
      perturbed.set_diag_entry(i,
                               std::max(0.05, perturbed.diag_entry(i) +
                                                  0.3 * rng.gaussian()));
    }
    CHECK(at_min <= kl_gaussian(perturbed, rt) + 1e-12);
  }
}

TEST_CASE("Fisher sandwich") {
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(3, 3);
  diag.diagonal() << 0.5, 1.0, 2.0;
  const FisherSandwich none = fisher_sandwich(GaussianTarget(Eigen::VectorXd::Zero(3), diag));
  CHECK(none.lower == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(none.exact == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(none.upper == doctest::Approx(0.0).epsilon(1e-12));

  // Isotropic covariance: both ends collapse onto the exact value.
  const FisherSandwich iso = fisher_sandwich(
      GaussianTarget(Eigen::VectorXd::Zero(2), 3.0 * Eigen::MatrixXd::Identity(2, 2)));
  CHECK(iso.lower == doctest::Approx(iso.upper).epsilon(1e-12));
  CHECK(iso.exact == doctest::Approx(iso.lower).epsilon(1e-10));

  const FisherSandwich tight = fisher_sandwich(GaussianTarget::equicorrelated(2, 0.9));
  CHECK(tight.lower <= tight.exact * (1 + 1e-10) + 1e-12);
  CHECK(tight.exact <= tight.upper * (1 + 1e-10) + 1e-12);
}

TEST_CASE("sandwich ordering for random covariances") {
  TestRng rng(65);
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 2 + static_cast<int>(rng.uniform(0.0, 8.99));
    const GaussianTarget t(Eigen::VectorXd::Zero(d), testsupport::random_spd(rng, d));
    const FisherSandwich s = fisher_sandwich(t);
    CHECK(s.lower <= s.exact * (1 + 1e-9) + 1e-9);
    CHECK(s.exact <= s.upper * (1 + 1e-9) + 1e-9);
  }
}

TEST_CASE("LSI chain for random Gaussian pairs") {
  TestRng rng(66);
  for (int rep = 0; rep < 1000; ++rep) {
    const int d = 1 + static_cast<int>(rng.uniform(0.0, 3.99));
    const GaussianTarget t(rng.gaussian_vector(d), testsupport::random_spd(rng, d));
    const VarParams q = testsupport::random_feasible(rng, ScaleKind::FullRank, d, 1.0);
    const double mu = regularity(t).mu_strong;
    CHECK(2.0 * mu * kl_gaussian(q, t) <= fisher_gaussian(q, t) * (1 + 1e-9) + 1e-9);
  }
}

TEST_CASE("Fisher divergence of the mean-field fit grows with correlation") {
  double previous = -1.0;
  for (double rho = 0.0; rho < 0.995; rho += 0.1) {
    const double exact =
        fisher_sandwich(GaussianTarget::equicorrelated(2, std::min(rho, 0.99))).exact;
    CHECK(exact >= previous - 1e-12);
    previous = exact;
  }
}

TEST_CASE("correlation decomposition reconstructs the covariance") {
  TestRng rng(67);
  const Eigen::MatrixXd cov = testsupport::random_spd(rng, 4);
  const CorrelationDecomposition decomp = correlation_decomposition(cov);
  const Eigen::VectorXd sd = decomp.variances.cwiseSqrt();
  const Eigen::MatrixXd rebuilt =
      sd.asDiagonal() * decomp.correlation * sd.asDiagonal();
  CHECK((rebuilt - cov).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 4; ++i) CHECK(decomp.correlation(i, i) == doctest::Approx(1.0));
}
