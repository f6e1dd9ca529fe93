#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bbvi/family.hpp"
#include "support.hpp"

using namespace bbvi;
using testsupport::TestRng;

namespace {

VarParams tril2(double m0, double m1, double c00, double c10, double c11) {
  Eigen::MatrixXd c(2, 2);
  c << c00, 0.0, c10, c11;
  return VarParams::full_rank(Eigen::Vector2d(m0, m1), c);
}

}  // namespace

TEST_CASE("reparameterize maps base draws through C u + m") {
  const VarParams identity = VarParams::identity(ScaleKind::FullRank, 2);
  CHECK(reparameterize(identity, Eigen::Vector2d(1, 2)).isApprox(Eigen::Vector2d(1, 2)));

  const VarParams diag =
      VarParams::mean_field(Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 3));
  CHECK(reparameterize(diag, Eigen::Vector2d(1, -1)).isApprox(Eigen::Vector2d(3, -2)));

  const VarParams tri = tril2(0, 0, 1, 1, 1);
  CHECK(reparameterize(tri, Eigen::Vector2d(1, 1)).isApprox(Eigen::Vector2d(1, 2)));

  CHECK_THROWS_AS(reparameterize(tri, Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
}

TEST_CASE("base draws are determined by (seed, index)") {
  const Eigen::VectorXd a = draw_base(5, 42, 7);
  const Eigen::VectorXd b = draw_base(5, 42, 7);
  CHECK(a == b);
  CHECK(draw_base(5, 42, 8) != a);
  CHECK(draw_base(5, 43, 7) != a);
}

TEST_CASE("base stream is standardized") {
  const int d = 3;
  const long n = 1000000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd u = draw_base(d, 11, static_cast<std::uint64_t>(i));
    sum += u;
    outer += u * u.transpose();
  }
  const Eigen::VectorXd mean = sum / n;
  const Eigen::MatrixXd cov = outer / n - mean * mean.transpose();
  const double band = 4.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < d; ++i) CHECK(std::abs(mean[i]) < band);
  CHECK((cov - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("log_density matches hand values and normalizes") {
  const VarParams std1 = VarParams::identity(ScaleKind::FullRank, 1);
  CHECK(log_density(std1, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));

  const VarParams wide =
      VarParams::mean_field(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 2.0));
  CHECK(log_density(wide, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - std::log(2.0))
            .epsilon(1e-12));

  const VarParams q = VarParams::mean_field(Eigen::VectorXd::Constant(1, 0.3),
                                            Eigen::VectorXd::Constant(1, 1.7));
  const double mass = testsupport::simpson(
      [&](double z) { return std::exp(log_density(q, Eigen::VectorXd::Constant(1, z))); },
      -20.0, 20.0, 8000);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("score is the z-gradient of log_density") {
  const VarParams q2 = VarParams::identity(ScaleKind::FullRank, 2);
  CHECK(score(q2, Eigen::Vector2d(1, -1)).isApprox(Eigen::Vector2d(-1, 1)));

  TestRng rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    for (ScaleKind kind : {ScaleKind::FullRank, ScaleKind::MeanField}) {
      const VarParams q = testsupport::random_feasible(rng, kind, 3, 1.0);
      CHECK(score(q, q.mean()).norm() == doctest::Approx(0.0).epsilon(1e-14));
      const Eigen::VectorXd z = q.mean() + rng.gaussian_vector(3);
      const Eigen::VectorXd numeric = testsupport::finite_difference(
          [&](const Eigen::VectorXd& x) { return log_density(q, x); }, z);
      CHECK((score(q, z) - numeric).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("entropy and its gradient") {
  const VarParams unit = VarParams::identity(ScaleKind::FullRank, 1);
  CHECK(entropy(unit) ==
        doctest::Approx(0.5 * (1.0 + std::log(2.0 * std::numbers::pi))).epsilon(1e-12));
  CHECK(entropy_grad(unit).scale_block[0] == doctest::Approx(1.0));

  const VarParams two =
      VarParams::mean_field(Eigen::VectorXd::Zero(2), Eigen::Vector2d(2, 4));
  CHECK(entropy(two) ==
        doctest::Approx(std::log(8.0) + BaseDistribution::entropy_constant(2))
            .epsilon(1e-12));
  CHECK(entropy_grad(two).scale_block.isApprox(Eigen::Vector2d(0.5, 0.25)));
  CHECK(entropy_grad(two).mean_block.isZero());

  TestRng rng(4);
  for (ScaleKind kind : {ScaleKind::FullRank, ScaleKind::MeanField}) {
    const VarParams q = testsupport::random_feasible(rng, kind, 3, 2.0);
    const Eigen::VectorXd numeric = testsupport::finite_difference(
        [&](const Eigen::VectorXd& flat) {
          return entropy(VarParams::from_flat(kind, 3, flat));
        },
        q.flat(), 1e-5);
    GradientSample grad = entropy_grad(q);
    Eigen::VectorXd analytic(numeric.size());
    analytic << grad.mean_block, grad.scale_block;
    CHECK((analytic - numeric).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("j_factor per family") {
  CHECK(j_factor(Eigen::Vector2d(0, 0), ScaleKind::FullRank) == doctest::Approx(1.0));
  CHECK(j_factor(Eigen::Vector2d(0, 0), ScaleKind::MeanField) == doctest::Approx(1.0));
  CHECK(j_factor(Eigen::Vector2d(1, 1), ScaleKind::FullRank) == doctest::Approx(3.0));
  CHECK(j_factor(Eigen::Vector2d(1, 1), ScaleKind::MeanField) ==
        doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("base moment identities hold at Monte Carlo resolution") {
  const int d = 3;
  const long n = 1000000;
  const double k_phi = BaseDistribution{}.kurtosis;
  // Per-entry accumulators so each check carries its own standard error.
  testsupport::MeanAccumulator norm_sq;
  testsupport::MeanAccumulator outer_diag[3], outer_off;
  testsupport::MeanAccumulator skew_term[3];
  testsupport::MeanAccumulator fourth_diag[3], fourth_off;
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd u = draw_base(d, 77, static_cast<std::uint64_t>(i));
    norm_sq.add(u.squaredNorm());
    for (int j = 0; j < d; ++j) outer_diag[j].add(u[j] * u[j]);
    outer_off.add(u[0] * u[1]);
    const double one_plus = 1.0 + u.squaredNorm();
    for (int j = 0; j < d; ++j) skew_term[j].add(u[j] * one_plus);
    const Eigen::VectorXd w = u * u.squaredNorm();
    for (int j = 0; j < d; ++j) fourth_diag[j].add(u[j] * w[j]);
    fourth_off.add(u[0] * w[1]);
  }
  auto within = [](const testsupport::MeanAccumulator& acc, double expect) {
    return std::abs(acc.mean - expect) <= 5.0 * acc.std_err();
  };
  CHECK(within(norm_sq, static_cast<double>(d)));
  for (int j = 0; j < d; ++j) CHECK(within(outer_diag[j], 1.0));
  CHECK(within(outer_off, 0.0));
  for (int j = 0; j < d; ++j) CHECK(within(skew_term[j], 0.0));
  for (int j = 0; j < d; ++j) CHECK(within(fourth_diag[j], (d - 1) + k_phi));
  CHECK(within(fourth_off, 0.0));
}

TEST_CASE("Jacobian factor identity for quadratic functions") {
  // f(z) = a^T z + z^T B z / 2 with the gradient taken over the full scale
  // matrix: the squared parameter-gradient norm equals J_T |grad f|^2
  // exactly. Restricting the scale gradient to the diagonal turns the
  // mean-field identity into an upper bound.
  TestRng rng(5);
  const int d = 4;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd a = rng.gaussian_vector(d);
    Eigen::MatrixXd b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) b(i, j) = rng.gaussian();
    b = ((b + b.transpose()) / 2.0).eval();
    const VarParams q = testsupport::random_feasible(rng, ScaleKind::FullRank, d, 1.0);
    const Eigen::VectorXd u = rng.gaussian_vector(d);
    const Eigen::VectorXd z = reparameterize(q, u);
    const Eigen::VectorXd grad_f = a + b * z;

    const double full_matrix_norm_sq =
        grad_f.squaredNorm() + (grad_f * u.transpose()).squaredNorm();
    const double via_identity = j_factor(u, ScaleKind::FullRank) * grad_f.squaredNorm();
    CHECK(full_matrix_norm_sq == doctest::Approx(via_identity).epsilon(1e-10));

    const double diag_norm_sq =
        grad_f.squaredNorm() + grad_f.cwiseProduct(u).squaredNorm();
    CHECK(diag_norm_sq <=
          j_factor(u, ScaleKind::MeanField) * grad_f.squaredNorm() + 1e-10);
  }
}

TEST_CASE("norm-distance identity, full-rank") {
  TestRng rng(6);
  const int d = 3;
  const double k_phi = BaseDistribution{}.kurtosis;
  const VarParams q = testsupport::random_feasible(rng, ScaleKind::FullRank, d, 1.0);
  const Eigen::VectorXd anchor = rng.gaussian_vector(d);
  const double expect = (d + 1) * (q.mean() - anchor).squaredNorm() +
                        (d + k_phi) * q.scale().squaredNorm();
  testsupport::MeanAccumulator acc;
  const long n = 200000;
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd u = draw_base(d, 99, static_cast<std::uint64_t>(i));
    acc.add(j_factor(u, ScaleKind::FullRank) *
            (reparameterize(q, u) - anchor).squaredNorm());
  }
  CHECK(std::abs(acc.mean - expect) <= 5.0 * acc.std_err());
}

TEST_CASE("entropy gradient is S-Lipschitz on the feasible set") {
  TestRng rng(7);
  const double smoothness = 3.0;
  for (ScaleKind kind : {ScaleKind::FullRank, ScaleKind::MeanField}) {
    for (int rep = 0; rep < 1000; ++rep) {
      const VarParams a = testsupport::random_feasible(rng, kind, 4, smoothness);
      const VarParams b = testsupport::random_feasible(rng, kind, 4, smoothness);
      const GradientSample ga = entropy_grad(a);
      const GradientSample gb = entropy_grad(b);
      const double grad_dist =
          std::sqrt((ga.mean_block - gb.mean_block).squaredNorm() +
                    (ga.scale_block - gb.scale_block).squaredNorm());
      CHECK(grad_dist <= smoothness * param_distance(a, b) + 1e-12);
    }
  }
}
