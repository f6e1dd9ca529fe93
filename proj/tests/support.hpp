#pragma once

// Shared test utilities: independent oracles (finite differences, quadrature,
// Monte Carlo moment accumulators) and random problem generators. Everything
// here is deliberately implementation-independent of the library paths it
// checks: gradients come from central differences, integrals from Simpson's
// rule, and moments from raw draw loops.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "bbvi/domain.hpp"
#include "bbvi/family.hpp"
#include "bbvi/rng.hpp"
#include "bbvi/targets.hpp"

namespace testsupport {

// Central finite difference of a scalar function of a vector.
inline Eigen::VectorXd finite_difference(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double h = 1e-5) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (int i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

// Simpson's rule on [lo, hi] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      int n = 4000) {
  const double h = (hi - lo) / n;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Uniform in [lo, hi) from the library's substream generator; test-side
// randomness stays reproducible without depending on std:: distributions.
struct TestRng {
  bbvi::SubstreamRng rng;
  explicit TestRng(std::uint64_t seed) : rng(seed, 0x7E57) {}
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); }
  double gaussian() { return rng.next_gaussian(); }
  Eigen::VectorXd gaussian_vector(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.next_gaussian();
    return v;
  }
};

// Random SPD covariance with condition spread controlled by `spread`.
inline Eigen::MatrixXd random_spd(TestRng& rng, int d, double spread = 2.0) {
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.gaussian();
  Eigen::MatrixXd cov = a * a.transpose() / d;
  cov += Eigen::MatrixXd::Identity(d, d) / spread;
  return cov;
}

// Random feasible parameters in the S-domain: mean near zero, diagonals in
// [threshold, threshold + lift], full-rank off-diagonals small.
inline bbvi::VarParams random_feasible(TestRng& rng, bbvi::ScaleKind kind, int d,
                                       double smoothness, double mean_spread = 1.5,
                                       double lift = 1.0) {
  const double tau = 1.0 / std::sqrt(smoothness);
  Eigen::VectorXd mean(d);
  for (int i = 0; i < d; ++i) mean[i] = rng.uniform(-mean_spread, mean_spread);
  Eigen::VectorXd scale(bbvi::scale_entry_count(kind, d));
  if (kind == bbvi::ScaleKind::MeanField) {
    for (int i = 0; i < d; ++i) scale[i] = tau + rng.uniform(0.0, lift);
  } else {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < i; ++j) {
        scale[bbvi::VarParams::tril_index(i, j)] = rng.uniform(-0.4, 0.4);
      }
      scale[bbvi::VarParams::tril_index(i, i)] = tau + rng.uniform(0.0, lift);
    }
  }
  return bbvi::VarParams(kind, std::move(mean), std::move(scale));
}

// Running mean and standard error of a scalar stream.
struct MeanAccumulator {
  double mean = 0.0;
  double m2 = 0.0;
  long n = 0;
  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  double std_err() const { return std::sqrt(m2 / (n - 1.0) / n); }
};

// Least-squares line fit y ~ a + b x; returns {slope, r_squared}.
inline std::pair<double, double> line_fit(const std::vector<double>& x,
                                          const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double cov = sxy - sx * sy / n;
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double slope = cov / var_x;
  const double r2 = var_y == 0.0 ? 1.0 : cov * cov / (var_x * var_y);
  return {slope, r2};
}

}  // namespace testsupport
