#include "bbvi/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbvi {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

long ceil_to_count(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("step plan: iteration count is not finite");
  }
  if (value > 1e15) {
    throw std::invalid_argument("step plan: iteration count is absurdly large");
  }
  const long count = static_cast<long>(std::ceil(value));
  return count < 1 ? 1 : count;
}

void check_plan_inputs(double mu, double alpha, double beta, double epsilon,
                       double dist0) {
  if (!(mu > 0.0) || !(alpha > 0.0) || beta < 0.0 || !(epsilon > 0.0) || !(dist0 > 0.0)) {
    throw std::invalid_argument("step plan: need mu, alpha, epsilon, dist0 > 0 and beta >= 0");
  }
}

}  // namespace

StepSchedule StepSchedule::fixed(double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("StepSchedule: gamma must be >= 0");
  return StepSchedule(Kind::Fixed, gamma, 0.0, 0.0);
}

StepSchedule StepSchedule::decreasing(double mu, double alpha) {
  if (!(mu > 0.0) || alpha < 0.0) {
    throw std::invalid_argument("StepSchedule: need mu > 0 and alpha >= 0");
  }
  return StepSchedule(Kind::Decreasing, 0.0, mu, alpha);
}

double StepSchedule::at(long t) const {
  if (kind_ == Kind::Fixed) return gamma_;
  const double tt = static_cast<double>(t);
  const double anneal = (4.0 * tt + 2.0) / (mu_ * (tt + 1.0) * (tt + 1.0));
  if (alpha_ == 0.0) return anneal;
  return std::min(mu_ / (2.0 * alpha_), anneal);
}

Trace sgd_run(const Target& target, EstimatorKind estimator, const VarParams& start,
              const DomainSpec& domain, const StepSchedule& schedule, long iterations,
              std::uint64_t seed, const SgdOptions& options) {
  if (iterations < 0) throw std::invalid_argument("sgd_run: negative iteration count");
  if (options.batch < 1) throw std::invalid_argument("sgd_run: need batch >= 1");
  if (options.record_every < 1) throw std::invalid_argument("sgd_run: need record_every >= 1");
  if (options.optimum &&
      (options.optimum->kind() != start.kind() || options.optimum->dim() != start.dim())) {
    throw std::invalid_argument("sgd_run: optimum does not match start parameters");
  }

  VarParams current = in_domain(start, domain) ? start : project(start, domain);
  const double tau = domain.threshold();

  Trace trace{.records = {}, .snapshots = {}, .final_params = current};
  trace.records.reserve(static_cast<std::size_t>(iterations / options.record_every) + 2);

  auto dist_sq_now = [&](const VarParams& p) {
    if (!options.optimum) return kNan;
    const double dist = param_distance(p, *options.optimum);
    return dist * dist;
  };
  auto elbo_now = [&](const VarParams& p, long t) {
    if (options.elbo_every <= 0 || t % options.elbo_every != 0) return kNan;
    // Dedicated substream far from the gradient indices.
    return elbo_estimate(target, p, options.elbo_samples,
                         seed ^ 0x517CC1B727220A95ULL);
  };

  for (long t = 0; t < iterations; ++t) {
    if (options.snapshot_every > 0 && t % options.snapshot_every == 0) {
      trace.snapshots.emplace_back(t, current);
    }

    GradientSample grad = GradientSample::zero(current.kind(), current.dim());
    for (int b = 0; b < options.batch; ++b) {
      const std::uint64_t index =
          static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(options.batch) +
          static_cast<std::uint64_t>(b);
      const Eigen::VectorXd u = draw_base(current.dim(), seed, index);
      grad += estimator_grad(estimator, target, current, u);
    }
    grad *= 1.0 / static_cast<double>(options.batch);

    if (t % options.record_every == 0 || !grad.all_finite()) {
      trace.records.push_back(
          TraceRecord{t, dist_sq_now(current), grad.squared_norm(), elbo_now(current, t)});
    }

    if (!grad.all_finite()) {
      trace.aborted = true;
      trace.aborted_at = t;
      break;
    }

    // The estimators carry the ascent direction of the ELBO, so stepping
    // along them descends the negative-ELBO objective.
    const double gamma = schedule.at(t);
    current.mutable_mean() += gamma * grad.mean_block;
    current.mutable_scale() += gamma * grad.scale_block;
    for (int i = 0; i < current.dim(); ++i) {
      current.set_diag_entry(i, std::max(current.diag_entry(i), tau));
    }

    if (!current.all_finite()) {
      trace.aborted = true;
      trace.aborted_at = t;
      break;
    }
  }

  if (!trace.aborted) {
    trace.records.push_back(TraceRecord{iterations, dist_sq_now(current), kNan,
                                        elbo_now(current, iterations)});
  }
  if (options.snapshot_every > 0) trace.snapshots.emplace_back(iterations, current);
  trace.final_params = current;
  return trace;
}

StepPlan fixed_stepsize_plan(double mu, double alpha, double beta, double epsilon,
                             double dist0) {
  check_plan_inputs(mu, alpha, beta, epsilon, dist0);
  double gamma = std::min(mu / (2.0 * alpha), 2.0 / mu);
  if (beta > 0.0) gamma = std::min(gamma, epsilon * mu / (4.0 * beta));

  const double log_arg = 2.0 * dist0 * dist0 / epsilon;
  const bool degenerate = log_arg <= 1.0;
  long iterations = 1;
  if (!degenerate) {
    const double rate = std::max({4.0 * beta / (mu * mu * epsilon),
                                  2.0 * alpha / (mu * mu), 0.5});
    iterations = ceil_to_count(rate * std::log(log_arg));
  }
  return StepPlan{StepSchedule::fixed(gamma), iterations, epsilon, mu,    alpha,
                  beta,                       dist0,      kNan,    degenerate};
}

StepPlan decreasing_stepsize_plan(double mu, double alpha, double beta, double epsilon,
                                  double dist0) {
  check_plan_inputs(mu, alpha, beta, epsilon, dist0);
  const double iterations = 16.0 * beta / (mu * mu * epsilon) +
                            8.0 * alpha * dist0 / (mu * mu * std::sqrt(epsilon));
  return StepPlan{StepSchedule::decreasing(mu, alpha),
                  ceil_to_count(iterations),
                  epsilon,
                  mu,
                  alpha,
                  beta,
                  dist0,
                  kNan,
                  false};
}

StepPlan adaptive_fixed_plan(double mu, double alpha_tilde, double beta_tilde,
                             double c_pp, double epsilon, double dist0) {
  check_plan_inputs(mu, alpha_tilde, beta_tilde, epsilon, dist0);
  const double delta = adaptive_delta_fixed(alpha_tilde, beta_tilde, c_pp, epsilon);
  const double effective_alpha = alpha_tilde + 2.0 * beta_tilde / epsilon;
  const double gamma = std::min(0.5 * mu / effective_alpha, 2.0 / mu);

  const double log_arg = 2.0 * dist0 * dist0 / epsilon;
  const bool degenerate = log_arg <= 1.0;
  long iterations = 1;
  if (!degenerate) {
    const double rate =
        2.0 / (mu * mu) * std::max(effective_alpha, mu * mu / 4.0);
    iterations = ceil_to_count(rate * std::log(log_arg));
  }
  return StepPlan{StepSchedule::fixed(gamma), iterations, epsilon,    mu, alpha_tilde,
                  beta_tilde,                 dist0,      delta, degenerate};
}

StepPlan adaptive_decreasing_plan(double mu, double alpha_tilde, double beta_tilde,
                                  double c_pp, double epsilon, double dist0) {
  check_plan_inputs(mu, alpha_tilde, beta_tilde, epsilon, dist0);
  if (beta_tilde == 0.0) {
    return decreasing_stepsize_plan(mu, alpha_tilde, 0.0, epsilon, dist0);
  }
  const double delta =
      adaptive_delta_decreasing(alpha_tilde, beta_tilde, c_pp, epsilon, dist0);
  const double mu_sq = mu * mu;
  const double iterations =
      16.0 * beta_tilde / (mu_sq * epsilon) +
      16.0 * std::sqrt(2.0) * std::sqrt(dist0) * std::sqrt(alpha_tilde * beta_tilde) /
          (mu_sq * std::pow(epsilon, 0.75)) +
      8.0 * alpha_tilde * dist0 / (mu_sq * std::sqrt(epsilon));
  // The stepsize cap is mu / (2 alpha) at the delta-inflated alpha.
  const double effective_alpha = (1.0 + c_pp * delta) * alpha_tilde;
  return StepPlan{StepSchedule::decreasing(mu, effective_alpha),
                  ceil_to_count(iterations),
                  epsilon,
                  mu,
                  alpha_tilde,
                  beta_tilde,
                  dist0,
                  delta,
                  false};
}

long bbvi_complexity(EstimatorKind estimator, StepSchedule::Kind schedule_kind,
                     double kappa, int dim, double kurtosis, double epsilon,
                     double dist0, double misfit) {
  if (!(kappa >= 1.0) || dim < 1 || kurtosis < 1.0 || !(epsilon > 0.0) ||
      !(dist0 > 0.0) || misfit < 0.0) {
    throw std::invalid_argument("bbvi_complexity: bad input");
  }
  const double kappa_sq = kappa * kappa;
  if (schedule_kind == StepSchedule::Kind::Fixed) {
    const double log_arg = 2.0 * dist0 * dist0 / epsilon;
    if (log_arg <= 1.0) return 1;
    const double log_term = std::log(log_arg);
    if (estimator == EstimatorKind::Cfe) {
      return ceil_to_count(2.0 * kappa_sq * (dim + kurtosis + 4.0) *
                           (1.0 + 2.0 * misfit / epsilon) * log_term);
    }
    return ceil_to_count(8.0 * kappa_sq * (dim + kurtosis) *
                         (1.0 + misfit / epsilon) * log_term);
  }
  if (estimator == EstimatorKind::Cfe) {
    return ceil_to_count(16.0 * kappa_sq * (dim + kurtosis + 4.0) *
                         (misfit / epsilon +
                          2.0 * std::sqrt(dist0) * std::sqrt(misfit) /
                              std::pow(epsilon, 0.75) +
                          dist0 / std::sqrt(epsilon)));
  }
  return ceil_to_count(32.0 * kappa_sq * (dim + kurtosis) *
                       (misfit / epsilon +
                        std::sqrt(dist0 * misfit) /
                            (std::sqrt(2.0) * std::pow(epsilon, 0.75)) +
                        dist0 / std::sqrt(epsilon)));
}

}  // namespace bbvi
