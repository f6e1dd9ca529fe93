#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bbvi/bounds.hpp"
#include "bbvi/domain.hpp"
#include "bbvi/estimators.hpp"

namespace bbvi {

// Stepsize rule: a constant gamma, or the strongly-convex decreasing schedule
// gamma_t = min(mu / (2 alpha), (4t + 2) / (mu (t + 1)^2)) with t zero-based.
class StepSchedule {
 public:
  enum class Kind { Fixed, Decreasing };

  static StepSchedule fixed(double gamma);
  static StepSchedule decreasing(double mu, double alpha);

  Kind kind() const { return kind_; }
  double fixed_gamma() const { return gamma_; }
  double mu() const { return mu_; }
  double alpha() const { return alpha_; }
  double at(long t) const;

 private:
  StepSchedule(Kind kind, double gamma, double mu, double alpha)
      : kind_(kind), gamma_(gamma), mu_(mu), alpha_(alpha) {}

  Kind kind_;
  double gamma_;
  double mu_;
  double alpha_;
};

// A planned run: the schedule plus the iteration count that the producing
// theorem certifies for accuracy epsilon, with inputs echoed.
struct StepPlan {
  StepSchedule schedule;
  long iterations;
  double epsilon;
  double mu;
  double alpha;
  double beta;
  double dist0;          // |lambda_0 - optimum| at planning time
  double delta_used;     // Peter-Paul parameter behind (alpha, beta), if any
  bool degenerate_log;   // epsilon >= 2 dist0^2 collapsed the log factor
};

struct TraceRecord {
  long t;
  double dist_sq;       // |lambda_t - optimum|^2, NaN without a reference optimum
  double grad_norm_sq;  // squared norm of the step gradient, NaN at the final record
  double elbo;          // negative ELBO estimate if requested, else NaN
};

struct Trace {
  std::vector<TraceRecord> records;  // length T + 1 including lambda_0
  std::vector<std::pair<long, VarParams>> snapshots;
  VarParams final_params;
  bool aborted = false;
  long aborted_at = -1;
};

struct SgdOptions {
  int batch = 1;
  std::optional<VarParams> optimum;  // enables dist_sq in the trace
  long record_every = 1;             // trace cadence; the final step always records
  long snapshot_every = 0;           // 0 = endpoints only
  long elbo_every = 0;               // 0 = never; uses elbo_samples draws
  long elbo_samples = 256;
};

// Projected SGD on the negative ELBO: lambda_{t+1} = proj(lambda_t + gamma_t g_t),
// where g_t is the batch-averaged estimator draw (the estimators carry the
// ELBO-ascent direction, i.e. minus the objective gradient). lambda_0 is
// projected first if infeasible. Gradient draws for step t use sample indices
// t * batch .. t * batch + batch - 1 of the seed's stream, so identical
// (seed, config) replays identically. A non-finite gradient or iterate aborts
// the run with a diagnostic record.
Trace sgd_run(const Target& target, EstimatorKind estimator, const VarParams& start,
              const DomainSpec& domain, const StepSchedule& schedule, long iterations,
              std::uint64_t seed, const SgdOptions& options = {});

// Fixed-stepsize plan for a QV estimator on a mu-strongly convex objective:
// gamma = min(eps mu / (4 beta), mu / (2 alpha), 2 / mu),
// T = ceil(max(4 beta / (mu^2 eps), 2 alpha / mu^2, 1/2) log(2 dist0^2 / eps)).
StepPlan fixed_stepsize_plan(double mu, double alpha, double beta, double epsilon,
                             double dist0);

// Decreasing-stepsize plan: T = ceil(16 beta / (mu^2 eps) + 8 alpha dist0 / (mu^2 sqrt(eps))).
StepPlan decreasing_stepsize_plan(double mu, double alpha, double beta, double epsilon,
                                  double dist0);

// Adaptive-QV fixed plan: gamma = min(mu / (2 (alpha~ + 2 beta~ / eps)), 2 / mu),
// T = ceil((2 / mu^2) max(alpha~ + 2 beta~ / eps, mu^2 / 4) log(2 dist0^2 / eps)).
StepPlan adaptive_fixed_plan(double mu, double alpha_tilde, double beta_tilde,
                             double c_pp, double epsilon, double dist0);

// Adaptive-QV decreasing plan:
// T = ceil(16 beta~ / (mu^2 eps) + 16 sqrt(2) sqrt(dist0) sqrt(alpha~ beta~) / (mu^2 eps^{3/4})
//          + 8 alpha~ dist0 / (mu^2 sqrt(eps))).
// Falls back to the plain decreasing plan when beta_tilde = 0.
StepPlan adaptive_decreasing_plan(double mu, double alpha_tilde, double beta_tilde,
                                  double c_pp, double epsilon, double dist0);

// Iteration count certified for BBVI on a kappa-conditioned strongly
// log-concave target. `misfit` is |mode-params - optimum|^2 for CFE and
// sqrt(D_F4 at the optimum) / L^2 for STL (pre-divided by the caller).
long bbvi_complexity(EstimatorKind estimator, StepSchedule::Kind schedule_kind,
                     double kappa, int dim, double kurtosis, double epsilon,
                     double dist0, double misfit);

}  // namespace bbvi
