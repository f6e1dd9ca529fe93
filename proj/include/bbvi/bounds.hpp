#pragma once

#include <utility>

#include "bbvi/estimators.hpp"
#include "bbvi/family.hpp"

namespace bbvi {

// Quadratic-variance coefficients: E|g(lambda)|^2 <= alpha |lambda - opt|^2 + beta.
// The adaptive form keeps a free Peter-Paul parameter delta:
//   alpha = (1 + C delta) alpha_tilde,  beta = (1 + 1/(C delta)) beta_tilde,
// with the estimator's Peter-Paul constant C (1/2 for STL, 1 for CFE).
struct QvCoefficients {
  double alpha;
  double beta;
  double delta_used;
  double alpha_tilde;
  double beta_tilde;
};

// One evaluated bound: value = alpha * dist_sq + beta at the requested point,
// with the inputs echoed for reporting.
struct BoundReport {
  double bound_value;
  QvCoefficients coefficients;
  double dist_sq;
  int dim;
  double kurtosis;
  double l_smooth;
  double entropy_smoothness;
  double divergence_term;  // D_F4 at the optimum (STL) or |opt - mode|^2 (CFE)
};

// STL, full-rank:
//   alpha = (2 + delta) (L^2 (d + k) + S^2 (d + 1))
//   beta  = (1 + 2/delta) (2d + k) sqrt(D_F4)
// delta = 0 is allowed when D_F4 = 0 (interpolation regime).
BoundReport stl_upper_fullrank(int dim, double kurtosis, double l_smooth,
                               double entropy_smoothness, double delta,
                               double dist_sq, double d_f4_at_opt);

// STL, mean-field:
//   alpha = (2 + delta) (L^2 (2 k sqrt(d) + 1) + S^2 (sqrt(d k) + 1))
//   beta  = (1 + 2/delta) (1 + sqrt(d k)) sqrt(D_F4)
BoundReport stl_upper_meanfield(int dim, double kurtosis, double l_smooth,
                                double entropy_smoothness, double delta,
                                double dist_sq, double d_f4_at_opt);

// CFE, full-rank:
//   alpha = L^2 (d + k) (1 + delta) + (L + S)^2
//   beta  = L^2 (d + k) (1 + 1/delta) |opt - mode|^2
BoundReport cfe_upper_fullrank(int dim, double kurtosis, double l_smooth,
                               double entropy_smoothness, double delta,
                               double dist_sq, double dist_opt_mode_sq);

// CFE, mean-field. The L^2 factor multiplies the (2 k sqrt(d) + 1) terms
// in both coefficients:
//   alpha = L^2 (2 k sqrt(d) + 1) (1 + delta) + (L + S)^2
//   beta  = L^2 (2 k sqrt(d) + 1) (1 + 1/delta) |opt - mode|^2
BoundReport cfe_upper_meanfield(int dim, double kurtosis, double l_smooth,
                                double entropy_smoothness, double delta,
                                double dist_sq, double dist_opt_mode_sq);

// Chained STL lower bounds: E|g|^2 >= D_F >= (2 / C_LSI) KL.
// Returns {fisher_floor, kl_floor}.
std::pair<double, double> stl_lower_fisher(double fisher, double kl, double c_lsi);

// Worst-case STL lower bound at the ill-conditioned instance:
//   (L^2 (d + k) - 2 (d + 1)) |C~|_F^2 - 2 (k - 1) |m~ - mode|^2.
// May be negative for small L; callers compare against Monte Carlo only when
// it is positive.
double stl_lower_worstcase(int dim, double kurtosis, double l_smooth,
                           double scale_frobenius_sq, double mean_gap_sq);

// Optimal Peter-Paul parameter for the fixed-stepsize iteration count:
// delta = 2 beta_tilde / (alpha_tilde C eps). beta_tilde = 0 gives delta = 0.
double adaptive_delta_fixed(double alpha_tilde, double beta_tilde, double c_pp,
                            double epsilon);

// Optimal Peter-Paul parameter for the decreasing-stepsize iteration count:
// delta = sqrt(dist0) eps^{1/4} sqrt(alpha_tilde) / (sqrt(2) C sqrt(beta_tilde)).
// Undefined at beta_tilde = 0.
double adaptive_delta_decreasing(double alpha_tilde, double beta_tilde, double c_pp,
                                 double epsilon, double dist0);

// Adaptive QV constants of an estimator/family pair, as consumed by the
// complexity plans. `misfit` is sqrt(D_F4) at the optimum for STL and
// |opt - mode|^2 for CFE. For CFE the (L + S)^2 smoothness term is absorbed
// into alpha_tilde, which at S = L reduces to the familiar L^2 (d + k + 4).
struct AdaptiveQv {
  double alpha_tilde;
  double beta_tilde;
  double c_pp;
};

AdaptiveQv adaptive_qv_constants(EstimatorKind estimator, ScaleKind kind, int dim,
                                 double kurtosis, double l_smooth,
                                 double entropy_smoothness, double misfit);

// (alpha, beta) realized by a given delta.
QvCoefficients qv_at_delta(const AdaptiveQv& qv, double delta);

}  // namespace bbvi
