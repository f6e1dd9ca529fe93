#include "bbvi/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace bbvi {
namespace {

void check_common(int dim, double kurtosis, double l_smooth, double entropy_smoothness,
                  double dist_sq, double divergence_term) {
  if (dim < 1) throw std::invalid_argument("bound: need dim >= 1");
  if (kurtosis < 1.0 || l_smooth < 0.0 || entropy_smoothness < 0.0 || dist_sq < 0.0 ||
      divergence_term < 0.0) {
    throw std::invalid_argument("bound: negative or out-of-range input");
  }
}

BoundReport make_report(double alpha, double beta, double delta, double alpha_tilde,
                        double beta_tilde, double dist_sq, int dim, double kurtosis,
                        double l_smooth, double entropy_smoothness,
                        double divergence_term) {
  return BoundReport{alpha * dist_sq + beta,
                     QvCoefficients{alpha, beta, delta, alpha_tilde, beta_tilde},
                     dist_sq,
                     dim,
                     kurtosis,
                     l_smooth,
                     entropy_smoothness,
                     divergence_term};
}

}  // namespace

BoundReport stl_upper_fullrank(int dim, double kurtosis, double l_smooth,
                               double entropy_smoothness, double delta, double dist_sq,
                               double d_f4_at_opt) {
  check_common(dim, kurtosis, l_smooth, entropy_smoothness, dist_sq, d_f4_at_opt);
  if (delta < 0.0 || (delta == 0.0 && d_f4_at_opt > 0.0)) {
    throw std::invalid_argument("stl_upper_fullrank: delta must be positive when D_F4 > 0");
  }
  const double alpha_tilde = 2.0 * (l_smooth * l_smooth * (dim + kurtosis) +
                                    entropy_smoothness * entropy_smoothness * (dim + 1));
  const double beta_tilde = (2.0 * dim + kurtosis) * std::sqrt(d_f4_at_opt);
  const double alpha = (1.0 + 0.5 * delta) * alpha_tilde;
  const double beta = beta_tilde == 0.0 ? 0.0 : (1.0 + 2.0 / delta) * beta_tilde;
  return make_report(alpha, beta, delta, alpha_tilde, beta_tilde, dist_sq, dim, kurtosis,
                     l_smooth, entropy_smoothness, d_f4_at_opt);
}

BoundReport stl_upper_meanfield(int dim, double kurtosis, double l_smooth,
                                double entropy_smoothness, double delta, double dist_sq,
                                double d_f4_at_opt) {
  check_common(dim, kurtosis, l_smooth, entropy_smoothness, dist_sq, d_f4_at_opt);
  if (delta < 0.0 || (delta == 0.0 && d_f4_at_opt > 0.0)) {
    throw std::invalid_argument("stl_upper_meanfield: delta must be positive when D_F4 > 0");
  }
  const double root_d = std::sqrt(static_cast<double>(dim));
  const double root_dk = std::sqrt(dim * kurtosis);
  const double alpha_tilde =
      2.0 * (l_smooth * l_smooth * (2.0 * kurtosis * root_d + 1.0) +
             entropy_smoothness * entropy_smoothness * (root_dk + 1.0));
  const double beta_tilde = (1.0 + root_dk) * std::sqrt(d_f4_at_opt);
  const double alpha = (1.0 + 0.5 * delta) * alpha_tilde;
  const double beta = beta_tilde == 0.0 ? 0.0 : (1.0 + 2.0 / delta) * beta_tilde;
  return make_report(alpha, beta, delta, alpha_tilde, beta_tilde, dist_sq, dim, kurtosis,
                     l_smooth, entropy_smoothness, d_f4_at_opt);
}

BoundReport cfe_upper_fullrank(int dim, double kurtosis, double l_smooth,
                               double entropy_smoothness, double delta, double dist_sq,
                               double dist_opt_mode_sq) {
  check_common(dim, kurtosis, l_smooth, entropy_smoothness, dist_sq, dist_opt_mode_sq);
  if (delta < 0.0 || (delta == 0.0 && dist_opt_mode_sq > 0.0)) {
    throw std::invalid_argument("cfe_upper_fullrank: delta must be positive");
  }
  const double energy = l_smooth * l_smooth * (dim + kurtosis);
  const double smooth_sq =
      (l_smooth + entropy_smoothness) * (l_smooth + entropy_smoothness);
  const double alpha = energy * (1.0 + delta) + smooth_sq;
  const double beta_tilde = energy * dist_opt_mode_sq;
  const double beta = beta_tilde == 0.0 ? 0.0 : (1.0 + 1.0 / delta) * beta_tilde;
  return make_report(alpha, beta, delta, alpha / (1.0 + delta), beta_tilde, dist_sq, dim,
                     kurtosis, l_smooth, entropy_smoothness, dist_opt_mode_sq);
}

BoundReport cfe_upper_meanfield(int dim, double kurtosis, double l_smooth,
                                double entropy_smoothness, double delta, double dist_sq,
                                double dist_opt_mode_sq) {
  check_common(dim, kurtosis, l_smooth, entropy_smoothness, dist_sq, dist_opt_mode_sq);
  if (delta < 0.0 || (delta == 0.0 && dist_opt_mode_sq > 0.0)) {
    throw std::invalid_argument("cfe_upper_meanfield: delta must be positive");
  }
  const double root_d = std::sqrt(static_cast<double>(dim));
  const double energy = l_smooth * l_smooth * (2.0 * kurtosis * root_d + 1.0);
  const double smooth_sq =
      (l_smooth + entropy_smoothness) * (l_smooth + entropy_smoothness);
  const double alpha = energy * (1.0 + delta) + smooth_sq;
  const double beta_tilde = energy * dist_opt_mode_sq;
  const double beta = beta_tilde == 0.0 ? 0.0 : (1.0 + 1.0 / delta) * beta_tilde;
  return make_report(alpha, beta, delta, alpha / (1.0 + delta), beta_tilde, dist_sq, dim,
                     kurtosis, l_smooth, entropy_smoothness, dist_opt_mode_sq);
}

std::pair<double, double> stl_lower_fisher(double fisher, double kl, double c_lsi) {
  if (fisher < 0.0 || kl < 0.0 || c_lsi < 0.0) {
    throw std::invalid_argument("stl_lower_fisher: negative input");
  }
  const double kl_floor = c_lsi == 0.0 ? 0.0 : 2.0 / c_lsi * kl;
  return {fisher, kl_floor};
}

double stl_lower_worstcase(int dim, double kurtosis, double l_smooth,
                           double scale_frobenius_sq, double mean_gap_sq) {
  if (dim < 1 || kurtosis < 1.0 || scale_frobenius_sq < 0.0 || mean_gap_sq < 0.0) {
    throw std::invalid_argument("stl_lower_worstcase: bad input");
  }
  if (!(l_smooth >= 1.0)) {
    throw std::invalid_argument("stl_lower_worstcase: the bound needs L >= 1");
  }
  return (l_smooth * l_smooth * (dim + kurtosis) - 2.0 * (dim + 1)) * scale_frobenius_sq -
         2.0 * (kurtosis - 1.0) * mean_gap_sq;
}

double adaptive_delta_fixed(double alpha_tilde, double beta_tilde, double c_pp,
                            double epsilon) {
  if (!(alpha_tilde > 0.0) || beta_tilde < 0.0 || !(c_pp > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("adaptive_delta_fixed: bad input");
  }
  if (beta_tilde == 0.0) return 0.0;
  return 2.0 * beta_tilde / (alpha_tilde * c_pp * epsilon);
}

double adaptive_delta_decreasing(double alpha_tilde, double beta_tilde, double c_pp,
                                 double epsilon, double dist0) {
  if (!(alpha_tilde > 0.0) || !(c_pp > 0.0) || !(epsilon > 0.0) || dist0 < 0.0) {
    throw std::invalid_argument("adaptive_delta_decreasing: bad input");
  }
  if (!(beta_tilde > 0.0)) {
    throw std::invalid_argument(
        "adaptive_delta_decreasing: undefined at beta_tilde = 0; use the plain plan");
  }
  return std::sqrt(dist0) * std::pow(epsilon, 0.25) * std::sqrt(alpha_tilde) /
         (std::sqrt(2.0) * c_pp * std::sqrt(beta_tilde));
}

AdaptiveQv adaptive_qv_constants(EstimatorKind estimator, ScaleKind kind, int dim,
                                 double kurtosis, double l_smooth,
                                 double entropy_smoothness, double misfit) {
  if (dim < 1 || kurtosis < 1.0 || !(l_smooth > 0.0) || !(entropy_smoothness > 0.0) ||
      misfit < 0.0) {
    throw std::invalid_argument("adaptive_qv_constants: bad input");
  }
  const double l_sq = l_smooth * l_smooth;
  const double s_sq = entropy_smoothness * entropy_smoothness;
  const double smooth_sq =
      (l_smooth + entropy_smoothness) * (l_smooth + entropy_smoothness);
  const double root_d = std::sqrt(static_cast<double>(dim));
  const double root_dk = std::sqrt(dim * kurtosis);
  if (estimator == EstimatorKind::Stl) {
    if (kind == ScaleKind::FullRank) {
      return AdaptiveQv{2.0 * (l_sq * (dim + kurtosis) + s_sq * (dim + 1)),
                        (2.0 * dim + kurtosis) * misfit, 0.5};
    }
    return AdaptiveQv{2.0 * (l_sq * (2.0 * kurtosis * root_d + 1.0) +
                             s_sq * (root_dk + 1.0)),
                      (1.0 + root_dk) * misfit, 0.5};
  }
  if (kind == ScaleKind::FullRank) {
    return AdaptiveQv{l_sq * (dim + kurtosis) + smooth_sq,
                      l_sq * (dim + kurtosis) * misfit, 1.0};
  }
  return AdaptiveQv{l_sq * (2.0 * kurtosis * root_d + 1.0) + smooth_sq,
                    l_sq * (2.0 * kurtosis * root_d + 1.0) * misfit, 1.0};
}

QvCoefficients qv_at_delta(const AdaptiveQv& qv, double delta) {
  if (delta < 0.0 || (delta == 0.0 && qv.beta_tilde > 0.0)) {
    throw std::invalid_argument("qv_at_delta: delta must be positive when beta_tilde > 0");
  }
  const double alpha = (1.0 + qv.c_pp * delta) * qv.alpha_tilde;
  const double beta =
      qv.beta_tilde == 0.0 ? 0.0 : (1.0 + 1.0 / (qv.c_pp * delta)) * qv.beta_tilde;
  return QvCoefficients{alpha, beta, delta, qv.alpha_tilde, qv.beta_tilde};
}

}  // namespace bbvi
