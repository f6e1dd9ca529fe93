#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace bbvi {

enum class ScaleKind { FullRank, MeanField };

// Number of stored scale entries: the lower triangle for full-rank, the
// diagonal for mean-field.
inline int scale_entry_count(ScaleKind kind, int dim) {
  return kind == ScaleKind::FullRank ? dim * (dim + 1) / 2 : dim;
}

// Base distribution of the location-scale family. Fixed to the standard
// Gaussian, but the kurtosis is carried explicitly so that every bound
// formula takes it as an input instead of hardcoding 3.
struct BaseDistribution {
  double kurtosis = 3.0;

  // Additive entropy constant h(d) of the standardized base, i.e. the
  // entropy of N(0, I_d).
  static double entropy_constant(int dim);
};

// Variational parameter lambda = (m, C). The scale is stored flat: row-major
// lower triangle for full-rank, diagonal for mean-field. The flat parameter
// vector is the concatenation of the mean and the stored scale entries, and
// all parameter-space norms are Euclidean on that concatenation.
class VarParams {
 public:
  VarParams(ScaleKind kind, Eigen::VectorXd mean, Eigen::VectorXd scale);

  static VarParams identity(ScaleKind kind, int dim);
  static VarParams full_rank(Eigen::VectorXd mean, const Eigen::MatrixXd& scale_tril);
  static VarParams mean_field(Eigen::VectorXd mean, Eigen::VectorXd scale_diag);

  ScaleKind kind() const { return kind_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  Eigen::VectorXd& mutable_mean() { return mean_; }
  Eigen::VectorXd& mutable_scale() { return scale_; }

  // Index of entry (i, j), j <= i, in the flat scale storage (full-rank).
  static int tril_index(int i, int j) { return i * (i + 1) / 2 + j; }

  double diag_entry(int i) const;
  void set_diag_entry(int i, double value);

  Eigen::MatrixXd scale_matrix() const;

  // C * u without materializing the matrix.
  Eigen::VectorXd apply_scale(const Eigen::VectorXd& u) const;
  // C^{-1} v by forward substitution.
  Eigen::VectorXd solve_scale(const Eigen::VectorXd& v) const;
  // C^{-T} v by back substitution.
  Eigen::VectorXd solve_scale_transpose(const Eigen::VectorXd& v) const;

  // Concatenated (mean, scale) vector and its inverse.
  Eigen::VectorXd flat() const;
  static VarParams from_flat(ScaleKind kind, int dim, const Eigen::VectorXd& flat);

  bool all_finite() const;

 private:
  ScaleKind kind_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

// One draw of a gradient estimator, split into the mean block and the scale
// block. The scale block uses the same flat storage layout as VarParams.
struct GradientSample {
  Eigen::VectorXd mean_block;
  Eigen::VectorXd scale_block;

  static GradientSample zero(ScaleKind kind, int dim);

  double squared_norm() const {
    return mean_block.squaredNorm() + scale_block.squaredNorm();
  }
  bool all_finite() const {
    return mean_block.allFinite() && scale_block.allFinite();
  }

  GradientSample& operator+=(const GradientSample& other);
  GradientSample& operator*=(double factor);
};

// T_lambda(u) = C u + m.
Eigen::VectorXd reparameterize(const VarParams& params, const Eigen::VectorXd& u);

// Base draw for sample index `index` of stream `seed`: d i.i.d. standard
// normals, independent of how indices are batched.
Eigen::VectorXd draw_base(int dim, std::uint64_t seed, std::uint64_t index);

// n reparameterized pairs (u_i, z_i), i = 0..n-1.
std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> sample(
    const VarParams& params, long count, std::uint64_t seed);

// Exact log density of N(m, C C^T) at z; triangular solve, no explicit inverse.
double log_density(const VarParams& params, const Eigen::VectorXd& z);

// grad_z log q_lambda(z) = -C^{-T} C^{-1} (z - m).
Eigen::VectorXd score(const VarParams& params, const Eigen::VectorXd& z);

// H(q_lambda) = sum_i log C_ii + h(d).
double entropy(const VarParams& params);

// Gradient of the entropy in parameter space: zero mean block, zero
// off-diagonal scale, 1 / C_ii on the diagonal.
GradientSample entropy_grad(const VarParams& params);

// Family-dependent Jacobian factor: 1 + sum u_i^2 for full-rank,
// 1 + sqrt(sum u_i^4) for mean-field.
double j_factor(const Eigen::VectorXd& u, ScaleKind kind);

}  // namespace bbvi
