#include "bbvi/family.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bbvi/rng.hpp"

namespace bbvi {

double BaseDistribution::entropy_constant(int dim) {
  return 0.5 * dim * (1.0 + std::log(2.0 * std::numbers::pi));
}

VarParams::VarParams(ScaleKind kind, Eigen::VectorXd mean, Eigen::VectorXd scale)
    : kind_(kind), mean_(std::move(mean)), scale_(std::move(scale)) {
  const int d = static_cast<int>(mean_.size());
  if (scale_.size() != scale_entry_count(kind_, d)) {
    throw std::invalid_argument("VarParams: scale storage size does not match kind/dim");
  }
}

VarParams VarParams::identity(ScaleKind kind, int dim) {
  Eigen::VectorXd scale = Eigen::VectorXd::Zero(scale_entry_count(kind, dim));
  if (kind == ScaleKind::MeanField) {
    scale.setOnes();
  } else {
    for (int i = 0; i < dim; ++i) scale[tril_index(i, i)] = 1.0;
  }
  return VarParams(kind, Eigen::VectorXd::Zero(dim), std::move(scale));
}

VarParams VarParams::full_rank(Eigen::VectorXd mean, const Eigen::MatrixXd& scale_tril) {
  const int d = static_cast<int>(mean.size());
  if (scale_tril.rows() != d || scale_tril.cols() != d) {
    throw std::invalid_argument("VarParams: scale matrix dimension mismatch");
  }
  Eigen::VectorXd scale(scale_entry_count(ScaleKind::FullRank, d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) scale[tril_index(i, j)] = scale_tril(i, j);
  }
  return VarParams(ScaleKind::FullRank, std::move(mean), std::move(scale));
}

VarParams VarParams::mean_field(Eigen::VectorXd mean, Eigen::VectorXd scale_diag) {
  if (scale_diag.size() != mean.size()) {
    throw std::invalid_argument("VarParams: diagonal scale dimension mismatch");
  }
  return VarParams(ScaleKind::MeanField, std::move(mean), std::move(scale_diag));
}

double VarParams::diag_entry(int i) const {
  return kind_ == ScaleKind::FullRank ? scale_[tril_index(i, i)] : scale_[i];
}

void VarParams::set_diag_entry(int i, double value) {
  if (kind_ == ScaleKind::FullRank) {
    scale_[tril_index(i, i)] = value;
  } else {
    scale_[i] = value;
  }
}

Eigen::MatrixXd VarParams::scale_matrix() const {
  const int d = dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  if (kind_ == ScaleKind::MeanField) {
    m.diagonal() = scale_;
  } else {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j <= i; ++j) m(i, j) = scale_[tril_index(i, j)];
    }
  }
  return m;
}

Eigen::VectorXd VarParams::apply_scale(const Eigen::VectorXd& u) const {
  const int d = dim();
  if (u.size() != d) throw std::invalid_argument("apply_scale: dimension mismatch");
  if (kind_ == ScaleKind::MeanField) return scale_.cwiseProduct(u);
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    const int row = tril_index(i, 0);
    for (int j = 0; j <= i; ++j) acc += scale_[row + j] * u[j];
    out[i] = acc;
  }
  return out;
}

Eigen::VectorXd VarParams::solve_scale(const Eigen::VectorXd& v) const {
  const int d = dim();
  if (v.size() != d) throw std::invalid_argument("solve_scale: dimension mismatch");
  if (kind_ == ScaleKind::MeanField) return v.cwiseQuotient(scale_);
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    double acc = v[i];
    const int row = tril_index(i, 0);
    for (int j = 0; j < i; ++j) acc -= scale_[row + j] * out[j];
    out[i] = acc / scale_[row + i];
  }
  return out;
}

Eigen::VectorXd VarParams::solve_scale_transpose(const Eigen::VectorXd& v) const {
  const int d = dim();
  if (v.size() != d) throw std::invalid_argument("solve_scale_transpose: dimension mismatch");
  if (kind_ == ScaleKind::MeanField) return v.cwiseQuotient(scale_);
  Eigen::VectorXd out(d);
  for (int i = d - 1; i >= 0; --i) {
    double acc = v[i];
    for (int j = i + 1; j < d; ++j) acc -= scale_[tril_index(j, i)] * out[j];
    out[i] = acc / scale_[tril_index(i, i)];
  }
  return out;
}

Eigen::VectorXd VarParams::flat() const {
  Eigen::VectorXd out(mean_.size() + scale_.size());
  out << mean_, scale_;
  return out;
}

VarParams VarParams::from_flat(ScaleKind kind, int dim, const Eigen::VectorXd& flat) {
  const int n_scale = scale_entry_count(kind, dim);
  if (flat.size() != dim + n_scale) {
    throw std::invalid_argument("from_flat: flat vector size mismatch");
  }
  return VarParams(kind, flat.head(dim), flat.tail(n_scale));
}

bool VarParams::all_finite() const {
  return mean_.allFinite() && scale_.allFinite();
}

GradientSample GradientSample::zero(ScaleKind kind, int dim) {
  return GradientSample{Eigen::VectorXd::Zero(dim),
                        Eigen::VectorXd::Zero(scale_entry_count(kind, dim))};
}

GradientSample& GradientSample::operator+=(const GradientSample& other) {
  mean_block += other.mean_block;
  scale_block += other.scale_block;
  return *this;
}

GradientSample& GradientSample::operator*=(double factor) {
  mean_block *= factor;
  scale_block *= factor;
  return *this;
}

Eigen::VectorXd reparameterize(const VarParams& params, const Eigen::VectorXd& u) {
  if (u.size() != params.dim()) {
    throw std::invalid_argument("reparameterize: dimension mismatch");
  }
  return params.apply_scale(u) + params.mean();
}

Eigen::VectorXd draw_base(int dim, std::uint64_t seed, std::uint64_t index) {
  SubstreamRng rng(seed, index);
  Eigen::VectorXd u(dim);
  for (int i = 0; i < dim; ++i) u[i] = rng.next_gaussian();
  return u;
}

std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> sample(
    const VarParams& params, long count, std::uint64_t seed) {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    Eigen::VectorXd u = draw_base(params.dim(), seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXd z = reparameterize(params, u);
    out.emplace_back(std::move(u), std::move(z));
  }
  return out;
}

double log_density(const VarParams& params, const Eigen::VectorXd& z) {
  const int d = params.dim();
  const Eigen::VectorXd w = params.solve_scale(z - params.mean());
  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += std::log(params.diag_entry(i));
  return -0.5 * w.squaredNorm() - 0.5 * d * std::log(2.0 * std::numbers::pi) - log_det;
}

Eigen::VectorXd score(const VarParams& params, const Eigen::VectorXd& z) {
  return -params.solve_scale_transpose(params.solve_scale(z - params.mean()));
}

double entropy(const VarParams& params) {
  double log_det = 0.0;
  for (int i = 0; i < params.dim(); ++i) log_det += std::log(params.diag_entry(i));
  return log_det + BaseDistribution::entropy_constant(params.dim());
}

GradientSample entropy_grad(const VarParams& params) {
  GradientSample g = GradientSample::zero(params.kind(), params.dim());
  for (int i = 0; i < params.dim(); ++i) {
    const double inv = 1.0 / params.diag_entry(i);
    if (params.kind() == ScaleKind::FullRank) {
      g.scale_block[VarParams::tril_index(i, i)] = inv;
    } else {
      g.scale_block[i] = inv;
    }
  }
  return g;
}

double j_factor(const Eigen::VectorXd& u, ScaleKind kind) {
  if (kind == ScaleKind::FullRank) return 1.0 + u.squaredNorm();
  return 1.0 + std::sqrt(u.array().square().square().sum());
}

}  // namespace bbvi
