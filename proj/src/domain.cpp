#include "bbvi/domain.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbvi {

VarParams project(const VarParams& params, const DomainSpec& domain) {
  if (params.kind() != domain.kind) {
    throw std::invalid_argument("project: scale kind mismatch");
  }
  VarParams out = params;
  const double tau = domain.threshold();
  for (int i = 0; i < out.dim(); ++i) {
    out.set_diag_entry(i, std::max(out.diag_entry(i), tau));
  }
  return out;
}

bool in_domain(const VarParams& params, const DomainSpec& domain) {
  const double tau = domain.threshold();
  for (int i = 0; i < params.dim(); ++i) {
    if (params.diag_entry(i) < tau) return false;
  }
  return true;
}

double param_distance(const VarParams& a, const VarParams& b) {
  if (a.kind() != b.kind() || a.dim() != b.dim()) {
    throw std::invalid_argument("param_distance: kind or dimension mismatch");
  }
  const double mean_sq = (a.mean() - b.mean()).squaredNorm();
  const double scale_sq = (a.scale() - b.scale()).squaredNorm();
  return std::sqrt(mean_sq + scale_sq);
}

}  // namespace bbvi
