#pragma once

#include <cmath>

#include "bbvi/family.hpp"

namespace bbvi {

// Feasible set of variational parameters: triangular scale with every
// diagonal entry at least 1/sqrt(S). On this set the entropy is S-Lipschitz
// smooth, so S is called the smoothness budget.
struct DomainSpec {
  double smoothness;
  ScaleKind kind;

  double threshold() const { return 1.0 / std::sqrt(smoothness); }
};

// Euclidean projection onto the feasible set: clamp each diagonal scale
// entry up to the threshold, leave the mean and off-diagonal entries alone.
// Costs Theta(d). Non-positive diagonals clamp up as well, so any input
// comes back a valid Cholesky factor.
VarParams project(const VarParams& params, const DomainSpec& domain);

bool in_domain(const VarParams& params, const DomainSpec& domain);

// Euclidean norm of the flat parameter difference:
// sqrt(|m - m'|^2 + |C - C'|_F^2) on the stored entries.
double param_distance(const VarParams& a, const VarParams& b);

}  // namespace bbvi
