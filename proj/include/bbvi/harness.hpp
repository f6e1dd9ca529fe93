#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "bbvi/config.hpp"
#include "bbvi/csv.hpp"
#include "bbvi/domain.hpp"
#include "bbvi/optimizer.hpp"
#include "bbvi/targets.hpp"

namespace bbvi {

// Numerical failure (non-finite values), mapped to exit code 3 by the CLI.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentResult {
  csv::Table table;
  nlohmann::json meta;  // resolved config + resolved constants sidecar
};

// Shared setup resolved from a config: the target, family kind, domain and
// the analytic optimum.
struct ResolvedProblem {
  GaussianTarget target;
  ScaleKind kind;
  RegularityConstants constants;
  DomainSpec domain;
  VarParams optimum;
};

ResolvedProblem resolve_problem(const ExperimentConfig& cfg);

// Distant feasible start: optimum with the mean shifted along e1 by
// sweep.mean_radius and the scale multiplied by sweep.scale_factor, projected.
VarParams far_params(const ResolvedProblem& problem, const ExperimentConfig& cfg);

// Derived substream seed for a named work unit.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

ExperimentResult run_variance_sweep(const ExperimentConfig& cfg);
ExperimentResult run_convergence(const ExperimentConfig& cfg);
ExperimentResult run_bounds_check(const ExperimentConfig& cfg);
ExperimentResult run_worst_case(const ExperimentConfig& cfg);
ExperimentResult run_divergence_table(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV to cfg.resolved_out(), JSON sidecar to the same path + ".meta.json".
void write_result(const ExperimentResult& result, const ExperimentConfig& cfg);

}  // namespace bbvi
