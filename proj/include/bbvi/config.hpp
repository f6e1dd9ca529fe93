#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbvi {

enum class ExperimentKind {
  VarianceSweep,
  Converge,
  BoundsCheck,
  WorstCase,
  DivergenceTable,
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

// Configuration error with the offending key, mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration with dotted section keys. Parsing is
// strict: unknown keys, duplicate keys, and malformed values are errors.
// All referenced values are validated before any computation starts.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::VarianceSweep;

  std::uint64_t seed = 0;
  std::string out = "";  // empty = derive from experiment name
  int threads = 1;
  bool deterministic = false;

  // Target recipe. Exactly one of: spectrum (dim, kappa), equicorrelated
  // (dim, rho, variance), explicit covariance or Cholesky rows. The mean
  // defaults to zero and may be set explicitly for any recipe.
  int target_dim = 30;
  double target_kappa = 1.0;
  std::optional<double> target_rho;
  double target_variance = 1.0;
  std::optional<std::vector<double>> target_mean;
  std::optional<std::vector<std::vector<double>>> target_cov;
  std::optional<std::vector<std::vector<double>>> target_chol;

  bool family_mean_field = false;
  std::optional<double> domain_smoothness;  // default: the target's L

  std::vector<std::string> estimators = {"cfe", "stl"};
  long mc_samples = 1024;
  std::vector<double> epsilons = {1e-2, 1e-4};
  long fisher4_samples = 200000;

  int sweep_points = 20;
  double sweep_mean_radius = 2.0;
  double sweep_scale_factor = 3.0;

  double converge_epsilon = 0.1;
  int converge_seeds = 20;
  std::string converge_schedule = "fixed";  // fixed | decreasing
  int converge_batch = 1;
  long converge_t_override = 0;             // 0 = use the plan
  std::optional<double> converge_gamma_override;
  long converge_record_every = 0;           // 0 = auto (~2000 rows)

  std::vector<int> worstcase_dims = {2, 10};
  std::vector<double> worstcase_smoothness = {2.0, 10.0};
  long worstcase_samples = 100000;

  std::vector<int> bounds_dims = {2, 30};
  std::vector<double> bounds_kappas = {1.0, 10.0};
  int bounds_points = 50;

  std::vector<double> divergence_rhos = {0.0, 0.1, 0.2, 0.3, 0.4,
                                         0.5, 0.6, 0.7, 0.8, 0.9, 0.99};
  int divergence_dim = 2;

  // Keys that appeared in the source text, in canonical form.
  std::map<std::string, std::string> raw;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  // Canonical serialized form: sorted "key = value" lines of every key that
  // was explicitly set. parse(canonical()) round-trips.
  std::string canonical() const;

  void validate() const;
  std::string resolved_out() const;
};

}  // namespace bbvi
