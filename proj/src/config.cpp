#include "bbvi/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "bbvi/csv.hpp"

namespace bbvi {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "experiment",
      "seed",
      "out",
      "threads",
      "deterministic",
      "target.dim",
      "target.kappa",
      "target.rho",
      "target.variance",
      "target.mean",
      "target.cov",
      "target.chol",
      "family.kind",
      "domain.smoothness",
      "estimators",
      "mc.samples",
      "epsilons",
      "fisher4.samples",
      "sweep.points",
      "sweep.mean_radius",
      "sweep.scale_factor",
      "converge.epsilon",
      "converge.seeds",
      "converge.schedule",
      "converge.batch",
      "converge.t_override",
      "converge.gamma_override",
      "converge.record_every",
      "worstcase.dims",
      "worstcase.smoothness",
      "worstcase.samples",
      "bounds.dims",
      "bounds.kappas",
      "bounds.points",
      "divergence.rhos",
      "divergence.dim",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto result = std::from_chars(v.data(), v.data() + v.size(), out);
  if (result.ec != std::errc() || result.ptr != v.data() + v.size()) {
    throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
  }
  return out;
}

long parse_long(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long out = 0;
  const auto result = std::from_chars(v.data(), v.data() + v.size(), out);
  if (result.ec != std::errc() || result.ptr != v.data() + v.size()) {
    throw ConfigError("config: bad integer value for " + key + ": '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto result = std::from_chars(v.data(), v.data() + v.size(), out);
  if (result.ec != std::errc() || result.ptr != v.data() + v.size()) {
    throw ConfigError("config: bad unsigned value for " + key + ": '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean value for " + key + ": '" + value + "'");
}

std::vector<std::string> split(const std::string& value, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!value.empty() && value.back() == sep) out.push_back("");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split(value, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const auto& item : split(value, ','))
    out.push_back(static_cast<int>(parse_long(key, item)));
  if (out.empty()) throw ConfigError("config: empty list for " + key);
  return out;
}

std::vector<std::vector<double>> parse_matrix(const std::string& key,
                                              const std::string& value) {
  std::vector<std::vector<double>> out;
  for (const auto& row : split(value, ';')) out.push_back(parse_double_list(key, row));
  return out;
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += csv::format_double(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

std::string join_matrix(const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out += ';';
    out += join_doubles(rows[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += values[i];
  }
  return out;
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::VarianceSweep: return "variance-sweep";
    case ExperimentKind::Converge: return "converge";
    case ExperimentKind::BoundsCheck: return "bounds-check";
    case ExperimentKind::WorstCase: return "worst-case";
    case ExperimentKind::DivergenceTable: return "divergence-table";
  }
  return "unknown";
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "variance-sweep") return ExperimentKind::VarianceSweep;
  if (name == "converge") return ExperimentKind::Converge;
  if (name == "bounds-check") return ExperimentKind::BoundsCheck;
  if (name == "worst-case") return ExperimentKind::WorstCase;
  if (name == "divergence-table") return ExperimentKind::DivergenceTable;
  throw ConfigError("config: unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " has no '='");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
    if (cfg.raw.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }

    if (key == "experiment") {
      cfg.experiment = experiment_from_name(value);
      cfg.raw[key] = value;
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
      cfg.raw[key] = std::to_string(cfg.seed);
    } else if (key == "out") {
      cfg.out = value;
      cfg.raw[key] = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.threads);
    } else if (key == "deterministic") {
      cfg.deterministic = parse_bool(key, value);
      cfg.raw[key] = cfg.deterministic ? "true" : "false";
    } else if (key == "target.dim") {
      cfg.target_dim = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.target_dim);
    } else if (key == "target.kappa") {
      cfg.target_kappa = parse_double(key, value);
      cfg.raw[key] = csv::format_double(cfg.target_kappa);
    } else if (key == "target.rho") {
      cfg.target_rho = parse_double(key, value);
      cfg.raw[key] = csv::format_double(*cfg.target_rho);
    } else if (key == "target.variance") {
      cfg.target_variance = parse_double(key, value);
      cfg.raw[key] = csv::format_double(cfg.target_variance);
    } else if (key == "target.mean") {
      cfg.target_mean = parse_double_list(key, value);
      cfg.raw[key] = join_doubles(*cfg.target_mean);
    } else if (key == "target.cov") {
      cfg.target_cov = parse_matrix(key, value);
      cfg.raw[key] = join_matrix(*cfg.target_cov);
    } else if (key == "target.chol") {
      cfg.target_chol = parse_matrix(key, value);
      cfg.raw[key] = join_matrix(*cfg.target_chol);
    } else if (key == "family.kind") {
      if (value == "meanfield") {
        cfg.family_mean_field = true;
      } else if (value == "fullrank") {
        cfg.family_mean_field = false;
      } else {
        throw ConfigError("config: family.kind must be fullrank or meanfield");
      }
      cfg.raw[key] = value;
    } else if (key == "domain.smoothness") {
      cfg.domain_smoothness = parse_double(key, value);
      cfg.raw[key] = csv::format_double(*cfg.domain_smoothness);
    } else if (key == "estimators") {
      cfg.estimators = split(value, ',');
      cfg.raw[key] = join_strings(cfg.estimators);
    } else if (key == "mc.samples") {
      cfg.mc_samples = parse_long(key, value);
      cfg.raw[key] = std::to_string(cfg.mc_samples);
    } else if (key == "epsilons") {
      cfg.epsilons = parse_double_list(key, value);
      cfg.raw[key] = join_doubles(cfg.epsilons);
    } else if (key == "fisher4.samples") {
      cfg.fisher4_samples = parse_long(key, value);
      cfg.raw[key] = std::to_string(cfg.fisher4_samples);
    } else if (key == "sweep.points") {
      cfg.sweep_points = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.sweep_points);
    } else if (key == "sweep.mean_radius") {
      cfg.sweep_mean_radius = parse_double(key, value);
      cfg.raw[key] = csv::format_double(cfg.sweep_mean_radius);
    } else if (key == "sweep.scale_factor") {
      cfg.sweep_scale_factor = parse_double(key, value);
      cfg.raw[key] = csv::format_double(cfg.sweep_scale_factor);
    } else if (key == "converge.epsilon") {
      cfg.converge_epsilon = parse_double(key, value);
      cfg.raw[key] = csv::format_double(cfg.converge_epsilon);
    } else if (key == "converge.seeds") {
      cfg.converge_seeds = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.converge_seeds);
    } else if (key == "converge.schedule") {
      if (value != "fixed" && value != "decreasing") {
        throw ConfigError("config: converge.schedule must be fixed or decreasing");
      }
      cfg.converge_schedule = value;
      cfg.raw[key] = value;
    } else if (key == "converge.batch") {
      cfg.converge_batch = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.converge_batch);
    } else if (key == "converge.t_override") {
      cfg.converge_t_override = parse_long(key, value);
      cfg.raw[key] = std::to_string(cfg.converge_t_override);
    } else if (key == "converge.gamma_override") {
      cfg.converge_gamma_override = parse_double(key, value);
      cfg.raw[key] = csv::format_double(*cfg.converge_gamma_override);
    } else if (key == "converge.record_every") {
      cfg.converge_record_every = parse_long(key, value);
      cfg.raw[key] = std::to_string(cfg.converge_record_every);
    } else if (key == "worstcase.dims") {
      cfg.worstcase_dims = parse_int_list(key, value);
      cfg.raw[key] = join_ints(cfg.worstcase_dims);
    } else if (key == "worstcase.smoothness") {
      cfg.worstcase_smoothness = parse_double_list(key, value);
      cfg.raw[key] = join_doubles(cfg.worstcase_smoothness);
    } else if (key == "worstcase.samples") {
      cfg.worstcase_samples = parse_long(key, value);
      cfg.raw[key] = std::to_string(cfg.worstcase_samples);
    } else if (key == "bounds.dims") {
      cfg.bounds_dims = parse_int_list(key, value);
      cfg.raw[key] = join_ints(cfg.bounds_dims);
    } else if (key == "bounds.kappas") {
      cfg.bounds_kappas = parse_double_list(key, value);
      cfg.raw[key] = join_doubles(cfg.bounds_kappas);
    } else if (key == "bounds.points") {
      cfg.bounds_points = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.bounds_points);
    } else if (key == "divergence.rhos") {
      cfg.divergence_rhos = parse_double_list(key, value);
      cfg.raw[key] = join_doubles(cfg.divergence_rhos);
    } else if (key == "divergence.dim") {
      cfg.divergence_dim = static_cast<int>(parse_long(key, value));
      cfg.raw[key] = std::to_string(cfg.divergence_dim);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : raw) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (target_dim < 1) throw ConfigError("config: target.dim must be >= 1");
  if (!(target_kappa >= 1.0)) throw ConfigError("config: target.kappa must be >= 1");
  if (!(target_variance > 0.0)) throw ConfigError("config: target.variance must be > 0");

  int recipes = 0;
  if (target_rho) ++recipes;
  if (target_cov) ++recipes;
  if (target_chol) ++recipes;
  if (recipes > 1) {
    throw ConfigError("config: target.rho, target.cov, target.chol are mutually exclusive");
  }
  if (recipes > 0 && raw.count("target.kappa")) {
    throw ConfigError("config: target.kappa conflicts with an explicit target recipe");
  }
  auto check_matrix = [&](const std::vector<std::vector<double>>& m, const char* key) {
    if (static_cast<int>(m.size()) != target_dim) {
      throw ConfigError(std::string("config: ") + key + " row count must equal target.dim");
    }
    for (const auto& row : m) {
      if (static_cast<int>(row.size()) != target_dim) {
        throw ConfigError(std::string("config: ") + key + " must be square");
      }
    }
  };
  if (target_cov) check_matrix(*target_cov, "target.cov");
  if (target_chol) check_matrix(*target_chol, "target.chol");
  if (target_mean && static_cast<int>(target_mean->size()) != target_dim) {
    throw ConfigError("config: target.mean length must equal target.dim");
  }

  if (domain_smoothness && !(*domain_smoothness > 0.0)) {
    throw ConfigError("config: domain.smoothness must be > 0");
  }
  if (estimators.empty()) throw ConfigError("config: estimators must be non-empty");
  for (const auto& e : estimators) {
    if (e != "cfe" && e != "stl") {
      throw ConfigError("config: unknown estimator '" + e + "'");
    }
  }
  if (mc_samples < 2) throw ConfigError("config: mc.samples must be >= 2");
  if (fisher4_samples < 2) throw ConfigError("config: fisher4.samples must be >= 2");
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw ConfigError("config: epsilons must be > 0");
  }
  if (epsilons.empty()) throw ConfigError("config: epsilons must be non-empty");
  if (sweep_points < 2) throw ConfigError("config: sweep.points must be >= 2");
  if (!(sweep_mean_radius >= 0.0) || !(sweep_scale_factor > 0.0)) {
    throw ConfigError("config: bad sweep path parameters");
  }
  if (!(converge_epsilon > 0.0)) throw ConfigError("config: converge.epsilon must be > 0");
  if (converge_seeds < 1) throw ConfigError("config: converge.seeds must be >= 1");
  if (converge_batch < 1) throw ConfigError("config: converge.batch must be >= 1");
  if (converge_t_override < 0) throw ConfigError("config: converge.t_override must be >= 0");
  if (converge_gamma_override && !(*converge_gamma_override >= 0.0)) {
    throw ConfigError("config: converge.gamma_override must be >= 0");
  }
  if (converge_record_every < 0) {
    throw ConfigError("config: converge.record_every must be >= 0");
  }
  for (int d : worstcase_dims) {
    if (d < 2) throw ConfigError("config: worstcase.dims entries must be >= 2");
  }
  for (double l : worstcase_smoothness) {
    if (!(l >= 1.0)) throw ConfigError("config: worstcase.smoothness entries must be >= 1");
  }
  if (worstcase_samples < 2) throw ConfigError("config: worstcase.samples must be >= 2");
  for (int d : bounds_dims) {
    if (d < 1) throw ConfigError("config: bounds.dims entries must be >= 1");
  }
  for (double k : bounds_kappas) {
    if (!(k >= 1.0)) throw ConfigError("config: bounds.kappas entries must be >= 1");
  }
  if (bounds_points < 1) throw ConfigError("config: bounds.points must be >= 1");
  if (divergence_dim < 2) throw ConfigError("config: divergence.dim must be >= 2");
  for (double rho : divergence_rhos) {
    if (!(rho > -1.0 / (divergence_dim - 1) && rho < 1.0)) {
      throw ConfigError("config: divergence.rhos entries out of the SPD range");
    }
  }
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
}

std::string ExperimentConfig::resolved_out() const {
  if (!out.empty()) return out;
  return std::string(experiment_name(experiment)) + ".csv";
}

}  // namespace bbvi
