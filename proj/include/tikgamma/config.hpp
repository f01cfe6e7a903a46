#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tikgamma/solve.hpp"

namespace tikgamma {

enum class StudyKind { fem_rate, integral_demo, inf_study, alpha_zero, gamma_estimate, coercivity, eps_chain };

std::string to_string(StudyKind kind);

/// Everything a study run needs. parse_config fills unspecified keys with per-study defaults.
struct StudyConfig {
  StudyKind study = StudyKind::fem_rate;

  struct Problem {
    std::string operator_kind = "integral";  // integral | fem | identity
    std::string family = "approximate";      // approximate | exact
    std::string kernel = "gaussian";         // constant | separable | gaussian
    double sigma = 0.2;
    double kappa = 1.0;
    std::string potential = "one";           // zero | one | sin_pi | custom-table
    std::vector<double> potential_table;
    std::string solution = "sin_pi";         // manufactured solution: sin_pi | quadratic
    std::string truth = "sin_pi";            // x used to synthesize y = F(x): sin_pi | ramp | bump | zero
    std::size_t reference = 2049;            // m_ref (integral) or n_ref (fem)
    std::size_t x_nodes = 33;
    std::string domain = "whole";            // whole | ball | ball_nonneg
    double radius = 1.0;
    std::string domain_norm = "L2";
    bool strict_subdomain = false;
  } problem;

  struct Schedule {
    std::vector<std::size_t> levels;
    std::string alpha = "offset_power";  // constant | power | offset_power
    double alpha_limit = 0.1;
    double alpha_amplitude = 1.0;
    double alpha_exponent = 1.0;
    std::string noise = "power";         // none | power | random
    double noise_amplitude = 1.0;
    double noise_exponent = 1.0;
    double p = 2.0;
    std::string penalty = "half_sq_l2";  // half_sq_l2 | linf | p_power_norm
    double penalty_q = 2.0;
    std::string penalty_norm = "L2";
    double eps_scale = 1.0;              // eps_j = eps_scale / j
  } schedule;

  struct Study {
    double tol = 1e-6;
    double slope_min = -2.2;
    double slope_max = -1.8;
    std::string family = "oscillating";  // gamma-estimate: oscillating | constant | uniform
    double constant_value = 0.0;
    std::size_t grid = 4096;
    std::size_t window = 512;
    std::vector<double> points;
    std::vector<double> radii;
    std::size_t samples = 1000;
    std::vector<double> thresholds;
    double cauchy_tol = 5e-2;
    double value_tol = 1e-4;
  } study_params;

  SolveConfig solver;

  struct Output {
    std::string format = "csv";  // csv | json-lines
    std::string path = "-";      // "-" is standard output
    std::uint64_t seed = 0;
    bool timing = false;         // wall_time_ms is 0 unless enabled, keeping reports byte-stable
  } output;
};

struct ConfigError {
  std::size_t line = 0;  // 0 when the error is not tied to one line
  std::string message;
};

std::string format_error(const ConfigError& error);

struct ParseResult {
  std::optional<StudyConfig> config;
  std::vector<ConfigError> errors;  // every problem found, not only the first

  bool ok() const { return config.has_value() && errors.empty(); }
};

/// INI-style text: `key = value` lines, `[section]` headers, `#` or `;` comments. Keys before the
/// first header belong to the top level, which holds `study`.
ParseResult parse_config(const std::string& text);

}  // namespace tikgamma
