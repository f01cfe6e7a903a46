#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tikgamma/solve.hpp"
#include "tikgamma/tikhonov.hpp"

namespace tikgamma {

/// Finite-dimensional grids cannot tell norm, weak and weak* topologies apart; every report
/// carries this tag instead of pretending otherwise.
inline constexpr const char* kTopology = "norm (finite-dimensional collapse)";

/// Every consecutive pair among the last `tail` entries satisfies
/// v[i+1] <= (1 + slack) * v[i] + floor.
bool nonincreasing_tail(const std::vector<double>& values, std::size_t tail, double slack, double floor);

// ---------------------------------------------------------------------------------------------
// Convergence of infima and minimizers

struct InfConvergenceReport {
  std::vector<std::size_t> levels;
  std::vector<ExtReal> inf_values;
  ExtReal reference_min;
  std::vector<double> gaps;                 // |inf T_n - min T|
  std::vector<double> minimizer_distances;  // ||x_n - x*||_L2
  bool final_gap_ok = false;
  bool trend_ok = false;
  std::optional<bool> verdict;              // empty when a solve failed
  std::optional<std::size_t> failed_level;
  std::string failure;
  std::string topology = kTopology;
};

/// inf T_n per level against min T. The verdict needs the final gap <= tol and the gaps over the
/// last three levels nonincreasing within 10% slack (plus a 1e-12 absolute floor).
InfConvergenceReport inf_convergence_study(const TikhonovProblem& target, const ApproxSequence& seq,
                                           const std::vector<std::size_t>& levels,
                                           const SolveConfig& solver, double tol);

struct ChainOptions {
  std::function<double(std::size_t)> eps = [](std::size_t j) { return 1.0 / static_cast<double>(j); };
  std::size_t tail = 3;        // iterates in the Cauchy window
  double cauchy_tol = 5e-2;    // max pairwise L2 distance inside the window
  double value_tol = 1e-4;     // |T(x_inf) - T_J(x_J)|
};

struct ChainLink {
  std::size_t level = 0;
  double eps = 0.0;
  GridFunction x;
  ExtReal value;         // T_j(x_j)
  ExtReal inf_estimate;  // inf T_j from the oracle (or the solver when no oracle applies)
  bool certified = false;
  bool in_domain = false;
};

struct ChainReport {
  std::vector<ChainLink> links;
  bool cluster_found = false;
  double tail_diameter = 0.0;
  std::optional<GridFunction> cluster_point;
  ExtReal limit_value;  // T(x_inf)
  double value_gap = 0.0;
  std::optional<bool> verdict;  // empty: diagnostics outcome, no cluster point at tested levels
  std::string diagnostic;
  std::string topology = kTopology;
};

/// Builds eps_j-minimizers x_j of T_j (j = 1-based position in `levels`) with the projected
/// gradient solver, certifies each against inf T_j, and looks for a cluster point.
ChainReport eps_minimizer_chain(const TikhonovProblem& target, const ApproxSequence& seq,
                                const std::vector<std::size_t>& levels, const SolveConfig& solver,
                                const ChainOptions& options = {});

// ---------------------------------------------------------------------------------------------
// Gamma-limits on a grid

/// j -> f_j sampled on `nodes` equispaced points of [lo, hi].
struct IndexedFamily {
  std::string label;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t nodes = 2;
  std::function<double(std::size_t, double)> eval;

  double spacing() const { return (hi - lo) / static_cast<double>(nodes - 1); }
  double node(std::size_t i) const;

  static IndexedFamily oscillating_sine(std::size_t nodes);  // sin(j x) on [0, 2 pi]
  static IndexedFamily constant(double c, std::size_t nodes, double lo = 0.0, double hi = 1.0);
  /// f(x) + 1/j with a continuous base f.
  static IndexedFamily uniform_shift(std::function<double(double)> base, std::string label,
                                     std::size_t nodes, double lo = 0.0, double hi = 1.0);
};

struct GammaOptions {
  std::size_t window = 512;     // J
  double tail_fraction = 0.5;   // liminf/limsup over j in (J - tail_fraction J, J]
  double stabilization_tol = 1e-2;
};

struct GammaEstimate {
  double point = 0.0;
  std::vector<double> radii;
  std::vector<double> liminf;  // per radius: min over the tail of the neighborhood infimum
  std::vector<double> limsup;  // per radius: max over the tail of the neighborhood infimum
  double lower = 0.0;          // Gamma-liminf estimate at the smallest radius
  double upper = 0.0;          // Gamma-limsup estimate at the smallest radius
  bool stabilized = false;     // last two radii agree within stabilization_tol
  double sequential = 0.0;     // liminf f_j(x_j) along shrinking-neighborhood minimizers x_j -> x
};

/// Neighborhoods are the grid nodes within distance r of x. Radii must be strictly decreasing
/// and at least the grid spacing (ResolutionError otherwise).
GammaEstimate estimate_gamma_limits(const IndexedFamily& family, double x, const std::vector<double>& radii,
                                    const GammaOptions& options = {});

// ---------------------------------------------------------------------------------------------
// Coercivity, alpha -> 0, scaling

struct CoercivityProbe {
  std::vector<std::size_t> levels;
  std::vector<double> thresholds;
  double alpha_floor = 0.0;                  // delta = inf_n alpha_n
  std::vector<std::vector<bool>> inclusion;  // [level][threshold]: no violation
  std::size_t samples = 0;
  std::size_t audited = 0;     // (sample, level, threshold) triples with T_n(x) <= t
  std::size_t violations = 0;
  std::optional<double> minimizer_bound;  // sup ||m_n|| over supplied minimizers
  bool verdict = false;
};

/// Audits {T_n <= t} in {Omega <= t/delta}. Refuses (RefusedError) when the alpha schedule tends
/// to zero; throws ContractError if some alpha_n <= 0.
CoercivityProbe equi_coercivity_probe(const ApproxSequence& seq, const std::vector<std::size_t>& levels,
                                      const std::vector<GridFunction>& samples,
                                      const std::vector<double>& thresholds,
                                      const std::vector<GridFunction>& minimizers = {});

struct AlphaZeroOptions {
  double tol = 1e-3;          // final ||x_n - x_dagger||
  double omega_slack = 0.10;  // Omega(x_n) <= (1 + slack) Omega(x_dagger) on the last three levels
};

struct AlphaZeroReport {
  std::vector<std::size_t> levels;
  std::vector<double> alphas;
  std::vector<double> data_ratios;      // ||y_n - y|| / alpha_n^(1/p)
  std::vector<double> operator_ratios;  // ||F_n(x_dagger) - F(x_dagger)|| / alpha_n^(1/p)
  std::vector<double> distances;        // ||x_n - x_dagger||
  std::vector<double> omega_values;     // Omega(x_n)
  GridFunction x_dagger;
  double omega_dagger = 0.0;
  bool omega_audit = false;
  bool verdict = false;
  std::string topology = kTopology;
};

/// Minimizers of (1/alpha_n) T_n against the minimum-penalty solution x_dagger. Refuses when y is
/// not in the range of F or when either ratio fails to decay over the tested levels.
AlphaZeroReport alpha_zero_study(const ApproxSequence& seq, const std::vector<std::size_t>& levels,
                                 const SolveConfig& solver, const AlphaZeroOptions& options = {});

/// True when the measured ratios decay: all (numerically) zero, or last < first with a negative
/// log-log slope.
bool ratios_decay(const std::vector<std::size_t>& levels, const std::vector<double>& ratios);

struct ScalingOptions {
  double identity_tol = 1e-12;  // relative, inf(lambda_n T_n) vs lambda_n inf(T_n)
  double argmin_tol = 1e-6;     // ||argmin(lambda_n T_n) - argmin(T_n)||
  double limit_tol = 1e-8;      // relative, min(lambda T) vs lambda min T
};

struct ScalingReport {
  std::vector<std::size_t> levels;
  std::vector<double> lambdas;
  std::vector<double> infs;            // inf T_n
  std::vector<double> scaled_infs;     // inf (lambda_n T_n), minimized independently
  std::vector<double> identity_errors; // relative
  std::vector<double> argmin_shifts;
  std::vector<double> scaled_gaps;     // |inf(lambda_n T_n) - min(lambda T)|
  double lambda_limit = 0.0;
  double reference_min = 0.0;
  double scaled_reference_min = 0.0;
  double limit_error = 0.0;
  bool identity_ok = false;
  bool argmin_ok = false;
  bool limit_ok = false;
  bool verdict = false;
};

/// (lambda_n T_n) against (T_n) for lambda_n -> lambda > 0. lambda = 0 or a non-finite lambda is
/// an indeterminate form and throws UnsupportedError.
ScalingReport scaling_invariance_check(const ApproxSequence& seq, const Schedule& lambda,
                                       const std::vector<std::size_t>& levels, const SolveConfig& solver,
                                       const ScalingOptions& options = {});

/// lambda * T as its own TikhonovProblem (p = 2: operator and data scaled by sqrt(lambda)).
TikhonovProblem scaled_problem(const TikhonovProblem& problem, double lambda);

}  // namespace tikgamma
