#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tikgamma/forward.hpp"
#include "tikgamma/tikhonov.hpp"

namespace tikgamma {

struct SolveConfig {
  std::size_t max_iter = 20000;
  double grad_tol = 1e-10;
  double initial_step = 1.0;
  double shrink = 0.5;                 // backtracking factor in (0,1)
  double sufficient_decrease = 1e-4;   // Armijo constant in (0,1)
  std::size_t restarts = 0;
  /// Stop as soon as the objective drops to this value (used to produce eps-minimizers).
  std::optional<double> stop_below;

  void validate() const;
};

enum class SolveStatus { converged, max_iter, infeasible, target_reached };

std::string to_string(SolveStatus status);

struct SolveResult {
  GridFunction minimizer;
  ExtReal value;
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::converged;
  double grad_norm_final = 0.0;
  std::vector<double> history;  // objective value after every accepted iterate
};

/// Smooth objective on one grid. `gradient` returns the Riesz representer in the discrete L2
/// inner product of the input grid.
struct Objective {
  std::function<double(const GridFunction&)> value;
  std::function<GridFunction(const GridFunction&)> gradient;
  bool smooth = true;
};

/// T without its domain constraint. Needs a dense operator; the discrepancy gradient is
/// ||r||^(p-2) F* r with the weighted adjoint F* = W_X^{-1} F^T W_Y.
Objective tikhonov_objective(const TikhonovProblem& problem);

/// Minimizes 1/2 ||A x - y||^2 + alpha/2 ||x - x0||^2 through the weighted normal equations
/// (A^T W_Y A + alpha W_X) x = A^T W_Y y + alpha W_X x0. At alpha = 0 a rank-deficient A yields
/// status infeasible rather than an arbitrary least-squares point.
SolveResult solve_linear_quadratic(const LinearMap& map, const GridFunction& y, double alpha,
                                   const std::optional<GridFunction>& x0_shift = std::nullopt);

/// Closed-form minimizer of a linear-quadratic TikhonovProblem.
SolveResult solve_linear_quadratic(const TikhonovProblem& problem);

/// Projected gradient with Barzilai-Borwein trial steps and Armijo backtracking along the
/// projection arc. Accepted values never increase.
SolveResult projected_gradient(const Objective& objective, const DomainSpec& domain,
                               const SolveConfig& config, const GridFunction& x0);

/// Minimizer of a TikhonovProblem: the closed form when it applies, projected gradient from
/// the projection of zero otherwise.
SolveResult minimize(const TikhonovProblem& problem, const SolveConfig& config);

/// Minimum-norm solution of A x = y. Runs the alpha ladder 1e-2, 1e-3, ..., 1e-10 and combines
/// the last three iterates by Richardson extrapolation in alpha. Inconsistent y (least-squares
/// residual above 1e-8) gives status infeasible.
SolveResult min_penalty_solution(const LinearMap& map, const GridFunction& y,
                                 const PenaltySpec& penalty = PenaltySpec::half_sq_l2());

/// Max deviation between the analytic gradient and central differences, relative to the
/// largest gradient component.
double grad_check(const Objective& objective, const GridFunction& x, double h_fd);

}  // namespace tikgamma
