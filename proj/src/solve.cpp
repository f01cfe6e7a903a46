#include "tikgamma/solve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <memory>

#include "tikgamma/error.hpp"

namespace tikgamma {

namespace {

Eigen::VectorXd to_eigen(const GridFunction& g) {
  return Eigen::Map<const Eigen::VectorXd>(g.values().data(), static_cast<Eigen::Index>(g.size()));
}

GridFunction from_eigen(const GridSpec& grid, const Eigen::VectorXd& v) {
  return {grid, std::vector<double>(v.data(), v.data() + v.size())};
}

Eigen::VectorXd weights_of(const GridSpec& grid) {
  const auto w = grid.weights();
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

}  // namespace

void SolveConfig::validate() const {
  if (max_iter == 0) throw ContractError("max_iter must be positive");
  if (!(grad_tol > 0.0)) throw ContractError("grad_tol must be positive");
  if (!(initial_step > 0.0)) throw ContractError("initial_step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw ContractError("shrink must lie in (0,1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
    throw ContractError("sufficient_decrease must lie in (0,1)");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::target_reached: return "target_reached";
  }
  return "?";
}

Objective tikhonov_objective(const TikhonovProblem& problem) {
  problem.validate();
  const auto& lin = problem.op.linear_map();
  if (!lin) throw UnsupportedError("gradient needs a dense realization of '" + problem.op.label() + "'");

  const Eigen::VectorXd wx = weights_of(lin->input);
  const Eigen::VectorXd wy = weights_of(lin->output);
  auto adjoint = std::make_shared<const Eigen::MatrixXd>(
      wx.cwiseInverse().asDiagonal() * lin->matrix.transpose() * wy.asDiagonal());

  auto value = [problem](const GridFunction& x) {
    const double fit = discrepancy(problem, x);
    return problem.alpha == 0.0 ? fit : fit + problem.alpha * problem.penalty.value(x);
  };
  auto gradient = [problem, adjoint](const GridFunction& x) {
    const GridFunction r = problem.op.apply(x) - problem.data;
    double scale = 1.0;
    if (problem.exponent_p != 2.0) {
      const double rn = norm(r, NormTag::L2);
      scale = rn == 0.0 ? 0.0 : std::pow(rn, problem.exponent_p - 2.0);
    }
    Eigen::VectorXd g = scale * ((*adjoint) * to_eigen(r));
    GridFunction out = from_eigen(x.grid(), g);
    if (problem.alpha != 0.0) out = axpy(out, problem.alpha, problem.penalty.gradient(x));
    return out;
  };
  return {value, gradient, problem.penalty.smooth() || problem.alpha == 0.0};
}

SolveResult solve_linear_quadratic(const LinearMap& map, const GridFunction& y, double alpha,
                                   const std::optional<GridFunction>& x0_shift) {
  if (!(alpha >= 0.0)) throw ContractError("alpha must be >= 0");
  if (!(y.grid() == map.output)) throw ContractError("solve_linear_quadratic: data grid mismatch");
  if (x0_shift && !(x0_shift->grid() == map.input))
    throw ContractError("solve_linear_quadratic: shift grid mismatch");

  const Eigen::MatrixXd& a = map.matrix;
  const Eigen::VectorXd wx = weights_of(map.input);
  const Eigen::VectorXd wy = weights_of(map.output);
  const Eigen::VectorXd yv = to_eigen(y);

  const Eigen::MatrixXd atw = a.transpose() * wy.asDiagonal();
  Eigen::MatrixXd system = atw * a;
  Eigen::VectorXd rhs = atw * yv;
  if (alpha > 0.0) {
    system.diagonal() += alpha * wx;
    if (x0_shift) rhs += alpha * wx.cwiseProduct(to_eigen(*x0_shift));
  }

  SolveResult result{GridFunction::zeros(map.input), ExtReal::pos_inf(), 0, SolveStatus::infeasible, 0.0, {}};
  Eigen::VectorXd x;
  if (alpha == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(system);
    qr.setThreshold(1e-12);
    if (qr.rank() < system.cols()) return result;
    x = qr.solve(rhs);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) throw NumericalError("normal equations are not positive definite");
    x = llt.solve(rhs);
  }

  const double scale = std::max(rhs.norm(), system.norm() * x.norm());
  const double residual = (system * x - rhs).norm();
  if (scale > 0.0 && residual > 1e-10 * scale)
    throw NumericalError("normal-equation residual above 1e-10 relative");

  const Eigen::VectorXd r = a * x - yv;
  double value = 0.5 * r.dot(wy.cwiseProduct(r));
  if (alpha > 0.0) {
    const Eigen::VectorXd d = x0_shift ? Eigen::VectorXd(x - to_eigen(*x0_shift)) : x;
    value += 0.5 * alpha * d.dot(wx.cwiseProduct(d));
  }
  result.minimizer = from_eigen(map.input, x);
  result.value = value;
  result.status = SolveStatus::converged;
  return result;
}

SolveResult solve_linear_quadratic(const TikhonovProblem& problem) {
  problem.validate();
  if (!problem.linear_quadratic())
    throw UnsupportedError("closed-form solve needs p = 2, a quadratic penalty, whole-space domain and a dense operator");
  std::optional<GridFunction> shift;
  if (problem.penalty.kind == PenaltySpec::Kind::shifted_half_sq) shift = problem.penalty.shift;
  return solve_linear_quadratic(*problem.op.linear_map(), problem.data, problem.alpha, shift);
}

SolveResult projected_gradient(const Objective& objective, const DomainSpec& domain,
                               const SolveConfig& config, const GridFunction& x0) {
  config.validate();
  if (!objective.smooth) throw UnsupportedError("projected_gradient needs a smooth objective");
  if (!membership(domain, x0))
    return {x0, ExtReal::pos_inf(), 0, SolveStatus::infeasible, HUGE_VAL, {}};

  GridFunction x = x0;
  double f = objective.value(x);
  GridFunction g = objective.gradient(x);
  double step = config.initial_step;
  std::vector<double> history{f};

  auto projected_gradient_norm = [&] { return norm(x - project(domain, x - g), NormTag::L2); };

  const std::size_t budget = config.max_iter * (config.restarts + 1);
  std::size_t it = 0;
  SolveStatus status = SolveStatus::max_iter;
  double pg = projected_gradient_norm();
  for (;; ++it) {
    if (pg <= config.grad_tol) {
      status = SolveStatus::converged;
      break;
    }
    if (config.stop_below && f <= *config.stop_below) {
      status = SolveStatus::target_reached;
      break;
    }
    if (it == budget) break;
    if (it > 0 && it % config.max_iter == 0) step = config.initial_step;

    double t = step;
    bool accepted = false;
    GridFunction z = x;
    double fz = f, dd = 0.0;
    while (t > 1e-30) {
      z = project(domain, axpy(x, -t, g));
      const GridFunction d = z - x;
      dd = inner_l2(d, d);
      if (dd == 0.0) break;
      fz = objective.value(z);
      const double required = config.sufficient_decrease / t * dd;
      // When the required decrease is below the resolution of f, accept any non-increase.
      const bool resolved = required > 1e-15 * std::abs(f);
      if (fz <= f - required || (!resolved && fz <= f)) {
        accepted = true;
        break;
      }
      t *= config.shrink;
    }
    if (!accepted) {
      // Stalled at working precision: converged if the stationarity measure is at roundoff scale.
      if (pg <= 1e-8 * std::max(1.0, norm(x, NormTag::L2))) status = SolveStatus::converged;
      break;
    }

    const GridFunction gz = objective.gradient(z);
    const GridFunction s = z - x;
    const double sy = inner_l2(s, gz - g);
    step = sy > 0.0 ? std::clamp(dd / sy, 1e-12, 1e12) : config.initial_step;
    x = z;
    f = fz;
    g = gz;
    history.push_back(f);
    pg = projected_gradient_norm();
  }
  return {x, f, it, status, pg, std::move(history)};
}

SolveResult minimize(const TikhonovProblem& problem, const SolveConfig& config) {
  if (problem.linear_quadratic()) return solve_linear_quadratic(problem);
  const GridFunction start = project(problem.domain, GridFunction::zeros(problem.op.input_grid()));
  return projected_gradient(tikhonov_objective(problem), problem.domain, config, start);
}

SolveResult min_penalty_solution(const LinearMap& map, const GridFunction& y, const PenaltySpec& penalty) {
  if (penalty.kind != PenaltySpec::Kind::half_sq_l2)
    throw UnsupportedError("min_penalty_solution supports the half_sq_l2 penalty only");
  if (!(y.grid() == map.output)) throw ContractError("min_penalty_solution: data grid mismatch");

  SolveResult infeasible{GridFunction::zeros(map.input), ExtReal::pos_inf(), 0, SolveStatus::infeasible, 0.0, {}};

  // Consistency: weighted least-squares residual.
  const Eigen::VectorXd sqrt_wy = weights_of(map.output).cwiseSqrt();
  const Eigen::MatrixXd scaled = sqrt_wy.asDiagonal() * map.matrix;
  const Eigen::VectorXd target = sqrt_wy.cwiseProduct(to_eigen(y));
  const Eigen::VectorXd ls = scaled.colPivHouseholderQr().solve(target);
  const double ls_residual = (scaled * ls - target).norm();
  infeasible.grad_norm_final = ls_residual;
  if (ls_residual > 1e-8) return infeasible;

  // Work in the Euclidean frame B = W_Y^{1/2} A W_X^{-1/2}, where the ladder is an SVD filter.
  const Eigen::VectorXd sqrt_wx = weights_of(map.input).cwiseSqrt();
  const Eigen::MatrixXd b = scaled * sqrt_wx.cwiseInverse().asDiagonal();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd s = svd.singularValues();
  const Eigen::VectorXd coeffs = svd.matrixU().transpose() * target;

  std::vector<Eigen::VectorXd> iterates;
  std::size_t steps = 0;
  for (int k = 2; k <= 10; ++k) {
    const double alpha = std::pow(10.0, -k);
    Eigen::VectorXd filtered(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) filtered[i] = s[i] / (s[i] * s[i] + alpha) * coeffs[i];
    iterates.push_back((svd.matrixV() * filtered).cwiseQuotient(sqrt_wx));
    ++steps;
  }
  // x(alpha) = x_dagger + c1 alpha + c2 alpha^2 at alpha = 100b, 10b, b.
  const std::size_t last = iterates.size() - 1;
  const Eigen::VectorXd x =
      (iterates[last - 2] - 110.0 * iterates[last - 1] + 1000.0 * iterates[last]) / 891.0;

  SolveResult out{from_eigen(map.input, x), 0.0, steps, SolveStatus::converged, ls_residual, {}};
  out.value = penalty.value(out.minimizer);
  return out;
}

double grad_check(const Objective& objective, const GridFunction& x, double h_fd) {
  if (!(h_fd > 0.0)) throw ContractError("grad_check needs h_fd > 0");
  const GridFunction g = objective.gradient(x);
  const auto w = x.grid().weights();
  std::vector<double> v(x.values().begin(), x.values().end());
  double max_dev = 0.0, max_mag = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double keep = v[i];
    v[i] = keep + h_fd;
    const double up = objective.value(GridFunction(x.grid(), v));
    v[i] = keep - h_fd;
    const double down = objective.value(GridFunction(x.grid(), v));
    v[i] = keep;
    const double fd = (up - down) / (2.0 * h_fd);
    const double analytic = w[i] * g[i];  // Euclidean partial derivative
    max_dev = std::max(max_dev, std::abs(analytic - fd));
    max_mag = std::max({max_mag, std::abs(analytic), std::abs(fd)});
  }
  return max_mag == 0.0 ? max_dev : max_dev / max_mag;
}

}  // namespace tikgamma
