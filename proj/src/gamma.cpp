#include "tikgamma/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tikgamma/error.hpp"

namespace tikgamma {

bool nonincreasing_tail(const std::vector<double>& values, std::size_t tail, double slack, double floor) {
  if (values.size() < 2) return true;
  const std::size_t start = values.size() > tail ? values.size() - tail : 0;
  for (std::size_t i = start; i + 1 < values.size(); ++i)
    if (values[i + 1] > (1.0 + slack) * values[i] + floor) return false;
  return true;
}

namespace {

void require_levels(const ApproxSequence& seq, const std::vector<std::size_t>& levels) {
  if (levels.empty()) throw ContractError("levels must be nonempty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i] <= levels[i - 1]) throw ContractError("levels must be strictly increasing");
    if (!seq.family.has_level(levels[i]))
      throw ContractError("family has no level " + std::to_string(levels[i]));
  }
}

// inf T_n and a minimizer: the closed form when available, projected gradient otherwise.
SolveResult infimum(const TikhonovProblem& problem, const SolveConfig& solver) {
  return minimize(problem, solver);
}

bool solved(const SolveResult& r) { return r.status == SolveStatus::converged; }

}  // namespace

InfConvergenceReport inf_convergence_study(const TikhonovProblem& target, const ApproxSequence& seq,
                                           const std::vector<std::size_t>& levels,
                                           const SolveConfig& solver, double tol) {
  require_levels(seq, levels);
  if (!(target.alpha > 0.0)) throw ContractError("inf_convergence_study needs alpha > 0");
  if (!target.penalty.smooth()) throw UnsupportedError("inf_convergence_study needs a smooth penalty");

  InfConvergenceReport report;
  report.levels = levels;

  const SolveResult ref = infimum(target, solver);
  if (!solved(ref)) {
    report.failure = "reference solve ended with status " + to_string(ref.status);
    return report;
  }
  report.reference_min = ref.value;

  for (std::size_t n : levels) {
    const SolveResult r = infimum(seq.problem_at(n), solver);
    if (!solved(r)) {
      report.failed_level = n;
      report.failure = "level " + std::to_string(n) + " solve ended with status " + to_string(r.status);
      return report;
    }
    report.inf_values.push_back(r.value);
    report.gaps.push_back(std::abs((r.value - ref.value).value()));
    report.minimizer_distances.push_back(distance(r.minimizer, ref.minimizer));
  }

  report.final_gap_ok = report.gaps.back() <= tol;
  report.trend_ok = nonincreasing_tail(report.gaps, 3, 0.10, 1e-12);
  report.verdict = report.final_gap_ok && report.trend_ok;
  return report;
}

ChainReport eps_minimizer_chain(const TikhonovProblem& target, const ApproxSequence& seq,
                                const std::vector<std::size_t>& levels, const SolveConfig& solver,
                                const ChainOptions& options) {
  require_levels(seq, levels);
  if (!(target.alpha > 0.0)) throw ContractError("eps_minimizer_chain needs alpha > 0");
  if (options.tail < 2) throw ContractError("Cauchy window needs at least 2 iterates");

  ChainReport report;
  for (std::size_t j = 1; j <= levels.size(); ++j) {
    const std::size_t n = levels[j - 1];
    const TikhonovProblem problem = seq.problem_at(n);
    const double eps = options.eps(j);
    if (!(eps > 0.0)) throw ContractError("eps_j must be positive");

    const GridFunction start = project(problem.domain, GridFunction::zeros(problem.op.input_grid()));
    const SolveResult run = projected_gradient(tikhonov_objective(problem), problem.domain, solver, start);

    ChainLink link{n, eps, run.minimizer, eval_T(problem, run.minimizer), run.value, false, false};
    if (problem.linear_quadratic()) link.inf_estimate = solve_linear_quadratic(problem).value;
    link.certified = is_eps_minimizer(link.value, link.inf_estimate, eps);
    link.in_domain = membership(problem.domain, run.minimizer);
    report.links.push_back(std::move(link));
  }

  // Cauchy tail: largest pairwise distance among the last `tail` iterates.
  const std::size_t count = report.links.size();
  const std::size_t start = count > options.tail ? count - options.tail : 0;
  for (std::size_t a = start; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b)
      report.tail_diameter = std::max(report.tail_diameter, distance(report.links[a].x, report.links[b].x));
  report.cluster_found = count >= options.tail && report.tail_diameter < options.cauchy_tol;

  if (!report.cluster_found) {
    std::ostringstream msg;
    msg << "no cluster point found at tested levels (tail diameter " << report.tail_diameter << ")";
    report.diagnostic = msg.str();
    return report;
  }

  const ChainLink& last = report.links.back();
  report.cluster_point = last.x;
  report.limit_value = eval_T(target, last.x);
  report.value_gap = std::abs((report.limit_value - last.value).as_double());
  const bool all_certified =
      std::all_of(report.links.begin(), report.links.end(), [](const ChainLink& l) { return l.certified && l.in_domain; });
  report.verdict = all_certified && report.value_gap <= options.value_tol;
  return report;
}

double IndexedFamily::node(std::size_t i) const {
  return i + 1 == nodes ? hi : lo + static_cast<double>(i) * spacing();
}

IndexedFamily IndexedFamily::oscillating_sine(std::size_t nodes) {
  return {"oscillating_sine", 0.0, 2.0 * std::numbers::pi, nodes,
          [](std::size_t j, double x) { return std::sin(static_cast<double>(j) * x); }};
}

IndexedFamily IndexedFamily::constant(double c, std::size_t nodes, double lo, double hi) {
  return {"constant", lo, hi, nodes, [c](std::size_t, double) { return c; }};
}

IndexedFamily IndexedFamily::uniform_shift(std::function<double(double)> base, std::string label,
                                           std::size_t nodes, double lo, double hi) {
  return {std::move(label), lo, hi, nodes,
          [base = std::move(base)](std::size_t j, double x) { return base(x) + 1.0 / static_cast<double>(j); }};
}

GammaEstimate estimate_gamma_limits(const IndexedFamily& family, double x, const std::vector<double>& radii,
                                    const GammaOptions& options) {
  if (family.nodes < 2) throw ContractError("family grid needs at least 2 nodes");
  if (radii.empty()) throw ContractError("need at least one radius");
  if (x < family.lo || x > family.hi) throw ContractError("point lies outside the family's interval");
  if (options.window < 2) throw ContractError("index window must be at least 2");
  const double h = family.spacing();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k > 0 && !(radii[k] < radii[k - 1])) throw ContractError("radii must be strictly decreasing");
    if (radii[k] < h) {
      std::ostringstream msg;
      msg << "radius " << radii[k] << " is below the grid spacing " << h;
      throw ResolutionError(msg.str());
    }
  }

  const std::size_t J = options.window;
  const auto tail_len = std::max<std::size_t>(1, static_cast<std::size_t>(options.tail_fraction * static_cast<double>(J)));
  const std::size_t j_first = J - std::min(tail_len, J - 1) + 1;

  auto node_range = [&](double r) {
    const double lo = std::max(family.lo, x - r);
    const double hi = std::min(family.hi, x + r);
    auto first = static_cast<std::size_t>(std::ceil((lo - family.lo) / h - 1e-9));
    auto last = static_cast<std::size_t>(std::floor((hi - family.lo) / h + 1e-9));
    last = std::min(last, family.nodes - 1);
    return std::pair{first, last};
  };
  auto neighborhood_inf = [&](std::size_t j, double r) {
    const auto [first, last] = node_range(r);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i <= last; ++i) {
      const double xi = family.node(i);
      if (std::abs(xi - x) <= r + 1e-12) m = std::min(m, family.eval(j, xi));
    }
    return m;
  };

  GammaEstimate est;
  est.point = x;
  est.radii = radii;
  for (double r : radii) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = j_first; j <= J; ++j) {
      const double v = neighborhood_inf(j, r);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    est.liminf.push_back(lo);
    est.limsup.push_back(hi);
  }
  est.lower = est.liminf.back();
  est.upper = est.limsup.back();
  if (radii.size() >= 2) {
    const std::size_t k = radii.size() - 1;
    est.stabilized = std::abs(est.liminf[k] - est.liminf[k - 1]) <= options.stabilization_tol &&
                     std::abs(est.limsup[k] - est.limsup[k - 1]) <= options.stabilization_tol;
  }

  // Sequential cross-check: x_j minimizes f_j over a neighborhood whose radius shrinks like
  // j_first / j towards half the smallest radius (never below the grid spacing).
  double seq = std::numeric_limits<double>::infinity();
  for (std::size_t j = j_first; j <= J; ++j) {
    const double rj = std::max(h, radii.back() * static_cast<double>(j_first) / static_cast<double>(j));
    seq = std::min(seq, neighborhood_inf(j, rj));
  }
  est.sequential = seq;
  return est;
}

CoercivityProbe equi_coercivity_probe(const ApproxSequence& seq, const std::vector<std::size_t>& levels,
                                      const std::vector<GridFunction>& samples,
                                      const std::vector<double>& thresholds,
                                      const std::vector<GridFunction>& minimizers) {
  require_levels(seq, levels);
  if (!(seq.alpha.limit > 0.0))
    throw RefusedError("equi-coercivity probe requires alpha_n > delta > 0; the alpha schedule tends to " +
                       std::to_string(seq.alpha.limit));

  CoercivityProbe probe;
  probe.levels = levels;
  probe.thresholds = thresholds;
  probe.samples = samples.size();
  probe.alpha_floor = seq.alpha.limit;
  for (std::size_t n : levels) {
    const double a = seq.alpha_at(n);
    if (!(a > 0.0)) throw ContractError("alpha_" + std::to_string(n) + " <= 0");
    probe.alpha_floor = std::min(probe.alpha_floor, a);
  }
  const double delta = probe.alpha_floor;

  for (std::size_t n : levels) {
    const TikhonovProblem problem = seq.problem_at(n);
    std::vector<bool> row(thresholds.size(), true);
    for (const GridFunction& x : samples) {
      const ExtReal value = eval_T(problem, x);
      const double omega = problem.penalty.value(x);
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (!(value <= ExtReal(thresholds[k]))) continue;
        ++probe.audited;
        // Floating-point slack of a few ulps on t / delta.
        if (omega > thresholds[k] / delta * (1.0 + 1e-12)) {
          row[k] = false;
          ++probe.violations;
        }
      }
    }
    probe.inclusion.push_back(std::move(row));
  }
  if (!minimizers.empty()) {
    double bound = 0.0;
    for (const auto& m : minimizers) bound = std::max(bound, norm(m, NormTag::L2));
    probe.minimizer_bound = bound;
  }
  probe.verdict = probe.violations == 0;
  return probe;
}

bool ratios_decay(const std::vector<std::size_t>& levels, const std::vector<double>& ratios) {
  if (std::all_of(ratios.begin(), ratios.end(), [](double r) { return r <= 1e-12; })) return true;
  if (ratios.size() < 2 || !(ratios.back() < ratios.front())) return false;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, count = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] <= 0.0) continue;
    const double lx = std::log(static_cast<double>(levels[i]));
    const double ly = std::log(ratios[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, count += 1;
  }
  if (count < 2) return true;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return slope < 0.0;
}

AlphaZeroReport alpha_zero_study(const ApproxSequence& seq, const std::vector<std::size_t>& levels,
                                 const SolveConfig& solver, const AlphaZeroOptions& options) {
  require_levels(seq, levels);
  if (seq.alpha.limit != 0.0) throw ContractError("alpha_zero_study needs alpha_n -> 0");
  const auto& lin = seq.family.reference().linear_map();
  if (!lin) throw UnsupportedError("alpha_zero_study needs a dense reference operator");

  const SolveResult dagger = min_penalty_solution(*lin, seq.data, seq.penalty);
  if (dagger.status != SolveStatus::converged) {
    std::ostringstream msg;
    msg << "data is not in the range of F (least-squares residual " << dagger.grad_norm_final << ")";
    throw RefusedError(msg.str());
  }

  AlphaZeroReport report;
  report.levels = levels;
  report.x_dagger = dagger.minimizer;
  report.omega_dagger = seq.penalty.value(dagger.minimizer);
  const GridFunction f_dagger = seq.family.reference().apply(dagger.minimizer);

  for (std::size_t n : levels) {
    const double a = seq.alpha_at(n);
    if (!(a > 0.0)) throw ContractError("alpha_" + std::to_string(n) + " <= 0");
    const double root = std::pow(a, 1.0 / seq.exponent_p);
    report.alphas.push_back(a);
    report.data_ratios.push_back(distance(seq.data_at(n), seq.data) / root);
    report.operator_ratios.push_back(distance(seq.family.level(n).apply(dagger.minimizer), f_dagger) / root);
  }

  auto list = [](const std::vector<double>& v) {
    std::ostringstream out;
    out.precision(6);
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
    return out.str();
  };
  if (!ratios_decay(levels, report.data_ratios))
    throw RefusedError("||y_n - y|| / alpha_n^(1/p) does not decay: [" + list(report.data_ratios) + "]");
  if (!ratios_decay(levels, report.operator_ratios))
    throw RefusedError("||F_n(x) - F(x)|| / alpha_n^(1/p) does not decay at x_dagger: [" +
                       list(report.operator_ratios) + "]");

  for (std::size_t n : levels) {
    const SolveResult r = minimize(seq.problem_at(n), solver);
    if (r.status != SolveStatus::converged)
      throw NumericalError("alpha_zero_study: level " + std::to_string(n) + " solve ended with " + to_string(r.status));
    report.distances.push_back(distance(r.minimizer, dagger.minimizer));
    report.omega_values.push_back(seq.penalty.value(r.minimizer));
  }

  const std::size_t start = levels.size() > 3 ? levels.size() - 3 : 0;
  report.omega_audit = true;
  for (std::size_t i = start; i < levels.size(); ++i)
    if (report.omega_values[i] > (1.0 + options.omega_slack) * report.omega_dagger + 1e-12)
      report.omega_audit = false;
  report.verdict = report.distances.back() <= options.tol;
  return report;
}

TikhonovProblem scaled_problem(const TikhonovProblem& problem, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw UnsupportedError("scaling by lambda <= 0 or lambda = inf is indeterminate");
  const auto& lin = problem.op.linear_map();
  if (problem.exponent_p != 2.0 || !lin)
    throw UnsupportedError("scaled_problem needs p = 2 and a dense operator");
  const double root = std::sqrt(lambda);
  OperatorHandle op = OperatorHandle::linear(problem.op.label() + "*sqrt(lambda)", lin->matrix * root,
                                             lin->input, lin->output, problem.op.domain());
  TikhonovProblem out{op, problem.data * root, problem.alpha * lambda, 2.0, problem.penalty, problem.domain};
  out.validate();
  return out;
}

namespace {

// inf and argmin of lambda * T without reusing the unscaled solve.
SolveResult scaled_infimum(const TikhonovProblem& problem, double lambda, const SolveConfig& solver) {
  if (problem.linear_quadratic()) return solve_linear_quadratic(scaled_problem(problem, lambda));
  Objective base = tikhonov_objective(problem);
  Objective scaled{[base, lambda](const GridFunction& x) { return lambda * base.value(x); },
                   [base, lambda](const GridFunction& x) { return base.gradient(x) * lambda; }, base.smooth};
  const GridFunction start = project(problem.domain, GridFunction::zeros(problem.op.input_grid()));
  return projected_gradient(scaled, problem.domain, solver, start);
}

}  // namespace

ScalingReport scaling_invariance_check(const ApproxSequence& seq, const Schedule& lambda,
                                       const std::vector<std::size_t>& levels, const SolveConfig& solver,
                                       const ScalingOptions& options) {
  require_levels(seq, levels);
  if (!(lambda.limit > 0.0) || !std::isfinite(lambda.limit))
    throw UnsupportedError("lambda = 0 or lambda = inf gives an indeterminate scaled limit");

  ScalingReport report;
  report.levels = levels;
  report.lambda_limit = lambda.limit;

  const TikhonovProblem target = seq.target();
  const SolveResult ref = minimize(target, solver);
  const SolveResult scaled_ref = scaled_infimum(target, lambda.limit, solver);
  if (!solved(ref) || !solved(scaled_ref)) throw NumericalError("scaling check: reference solve failed");
  report.reference_min = ref.value.value();
  report.scaled_reference_min = scaled_ref.value.value();
  const double lim_scale = std::max(1.0, std::abs(lambda.limit * report.reference_min));
  report.limit_error = std::abs(report.scaled_reference_min - lambda.limit * report.reference_min) / lim_scale;

  report.identity_ok = true;
  report.argmin_ok = true;
  for (std::size_t n : levels) {
    const double ln = lambda.at(n);
    if (!(ln > 0.0) || !std::isfinite(ln)) throw UnsupportedError("lambda_n must be positive and finite");
    const TikhonovProblem problem = seq.problem_at(n);
    const SolveResult plain = minimize(problem, solver);
    const SolveResult scaled = scaled_infimum(problem, ln, solver);
    if (!solved(plain) || !solved(scaled))
      throw NumericalError("scaling check: level " + std::to_string(n) + " solve failed");
    const double inf_n = plain.value.value();
    const double scaled_n = scaled.value.value();
    const double expected = ln * inf_n;
    const double rel = std::abs(scaled_n - expected) / std::max(std::abs(expected), 1e-300);
    report.lambdas.push_back(ln);
    report.infs.push_back(inf_n);
    report.scaled_infs.push_back(scaled_n);
    report.identity_errors.push_back(expected == 0.0 ? std::abs(scaled_n) : rel);
    report.argmin_shifts.push_back(distance(scaled.minimizer, plain.minimizer));
    report.scaled_gaps.push_back(std::abs(scaled_n - report.scaled_reference_min));
    if (report.identity_errors.back() > options.identity_tol) report.identity_ok = false;
    if (report.argmin_shifts.back() > options.argmin_tol) report.argmin_ok = false;
  }
  report.limit_ok = report.limit_error <= options.limit_tol && nonincreasing_tail(report.scaled_gaps, 3, 0.10, 1e-12);
  report.verdict = report.identity_ok && report.argmin_ok && report.limit_ok;
  return report;
}

}  // namespace tikgamma
