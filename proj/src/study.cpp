#include "tikgamma/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include <json.hpp>

#include "tikgamma/error.hpp"
#include "tikgamma/fem.hpp"
#include "tikgamma/gamma.hpp"

namespace tikgamma {

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::refused: return "refused";
    case Verdict::diagnostic: return "diagnostic";
  }
  return "?";
}

int exit_code_for(const std::vector<ReportRow>& rows) {
  bool failed = false;
  for (const auto& row : rows) {
    if (row.verdict == Verdict::refused) return 3;
    failed = failed || row.verdict == Verdict::fail;
  }
  return failed ? 2 : 0;
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

// Collects rows for one study. Timestamps are cumulative milliseconds since the study began,
// or 0 when timing is off.
class Recorder {
 public:
  Recorder(std::string study, bool timing) : study_(std::move(study)), timing_(timing), start_(Clock::now()) {}

  void add(std::size_t level, std::string metric, double value, Verdict verdict = Verdict::diagnostic) {
    double ms = 0.0;
    if (timing_) ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    rows_.push_back({study_, level, std::move(metric), value, verdict, ms});
  }

  std::vector<ReportRow>& rows() { return rows_; }

 private:
  std::string study_;
  bool timing_;
  Clock::time_point start_;
  std::vector<ReportRow> rows_;
};

Verdict judge(bool ok) { return ok ? Verdict::pass : Verdict::fail; }

NormTag parse_norm(const std::string& label) {
  if (label == "Linf") return NormTag::Linf;
  if (label == "H1_0") return NormTag::H1_0;
  return NormTag::L2;
}

DomainSpec make_domain(const StudyConfig::Problem& pr) {
  const NormTag tag = parse_norm(pr.domain_norm);
  if (pr.domain == "ball") return DomainSpec::ball(pr.radius, tag);
  if (pr.domain == "ball_nonneg") return DomainSpec::ball_nonneg(pr.radius, tag);
  return DomainSpec::whole();
}

Kernel make_kernel(const StudyConfig::Problem& pr) {
  if (pr.kernel == "constant") return Kernel::constant(pr.kappa);
  if (pr.kernel == "separable") return Kernel::separable();
  return Kernel::gaussian(pr.sigma);
}

ScalarField make_potential(const StudyConfig::Problem& pr) {
  if (pr.potential == "zero") return [](double) { return 0.0; };
  if (pr.potential == "sin_pi") return [](double x) { return std::sin(kPi * x); };
  if (pr.potential == "custom-table") {
    const GridFunction table(GridSpec::full(pr.potential_table.size()), pr.potential_table);
    return as_field(table);
  }
  return [](double) { return 1.0; };
}

ScalarField make_truth(const std::string& label) {
  if (label == "ramp") return [](double s) { return s; };
  if (label == "bump") return [](double s) { return std::exp(-50.0 * (s - 0.5) * (s - 0.5)); };
  if (label == "zero") return [](double) { return 0.0; };
  return [](double s) { return std::sin(kPi * s); };
}

PenaltySpec make_penalty(const StudyConfig::Schedule& sc) {
  if (sc.penalty == "linf") return PenaltySpec::linf();
  if (sc.penalty == "p_power_norm") return PenaltySpec::p_power_norm(sc.penalty_q, parse_norm(sc.penalty_norm));
  return PenaltySpec::half_sq_l2();
}

Schedule make_alpha(const StudyConfig::Schedule& sc) {
  if (sc.alpha == "constant") return Schedule::constant(sc.alpha_limit);
  if (sc.alpha == "power") return Schedule::power(sc.alpha_amplitude, sc.alpha_exponent);
  return Schedule::offset_power(sc.alpha_limit, sc.alpha_amplitude, sc.alpha_exponent);
}

NoiseModel make_noise(const StudyConfig& c) {
  const auto& sc = c.schedule;
  if (sc.noise == "power") return NoiseModel::power(sc.noise_amplitude, sc.noise_exponent);
  if (sc.noise == "random") return NoiseModel::seeded(sc.noise_amplitude, sc.noise_exponent, c.output.seed);
  return NoiseModel::none();
}

OperatorFamily make_family(const StudyConfig& c) {
  const auto& pr = c.problem;
  const auto& levels = c.schedule.levels;
  const DomainSpec domain = make_domain(pr);
  const GridSpec x_grid = GridSpec::full(pr.x_nodes);
  const bool exact = pr.family == "exact";

  if (pr.operator_kind == "identity") return make_exact_family(OperatorHandle::identity(x_grid, domain), levels,
                                                               pr.strict_subdomain);
  if (pr.operator_kind == "fem") {
    FemFamilyOptions opts{pr.x_nodes, pr.reference, domain, pr.strict_subdomain};
    if (!exact) return make_fem_family(make_potential(pr), levels, opts);
    const OperatorFamily single = make_fem_family(make_potential(pr), {levels.front()}, opts);
    return make_exact_family(single.reference(), levels, pr.strict_subdomain);
  }
  const Kernel kernel = make_kernel(pr);
  if (!exact) return make_quadrature_family(kernel, levels, pr.reference, {pr.x_nodes, domain, pr.strict_subdomain});
  const GridSpec y_grid = GridSpec::full(pr.reference);
  const Eigen::MatrixXd matrix = integral_matrix(kernel, pr.reference) * interpolation_matrix(x_grid, y_grid);
  return make_exact_family(OperatorHandle::linear("integral:" + kernel.label, matrix, x_grid, y_grid, domain), levels,
                           pr.strict_subdomain);
}

ApproxSequence make_sequence(const StudyConfig& c) {
  OperatorFamily family = make_family(c);
  const GridFunction truth = GridFunction::sample(family.reference().input_grid(), make_truth(c.problem.truth));
  const GridFunction data = family.reference().apply(truth);
  return {std::move(family), data, make_noise(c), make_alpha(c.schedule), c.schedule.p, make_penalty(c.schedule)};
}

void run_fem_rate(const StudyConfig& c, Recorder& rec) {
  const ScalarField potential = make_potential(c.problem);
  EllipticProblem problem;
  problem.potential = potential;
  if (c.problem.solution == "quadratic") {
    problem.exact_solution = [](double x) { return x * (1.0 - x); };
    problem.source = [potential](double x) { return 2.0 + potential(x) * x * (1.0 - x); };
  } else {
    problem.exact_solution = [](double x) { return std::sin(kPi * x); };
    problem.source = [potential](double x) { return (kPi * kPi + potential(x)) * std::sin(kPi * x); };
  }
  const RateStudyResult result = rate_study(problem, c.schedule.levels);
  for (std::size_t i = 0; i < result.levels.size(); ++i) rec.add(result.levels[i], "l2_error", result.errors[i]);
  const auto& st = c.study_params;
  rec.add(0, "slope", result.slope, judge(result.slope >= st.slope_min && result.slope <= st.slope_max));
  rec.add(0, "constant", std::exp(result.intercept));
}

void run_integral_demo(const StudyConfig& c, Recorder& rec) {
  const OperatorFamily family = make_family(c);
  const auto samples = standard_samples(family.reference().input_grid(), c.problem.radius);
  std::vector<double> gaps;
  for (std::size_t n : c.schedule.levels) {
    gaps.push_back(uniform_gap(family, n, samples).value);
    rec.add(n, "gap", gaps.back());
  }
  const double first = gaps.front();
  const double last = gaps.back();
  const bool ok = first == 0.0 ? last == 0.0 : last < first / 4.0;
  rec.add(0, "gap_ratio", first == 0.0 ? 0.0 : last / first, judge(ok));
}

void run_inf_study(const StudyConfig& c, Recorder& rec) {
  const ApproxSequence seq = make_sequence(c);
  const auto report = inf_convergence_study(seq.target(), seq, c.schedule.levels, c.solver, c.study_params.tol);
  for (std::size_t i = 0; i < report.gaps.size(); ++i) {
    const std::size_t n = report.levels[i];
    rec.add(n, "alpha", seq.alpha_at(n));
    rec.add(n, "inf_value", report.inf_values[i].as_double());
    rec.add(n, "gap", report.gaps[i]);
    rec.add(n, "minimizer_distance", report.minimizer_distances[i]);
  }
  if (report.failed_level) {
    rec.add(*report.failed_level, "solver_failure", 1.0, Verdict::fail);
    return;
  }
  rec.add(0, "reference_min", report.reference_min.as_double());
  rec.add(0, "final_gap", report.gaps.back(), judge(report.final_gap_ok));
  rec.add(0, "gap_trend", report.trend_ok ? 1.0 : 0.0, judge(report.trend_ok));
}

void run_alpha_zero(const StudyConfig& c, Recorder& rec) {
  const ApproxSequence seq = make_sequence(c);
  AlphaZeroOptions opts;
  opts.tol = c.study_params.tol;
  const auto report = alpha_zero_study(seq, c.schedule.levels, c.solver, opts);
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const std::size_t n = report.levels[i];
    rec.add(n, "alpha", report.alphas[i]);
    rec.add(n, "data_ratio", report.data_ratios[i]);
    rec.add(n, "operator_ratio", report.operator_ratios[i]);
    rec.add(n, "distance", report.distances[i]);
    rec.add(n, "omega", report.omega_values[i]);
  }
  rec.add(0, "omega_dagger", report.omega_dagger);
  rec.add(0, "omega_audit", report.omega_audit ? 1.0 : 0.0, judge(report.omega_audit));
  rec.add(0, "final_distance", report.distances.back(), judge(report.verdict));
}

void run_gamma_estimate(const StudyConfig& c, Recorder& rec) {
  const auto& st = c.study_params;
  IndexedFamily family;
  std::function<double(double)> expected;
  std::vector<double> points = st.points;
  std::vector<double> radii = st.radii;
  if (st.family == "constant" || st.family == "uniform") {
    if (st.family == "constant") {
      family = IndexedFamily::constant(st.constant_value, st.grid);
      expected = [v = st.constant_value](double) { return v; };
    } else {
      auto base = [](double x) { return x * x; };
      family = IndexedFamily::uniform_shift(base, "x^2 + 1/j", st.grid);
      expected = base;
    }
    if (points.empty()) points = {0.1, 0.3, 0.5, 0.7, 0.9};
    if (radii.empty()) radii = {0.008, 0.004, 0.002, 0.001};
  } else {
    family = IndexedFamily::oscillating_sine(st.grid);
    expected = [](double) { return -1.0; };
    if (points.empty()) points = {0.5, 1.5, 2.5, 3.5, 4.5};
    if (radii.empty()) radii = {0.4, 0.2, 0.1, 0.05};
  }
  GammaOptions opts;
  opts.window = st.window;
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const GammaEstimate est = estimate_gamma_limits(family, points[i], radii, opts);
    const double error = std::abs(est.lower - expected(points[i]));
    worst = std::max(worst, error);
    const std::size_t id = i + 1;
    rec.add(id, "point", points[i]);
    rec.add(id, "gamma_lower", est.lower);
    rec.add(id, "gamma_upper", est.upper);
    rec.add(id, "sequential", est.sequential);
    rec.add(id, "stabilized", est.stabilized ? 1.0 : 0.0);
    rec.add(id, "error", error, judge(error <= st.tol));
  }
  rec.add(0, "max_error", worst, judge(worst <= st.tol));
}

// Random probes x = s * d with d a Gaussian direction normalized in L2 and s log-uniform in
// [1e-3, 10].
std::vector<GridFunction> random_samples(const GridSpec& grid, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> exponent(-3.0, 1.0);
  std::vector<GridFunction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> v(grid.size());
    for (double& e : v) e = gauss(rng);
    GridFunction d(grid, std::move(v));
    const double len = norm(d, NormTag::L2);
    out.push_back(d * (std::pow(10.0, exponent(rng)) / len));
  }
  return out;
}

std::string threshold_metric(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "inclusion@t=%g", t);
  return buf;
}

void run_coercivity(const StudyConfig& c, Recorder& rec) {
  const ApproxSequence seq = make_sequence(c);
  const auto& levels = c.schedule.levels;
  const auto samples = random_samples(seq.family.reference().input_grid(), c.study_params.samples, c.output.seed);
  std::vector<GridFunction> minimizers;
  if (seq.alpha.limit > 0.0)
    for (std::size_t n : levels) minimizers.push_back(minimize(seq.problem_at(n), c.solver).minimizer);
  const auto probe = equi_coercivity_probe(seq, levels, samples, c.study_params.thresholds, minimizers);
  for (std::size_t i = 0; i < probe.levels.size(); ++i)
    for (std::size_t k = 0; k < probe.thresholds.size(); ++k) {
      const bool ok = probe.inclusion[i][k];
      rec.add(probe.levels[i], threshold_metric(probe.thresholds[k]), ok ? 1.0 : 0.0, judge(ok));
    }
  rec.add(0, "alpha_floor", probe.alpha_floor);
  rec.add(0, "samples", static_cast<double>(probe.samples));
  rec.add(0, "audited", static_cast<double>(probe.audited));
  if (probe.minimizer_bound) rec.add(0, "minimizer_bound", *probe.minimizer_bound);
  rec.add(0, "violations", static_cast<double>(probe.violations), judge(probe.verdict));
}

void run_eps_chain(const StudyConfig& c, Recorder& rec) {
  const ApproxSequence seq = make_sequence(c);
  ChainOptions opts;
  const double scale = c.schedule.eps_scale;
  opts.eps = [scale](std::size_t j) { return scale / static_cast<double>(j); };
  opts.cauchy_tol = c.study_params.cauchy_tol;
  opts.value_tol = c.study_params.value_tol;
  const ChainReport report = eps_minimizer_chain(seq.target(), seq, c.schedule.levels, c.solver, opts);
  for (const auto& link : report.links) {
    rec.add(link.level, "eps", link.eps);
    rec.add(link.level, "value", link.value.as_double());
    rec.add(link.level, "inf_estimate", link.inf_estimate.as_double());
    const bool ok = link.certified && link.in_domain;
    rec.add(link.level, "certified", ok ? 1.0 : 0.0, judge(ok));
  }
  rec.add(0, "tail_diameter", report.tail_diameter, report.cluster_found ? Verdict::pass : Verdict::diagnostic);
  if (!report.cluster_found) return;
  rec.add(0, "limit_value", report.limit_value.as_double());
  rec.add(0, "value_gap", report.value_gap, report.verdict ? judge(*report.verdict) : Verdict::diagnostic);
}

}  // namespace

StudyOutcome run_study(const StudyConfig& config) {
  Recorder rec(to_string(config.study), config.output.timing);
  StudyOutcome outcome;
  try {
    switch (config.study) {
      case StudyKind::fem_rate: run_fem_rate(config, rec); break;
      case StudyKind::integral_demo: run_integral_demo(config, rec); break;
      case StudyKind::inf_study: run_inf_study(config, rec); break;
      case StudyKind::alpha_zero: run_alpha_zero(config, rec); break;
      case StudyKind::gamma_estimate: run_gamma_estimate(config, rec); break;
      case StudyKind::coercivity: run_coercivity(config, rec); break;
      case StudyKind::eps_chain: run_eps_chain(config, rec); break;
    }
  } catch (const NumericalError& e) {
    rec.add(0, "numerical_failure", 1.0, Verdict::fail);
    outcome.message = e.what();
  } catch (const std::exception& e) {
    // Precondition failures (refusals, contract and resolution violations, unsupported forms).
    rec.add(0, "precondition", 0.0, Verdict::refused);
    outcome.message = e.what();
  }
  outcome.rows = std::move(rec.rows());
  outcome.exit_code = exit_code_for(outcome.rows);
  return outcome;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "study,level,metric,value,verdict,wall_time_ms\n";
  char value[64];
  char ms[64];
  for (const auto& row : rows) {
    std::snprintf(value, sizeof value, "%.17g", row.value);
    std::snprintf(ms, sizeof ms, "%.17g", row.wall_time_ms);
    out << row.study << ',' << row.level << ',' << row.metric << ',' << value << ',' << to_string(row.verdict) << ','
        << ms << '\n';
  }
}

void write_json_lines(std::ostream& out, const std::vector<ReportRow>& rows) {
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["study"] = row.study;
    j["level"] = row.level;
    j["metric"] = row.metric;
    if (std::isfinite(row.value)) j["value"] = row.value;
    else if (std::isnan(row.value)) j["value"] = "nan";
    else j["value"] = row.value > 0 ? "inf" : "-inf";
    j["verdict"] = to_string(row.verdict);
    j["wall_time_ms"] = row.wall_time_ms;
    out << j.dump() << '\n';
  }
}

}  // namespace tikgamma
