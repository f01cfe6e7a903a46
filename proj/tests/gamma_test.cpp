#include <doctest.h>

#include "support.hpp"
#include "tikgamma/error.hpp"
#include "tikgamma/fem.hpp"
#include "tikgamma/gamma.hpp"

using namespace tikgamma;
using testing::pi;

namespace {

OperatorFamily gaussian_family(const std::vector<std::size_t>& levels, std::size_t m_ref = 513) {
  return make_quadrature_family(Kernel::gaussian(0.2), levels, m_ref);
}

GridFunction sine_data(const OperatorFamily& fam) {
  return fam.reference().apply(GridFunction::sample(fam.reference().input_grid(), testing::sin_pi));
}

}  // namespace

TEST_CASE("nonincreasing tail") {
  CHECK(nonincreasing_tail({5.0, 3.0, 2.0, 1.0}, 3, 0.0, 0.0));
  CHECK(nonincreasing_tail({5.0, 1.0, 1.05, 1.1}, 3, 0.10, 0.0));
  CHECK_FALSE(nonincreasing_tail({5.0, 1.0, 1.2, 1.0}, 3, 0.10, 0.0));
  CHECK(nonincreasing_tail({0.0, 1e-13, 0.0}, 3, 0.0, 1e-12));
}

TEST_CASE("inf convergence: exact family has zero gaps") {
  const std::vector<std::size_t> levels = {3, 5, 9};
  const auto fam = gaussian_family({9});
  const ApproxSequence seq{make_exact_family(fam.reference(), levels), sine_data(fam), NoiseModel::none(),
                           Schedule::constant(0.1)};
  const auto report = inf_convergence_study(seq.target(), seq, levels, {}, 1e-12);
  for (double g : report.gaps) CHECK(g == doctest::Approx(0.0).scale(1e-14));
  REQUIRE(report.verdict);
  CHECK(*report.verdict);
  CHECK(report.topology == kTopology);
}

TEST_CASE("inf convergence: FEM family") {
  const std::vector<std::size_t> levels = {7, 15, 31, 63, 127};
  auto fam = make_fem_family([](double) { return 1.0; }, levels, {33, 1023});
  const auto f_true = GridFunction::sample(fam.reference().input_grid(), testing::sin_pi);
  const auto y = fam.reference().apply(f_true);
  const auto bump = GridFunction::sample(y.grid(), [](double x) { return 1e-3 * std::sin(3.0 * pi * x); });
  const ApproxSequence seq{fam, y + bump, NoiseModel::none(), Schedule::constant(0.01)};
  const auto report = inf_convergence_study(seq.target(), seq, levels, {}, 1.0);
  CHECK(report.gaps.back() < report.gaps.front() / 10.0);
}

TEST_CASE("inf convergence contract") {
  const auto fam = gaussian_family({9, 17});
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::none(), Schedule::constant(0.0)};
  CHECK_THROWS_AS(inf_convergence_study(seq.target(), seq, {9, 17}, {}, 1e-6), ContractError);
  CHECK_THROWS_AS(inf_convergence_study(seq.target(), seq, {17, 9}, {}, 1e-6), ContractError);
}

TEST_CASE("eps-minimizer chain: exact family is constant") {
  const std::vector<std::size_t> levels = {3, 5, 9, 17};
  const auto fam = gaussian_family({9});
  const ApproxSequence seq{make_exact_family(fam.reference(), levels), sine_data(fam), NoiseModel::none(),
                           Schedule::constant(0.1)};
  const auto report = eps_minimizer_chain(seq.target(), seq, levels, {});
  CHECK(report.cluster_found);
  CHECK(report.tail_diameter < 1e-8);
  CHECK(report.value_gap < 1e-12);
  REQUIRE(report.verdict);
  CHECK(*report.verdict);
  for (const auto& link : report.links) CHECK(link.certified);
}

TEST_CASE("eps-minimizer chain stays inside growing domains") {
  const std::vector<std::size_t> levels = {3, 5, 9, 17};
  QuadratureFamilyOptions opts;
  opts.domain = DomainSpec::ball(0.2);
  opts.strict_subdomain = true;
  const auto fam = make_quadrature_family(Kernel::gaussian(0.2), levels, 129, opts);
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::none(), Schedule::constant(0.01)};
  const auto report = eps_minimizer_chain(seq.target(), seq, levels, {});
  for (const auto& link : report.links) {
    CHECK(link.in_domain);
    CHECK(membership(fam.level_domain(link.level), link.x));
  }
}

TEST_CASE("eps-minimizer chain reports missing cluster points as diagnostics") {
  const std::vector<std::size_t> levels = {3, 5, 9};
  const auto fam = gaussian_family(levels);
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::none(), Schedule::constant(0.1)};
  ChainOptions opts;
  opts.cauchy_tol = 1e-12;
  const auto report = eps_minimizer_chain(seq.target(), seq, levels, {}, opts);
  CHECK_FALSE(report.cluster_found);
  CHECK_FALSE(report.verdict.has_value());
  CHECK(report.diagnostic.find("no cluster point found at tested levels") != std::string::npos);
}

TEST_CASE("gamma estimator: constant family") {
  const auto fam = IndexedFamily::constant(2.5, 1001);
  const auto est = estimate_gamma_limits(fam, 0.3, {0.1, 0.01});
  CHECK(est.lower == 2.5);
  CHECK(est.upper == 2.5);
  CHECK(est.stabilized);
}

TEST_CASE("gamma estimator: oscillating sine") {
  const auto fam = IndexedFamily::oscillating_sine(4096);
  for (double x : {0.5, 1.5, 2.5, 3.5, 4.5}) {
    const auto est = estimate_gamma_limits(fam, x, {0.4, 0.2, 0.1, 0.05});
    CHECK(std::abs(est.lower + 1.0) < 0.05);
    CHECK(est.sequential <= est.upper);
  }
}

TEST_CASE("gamma estimator: uniformly convergent family") {
  const std::size_t nodes = 4096;
  auto f = [](double x) { return x * x; };
  const auto fam = IndexedFamily::uniform_shift(f, "x^2 + 1/j", nodes);
  const double h = fam.spacing();
  const std::vector<double> radii = {8 * h, 4 * h, 2 * h};
  GammaOptions opts;
  const double J = static_cast<double>(opts.window);
  for (double x : {0.1, 0.5, 0.9}) {
    const auto est = estimate_gamma_limits(fam, x, radii, opts);
    const double grid_tol = 2.0 * radii.back();  // Lipschitz constant of x^2 on [0,1] times the radius
    CHECK(std::abs(est.lower - f(x)) <= 1.0 / J + grid_tol);
  }
}

TEST_CASE("gamma estimator contract") {
  const auto fam = IndexedFamily::constant(0.0, 101);
  CHECK_THROWS_AS(estimate_gamma_limits(fam, 0.5, {0.001}), ResolutionError);
  CHECK_THROWS_AS(estimate_gamma_limits(fam, 0.5, {0.1, 0.2}), ContractError);
  CHECK_THROWS_AS(estimate_gamma_limits(fam, 1.5, {0.1}), ContractError);
}

TEST_CASE("equi-coercivity: inclusion never fails and refusals are explicit") {
  const std::vector<std::size_t> levels = {9, 17, 33};
  const auto fam = gaussian_family(levels);
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::power(1.0, 1.0), Schedule::offset_power(0.1, 1.0, 1.0)};
  testing::Gen gen(61);
  std::vector<GridFunction> samples;
  for (int k = 0; k < 300; ++k) samples.push_back(gen.function(fam.reference().input_grid(), std::pow(10.0, gen.uniform(-3, 1))));
  const auto probe = equi_coercivity_probe(seq, levels, samples, {0.1, 1.0, 10.0});
  CHECK(probe.violations == 0);
  CHECK(probe.audited > 0);
  CHECK(probe.alpha_floor == doctest::Approx(0.1));
  CHECK(probe.verdict);

  // The implication itself, sample by sample.
  for (const auto& x : samples)
    for (std::size_t n : levels) {
      const double t = eval_Tn(seq, n, x).value();
      CHECK(PenaltySpec::half_sq_l2().value(x) <= t / probe.alpha_floor * (1.0 + 1e-12));
    }

  const ApproxSequence vanishing{fam, sine_data(fam), NoiseModel::none(), Schedule::power(1.0, 0.5)};
  CHECK_THROWS_AS(equi_coercivity_probe(vanishing, levels, samples, {1.0}), RefusedError);
  const ApproxSequence negative{fam, sine_data(fam), NoiseModel::none(), Schedule::offset_power(0.1, -2.0, 1.0)};
  CHECK_THROWS_AS(equi_coercivity_probe(negative, levels, samples, {1.0}), ContractError);
}

TEST_CASE("alpha to zero: identity operator") {
  const GridSpec g = GridSpec::full(33);
  const std::vector<std::size_t> levels = {8, 16, 32, 64};
  const auto y = GridFunction::sample(g, testing::sin_pi);
  const ApproxSequence seq{make_exact_family(OperatorHandle::identity(g), levels), y, NoiseModel::none(),
                           Schedule::power(1.0, 1.0)};
  const auto report = alpha_zero_study(seq, levels, {});
  CHECK(distance(report.x_dagger, y) < 1e-9);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double a = report.alphas[i];
    CHECK(report.distances[i] == doctest::Approx(a * norm(y, NormTag::L2) / (1.0 + a)).epsilon(1e-6));
  }
}

TEST_CASE("alpha to zero: refusals") {
  const std::vector<std::size_t> levels = {64, 128, 256, 512};
  const auto fam = gaussian_family({9});
  const auto exact = make_exact_family(fam.reference(), levels);
  const ApproxSequence diverging{exact, sine_data(fam), NoiseModel::power(1.0, 1.0), Schedule::power(1.0, 4.0)};
  CHECK_THROWS_AS(alpha_zero_study(diverging, levels, {}), RefusedError);

  const auto ones = make_exact_family(make_quadrature_family(Kernel::constant(1.0), {9}, 65).reference(), levels);
  const auto off_range = GridFunction::sample(ones.reference().output_grid(), testing::sin_pi);
  const ApproxSequence outside{ones, off_range, NoiseModel::none(), Schedule::power(1.0, 0.5)};
  CHECK_THROWS_AS(alpha_zero_study(outside, levels, {}), RefusedError);

  const ApproxSequence positive{exact, sine_data(fam), NoiseModel::none(), Schedule::constant(0.1)};
  CHECK_THROWS_AS(alpha_zero_study(positive, levels, {}), ContractError);
}

TEST_CASE("ratio decay detection") {
  CHECK(ratios_decay({1, 2, 4}, {0.0, 0.0, 0.0}));
  CHECK(ratios_decay({1, 2, 4}, {1.0, 0.5, 0.25}));
  CHECK_FALSE(ratios_decay({1, 2, 4}, {1.0, 2.0, 4.0}));
}

TEST_CASE("scaling: unit factor reproduces the unscaled report") {
  const std::vector<std::size_t> levels = {33, 65, 129};
  const auto fam = gaussian_family(levels);
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::power(1.0, 1.0), Schedule::offset_power(0.1, 1.0, 1.0)};
  const auto report = scaling_invariance_check(seq, Schedule::constant(1.0), levels, {});
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CHECK(report.scaled_infs[i] == doctest::Approx(report.infs[i]).epsilon(1e-13));
    CHECK(report.argmin_shifts[i] < 1e-12);
  }
  CHECK(report.verdict);
}

TEST_CASE("scaling: lambda_n = 1/alpha_n matches eval_scaled") {
  const std::vector<std::size_t> levels = {9, 17, 33};
  const auto fam = gaussian_family(levels);
  const ApproxSequence seq{fam, sine_data(fam), NoiseModel::power(1.0, 1.0), Schedule::offset_power(0.1, 1.0, 1.0)};
  testing::Gen gen(62);
  for (std::size_t n : levels) {
    const auto scaled = scaled_problem(seq.problem_at(n), 1.0 / seq.alpha_at(n));
    for (int k = 0; k < 5; ++k) {
      const auto x = gen.function(fam.reference().input_grid());
      CHECK(eval_T(scaled, x).value() == doctest::Approx(eval_scaled(seq, n, x).value()).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(scaled_problem(seq.problem_at(9), 0.0), UnsupportedError);
  CHECK_THROWS_AS(scaling_invariance_check(seq, Schedule::power(1.0, 1.0), levels, {}), UnsupportedError);
}
