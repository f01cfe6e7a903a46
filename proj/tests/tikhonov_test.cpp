#include <doctest.h>

#include "support.hpp"
#include "tikgamma/error.hpp"
#include "tikgamma/tikhonov.hpp"

using namespace tikgamma;

namespace {

// F(x) = 2x on the unit-weight point grid.
OperatorHandle doubling() {
  return OperatorHandle::linear("2x", Eigen::MatrixXd::Constant(1, 1, 2.0), GridSpec::point(), GridSpec::point());
}

GridFunction scalar(double v) { return {GridSpec::point(), {v}}; }

ApproxSequence gaussian_sequence(NoiseModel noise, Schedule alpha) {
  auto fam = make_quadrature_family(Kernel::gaussian(0.2), {9, 17, 33, 65}, 513);
  const auto truth = GridFunction::sample(fam.reference().input_grid(), testing::sin_pi);
  const auto y = fam.reference().apply(truth);
  return {std::move(fam), y, noise, alpha};
}

}  // namespace

TEST_CASE("extended reals") {
  const ExtReal inf = ExtReal::pos_inf();
  CHECK((inf + 1.0).is_pos_inf());
  CHECK((ExtReal(2.0) * 3.0).value() == 6.0);
  CHECK((ExtReal::neg_inf() * -1.0).is_pos_inf());
  CHECK(ExtReal(1.0) < inf);
  CHECK(ExtReal::neg_inf() < ExtReal(-1e300));
  CHECK(ExtReal(HUGE_VAL).is_pos_inf());
  CHECK_THROWS_AS(inf - inf, ContractError);
  CHECK_THROWS_AS(inf * 0.0, ContractError);
  CHECK_THROWS_AS(inf.value(), ContractError);
  CHECK_THROWS_AS(ExtReal(NAN), ContractError);
  CHECK(inf.as_double() == HUGE_VAL);
}

TEST_CASE("eval_T examples") {
  const GridSpec g = GridSpec::full(9);
  testing::Gen gen(41);
  for (double p : {1.0, 2.0, 3.5}) {
    const auto problem = make_problem(OperatorHandle::identity(g), GridFunction::zeros(g), 0.0, p);
    CHECK(eval_T(problem, GridFunction::zeros(g)).value() == 0.0);
  }

  const auto ball = make_problem(OperatorHandle::identity(g, DomainSpec::ball(1.0)), GridFunction::zeros(g), 0.1);
  CHECK(eval_T(ball, GridFunction::constant(g, 2.0)).is_pos_inf());

  // 1/2 (2x - 1)^2 + (alpha/2) x^2 with alpha = 1: minimum at 0.4, value 0.1.
  const auto surrogate = make_problem(doubling(), scalar(1.0), 1.0);
  CHECK(eval_T(surrogate, scalar(0.4)).value() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(eval_T(surrogate, scalar(0.39)).value() > 0.1);
  CHECK(eval_T(surrogate, scalar(0.41)).value() > 0.1);

  CHECK_THROWS_AS(eval_T(surrogate, GridFunction::zeros(g)), ContractError);
  CHECK_THROWS_AS(make_problem(doubling(), scalar(1.0), -1.0).validate(), ContractError);
}

TEST_CASE("penalties") {
  const GridSpec g = GridSpec::full(101);
  const auto s = testing::sampled(g, testing::sin_pi);
  CHECK(PenaltySpec::half_sq_l2().value(s) == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(PenaltySpec::linf().value(s) == doctest::Approx(1.0));
  CHECK(PenaltySpec::p_power_norm(3.0, NormTag::L2).value(s) == doctest::Approx(std::pow(0.5, 1.5) / 3.0).epsilon(1e-4));
  CHECK(PenaltySpec::shifted_half_sq(s).value(s) == 0.0);
  CHECK_FALSE(PenaltySpec::linf().smooth());
  CHECK_THROWS_AS(PenaltySpec::linf().gradient(s), UnsupportedError);
  CHECK_THROWS_AS(PenaltySpec::p_power_norm(0.5, NormTag::L2), ContractError);
}

TEST_CASE("property: penalty gradients are Riesz representers") {
  testing::Gen gen(42);
  const std::vector<PenaltySpec> smooth = {PenaltySpec::half_sq_l2(), PenaltySpec::p_power_norm(3.0, NormTag::L2),
                                           PenaltySpec::p_power_norm(2.0, NormTag::H1_0)};
  for (int trial = 0; trial < 12; ++trial) {
    const GridSpec g = GridSpec::interior(gen.index(2, 30));
    const auto w = g.weights();
    const auto x = gen.function(g);
    for (const auto& pen : smooth) {
      const auto grad = pen.gradient(x);
      for (std::size_t i = 0; i < g.size(); ++i) {
        std::vector<double> up(x.values().begin(), x.values().end());
        std::vector<double> down = up;
        const double h = 1e-6;
        up[i] += h;
        down[i] -= h;
        const double fd = (pen.value({g, up}) - pen.value({g, down})) / (2.0 * h);
        CHECK(w[i] * grad[i] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("property: penalty dominates its lower bound") {
  testing::Gen gen(43);
  const std::vector<PenaltySpec> pens = {PenaltySpec::half_sq_l2(), PenaltySpec::linf(),
                                         PenaltySpec::p_power_norm(1.5, NormTag::L2),
                                         PenaltySpec::p_power_norm(2.0, NormTag::H1_0)};
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec g = GridSpec::interior(gen.index(1, 40));
    const auto x = gen.function(g, gen.uniform(0.01, 10.0));
    for (const auto& pen : pens) CHECK(pen.value(x) >= pen.lower_bound(norm(x, NormTag::L2)) * (1.0 - 1e-12));
  }
}

TEST_CASE("schedules and noise") {
  CHECK(Schedule::offset_power(0.1, 1.0, 1.0).at(10) == doctest::Approx(0.2));
  CHECK(Schedule::power(1.0, 0.5).at(4) == doctest::Approx(0.5));
  const GridSpec g = GridSpec::full(129);
  for (const NoiseModel& model : {NoiseModel::power(1.0, 1.0), NoiseModel::seeded(1.0, 1.0, 9)}) {
    CHECK(norm(model.direction(g, 17), NormTag::L2) == doctest::Approx(1.0));
    CHECK(model.level(17) == doctest::Approx(1.0 / 17.0));
  }
  const auto a = NoiseModel::seeded(1.0, 1.0, 5).direction(g, 3);
  const auto b = NoiseModel::seeded(1.0, 1.0, 5).direction(g, 3);
  CHECK(distance(a, b) == 0.0);
  CHECK(distance(a, NoiseModel::seeded(1.0, 1.0, 6).direction(g, 3)) > 0.1);
}

TEST_CASE("eval_Tn examples") {
  const auto seq = gaussian_sequence(NoiseModel::power(1.0, 1.0), Schedule::offset_power(0.1, 1.0, 1.0));
  CHECK(distance(seq.data_at(33), seq.data) == doctest::Approx(1.0 / 33.0));

  const auto exact_fam = make_exact_family(seq.family.reference(), {9, 17});
  const ApproxSequence exact{exact_fam, seq.data, NoiseModel::none(), Schedule::constant(0.1)};
  testing::Gen gen(44);
  const auto x = gen.function(seq.family.reference().input_grid());
  CHECK(eval_Tn(exact, 17, x).value() == eval_T(exact.target(), x).value());

  // Triangle-inequality bound at n = 65.
  const auto target = seq.target();
  const double fx = distance(seq.family.level(65).apply(x), seq.family.reference().apply(x));
  const double dy = distance(seq.data_at(65), seq.data);
  const double res = distance(seq.family.reference().apply(x), seq.data);
  const double bound = (fx + dy) * (res + 1.0) + std::abs(seq.alpha_at(65) - 0.1) * PenaltySpec::half_sq_l2().value(x);
  CHECK(std::abs(eval_Tn(seq, 65, x).value() - eval_T(target, x).value()) < bound);
}

TEST_CASE("eval_Tn in strict-subdomain mode") {
  QuadratureFamilyOptions opts;
  opts.domain = DomainSpec::ball(1.0);
  opts.strict_subdomain = true;
  auto fam = make_quadrature_family(Kernel::gaussian(0.2), {3, 9}, 129, opts);
  const GridSpec g = fam.reference().input_grid();
  const ApproxSequence seq{fam, GridFunction::zeros(fam.reference().output_grid()), NoiseModel::none(),
                           Schedule::constant(0.1)};
  const auto x = GridFunction::constant(g, 0.8);  // norm 0.8: inside dom(F), outside dom(F_3)
  CHECK(eval_Tn(seq, 3, x).is_pos_inf());
  CHECK(eval_T(seq.target(), x).is_finite());
  CHECK(eval_Tn(seq, 9, x).is_finite());
}

TEST_CASE("eval_scaled examples") {
  const auto base = gaussian_sequence(NoiseModel::none(), Schedule::constant(1.0));
  testing::Gen gen(45);
  const auto x = gen.function(base.family.reference().input_grid());
  CHECK(eval_scaled(base, 17, x).value() == eval_Tn(base, 17, x).value());

  const auto exact_fam = make_exact_family(base.family.reference(), {4, 8, 16});
  const auto y = base.family.reference().apply(x);
  const ApproxSequence zero_residual{exact_fam, y, NoiseModel::none(), Schedule::power(1.0, 1.0)};
  CHECK(eval_scaled(zero_residual, 8, x).value() == doctest::Approx(PenaltySpec::half_sq_l2().value(x)));

  const ApproxSequence diverging{exact_fam, base.data, NoiseModel::none(), Schedule::power(1.0, 1.0)};
  const double d = discrepancy(diverging.target(), x);
  const double omega = PenaltySpec::half_sq_l2().value(x);
  for (std::size_t n : {4, 8, 16}) CHECK(eval_scaled(diverging, n, x).value() == doctest::Approx(n * d + omega));

  const ApproxSequence zero_alpha{exact_fam, base.data, NoiseModel::none(), Schedule::constant(0.0)};
  CHECK_THROWS_AS(eval_scaled(zero_alpha, 4, x), ContractError);
}

TEST_CASE("eps-minimizer predicate") {
  CHECK(is_eps_minimizer(0.0025, 0.0, 0.01));
  CHECK_FALSE(is_eps_minimizer(0.02, 0.0, 0.01));
  // With inf = -inf the bound is -1/eps = -2.
  CHECK(is_eps_minimizer(-3.0, ExtReal::neg_inf(), 0.5));
  CHECK(is_eps_minimizer(-5.0, ExtReal::neg_inf(), 0.5));
  CHECK_FALSE(is_eps_minimizer(-1.0, ExtReal::neg_inf(), 0.5));
  CHECK_FALSE(is_eps_minimizer(ExtReal::pos_inf(), 0.0, 1.0));
  CHECK_THROWS_AS(is_eps_minimizer(0.0, 0.0, 0.0), ContractError);
}
