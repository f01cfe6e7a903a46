#include <doctest.h>

#include "support.hpp"
#include "tikgamma/error.hpp"
#include "tikgamma/solve.hpp"

using namespace tikgamma;

namespace {

TikhonovProblem integral_problem(std::size_t x_nodes, double alpha, double sigma = 0.2) {
  QuadratureFamilyOptions opts;
  opts.x_nodes = x_nodes;
  const auto fam = make_quadrature_family(Kernel::gaussian(sigma), {x_nodes}, 257, opts);
  const auto truth = GridFunction::sample(fam.reference().input_grid(), testing::sin_pi);
  return make_problem(fam.reference(), fam.reference().apply(truth), alpha);
}

bool nonincreasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("solve config validation") {
  SolveConfig c;
  c.shrink = 1.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = {};
  c.sufficient_decrease = 0.0;
  CHECK_THROWS_AS(c.validate(), ContractError);
  c = {};
  c.max_iter = 0;
  CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("closed form: identity with alpha = 0 returns the data") {
  const GridSpec g = GridSpec::full(17);
  testing::Gen gen(51);
  const auto y = gen.function(g);
  const auto op = OperatorHandle::identity(g);
  const auto r = solve_linear_quadratic(*op.linear_map(), y, 0.0);
  CHECK(r.status == SolveStatus::converged);
  CHECK(distance(r.minimizer, y) < 1e-12);
  CHECK(r.value.value() == doctest::Approx(0.0));
}

TEST_CASE("closed form: scalar surrogate") {
  // 1/2 (2x - 1)^2 + 1/2 x^2: first-order condition 4x - 2 + x = 0.
  const LinearMap map{Eigen::MatrixXd::Constant(1, 1, 2.0), GridSpec::point(), GridSpec::point()};
  const auto r = solve_linear_quadratic(map, GridFunction(GridSpec::point(), {1.0}), 1.0);
  CHECK(r.minimizer[0] == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.value.value() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("closed form: rank-deficient operator at alpha = 0 is infeasible") {
  const auto fam = make_quadrature_family(Kernel::constant(1.0), {9}, 33);
  const auto y = GridFunction::constant(fam.reference().output_grid(), 1.0);
  const auto r = solve_linear_quadratic(*fam.reference().linear_map(), y, 0.0);
  CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("closed form and projected gradient agree on a 33-node integral problem") {
  const auto problem = integral_problem(33, 0.1);
  const auto exact = solve_linear_quadratic(problem);
  const auto pg = projected_gradient(tikhonov_objective(problem), problem.domain, {},
                                     GridFunction::zeros(problem.op.input_grid()));
  CHECK(pg.status == SolveStatus::converged);
  CHECK(distance(pg.minimizer, exact.minimizer) < 1e-6);
  CHECK(nonincreasing(pg.history));
}

TEST_CASE("projected gradient on the squared norm") {
  const GridSpec g = GridSpec::full(21);
  const Objective sq{[](const GridFunction& x) { return inner_l2(x, x); },
                     [](const GridFunction& x) { return x * 2.0; }, true};
  testing::Gen gen(52);
  SolveConfig cfg;
  const auto r = projected_gradient(sq, DomainSpec::whole(), cfg, gen.function(g, 3.0));
  CHECK(norm(r.minimizer, NormTag::L2) < 1e-9);
  CHECK(r.value.value() < cfg.grad_tol * cfg.grad_tol);
}

TEST_CASE("projected gradient stops on the ball boundary") {
  const GridSpec g = GridSpec::full(33);
  const auto target = GridFunction::constant(g, 1.0);
  const Objective pull{[&](const GridFunction& x) { return 0.5 * inner_l2(x - target, x - target); },
                       [&](const GridFunction& x) { return x - target; }, true};
  const DomainSpec ball = DomainSpec::ball(0.1);
  const auto r = projected_gradient(pull, ball, {}, GridFunction::zeros(g));
  CHECK(norm(r.minimizer, NormTag::L2) == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(distance(r.minimizer, target * 0.1) < 1e-9);
}

TEST_CASE("projected gradient refuses infeasible starts and nonsmooth objectives") {
  const GridSpec g = GridSpec::full(5);
  const Objective sq{[](const GridFunction& x) { return inner_l2(x, x); }, [](const GridFunction& x) { return x * 2.0; },
                     true};
  const auto r = projected_gradient(sq, DomainSpec::ball(1.0), {}, GridFunction::constant(g, 5.0));
  CHECK(r.status == SolveStatus::infeasible);
  CHECK(r.value.is_pos_inf());
  Objective rough = sq;
  rough.smooth = false;
  CHECK_THROWS_AS(projected_gradient(rough, DomainSpec::whole(), {}, GridFunction::zeros(g)), UnsupportedError);
}

TEST_CASE("stop_below yields an early target hit") {
  const auto problem = integral_problem(17, 0.1);
  const double inf = solve_linear_quadratic(problem).value.value();
  SolveConfig cfg;
  cfg.stop_below = inf + 1e-3;
  const auto r = projected_gradient(tikhonov_objective(problem), problem.domain, cfg,
                                    GridFunction::zeros(problem.op.input_grid()));
  CHECK(r.status == SolveStatus::target_reached);
  CHECK(r.value.value() <= inf + 1e-3);
}

TEST_CASE("minimum-penalty solution examples") {
  const GridSpec g = GridSpec::full(17);
  testing::Gen gen(53);
  const auto y = gen.function(g);
  const auto id = solve_linear_quadratic(*OperatorHandle::identity(g).linear_map(), y, 0.0);
  CHECK(distance(min_penalty_solution(*OperatorHandle::identity(g).linear_map(), y).minimizer, id.minimizer) < 1e-9);

  const auto ones = make_quadrature_family(Kernel::constant(1.0), {9}, 33);
  const auto& map = *ones.reference().linear_map();
  const auto c = GridFunction::constant(ones.reference().output_grid(), 0.7);
  const auto x = min_penalty_solution(map, c);
  CHECK(x.status == SolveStatus::converged);
  for (double v : x.minimizer.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(distance(ones.reference().apply(x.minimizer), c) < 1e-7);

  const auto inconsistent = GridFunction::sample(ones.reference().output_grid(), testing::sin_pi);
  CHECK(min_penalty_solution(map, inconsistent).status == SolveStatus::infeasible);
  CHECK_THROWS_AS(min_penalty_solution(map, c, PenaltySpec::linf()), UnsupportedError);
}

TEST_CASE("grad_check examples") {
  const GridSpec g = GridSpec::full(9);
  const Objective quad{[](const GridFunction& x) { return 0.5 * inner_l2(x, x); }, [](const GridFunction& x) { return x; },
                       true};
  testing::Gen gen(54);
  const auto x = gen.function(g);
  CHECK(grad_check(quad, x, 1e-5) < 1e-9);

  const auto problem = integral_problem(33, 0.1);
  const auto objective = tikhonov_objective(problem);
  const auto z = gen.function(problem.op.input_grid());
  CHECK(grad_check(objective, z, 1e-5) < 1e-5);

  // A quartic term makes the central-difference remainder visible as h grows.
  const Objective quartic{[](const GridFunction& v) {
                            double s = 0.0;
                            for (double e : v.values()) s += e * e * e * e;
                            return s;
                          },
                          [](const GridFunction& v) {
                            const auto w = v.grid().weights();
                            std::vector<double> out(v.size());
                            for (std::size_t i = 0; i < v.size(); ++i) out[i] = 4.0 * v[i] * v[i] * v[i] / w[i];
                            return GridFunction(v.grid(), out);
                          },
                          true};
  CHECK(grad_check(quartic, x, 1e-1) < grad_check(quartic, x, 1.0));
}

TEST_CASE("property: gradients match central differences on random Tikhonov instances") {
  testing::Gen gen(55);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nodes = gen.index(5, 65);
    const double alpha = std::pow(10.0, gen.uniform(-4.0, 0.0));
    auto problem = integral_problem(nodes, alpha, gen.uniform(0.05, 0.5));
    problem.exponent_p = trial % 3 == 0 ? 3.0 : 2.0;
    if (trial % 4 == 1) problem.penalty = PenaltySpec::p_power_norm(1.5, NormTag::L2);
    const auto x = gen.function(problem.op.input_grid());
    CHECK(grad_check(tikhonov_objective(problem), x, 1e-5) < 1e-5);
  }
}

TEST_CASE("property: projected gradient agrees with the closed form and never ascends") {
  testing::Gen gen(56);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t nodes = gen.index(3, 65);
    const auto problem = integral_problem(nodes, std::pow(10.0, gen.uniform(-2.0, 0.0)), gen.uniform(0.1, 0.5));
    const auto exact = solve_linear_quadratic(problem);
    const auto pg = projected_gradient(tikhonov_objective(problem), problem.domain, {},
                                       gen.function(problem.op.input_grid()));
    CHECK(distance(pg.minimizer, exact.minimizer) < 1e-6);
    CHECK(nonincreasing(pg.history));
  }
}

TEST_CASE("property: constrained solutions are feasible and descend") {
  testing::Gen gen(57);
  for (int trial = 0; trial < 15; ++trial) {
    auto problem = integral_problem(gen.index(3, 40), 0.01);
    const NormTag tag = trial % 2 ? NormTag::L2 : NormTag::Linf;
    problem.domain = trial % 3 ? DomainSpec::ball(gen.uniform(0.05, 0.5), tag) : DomainSpec::ball_nonneg(0.3, tag);
    const auto r = minimize(problem, {});
    CHECK(membership(problem.domain, r.minimizer));
    CHECK(nonincreasing(r.history));
    CHECK(r.value.value() <= eval_T(problem, project(problem.domain, GridFunction::zeros(problem.op.input_grid()))).value());
  }
}
