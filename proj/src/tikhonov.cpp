#include "tikgamma/tikhonov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "tikgamma/error.hpp"

namespace tikgamma {

ExtReal::ExtReal(double finite_value) : state_(State::finite), value_(finite_value) {
  if (std::isnan(finite_value)) throw ContractError("ExtReal: NaN is not an extended real");
  if (std::isinf(finite_value)) state_ = finite_value > 0 ? State::pos_inf : State::neg_inf;
}

ExtReal ExtReal::pos_inf() { return ExtReal(State::pos_inf); }
ExtReal ExtReal::neg_inf() { return ExtReal(State::neg_inf); }

double ExtReal::value() const {
  if (!is_finite()) throw ContractError("ExtReal::value on " + str());
  return value_;
}

double ExtReal::as_double() const {
  switch (state_) {
    case State::finite: return value_;
    case State::pos_inf: return HUGE_VAL;
    case State::neg_inf: return -HUGE_VAL;
  }
  return 0.0;
}

ExtReal ExtReal::operator+(const ExtReal& other) const {
  if (is_finite() && other.is_finite()) return ExtReal(value_ + other.value_);
  if ((is_pos_inf() && other.is_neg_inf()) || (is_neg_inf() && other.is_pos_inf()))
    throw ContractError("ExtReal: +inf + -inf is indeterminate");
  return is_finite() ? other : *this;
}

ExtReal ExtReal::operator-(const ExtReal& other) const { return *this + other * -1.0; }

ExtReal ExtReal::operator*(double scale) const {
  if (std::isnan(scale) || std::isinf(scale)) throw ContractError("ExtReal: scale must be finite");
  if (is_finite()) return ExtReal(value_ * scale);
  if (scale == 0.0) throw ContractError("ExtReal: 0 * inf is indeterminate");
  const bool positive = (scale > 0) == is_pos_inf();
  return positive ? pos_inf() : neg_inf();
}

ExtReal ExtReal::operator/(double scale) const {
  if (scale == 0.0) throw ContractError("ExtReal: division by zero");
  return *this * (1.0 / scale);
}

bool operator==(const ExtReal& a, const ExtReal& b) {
  return a.state_ == b.state_ && (!a.is_finite() || a.value_ == b.value_);
}

std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  return a.as_double() <=> b.as_double();
}

std::string ExtReal::str() const {
  if (is_pos_inf()) return "+inf";
  if (is_neg_inf()) return "-inf";
  std::ostringstream out;
  out.precision(17);
  out << value_;
  return out.str();
}

PenaltySpec PenaltySpec::half_sq_l2() { return {}; }

PenaltySpec PenaltySpec::p_power_norm(double q, NormTag tag) {
  if (!(q >= 1.0)) throw ContractError("p_power_norm needs q >= 1");
  PenaltySpec p;
  p.kind = Kind::p_power_norm;
  p.q = q;
  p.tag = tag;
  return p;
}

PenaltySpec PenaltySpec::linf() {
  PenaltySpec p;
  p.kind = Kind::linf;
  p.tag = NormTag::Linf;
  return p;
}

PenaltySpec PenaltySpec::shifted_half_sq(GridFunction x0) {
  PenaltySpec p;
  p.kind = Kind::shifted_half_sq;
  p.shift = std::move(x0);
  return p;
}

bool PenaltySpec::smooth() const {
  switch (kind) {
    case Kind::half_sq_l2:
    case Kind::shifted_half_sq: return true;
    case Kind::p_power_norm: return tag != NormTag::Linf && q > 1.0;
    case Kind::linf: return false;
  }
  return false;
}

std::string PenaltySpec::label() const {
  std::ostringstream out;
  switch (kind) {
    case Kind::half_sq_l2: return "half_sq_l2";
    case Kind::linf: return "linf";
    case Kind::shifted_half_sq: return "shifted_half_sq";
    case Kind::p_power_norm: out << "p_power_norm(" << q << ", " << to_string(tag) << ")"; break;
  }
  return out.str();
}

double PenaltySpec::value(const GridFunction& x) const {
  switch (kind) {
    case Kind::half_sq_l2: return 0.5 * inner_l2(x, x);
    case Kind::p_power_norm: return std::pow(norm(x, tag), q) / q;
    case Kind::linf: return norm(x, NormTag::Linf);
    case Kind::shifted_half_sq: {
      const GridFunction d = x - *shift;
      return 0.5 * inner_l2(d, d);
    }
  }
  return 0.0;
}

GridFunction PenaltySpec::gradient(const GridFunction& x) const {
  if (!smooth()) throw UnsupportedError("penalty " + label() + " is not differentiable");
  switch (kind) {
    case Kind::half_sq_l2: return x;
    case Kind::shifted_half_sq: return x - *shift;
    case Kind::p_power_norm: {
      const double r = norm(x, tag);
      if (r == 0.0) return GridFunction::zeros(x.grid());
      const double factor = std::pow(r, q - 2.0);
      if (tag == NormTag::L2) return x * factor;
      // H1_0: L2-Riesz representer of u -> <u, .>_{H1_0} is the discrete -u'' (zero boundary).
      const double h = x.grid().spacing();
      const std::size_t n = x.size();
      std::vector<double> g(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? x[i - 1] : 0.0;
        const double right = i + 1 < n ? x[i + 1] : 0.0;
        g[i] = factor * (2.0 * x[i] - left - right) / (h * h);
      }
      return {x.grid(), std::move(g)};
    }
    case Kind::linf: break;
  }
  throw UnsupportedError("penalty " + label() + " is not differentiable");
}

double PenaltySpec::lower_bound(double r) const {
  switch (kind) {
    case Kind::half_sq_l2: return 0.5 * r * r;
    case Kind::linf: return r;  // trapezoid weights sum to 1, so ||x||_L2 <= ||x||_Linf
    case Kind::p_power_norm:
      // Discrete Poincare on interior grids: ||u||_L2 <= ||u||_{H1_0} / 2.
      return std::pow(tag == NormTag::H1_0 ? 2.0 * r : r, q) / q;
    case Kind::shifted_half_sq: {
      const double gap = std::max(0.0, r - norm(*shift, NormTag::L2));
      return 0.5 * gap * gap;
    }
  }
  return 0.0;
}

void TikhonovProblem::validate() const {
  if (!(exponent_p >= 1.0) || !std::isfinite(exponent_p)) throw ContractError("exponent p must lie in [1, inf)");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ContractError("alpha must be finite and >= 0");
  if (!(data.grid() == op.output_grid()))
    throw ContractError("data lives on " + describe(data.grid()) + " but the operator outputs " +
                        describe(op.output_grid()));
  if (penalty.kind == PenaltySpec::Kind::shifted_half_sq && !(penalty.shift->grid() == op.input_grid()))
    throw ContractError("penalty shift must live on the operator input grid");
}

bool TikhonovProblem::linear_quadratic() const {
  const bool quadratic_penalty = penalty.kind == PenaltySpec::Kind::half_sq_l2 ||
                                 penalty.kind == PenaltySpec::Kind::shifted_half_sq;
  return exponent_p == 2.0 && quadratic_penalty && domain.kind == DomainSpec::Kind::whole_space &&
         op.linear_map().has_value();
}

TikhonovProblem make_problem(const OperatorHandle& op, const GridFunction& data, double alpha,
                             double exponent_p, PenaltySpec penalty) {
  TikhonovProblem problem{op, data, alpha, exponent_p, std::move(penalty), op.domain()};
  problem.validate();
  return problem;
}

double discrepancy(const TikhonovProblem& problem, const GridFunction& x) {
  const GridFunction r = problem.op.apply(x) - problem.data;
  const double rn = norm(r, NormTag::L2);
  if (problem.exponent_p == 2.0) return 0.5 * rn * rn;
  return std::pow(rn, problem.exponent_p) / problem.exponent_p;
}

ExtReal eval_T(const TikhonovProblem& problem, const GridFunction& x) {
  if (!(x.grid() == problem.op.input_grid()))
    throw ContractError("eval_T: x lives on " + describe(x.grid()) + ", expected " +
                        describe(problem.op.input_grid()));
  if (!membership(problem.domain, x)) return ExtReal::pos_inf();
  const double fit = discrepancy(problem, x);
  if (problem.alpha == 0.0) return fit;
  return fit + problem.alpha * problem.penalty.value(x);
}

double Schedule::at(std::size_t n) const {
  if (amplitude == 0.0) return limit;
  return limit + amplitude * std::pow(static_cast<double>(n), -exponent);
}

double NoiseModel::level(std::size_t n) const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * std::pow(static_cast<double>(n), -exponent);
}

GridFunction NoiseModel::direction(const GridSpec& grid, std::size_t n) const {
  GridFunction d = GridFunction::zeros(grid);
  if (!random) {
    d = GridFunction::sample(grid, [](double t) { return std::sqrt(2.0) * std::sin(2.0 * std::numbers::pi * t); });
  } else {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(n) + 1)));
    std::normal_distribution<double> gauss;
    std::vector<double> v(grid.size());
    for (double& e : v) e = gauss(rng);
    d = GridFunction(grid, std::move(v));
  }
  return d * (1.0 / norm(d, NormTag::L2));
}

GridFunction ApproxSequence::data_at(std::size_t n) const {
  const double delta = noise.level(n);
  if (delta == 0.0) return data;
  return axpy(data, delta, noise.direction(data.grid(), n));
}

TikhonovProblem ApproxSequence::problem_at(std::size_t n) const {
  const OperatorHandle op = family.level(n);
  TikhonovProblem problem{op, data_at(n), alpha_at(n), exponent_p, penalty, op.domain()};
  problem.validate();
  return problem;
}

TikhonovProblem ApproxSequence::target() const {
  const OperatorHandle& op = family.reference();
  TikhonovProblem problem{op, data, alpha.limit, exponent_p, penalty, op.domain()};
  problem.validate();
  return problem;
}

ExtReal eval_Tn(const ApproxSequence& seq, std::size_t n, const GridFunction& x) {
  return eval_T(seq.problem_at(n), x);
}

ExtReal eval_scaled(const ApproxSequence& seq, std::size_t n, const GridFunction& x) {
  const double a = seq.alpha_at(n);
  if (!(a > 0.0)) throw ContractError("eval_scaled needs alpha_n > 0");
  return eval_Tn(seq, n, x) / a;
}

bool is_eps_minimizer(const ExtReal& value, const ExtReal& inf_estimate, double eps) {
  if (!(eps > 0.0)) throw ContractError("eps must be positive");
  const ExtReal floor(-1.0 / eps);
  const ExtReal shifted = inf_estimate.is_neg_inf() ? ExtReal::neg_inf() : inf_estimate + ExtReal(eps);
  const ExtReal bound = shifted > floor ? shifted : floor;
  return value <= bound;
}

}  // namespace tikgamma
