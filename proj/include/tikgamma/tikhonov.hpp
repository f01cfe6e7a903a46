#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "tikgamma/forward.hpp"
#include "tikgamma/space.hpp"

namespace tikgamma {

/// Extended real: a finite value or one of the two infinities. Arithmetic that would
/// produce an indeterminate form (inf - inf, 0 * inf) throws ContractError.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double finite_value);  // NOLINT: implicit from finite doubles is intended

  static ExtReal pos_inf();
  static ExtReal neg_inf();

  bool is_finite() const { return state_ == State::finite; }
  bool is_pos_inf() const { return state_ == State::pos_inf; }
  bool is_neg_inf() const { return state_ == State::neg_inf; }

  /// Finite value; throws ContractError on an infinity.
  double value() const;
  /// Finite value or +-HUGE_VAL, for printing and comparisons against doubles.
  double as_double() const;

  ExtReal operator+(const ExtReal& other) const;
  ExtReal operator-(const ExtReal& other) const;
  ExtReal operator*(double scale) const;
  ExtReal operator/(double scale) const;

  friend bool operator==(const ExtReal& a, const ExtReal& b);
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b);

  std::string str() const;

 private:
  enum class State { finite, pos_inf, neg_inf };
  explicit ExtReal(State s) : state_(s) {}
  State state_ = State::finite;
  double value_ = 0.0;
};

/// Omega(x). Gradients are Riesz representers in the discrete L2 inner product.
struct PenaltySpec {
  enum class Kind { half_sq_l2, p_power_norm, linf, shifted_half_sq };

  Kind kind = Kind::half_sq_l2;
  double q = 2.0;
  NormTag tag = NormTag::L2;
  std::optional<GridFunction> shift;

  static PenaltySpec half_sq_l2();
  static PenaltySpec p_power_norm(double q, NormTag tag);
  static PenaltySpec linf();
  static PenaltySpec shifted_half_sq(GridFunction x0);

  bool smooth() const;
  std::string label() const;

  double value(const GridFunction& x) const;
  GridFunction gradient(const GridFunction& x) const;

  /// gamma(||x||_L2) with Omega(x) >= gamma(||x||_L2); nondecreasing and unbounded, so every
  /// sublevel set {Omega <= t} is norm bounded.
  double lower_bound(double l2_norm) const;
};

/// T(x) = (1/p) ||F(x) - y||^p + alpha * Omega(x) on the domain, +inf elsewhere.
struct TikhonovProblem {
  OperatorHandle op;
  GridFunction data;
  double alpha = 0.0;
  double exponent_p = 2.0;
  PenaltySpec penalty = PenaltySpec::half_sq_l2();
  DomainSpec domain = DomainSpec::whole();

  void validate() const;
  /// p = 2, quadratic penalty, whole space, dense operator: the closed-form oracle applies.
  bool linear_quadratic() const;
};

TikhonovProblem make_problem(const OperatorHandle& op, const GridFunction& data, double alpha,
                             double exponent_p = 2.0, PenaltySpec penalty = PenaltySpec::half_sq_l2());

/// (1/p) ||F(x) - y||^p, ignoring the domain.
double discrepancy(const TikhonovProblem& problem, const GridFunction& x);

ExtReal eval_T(const TikhonovProblem& problem, const GridFunction& x);

/// s_n = limit + amplitude * n^(-exponent).
struct Schedule {
  double limit = 0.0;
  double amplitude = 0.0;
  double exponent = 0.0;

  static Schedule constant(double value) { return {value, 0.0, 0.0}; }
  static Schedule power(double a, double beta) { return {0.0, a, beta}; }
  static Schedule offset_power(double limit, double a, double beta) { return {limit, a, beta}; }

  double at(std::size_t n) const;
};

/// y_n = y + c n^(-gamma) d with ||d||_L2 = 1. d is sqrt(2) sin(2 pi t) renormalized on the
/// data grid, or a seeded Gaussian direction when `random` is set.
struct NoiseModel {
  double amplitude = 0.0;
  double exponent = 0.0;
  bool random = false;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel power(double c, double gamma) { return {c, gamma, false, 0}; }
  static NoiseModel seeded(double c, double gamma, std::uint64_t seed) { return {c, gamma, true, seed}; }

  double level(std::size_t n) const;
  GridFunction direction(const GridSpec& grid, std::size_t n) const;
};

/// (F_n, y_n, alpha_n, dom(F_n)) together with the target (F, y, alpha, dom(F)).
struct ApproxSequence {
  OperatorFamily family;
  GridFunction data;
  NoiseModel noise;
  Schedule alpha;
  double exponent_p = 2.0;
  PenaltySpec penalty = PenaltySpec::half_sq_l2();

  GridFunction data_at(std::size_t n) const;
  double alpha_at(std::size_t n) const { return alpha.at(n); }
  TikhonovProblem problem_at(std::size_t n) const;
  /// T with alpha = lim alpha_n and the reference operator.
  TikhonovProblem target() const;
};

ExtReal eval_Tn(const ApproxSequence& seq, std::size_t n, const GridFunction& x);

/// T_n(x) / alpha_n.
ExtReal eval_scaled(const ApproxSequence& seq, std::size_t n, const GridFunction& x);

/// f(x) <= max{inf f + eps, -1/eps}.
bool is_eps_minimizer(const ExtReal& value, const ExtReal& inf_estimate, double eps);

}  // namespace tikgamma
