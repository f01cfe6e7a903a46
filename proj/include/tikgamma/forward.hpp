#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tikgamma/space.hpp"

namespace tikgamma {

/// Continuous kernel K(s, t) on [0,1]^2.
struct Kernel {
  std::string label;
  std::function<double(double, double)> eval;

  static Kernel constant(double kappa);
  static Kernel separable();  // K(s,t) = s*t
  static Kernel gaussian(double sigma);  // exp(-(s-t)^2 / sigma^2)
};

struct DomainSpec {
  enum class Kind { whole_space, norm_ball, norm_ball_nonneg };

  Kind kind = Kind::whole_space;
  double radius = 0.0;
  NormTag tag = NormTag::L2;

  static DomainSpec whole() { return {}; }
  static DomainSpec ball(double radius, NormTag tag = NormTag::L2);
  static DomainSpec ball_nonneg(double radius, NormTag tag = NormTag::L2);

  bool bounded() const { return kind != Kind::whole_space; }
  /// Same kind and tag with a different radius (no-op for whole_space).
  DomainSpec with_radius(double r) const;
};

std::string describe(const DomainSpec& domain);

bool membership(const DomainSpec& domain, const GridFunction& x);

/// Nearest point of the domain in the discrete L2 metric. L2 balls use radial scaling,
/// Linf balls use clipping; the nonnegative variants clip negatives first.
GridFunction project(const DomainSpec& domain, const GridFunction& x);

/// Dense realization of a linear operator: output values = matrix * input values.
struct LinearMap {
  Eigen::MatrixXd matrix;
  GridSpec input;
  GridSpec output;
};

class OperatorHandle {
 public:
  using ApplyFn = std::function<GridFunction(const GridFunction&)>;

  OperatorHandle(std::string label, GridSpec input, GridSpec output, ApplyFn apply,
                 DomainSpec domain = DomainSpec::whole());

  static OperatorHandle linear(std::string label, Eigen::MatrixXd matrix, GridSpec input,
                               GridSpec output, DomainSpec domain = DomainSpec::whole());
  static OperatorHandle identity(GridSpec grid, DomainSpec domain = DomainSpec::whole());
  /// Linear operator realized column by column from its action on unit vectors.
  static OperatorHandle realize(std::string label, GridSpec input, GridSpec output,
                                const ApplyFn& apply, DomainSpec domain = DomainSpec::whole());

  /// x must live on input_grid(); domain membership is the caller's business.
  GridFunction apply(const GridFunction& x) const;

  const std::string& label() const { return label_; }
  const GridSpec& input_grid() const { return input_; }
  const GridSpec& output_grid() const { return output_; }
  const DomainSpec& domain() const { return domain_; }
  const std::optional<LinearMap>& linear_map() const { return linear_; }

  OperatorHandle with_domain(DomainSpec domain) const;

 private:
  std::string label_;
  GridSpec input_;
  GridSpec output_;
  ApplyFn apply_;
  DomainSpec domain_;
  std::optional<LinearMap> linear_;
};

/// Matrix of piecewise-linear interpolation from one grid to another.
Eigen::MatrixXd interpolation_matrix(const GridSpec& from, const GridSpec& to);

/// Trapezoid collocation matrix A_ij = w_j K(s_j, t_i) on quad_m nodes.
Eigen::MatrixXd integral_matrix(const Kernel& kernel, std::size_t quad_m);

/// t -> int_0^1 K(s,t) x(s) ds by the composite trapezoid rule with quad_m nodes,
/// evaluated at the same quad_m nodes. x is resampled first.
GridFunction integral_apply(const Kernel& kernel, const GridFunction& x, std::size_t quad_m);

/// (F_n) with F_n -> F. Level outputs live on the reference operator's output grid and all
/// levels share the reference input grid, so every T_n is a functional on one space X.
class OperatorFamily {
 public:
  OperatorFamily(std::string label, std::map<std::size_t, OperatorHandle> levels,
                 OperatorHandle reference, bool strict_subdomain = false);

  const std::string& label() const { return label_; }
  std::vector<std::size_t> levels() const;
  bool has_level(std::size_t n) const { return levels_.count(n) != 0; }

  /// F_n with dom(F_n) attached.
  OperatorHandle level(std::size_t n) const;
  const OperatorHandle& reference() const { return reference_; }

  /// dom(F_n). In strict-subdomain mode a ball of radius rho shrinks to rho * (1 - 1/n),
  /// which is increasing in n and contained in dom(F).
  DomainSpec level_domain(std::size_t n) const;
  bool strict_subdomain() const { return strict_; }

 private:
  std::string label_;
  std::map<std::size_t, OperatorHandle> levels_;
  OperatorHandle reference_;
  bool strict_;
};

struct QuadratureFamilyOptions {
  std::size_t x_nodes = 33;
  DomainSpec domain = DomainSpec::whole();
  bool strict_subdomain = false;
};

/// F_n = trapezoid quadrature with n nodes, F = the same with m_ref nodes.
OperatorFamily make_quadrature_family(const Kernel& kernel, const std::vector<std::size_t>& levels,
                                      std::size_t m_ref, const QuadratureFamilyOptions& options = {});

/// F_n = F at every level.
OperatorFamily make_exact_family(const OperatorHandle& op, const std::vector<std::size_t>& levels,
                                 bool strict_subdomain = false);

struct GapEstimate {
  double value = 0.0;
  std::size_t samples = 0;
};

/// Sampled lower bound for sup_x ||F_n(x) - F(x)||, measured on the reference output grid.
GapEstimate uniform_gap(const OperatorFamily& family, std::size_t n,
                        const std::vector<GridFunction>& samples);

/// Deterministic probe set inside the ball of the given L2 radius: low-frequency sines,
/// constants and ramps, each scaled to 0.9 * radius.
std::vector<GridFunction> standard_samples(const GridSpec& grid, double radius = 1.0);

}  // namespace tikgamma
