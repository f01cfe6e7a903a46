#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tikgamma/forward.hpp"
#include "tikgamma/space.hpp"

namespace tikgamma {

using ScalarField = std::function<double(double)>;

/// Piecewise-linear view of a grid function as a callable on [0,1].
ScalarField as_field(const GridFunction& g);

/// -u'' + c u = f on (0,1), u(0) = u(1) = 0, with c >= 0.
struct EllipticProblem {
  ScalarField potential;
  ScalarField source;
  std::optional<ScalarField> exact_solution;
};

/// Piecewise-linear hat functions on n interior nodes, h = 1/(n+1).
/// Refining n -> 2n+1 nests the spaces.
struct GalerkinLevel {
  std::size_t n = 1;

  explicit GalerkinLevel(std::size_t interior_nodes);
  double h() const { return 1.0 / static_cast<double>(n + 1); }
  GridSpec grid() const { return GridSpec::interior(n); }
};

struct TridiagonalSystem {
  std::vector<double> sub;    // sub[i] couples row i+1 to column i
  std::vector<double> diag;
  std::vector<double> super;  // super[i] couples row i to column i+1
  std::vector<double> rhs;

  std::size_t size() const { return diag.size(); }
  std::vector<double> multiply(const std::vector<double>& x) const;
};

/// Galerkin system for a_c(u, phi_i) = l_f(phi_i). Stiffness is exact; the potential and
/// load terms use two-point Gauss quadrature on every element.
/// Throws ContractError if c < 0 at a quadrature point.
TridiagonalSystem assemble(const EllipticProblem& problem, const GalerkinLevel& level);

/// Thomas algorithm. Throws NumericalError on a zero pivot.
std::vector<double> solve_tridiagonal(const TridiagonalSystem& system);

GridFunction solve_bvp(const EllipticProblem& problem, const GalerkinLevel& level);

/// F_n(f) = u_n. f is taken piecewise linear between its grid values.
GridFunction fem_forward(const GridFunction& f, const ScalarField& potential, const GalerkinLevel& level);

/// a_c(u, v) for interior-node functions on the same level (exact for hat functions when c is
/// constant; Gauss quadrature otherwise).
double energy_product(const GridFunction& u, const GridFunction& v, const ScalarField& potential);

/// ||u_n - u||_{L2} evaluated with three-point Gauss quadrature per element.
double l2_error(const GridFunction& u_n, const ScalarField& exact);

struct RateStudyResult {
  std::vector<std::size_t> levels;
  std::vector<double> errors;
  double slope = 0.0;      // least-squares slope of log(error) vs log(n)
  double intercept = 0.0;  // log of the empirical constant
};

RateStudyResult rate_study(const EllipticProblem& problem, const std::vector<std::size_t>& levels);

struct FemFamilyOptions {
  std::size_t x_nodes = 33;
  std::size_t reference_level = 4095;
  DomainSpec domain = DomainSpec::whole();
  bool strict_subdomain = false;
};

/// Source-to-solution maps F_n: f -> u_n. Every level is realized as a dense matrix from the
/// parameter grid full(x_nodes) onto the reference level's interior grid.
OperatorFamily make_fem_family(const ScalarField& potential, const std::vector<std::size_t>& levels,
                               const FemFamilyOptions& options = {});

}  // namespace tikgamma
