#include "tikgamma/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tikgamma/error.hpp"

namespace tikgamma {

namespace {

// Two-point Gauss rule on [-1,1].
constexpr double kGauss2 = 0.57735026918962576451;  // 1/sqrt(3)

// Three-point Gauss rule on [-1,1].
constexpr std::array<double, 3> kGauss3Points = {-0.77459666924148337704, 0.0, 0.77459666924148337704};
constexpr std::array<double, 3> kGauss3Weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

double padded(const GridFunction& u, std::size_t k) {
  const std::size_t n = u.size();
  return (k == 0 || k == n + 1) ? 0.0 : u[k - 1];
}

void require_interior(const GridFunction& u, const char* what) {
  if (u.grid().kind() != GridKind::interior)
    throw ContractError(std::string(what) + " expects an interior-node function, got " +
                        describe(u.grid()));
}

}  // namespace

ScalarField as_field(const GridFunction& g) {
  return [g](double x) { return g.evaluate(x); };
}

GalerkinLevel::GalerkinLevel(std::size_t interior_nodes) : n(interior_nodes) {
  if (n < 1) throw ContractError("a Galerkin level needs at least one interior node");
}

std::vector<double> TridiagonalSystem::multiply(const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = diag[i] * x[i];
    if (i > 0) out[i] += sub[i - 1] * x[i - 1];
    if (i + 1 < n) out[i] += super[i] * x[i + 1];
  }
  return out;
}

TridiagonalSystem assemble(const EllipticProblem& problem, const GalerkinLevel& level) {
  const std::size_t n = level.n;
  const double h = level.h();
  TridiagonalSystem sys;
  sys.diag.assign(n, 0.0);
  sys.sub.assign(n > 0 ? n - 1 : 0, 0.0);
  sys.super.assign(n > 0 ? n - 1 : 0, 0.0);
  sys.rhs.assign(n, 0.0);

  // Element k spans [k h, (k+1) h] and couples global nodes k and k+1; nodes 0 and n+1 carry
  // the Dirichlet condition and are dropped.
  for (std::size_t k = 0; k <= n; ++k) {
    const double left = static_cast<double>(k) * h;
    const double mid = left + 0.5 * h;
    std::array<std::array<double, 2>, 2> local{{{1.0 / h, -1.0 / h}, {-1.0 / h, 1.0 / h}}};
    std::array<double, 2> load{0.0, 0.0};
    for (double g : {-kGauss2, kGauss2}) {
      const double xi = mid + 0.5 * h * g;
      const double c = problem.potential(xi);
      if (c < 0.0) {
        std::ostringstream msg;
        msg << "ellipticity violated: potential c(" << xi << ") = " << c << " < 0";
        throw ContractError(msg.str());
      }
      const double f = problem.source(xi);
      const std::array<double, 2> phi{(left + h - xi) / h, (xi - left) / h};
      for (int a = 0; a < 2; ++a) {
        load[a] += 0.5 * h * f * phi[a];
        for (int b = 0; b < 2; ++b) local[a][b] += 0.5 * h * c * phi[a] * phi[b];
      }
    }
    const bool has_left = k >= 1;       // global node k is an unknown
    const bool has_right = k + 1 <= n;  // global node k+1 is an unknown
    if (has_left) {
      sys.diag[k - 1] += local[0][0];
      sys.rhs[k - 1] += load[0];
    }
    if (has_right) {
      sys.diag[k] += local[1][1];
      sys.rhs[k] += load[1];
    }
    if (has_left && has_right) {
      sys.super[k - 1] += local[0][1];
      sys.sub[k - 1] += local[1][0];
    }
  }
  return sys;
}

std::vector<double> solve_tridiagonal(const TridiagonalSystem& system) {
  const std::size_t n = system.size();
  std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
  double pivot = system.diag[0];
  if (pivot == 0.0) throw NumericalError("tridiagonal solve: zero pivot in row 0");
  if (n > 1) c[0] = system.super[0] / pivot;
  d[0] = system.rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = system.diag[i] - system.sub[i - 1] * c[i - 1];
    if (pivot == 0.0) throw NumericalError("tridiagonal solve: zero pivot in row " + std::to_string(i));
    if (i + 1 < n) c[i] = system.super[i] / pivot;
    d[i] = (system.rhs[i] - system.sub[i - 1] * d[i - 1]) / pivot;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

GridFunction solve_bvp(const EllipticProblem& problem, const GalerkinLevel& level) {
  const TridiagonalSystem sys = assemble(problem, level);
  std::vector<double> u = solve_tridiagonal(sys);

  // Normwise backward error: |Au - b| against |A| |u| + |b| in the max norm.
  const auto au = sys.multiply(u);
  double res = 0.0, a_norm = 0.0, u_norm = 0.0, b_norm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    res = std::max(res, std::abs(au[i] - sys.rhs[i]));
    double row = std::abs(sys.diag[i]);
    if (i > 0) row += std::abs(sys.sub[i - 1]);
    if (i + 1 < u.size()) row += std::abs(sys.super[i]);
    a_norm = std::max(a_norm, row);
    u_norm = std::max(u_norm, std::abs(u[i]));
    b_norm = std::max(b_norm, std::abs(sys.rhs[i]));
  }
  if (res > 1e-10 * (a_norm * u_norm + b_norm))
    throw NumericalError("tridiagonal solve left a relative residual above 1e-10");
  return {level.grid(), std::move(u)};
}

GridFunction fem_forward(const GridFunction& f, const ScalarField& potential, const GalerkinLevel& level) {
  return solve_bvp(EllipticProblem{potential, as_field(f), std::nullopt}, level);
}

double energy_product(const GridFunction& u, const GridFunction& v, const ScalarField& potential) {
  require_interior(u, "energy_product");
  if (!u.same_grid(v)) throw ContractError("energy_product: grid mismatch");
  const std::size_t n = u.size();
  const double h = u.grid().spacing();
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double ul = padded(u, k), ur = padded(u, k + 1);
    const double vl = padded(v, k), vr = padded(v, k + 1);
    acc += (ur - ul) * (vr - vl) / h;
    const double left = static_cast<double>(k) * h;
    for (double g : {-kGauss2, kGauss2}) {
      const double t = 0.5 + 0.5 * g;
      const double xi = left + t * h;
      acc += 0.5 * h * potential(xi) * ((1.0 - t) * ul + t * ur) * ((1.0 - t) * vl + t * vr);
    }
  }
  return acc;
}

double l2_error(const GridFunction& u_n, const ScalarField& exact) {
  require_interior(u_n, "l2_error");
  const std::size_t n = u_n.size();
  const double h = u_n.grid().spacing();
  double acc = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double ul = padded(u_n, k), ur = padded(u_n, k + 1);
    const double left = static_cast<double>(k) * h;
    for (std::size_t g = 0; g < 3; ++g) {
      const double t = 0.5 + 0.5 * kGauss3Points[g];
      const double e = (1.0 - t) * ul + t * ur - exact(left + t * h);
      acc += 0.5 * h * kGauss3Weights[g] * e * e;
    }
  }
  return std::sqrt(acc);
}

RateStudyResult rate_study(const EllipticProblem& problem, const std::vector<std::size_t>& levels) {
  if (levels.size() < 3) throw ContractError("rate_study needs at least 3 levels");
  if (!problem.exact_solution) throw ContractError("rate_study needs a manufactured solution");

  RateStudyResult out;
  out.levels = levels;
  for (std::size_t n : levels) {
    const GridFunction u_n = solve_bvp(problem, GalerkinLevel(n));
    out.errors.push_back(l2_error(u_n, *problem.exact_solution));
  }

  // Least-squares line through (log n, log error).
  const double count = static_cast<double>(levels.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double lx = std::log(static_cast<double>(levels[i]));
    const double ly = std::log(out.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / count;
  return out;
}

OperatorFamily make_fem_family(const ScalarField& potential, const std::vector<std::size_t>& levels,
                               const FemFamilyOptions& options) {
  if (levels.empty()) throw ContractError("levels must be nonempty");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw ContractError("levels must be strictly increasing");
  if (levels.back() > options.reference_level)
    throw ContractError("largest level exceeds the reference level");

  const GridSpec x_grid = GridSpec::full(options.x_nodes);
  const GridSpec y_grid = GridSpec::interior(options.reference_level);

  auto level_operator = [&](std::size_t n) {
    const GalerkinLevel level(n);
    auto apply = [potential, level, y_grid](const GridFunction& f) {
      return resample(fem_forward(f, potential, level), y_grid);
    };
    return OperatorHandle::realize("fem@" + std::to_string(n), x_grid, y_grid, apply, options.domain);
  };

  OperatorHandle reference = level_operator(options.reference_level);
  std::map<std::size_t, OperatorHandle> ops;
  for (std::size_t n : levels)
    ops.emplace(n, n == options.reference_level ? reference : level_operator(n));
  return {"fem", std::move(ops), std::move(reference), options.strict_subdomain};
}

}  // namespace tikgamma
