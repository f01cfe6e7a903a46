#include "tikgamma/forward.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "tikgamma/error.hpp"

namespace tikgamma {

Kernel Kernel::constant(double kappa) {
  if (!std::isfinite(kappa)) throw ContractError("constant kernel needs a finite value");
  std::ostringstream label;
  label << "constant(" << kappa << ")";
  return {label.str(), [kappa](double, double) { return kappa; }};
}

Kernel Kernel::separable() {
  return {"separable", [](double s, double t) { return s * t; }};
}

Kernel Kernel::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ContractError("gaussian kernel needs sigma > 0");
  std::ostringstream label;
  label << "gaussian(" << sigma << ")";
  const double inv = 1.0 / (sigma * sigma);
  return {label.str(), [inv](double s, double t) { return std::exp(-(s - t) * (s - t) * inv); }};
}

DomainSpec DomainSpec::ball(double radius, NormTag tag) {
  if (!(radius > 0.0)) throw ContractError("norm ball radius must be positive");
  return {Kind::norm_ball, radius, tag};
}

DomainSpec DomainSpec::ball_nonneg(double radius, NormTag tag) {
  if (!(radius > 0.0)) throw ContractError("norm ball radius must be positive");
  return {Kind::norm_ball_nonneg, radius, tag};
}

DomainSpec DomainSpec::with_radius(double r) const {
  switch (kind) {
    case Kind::whole_space: return *this;
    case Kind::norm_ball: return ball(r, tag);
    case Kind::norm_ball_nonneg: return ball_nonneg(r, tag);
  }
  return *this;
}

std::string describe(const DomainSpec& domain) {
  std::ostringstream out;
  switch (domain.kind) {
    case DomainSpec::Kind::whole_space: return "whole_space";
    case DomainSpec::Kind::norm_ball: out << "norm_ball"; break;
    case DomainSpec::Kind::norm_ball_nonneg: out << "norm_ball_nonneg"; break;
  }
  out << "(" << domain.radius << ", " << to_string(domain.tag) << ")";
  return out.str();
}

bool membership(const DomainSpec& domain, const GridFunction& x) {
  switch (domain.kind) {
    case DomainSpec::Kind::whole_space: return true;
    case DomainSpec::Kind::norm_ball: return norm(x, domain.tag) <= domain.radius;
    case DomainSpec::Kind::norm_ball_nonneg: {
      for (double v : x.values())
        if (v < 0.0) return false;
      return norm(x, domain.tag) <= domain.radius;
    }
  }
  return false;
}

GridFunction project(const DomainSpec& domain, const GridFunction& x) {
  if (domain.kind == DomainSpec::Kind::whole_space) return x;

  std::vector<double> v(x.values().begin(), x.values().end());
  if (domain.kind == DomainSpec::Kind::norm_ball_nonneg)
    for (double& e : v) e = std::max(e, 0.0);

  switch (domain.tag) {
    case NormTag::L2: {
      GridFunction clipped(x.grid(), std::move(v));
      const double r = norm(clipped, NormTag::L2);
      if (r <= domain.radius) return clipped;
      // Radial scaling can overshoot the radius by an ulp; shrink until membership holds.
      double scale = domain.radius / r;
      GridFunction out = clipped * scale;
      while (norm(out, NormTag::L2) > domain.radius) {
        scale = std::nextafter(scale, 0.0);
        out = clipped * scale;
      }
      return out;
    }
    case NormTag::Linf:
      for (double& e : v) e = std::clamp(e, -domain.radius, domain.radius);
      return {x.grid(), std::move(v)};
    case NormTag::H1_0:
      break;
  }
  throw UnsupportedError("projection onto an H1_0 ball is not available");
}

OperatorHandle::OperatorHandle(std::string label, GridSpec input, GridSpec output, ApplyFn apply,
                               DomainSpec domain)
    : label_(std::move(label)),
      input_(input),
      output_(output),
      apply_(std::move(apply)),
      domain_(domain) {}

OperatorHandle OperatorHandle::linear(std::string label, Eigen::MatrixXd matrix, GridSpec input,
                                      GridSpec output, DomainSpec domain) {
  if (matrix.rows() != static_cast<Eigen::Index>(output.size()) ||
      matrix.cols() != static_cast<Eigen::Index>(input.size()))
    throw ContractError("linear operator matrix shape does not match its grids");
  auto shared = std::make_shared<const Eigen::MatrixXd>(matrix);
  ApplyFn apply = [shared, output](const GridFunction& x) {
    Eigen::Map<const Eigen::VectorXd> xv(x.values().data(), static_cast<Eigen::Index>(x.size()));
    Eigen::VectorXd y = (*shared) * xv;
    return GridFunction(output, std::vector<double>(y.data(), y.data() + y.size()));
  };
  OperatorHandle op(std::move(label), input, output, std::move(apply), domain);
  op.linear_ = LinearMap{std::move(matrix), input, output};
  return op;
}

OperatorHandle OperatorHandle::identity(GridSpec grid, DomainSpec domain) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return linear("identity", Eigen::MatrixXd::Identity(n, n), grid, grid, domain);
}

OperatorHandle OperatorHandle::realize(std::string label, GridSpec input, GridSpec output,
                                       const ApplyFn& apply, DomainSpec domain) {
  Eigen::MatrixXd m(output.size(), input.size());
  std::vector<double> unit(input.size(), 0.0);
  for (std::size_t j = 0; j < input.size(); ++j) {
    unit[j] = 1.0;
    const GridFunction col = apply(GridFunction(input, unit));
    if (!(col.grid() == output)) throw ContractError("realize: apply returned the wrong grid");
    for (std::size_t i = 0; i < output.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    unit[j] = 0.0;
  }
  return linear(std::move(label), std::move(m), input, output, domain);
}

GridFunction OperatorHandle::apply(const GridFunction& x) const {
  if (!(x.grid() == input_))
    throw ContractError("operator '" + label_ + "' expects input on " + describe(input_) + ", got " +
                        describe(x.grid()));
  return apply_(x);
}

OperatorHandle OperatorHandle::with_domain(DomainSpec domain) const {
  OperatorHandle copy = *this;
  copy.domain_ = domain;
  return copy;
}

Eigen::MatrixXd interpolation_matrix(const GridSpec& from, const GridSpec& to) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(to.size()),
                                            static_cast<Eigen::Index>(from.size()));
  if (from == to) return Eigen::MatrixXd::Identity(p.rows(), p.cols());
  std::vector<double> unit(from.size(), 0.0);
  for (std::size_t j = 0; j < from.size(); ++j) {
    unit[j] = 1.0;
    const GridFunction col = resample(GridFunction(from, unit), to);
    for (std::size_t i = 0; i < to.size(); ++i) p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    unit[j] = 0.0;
  }
  return p;
}

Eigen::MatrixXd integral_matrix(const Kernel& kernel, std::size_t quad_m) {
  const GridSpec grid = GridSpec::full(quad_m);
  const auto nodes = grid.nodes();
  const auto w = grid.weights();
  const auto m = static_cast<Eigen::Index>(quad_m);
  Eigen::MatrixXd a(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      a(i, j) = w[static_cast<std::size_t>(j)] *
                kernel.eval(nodes[static_cast<std::size_t>(j)], nodes[static_cast<std::size_t>(i)]);
  return a;
}

GridFunction integral_apply(const Kernel& kernel, const GridFunction& x, std::size_t quad_m) {
  if (quad_m < 2) throw ContractError("integral_apply needs at least 2 quadrature nodes");
  const GridSpec grid = GridSpec::full(quad_m);
  const GridFunction xs = resample(x, grid);
  const auto nodes = grid.nodes();
  const auto w = grid.weights();
  std::vector<double> out(quad_m, 0.0);
  for (std::size_t i = 0; i < quad_m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < quad_m; ++j) acc += w[j] * kernel.eval(nodes[j], nodes[i]) * xs[j];
    out[i] = acc;
  }
  return {grid, std::move(out)};
}

OperatorFamily::OperatorFamily(std::string label, std::map<std::size_t, OperatorHandle> levels,
                               OperatorHandle reference, bool strict_subdomain)
    : label_(std::move(label)),
      levels_(std::move(levels)),
      reference_(std::move(reference)),
      strict_(strict_subdomain) {
  if (levels_.empty()) throw ContractError("operator family needs at least one level");
  if (strict_ && levels_.begin()->first < 2)
    throw ContractError("strict-subdomain mode needs levels >= 2");
  for (const auto& [n, op] : levels_) {
    if (!(op.input_grid() == reference_.input_grid()) || !(op.output_grid() == reference_.output_grid()))
      throw ContractError("level " + std::to_string(n) + " does not share the reference grids");
  }
}

std::vector<std::size_t> OperatorFamily::levels() const {
  std::vector<std::size_t> out;
  out.reserve(levels_.size());
  for (const auto& entry : levels_) out.push_back(entry.first);
  return out;
}

OperatorHandle OperatorFamily::level(std::size_t n) const {
  const auto it = levels_.find(n);
  if (it == levels_.end())
    throw ContractError("family '" + label_ + "' has no level " + std::to_string(n));
  return it->second.with_domain(level_domain(n));
}

DomainSpec OperatorFamily::level_domain(std::size_t n) const {
  const DomainSpec& base = reference_.domain();
  if (!strict_ || !base.bounded()) return base;
  return base.with_radius(base.radius * (1.0 - 1.0 / static_cast<double>(n)));
}

namespace {

void require_increasing(const std::vector<std::size_t>& levels) {
  if (levels.empty()) throw ContractError("levels must be nonempty");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw ContractError("levels must be strictly increasing");
}

}  // namespace

OperatorFamily make_quadrature_family(const Kernel& kernel, const std::vector<std::size_t>& levels,
                                      std::size_t m_ref, const QuadratureFamilyOptions& options) {
  require_increasing(levels);
  if (levels.front() < 2) throw ContractError("quadrature levels need at least 2 nodes");
  if (levels.back() > m_ref) throw ContractError("largest level exceeds the reference resolution");

  const GridSpec x_grid = GridSpec::full(options.x_nodes);
  const GridSpec y_grid = GridSpec::full(m_ref);

  auto level_matrix = [&](std::size_t n) -> Eigen::MatrixXd {
    const GridSpec q = GridSpec::full(n);
    Eigen::MatrixXd inner = integral_matrix(kernel, n) * interpolation_matrix(x_grid, q);
    if (n == m_ref) return inner;
    return interpolation_matrix(q, y_grid) * inner;
  };

  OperatorHandle reference = OperatorHandle::linear(kernel.label + "@" + std::to_string(m_ref),
                                                    level_matrix(m_ref), x_grid, y_grid, options.domain);
  std::map<std::size_t, OperatorHandle> ops;
  for (std::size_t n : levels) {
    if (n == m_ref) {
      ops.emplace(n, reference);
      continue;
    }
    ops.emplace(n, OperatorHandle::linear(kernel.label + "@" + std::to_string(n), level_matrix(n),
                                          x_grid, y_grid, options.domain));
  }
  return {"quadrature:" + kernel.label, std::move(ops), std::move(reference), options.strict_subdomain};
}

OperatorFamily make_exact_family(const OperatorHandle& op, const std::vector<std::size_t>& levels,
                                 bool strict_subdomain) {
  require_increasing(levels);
  std::map<std::size_t, OperatorHandle> ops;
  for (std::size_t n : levels) ops.emplace(n, op);
  return {"exact:" + op.label(), std::move(ops), op, strict_subdomain};
}

GapEstimate uniform_gap(const OperatorFamily& family, std::size_t n,
                        const std::vector<GridFunction>& samples) {
  const OperatorHandle level = family.level(n);
  const OperatorHandle& ref = family.reference();
  GapEstimate gap;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!membership(level.domain(), samples[i]))
      throw ContractError("uniform_gap: sample " + std::to_string(i) + " lies outside dom(F_" +
                          std::to_string(n) + ") = " + describe(level.domain()));
    const GridFunction fx = resample(ref.apply(samples[i]), ref.output_grid());
    const GridFunction fnx = resample(level.apply(samples[i]), ref.output_grid());
    gap.value = std::max(gap.value, distance(fnx, fx));
  }
  gap.samples = samples.size();
  return gap;
}

std::vector<GridFunction> standard_samples(const GridSpec& grid, double radius) {
  using std::numbers::pi;
  std::vector<GridFunction> raw;
  for (int k = 1; k <= 4; ++k)
    raw.push_back(GridFunction::sample(grid, [k](double s) { return std::sin(k * pi * s); }));
  raw.push_back(GridFunction::constant(grid, 1.0));
  raw.push_back(GridFunction::sample(grid, [](double s) { return s; }));
  raw.push_back(GridFunction::sample(grid, [](double s) { return 1.0 - 2.0 * s; }));
  raw.push_back(GridFunction::sample(grid, [](double s) { return std::cos(3.0 * pi * s) + 0.5; }));

  std::vector<GridFunction> out;
  for (const auto& g : raw) {
    const double r = norm(g, NormTag::L2);
    out.push_back(g * (0.9 * radius / r));
  }
  return out;
}

}  // namespace tikgamma
