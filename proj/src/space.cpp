#include "tikgamma/space.hpp"

#include <algorithm>
#include <cmath>

#include "tikgamma/error.hpp"

namespace tikgamma {

std::string to_string(NormTag tag) {
  switch (tag) {
    case NormTag::L2: return "L2";
    case NormTag::Linf: return "Linf";
    case NormTag::H1_0: return "H1_0";
  }
  return "?";
}

GridSpec GridSpec::full(std::size_t m) {
  if (m < 2) throw ContractError("full grid needs at least 2 nodes, got " + std::to_string(m));
  return {GridKind::full, m};
}

GridSpec GridSpec::interior(std::size_t n) {
  if (n < 1) throw ContractError("interior grid needs at least 1 node");
  return {GridKind::interior, n};
}

GridSpec GridSpec::point() { return {GridKind::point, 1}; }

double GridSpec::spacing() const {
  switch (kind_) {
    case GridKind::full: return 1.0 / static_cast<double>(size_ - 1);
    case GridKind::interior: return 1.0 / static_cast<double>(size_ + 1);
    case GridKind::point: return 1.0;
  }
  return 0.0;
}

double GridSpec::node(std::size_t i) const {
  switch (kind_) {
    case GridKind::full: return i == size_ - 1 ? 1.0 : static_cast<double>(i) * spacing();
    case GridKind::interior: return static_cast<double>(i + 1) * spacing();
    case GridKind::point: return 0.0;
  }
  return 0.0;
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = node(i);
  return out;
}

std::vector<double> GridSpec::weights() const {
  std::vector<double> w(size_, spacing());
  if (kind_ == GridKind::full) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

std::string describe(const GridSpec& grid) {
  switch (grid.kind()) {
    case GridKind::full: return "full(" + std::to_string(grid.size()) + ")";
    case GridKind::interior: return "interior(" + std::to_string(grid.size()) + ")";
    case GridKind::point: return "point";
  }
  return "?";
}

GridFunction::GridFunction() : grid_(GridSpec::point()), values_{0.0} {}

GridFunction::GridFunction(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ContractError("grid " + describe(grid_) + " expects " + std::to_string(grid_.size()) +
                        " values, got " + std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw ContractError("grid function values must be finite");
}

GridFunction GridFunction::zeros(GridSpec grid) { return constant(grid, 0.0); }

GridFunction GridFunction::constant(GridSpec grid, double value) {
  return {grid, std::vector<double>(grid.size(), value)};
}

GridFunction GridFunction::sample(GridSpec grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.node(i));
  return {grid, std::move(v)};
}

double GridFunction::evaluate(double x) const {
  if (grid_.kind() == GridKind::point) return values_[0];
  x = std::clamp(x, 0.0, 1.0);
  const double h = grid_.spacing();
  if (grid_.kind() == GridKind::full) {
    const std::size_t last = values_.size() - 1;
    auto k = static_cast<std::size_t>(std::floor(x / h));
    if (k >= last) return values_[last];
    const double t = x / h - static_cast<double>(k);
    return (1.0 - t) * values_[k] + t * values_[k + 1];
  }
  // Interior grid: pad with the implied zero boundary nodes 0 and n+1.
  const std::size_t n = values_.size();
  auto padded = [&](std::size_t j) { return (j == 0 || j == n + 1) ? 0.0 : values_[j - 1]; };
  auto k = static_cast<std::size_t>(std::floor(x / h));
  if (k >= n + 1) return 0.0;
  const double t = x / h - static_cast<double>(k);
  return (1.0 - t) * padded(k) + t * padded(k + 1);
}

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b, const char* what) {
  if (!a.same_grid(b))
    throw ContractError(std::string(what) + ": grid mismatch " + describe(a.grid()) + " vs " +
                        describe(b.grid()));
}

}  // namespace

GridFunction axpy(const GridFunction& a, double scale, const GridFunction& b) {
  require_same_grid(a, b, "axpy");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + scale * b[i];
  return {a.grid(), std::move(v)};
}

GridFunction GridFunction::operator+(const GridFunction& other) const { return axpy(*this, 1.0, other); }
GridFunction GridFunction::operator-(const GridFunction& other) const { return axpy(*this, -1.0, other); }

GridFunction GridFunction::operator*(double scale) const {
  std::vector<double> v(values_);
  for (double& e : v) e *= scale;
  return {grid_, std::move(v)};
}

double norm(const GridFunction& g, NormTag tag) {
  const auto v = g.values();
  switch (tag) {
    case NormTag::L2: return std::sqrt(inner_l2(g, g));
    case NormTag::Linf: {
      double m = 0.0;
      for (double e : v) m = std::max(m, std::abs(e));
      return m;
    }
    case NormTag::H1_0: {
      if (g.grid().kind() != GridKind::interior)
        throw ContractError("H1_0 norm applies only to interior-node functions, got " +
                            describe(g.grid()));
      const double h = g.grid().spacing();
      double prev = 0.0, acc = 0.0;
      for (double e : v) {
        acc += (e - prev) * (e - prev);
        prev = e;
      }
      acc += prev * prev;
      return std::sqrt(acc / h);
    }
  }
  return 0.0;
}

double inner_l2(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b, "inner_l2");
  const auto w = a.grid().weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * a[i] * b[i];
  return acc;
}

double distance(const GridFunction& a, const GridFunction& b, NormTag tag) { return norm(a - b, tag); }

GridFunction resample(const GridFunction& g, std::size_t target_m) {
  return resample(g, GridSpec::full(target_m));
}

GridFunction resample(const GridFunction& g, const GridSpec& target) {
  if (target == g.grid()) return g;
  if (target.kind() == GridKind::point || g.grid().kind() == GridKind::point)
    throw ContractError("resample: point grids only resample onto themselves");
  return GridFunction::sample(target, [&](double x) { return g.evaluate(x); });
}

}  // namespace tikgamma
