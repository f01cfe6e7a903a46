#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tikgamma {

enum class NormTag { L2, Linf, H1_0 };

std::string to_string(NormTag tag);

// Grid layouts on [0,1].
//   full:     m >= 2 nodes x_i = i/(m-1), endpoints included.
//   interior: n >= 1 nodes x_i = (i+1)/(n+1); the zero boundary values are implied.
//   point:    a single unit-weight node, the scalar surrogate used in hand-checkable examples.
enum class GridKind { full, interior, point };

class GridSpec {
 public:
  static GridSpec full(std::size_t m);
  static GridSpec interior(std::size_t n);
  static GridSpec point();

  GridKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  bool includes_endpoints() const { return kind_ == GridKind::full; }

  double spacing() const;
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

  /// Composite-trapezoid weights. Interior grids get weight h everywhere because the
  /// implied boundary values are zero.
  std::vector<double> weights() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  GridSpec(GridKind kind, std::size_t size) : kind_(kind), size_(size) {}
  GridKind kind_;
  std::size_t size_;
};

std::string describe(const GridSpec& grid);

/// Real-valued function sampled on a GridSpec. Immutable after construction.
class GridFunction {
 public:
  /// The zero scalar on a point grid.
  GridFunction();
  GridFunction(GridSpec grid, std::vector<double> values);

  static GridFunction zeros(GridSpec grid);
  static GridFunction constant(GridSpec grid, double value);
  static GridFunction sample(GridSpec grid, const std::function<double(double)>& fn);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  bool same_grid(const GridFunction& other) const { return grid_ == other.grid_; }

  /// Piecewise-linear evaluation anywhere in [0,1] (zero boundary for interior grids).
  double evaluate(double x) const;

  GridFunction operator+(const GridFunction& other) const;
  GridFunction operator-(const GridFunction& other) const;
  GridFunction operator*(double scale) const;
  friend GridFunction operator*(double scale, const GridFunction& g) { return g * scale; }

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// a + scale * b on a shared grid.
GridFunction axpy(const GridFunction& a, double scale, const GridFunction& b);

double norm(const GridFunction& g, NormTag tag);
double inner_l2(const GridFunction& a, const GridFunction& b);
double distance(const GridFunction& a, const GridFunction& b, NormTag tag = NormTag::L2);

/// Piecewise-linear interpolation onto a full grid with target_m nodes.
GridFunction resample(const GridFunction& g, std::size_t target_m);

/// Piecewise-linear interpolation onto an arbitrary full or interior grid.
GridFunction resample(const GridFunction& g, const GridSpec& target);

}  // namespace tikgamma
