#pragma once

/// \file field.hpp
/// \brief Multi-component real field sampled on a Grid.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace llbar {

using Point = std::array<double, Grid::kMaxDim>;

/// Real values of `ncomp` scalar components on every grid point. Storage is
/// component-major; within a component the last axis varies fastest.
/// `ncomp` defaults to the grid's component count m but may differ for
/// derived quantities (gradients carry d*m components).
class Field {
 public:
  Field() = default;

  explicit Field(const Grid& grid) : Field(grid, grid.components()) {}

  Field(const Grid& grid, int ncomp, double fill = 0.0)
      : grid_(grid),
        ncomp_(ncomp),
        values_(static_cast<std::size_t>(ncomp) * grid.points(), fill) {
    if (ncomp < 1) throw ConfigError("field needs at least one component");
  }

  /// Samples `f(x, out)` at every grid point; `out` has `ncomp` entries.
  static Field sample(const Grid& grid, int ncomp,
                      const std::function<void(const Point&, std::span<double>)>& f) {
    Field out(grid, ncomp);
    std::vector<double> buf(ncomp);
    const std::size_t np = grid.points();
    for (std::size_t p = 0; p < np; ++p) {
      std::fill(buf.begin(), buf.end(), 0.0);
      f(out.point(p), buf);
      for (int c = 0; c < ncomp; ++c) out.at(c, p) = buf[c];
    }
    return out;
  }

  /// Field whose every component is the same constant vector.
  static Field constant(const Grid& grid, std::span<const double> value) {
    Field out(grid, static_cast<int>(value.size()));
    for (int c = 0; c < out.ncomp_; ++c) {
      auto comp = out.component(c);
      std::fill(comp.begin(), comp.end(), value[c]);
    }
    return out;
  }

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return ncomp_; }
  std::size_t points() const noexcept { return grid_.points(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<double> component(int c) noexcept {
    return {values_.data() + c * grid_.points(), grid_.points()};
  }
  std::span<const double> component(int c) const noexcept {
    return {values_.data() + c * grid_.points(), grid_.points()};
  }

  double& at(int c, std::size_t p) noexcept {
    return values_[c * grid_.points() + p];
  }
  double at(int c, std::size_t p) const noexcept {
    return values_[c * grid_.points() + p];
  }

  /// Multi-index of flat point p.
  std::array<int, Grid::kMaxDim> index(std::size_t p) const noexcept {
    std::array<int, Grid::kMaxDim> idx{};
    for (int a = Grid::kMaxDim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(p % grid_.n(a));
      p /= grid_.n(a);
    }
    return idx;
  }

  /// Physical coordinates of flat point p (unused axes are 0).
  Point point(std::size_t p) const noexcept {
    const auto idx = index(p);
    Point x{};
    for (int a = 0; a < grid_.dim(); ++a) x[a] = grid_.coordinate(a, idx[a]);
    return x;
  }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }

  /// this += a * x
  Field& axpy(double a, const Field& x) {
    check_same(x);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }

  void check_same(const Field& o) const {
    if (!grid_.same_space(o.grid_) || ncomp_ != o.ncomp_)
      throw ConfigError("field shape mismatch");
  }

  friend bool operator==(const Field& a, const Field& b) noexcept {
    return a.grid_ == b.grid_ && a.ncomp_ == b.ncomp_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  int ncomp_ = 1;
  std::vector<double> values_;
};

/// L2 inner product by trapezoidal (uniform-weight) quadrature, summed over
/// components.
inline double inner(const Field& a, const Field& b) {
  a.check_same(b);
  double s = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return s * a.grid().cell_volume();
}

inline double l2_norm_squared(const Field& f) { return inner(f, f); }
inline double l2_norm(const Field& f) { return std::sqrt(inner(f, f)); }

/// Pointwise Euclidean magnitude of the component vector.
inline double point_magnitude(const Field& f, std::size_t p) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) s += f.at(c, p) * f.at(c, p);
  return std::sqrt(s);
}

}  // namespace llbar
