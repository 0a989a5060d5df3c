#pragma once

/// \file grid.hpp
/// \brief Uniform box discretisation for periodic and Neumann (cosine) boxes.
///
/// Periodic axes sample x_j = j L / n. Neumann axes use cell-centred points
/// x_j = (j + 1/2) L / n; spectral work on such an axis is done on the
/// even extension to [0, 2L), whose Fourier modes are exactly the cosine
/// eigenfunctions cos(pi k x / L) of the Neumann Laplacian.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace llbar {

enum class Boundary { Periodic, NeumannCosine };

inline std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "neumann";
}

class Grid {
 public:
  static constexpr int kMaxDim = 3;

  Grid() = default;

  /// \param dim spatial dimension (1..3)
  /// \param components number of unknown components m (1 or 3)
  Grid(int dim, int components, std::array<int, kMaxDim> n,
       std::array<double, kMaxDim> lengths,
       Boundary boundary = Boundary::Periodic)
      : dim_(dim), m_(components), boundary_(boundary) {
    if (dim < 1 || dim > kMaxDim)
      throw ConfigError("grid dimension must be 1, 2 or 3");
    if (components != 1 && components != 3)
      throw ConfigError("component count must be 1 or 3");
    if (boundary == Boundary::NeumannCosine && dim > 2)
      throw ConfigError("Neumann (cosine) boundary is only supported for d <= 2");
    for (int a = 0; a < kMaxDim; ++a) {
      if (a < dim) {
        if (n[a] < 4 || n[a] % 2 != 0)
          throw ConfigError("grid sizes must be even and >= 4");
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
          throw ConfigError("grid lengths must be positive");
        n_[a] = n[a];
        len_[a] = lengths[a];
      } else {
        n_[a] = 1;
        len_[a] = 1.0;
      }
    }
  }

  /// Cube/square/interval with equal resolution and length on every axis.
  static Grid uniform(int dim, int components, int n, double length,
                      Boundary boundary = Boundary::Periodic) {
    return Grid(dim, components, {n, n, n}, {length, length, length},
                boundary);
  }

  int dim() const noexcept { return dim_; }
  int components() const noexcept { return m_; }
  Boundary boundary() const noexcept { return boundary_; }
  int n(int axis) const noexcept { return n_[axis]; }
  double length(int axis) const noexcept { return len_[axis]; }
  const std::array<int, kMaxDim>& shape() const noexcept { return n_; }
  const std::array<double, kMaxDim>& lengths() const noexcept { return len_; }
  bool periodic() const noexcept { return boundary_ == Boundary::Periodic; }

  std::size_t points() const noexcept {
    return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
  }

  double spacing(int axis) const noexcept { return len_[axis] / n_[axis]; }

  double cell_volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing(a);
    return v;
  }

  double volume() const noexcept {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= len_[a];
    return v;
  }

  double coordinate(int axis, int j) const noexcept {
    const double h = spacing(axis);
    return periodic() ? j * h : (j + 0.5) * h;
  }

  // Working (spectral) grid: the periodic grid, or the even extension along
  // every Neumann axis.
  int ext(int axis) const noexcept {
    if (axis >= dim_) return 1;
    return periodic() ? n_[axis] : 2 * n_[axis];
  }

  std::array<int, kMaxDim> ext_shape() const noexcept {
    return {ext(0), ext(1), ext(2)};
  }

  std::size_t ext_points() const noexcept {
    return static_cast<std::size_t>(ext(0)) * ext(1) * ext(2);
  }

  double period(int axis) const noexcept {
    return periodic() ? len_[axis] : 2.0 * len_[axis];
  }

  /// Signed mode index of working-grid position j.
  int mode_index(int axis, int j) const noexcept {
    const int e = ext(axis);
    return j <= e / 2 ? j : j - e;
  }

  /// Angular wavenumber 2 pi idx / period (= 2 pi idx / L periodic,
  /// pi idx / L cosine).
  double wavenumber(int axis, int j) const noexcept {
    if (axis >= dim_) return 0.0;
    return 2.0 * std::numbers::pi * mode_index(axis, j) / period(axis);
  }

  bool is_nyquist(int axis, int j) const noexcept {
    return axis < dim_ && j == ext(axis) / 2;
  }

  /// Same spatial discretisation (component count is not compared).
  bool same_space(const Grid& o) const noexcept {
    return dim_ == o.dim_ && boundary_ == o.boundary_ && n_ == o.n_ &&
           len_ == o.len_;
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.same_space(b) && a.m_ == b.m_;
  }

 private:
  int dim_ = 1;
  int m_ = 1;
  std::array<int, kMaxDim> n_{4, 1, 1};
  std::array<double, kMaxDim> len_{1.0, 1.0, 1.0};
  Boundary boundary_ = Boundary::Periodic;
};

}  // namespace llbar
