#pragma once

/// \file spectral.hpp
/// \brief Spectral representation, differential operators and dealiased
/// pointwise products.
///
/// A Spectrum holds the normalised Fourier coefficients of a field on the
/// grid's working domain: the box itself for periodic grids, the even
/// extension along each axis for Neumann grids. Coefficients are normalised
/// so that a constant field c has zero-mode coefficient c. All differential
/// operators are diagonal multipliers on the working domain, so they are
/// exact for band-limited data on either boundary mode.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "field.hpp"
#include "grid.hpp"

namespace llbar {

using Complex = std::complex<double>;

/// Product dealiasing policy for pointwise nonlinearities.
enum class Dealiasing {
  None,       ///< evaluate on the working grid, keep all modes
  TwoThirds,  ///< evaluate on the working grid, zero modes above 2/3 Nyquist
  Padded      ///< evaluate on a 2x zero-padded grid (exact for cubics)
};

inline constexpr double kTwoThirds = 2.0 / 3.0;

class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(const Grid& grid, int ncomp)
      : grid_(grid),
        ncomp_(ncomp),
        coeffs_(static_cast<std::size_t>(ncomp) * grid.ext_points()) {}

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return ncomp_; }
  std::size_t modes() const noexcept { return grid_.ext_points(); }

  std::span<Complex> component(int c) noexcept {
    return {coeffs_.data() + c * modes(), modes()};
  }
  std::span<const Complex> component(int c) const noexcept {
    return {coeffs_.data() + c * modes(), modes()};
  }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }

  Complex& at(int c, std::size_t q) noexcept { return coeffs_[c * modes() + q]; }
  Complex at(int c, std::size_t q) const noexcept {
    return coeffs_[c * modes() + q];
  }

  Spectrum& operator+=(const Spectrum& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Spectrum& operator-=(const Spectrum& o) {
    check_same(o);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Spectrum& operator*=(double s) noexcept {
    for (auto& v : coeffs_) v *= s;
    return *this;
  }
  Spectrum& axpy(double a, const Spectrum& x) {
    check_same(x);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
    return *this;
  }
  friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
  friend Spectrum operator-(Spectrum a, const Spectrum& b) { return a -= b; }
  friend Spectrum operator*(double s, Spectrum a) { return a *= s; }

  void check_same(const Spectrum& o) const {
    if (!grid_.same_space(o.grid_) || ncomp_ != o.ncomp_)
      throw ConfigError("spectrum shape mismatch");
  }

 private:
  Grid grid_;
  int ncomp_ = 1;
  std::vector<Complex> coeffs_;
};

namespace detail {

inline std::array<int, 3> decompose(std::size_t q, const std::array<int, 3>& dims) {
  std::array<int, 3> idx{};
  for (int a = 2; a >= 0; --a) {
    idx[a] = static_cast<int>(q % dims[a]);
    q /= dims[a];
  }
  return idx;
}

/// Calls f(q, k) for every working-grid mode with its wavenumber vector.
template <class F>
void for_each_mode(const Grid& g, F&& f) {
  const auto dims = g.ext_shape();
  std::array<std::vector<double>, 3> k;
  for (int a = 0; a < 3; ++a) {
    k[a].resize(dims[a]);
    for (int j = 0; j < dims[a]; ++j) k[a][j] = g.wavenumber(a, j);
  }
  std::size_t q = 0;
  for (int i0 = 0; i0 < dims[0]; ++i0)
    for (int i1 = 0; i1 < dims[1]; ++i1)
      for (int i2 = 0; i2 < dims[2]; ++i2, ++q)
        f(q, std::array<double, 3>{k[0][i0], k[1][i1], k[2][i2]},
          std::array<int, 3>{i0, i1, i2});
}

inline void forward_normalised(const Grid& g, std::span<const Complex> in,
                               std::span<Complex> out) {
  fft::forward(g.dim(), g.ext_shape(), in.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.ext_points());
  for (auto& v : out) v *= scale;
}

}  // namespace detail

/// Transforms a physical field. `odd_axes[c]` (optional) marks, per
/// component, the Neumann axes along which the component is extended oddly
/// rather than evenly (flux-type data such as gradient components).
inline Spectrum to_spectral(const Field& f, std::span<const unsigned> odd_axes = {}) {
  const Grid& g = f.grid();
  if (f.size() != static_cast<std::size_t>(f.components()) * g.points())
    throw ConfigError("field storage does not match its grid");
  Spectrum s(g, f.components());
  const auto dims = g.ext_shape();
  std::vector<Complex> buf(g.ext_points());
  for (int c = 0; c < f.components(); ++c) {
    const unsigned odd = c < static_cast<int>(odd_axes.size()) ? odd_axes[c] : 0u;
    const auto src = f.component(c);
    for (std::size_t q = 0; q < buf.size(); ++q) {
      auto idx = detail::decompose(q, dims);
      double sign = 1.0;
      if (!g.periodic()) {
        for (int a = 0; a < g.dim(); ++a) {
          const int n = g.n(a);
          if (idx[a] >= n) {
            idx[a] = 2 * n - 1 - idx[a];
            if (odd & (1u << a)) sign = -sign;
          }
        }
      }
      const std::size_t p =
          (static_cast<std::size_t>(idx[0]) * g.n(1) + idx[1]) * g.n(2) + idx[2];
      buf[q] = sign * src[p];
    }
    detail::forward_normalised(g, buf, s.component(c));
  }
  return s;
}

/// Real part of the synthesised working-domain function, restricted to the
/// physical box.
inline Field to_physical(const Spectrum& s) {
  const Grid& g = s.grid();
  Field f(g, s.components());
  const auto dims = g.ext_shape();
  std::vector<Complex> buf(g.ext_points());
  for (int c = 0; c < s.components(); ++c) {
    fft::backward(g.dim(), dims, s.component(c).data(), buf.data());
    auto dst = f.component(c);
    std::size_t p = 0;
    for (int i0 = 0; i0 < g.n(0); ++i0)
      for (int i1 = 0; i1 < g.n(1); ++i1)
        for (int i2 = 0; i2 < g.n(2); ++i2, ++p)
          dst[p] = buf[(static_cast<std::size_t>(i0) * dims[1] + i1) * dims[2] + i2].real();
  }
  return f;
}

/// Neumann grids: re-extends the restriction evenly (L2 projection onto the
/// cosine basis). Identity on periodic grids.
inline Spectrum cosine_projection(const Spectrum& s) {
  if (s.grid().periodic()) return s;
  return to_spectral(to_physical(s));
}

// ---------------------------------------------------------------------------
// Differential operators

inline Spectrum laplacian(const Spectrum& s) {
  Spectrum out = s;
  detail::for_each_mode(s.grid(), [&](std::size_t q, const auto& k, const auto&) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    for (int c = 0; c < s.components(); ++c) out.at(c, q) *= -k2;
  });
  return out;
}

inline Spectrum bilaplacian(const Spectrum& s) {
  Spectrum out = s;
  detail::for_each_mode(s.grid(), [&](std::size_t q, const auto& k, const auto&) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    for (int c = 0; c < s.components(); ++c) out.at(c, q) *= k2 * k2;
  });
  return out;
}

/// d/dx_axis. The Nyquist mode along `axis` is dropped.
inline Spectrum partial(const Spectrum& s, int axis) {
  const Grid& g = s.grid();
  if (axis < 0 || axis >= g.dim()) throw ConfigError("derivative axis out of range");
  Spectrum out = s;
  detail::for_each_mode(g, [&](std::size_t q, const auto& k, const auto& j) {
    const Complex mult = g.is_nyquist(axis, j[axis]) ? Complex{}
                                                     : Complex(0.0, k[axis]);
    for (int c = 0; c < s.components(); ++c) out.at(c, q) *= mult;
  });
  return out;
}

/// Gradient with d*m components; component c*d + a holds d(u_c)/dx_a.
inline Spectrum gradient(const Spectrum& s) {
  const Grid& g = s.grid();
  const int d = g.dim();
  Spectrum out(g, s.components() * d);
  for (int a = 0; a < d; ++a) {
    Spectrum da = partial(s, a);
    for (int c = 0; c < s.components(); ++c)
      std::copy(da.component(c).begin(), da.component(c).end(),
                out.component(c * d + a).begin());
  }
  return out;
}

/// Divergence of a d*m-component spectrum laid out as by gradient().
inline Spectrum divergence(const Spectrum& gs) {
  const Grid& g = gs.grid();
  const int d = g.dim();
  if (gs.components() % d != 0)
    throw ConfigError("divergence input must have d*m components");
  const int m = gs.components() / d;
  Spectrum out(g, m);
  for (int a = 0; a < d; ++a) {
    Spectrum da = partial(gs, a);
    for (int c = 0; c < m; ++c) {
      auto dst = out.component(c);
      auto src = da.component(c * d + a);
      for (std::size_t q = 0; q < dst.size(); ++q) dst[q] += src[q];
    }
  }
  return out;
}

/// Zeroes every mode with some |index_a| above `fraction` of the Nyquist
/// index along that axis.
inline void dealias(Spectrum& s, double fraction = kTwoThirds) {
  const Grid& g = s.grid();
  detail::for_each_mode(g, [&](std::size_t q, const auto&, const auto& j) {
    for (int a = 0; a < g.dim(); ++a) {
      const double cutoff = fraction * (g.ext(a) / 2);
      if (std::abs(g.mode_index(a, j[a])) > cutoff) {
        for (int c = 0; c < s.components(); ++c) s.at(c, q) = 0.0;
        return;
      }
    }
  });
}

// Field-level conveniences ---------------------------------------------------

inline Field laplacian(const Field& f) { return to_physical(laplacian(to_spectral(f))); }
inline Field bilaplacian(const Field& f) {
  return to_physical(bilaplacian(to_spectral(f)));
}
inline Field gradient(const Field& f) { return to_physical(gradient(to_spectral(f))); }

/// Divergence of a physical d*m-component field. On Neumann grids component
/// c*d + a is treated as a flux along axis a (odd extension across the
/// faces normal to a), which is the parity gradient() produces.
inline Field divergence(const Field& gf) {
  const Grid& g = gf.grid();
  std::vector<unsigned> odd(gf.components(), 0u);
  for (int c = 0; c < gf.components(); ++c) odd[c] = 1u << (c % g.dim());
  return to_physical(divergence(to_spectral(gf, odd)));
}

inline Field dealias(const Field& f, double fraction = kTwoThirds) {
  Spectrum s = to_spectral(f);
  dealias(s, fraction);
  return to_physical(s);
}

// ---------------------------------------------------------------------------
// Pointwise nonlinear evaluation

namespace detail {

/// Maps each working-grid index along each axis to its position on a grid
/// `factor` times finer; -1 marks the dropped Nyquist index.
inline std::array<std::vector<int>, 3> pad_map(const Grid& g, int factor) {
  std::array<std::vector<int>, 3> map;
  for (int a = 0; a < 3; ++a) {
    const int e = g.ext(a);
    const int fe = a < g.dim() ? e * factor : 1;
    map[a].resize(e);
    for (int j = 0; j < e; ++j) {
      if (a >= g.dim()) {
        map[a][j] = 0;
      } else if (factor > 1 && g.is_nyquist(a, j)) {
        map[a][j] = -1;
      } else {
        const int idx = g.mode_index(a, j);
        map[a][j] = idx >= 0 ? idx : idx + fe;
      }
    }
  }
  return map;
}

}  // namespace detail

/// Evaluates `op(in, out)` pointwise on the (possibly padded) working grid.
/// `in` holds the concatenated component values of all inputs at one point,
/// `out` receives `out_ncomp` values. Returns the dealiased spectrum of the
/// result.
template <class Op>
Spectrum pointwise(std::span<const Spectrum* const> inputs, int out_ncomp,
                   Dealiasing mode, Op&& op) {
  if (inputs.empty()) throw ConfigError("pointwise needs at least one input");
  const Grid& g = inputs.front()->grid();
  for (const Spectrum* s : inputs)
    if (!s->grid().same_space(g)) throw ConfigError("pointwise grid mismatch");

  const int factor = mode == Dealiasing::Padded ? 2 : 1;
  const auto dims = g.ext_shape();
  std::array<int, 3> fdims = dims;
  for (int a = 0; a < g.dim(); ++a) fdims[a] = dims[a] * factor;
  const std::size_t npts = static_cast<std::size_t>(fdims[0]) * fdims[1] * fdims[2];
  const auto map = detail::pad_map(g, factor);

  int nin = 0;
  for (const Spectrum* s : inputs) nin += s->components();

  std::vector<double> in_vals(static_cast<std::size_t>(nin) * npts);
  std::vector<Complex> buf(npts), tmp(npts);
  int slot = 0;
  for (const Spectrum* s : inputs) {
    for (int c = 0; c < s->components(); ++c, ++slot) {
      auto src = s->component(c);
      if (factor == 1) {
        fft::backward(g.dim(), fdims, src.data(), tmp.data());
      } else {
        std::fill(buf.begin(), buf.end(), Complex{});
        std::size_t q = 0;
        for (int i0 = 0; i0 < dims[0]; ++i0)
          for (int i1 = 0; i1 < dims[1]; ++i1)
            for (int i2 = 0; i2 < dims[2]; ++i2, ++q) {
              const int f0 = map[0][i0], f1 = map[1][i1], f2 = map[2][i2];
              if (f0 < 0 || f1 < 0 || f2 < 0) continue;
              buf[(static_cast<std::size_t>(f0) * fdims[1] + f1) * fdims[2] + f2] = src[q];
            }
        fft::backward(g.dim(), fdims, buf.data(), tmp.data());
      }
      double* dst = in_vals.data() + static_cast<std::size_t>(slot) * npts;
      for (std::size_t p = 0; p < npts; ++p) dst[p] = tmp[p].real();
    }
  }

  std::vector<double> out_vals(static_cast<std::size_t>(out_ncomp) * npts);
  std::vector<double> pin(nin), pout(out_ncomp);
  for (std::size_t p = 0; p < npts; ++p) {
    for (int i = 0; i < nin; ++i) pin[i] = in_vals[static_cast<std::size_t>(i) * npts + p];
    std::fill(pout.begin(), pout.end(), 0.0);
    op(std::span<const double>(pin), std::span<double>(pout));
    for (int c = 0; c < out_ncomp; ++c)
      out_vals[static_cast<std::size_t>(c) * npts + p] = pout[c];
  }

  Spectrum out(g, out_ncomp);
  const double scale = 1.0 / static_cast<double>(npts);
  for (int c = 0; c < out_ncomp; ++c) {
    const double* src = out_vals.data() + static_cast<std::size_t>(c) * npts;
    for (std::size_t p = 0; p < npts; ++p) buf[p] = src[p];
    fft::forward(g.dim(), fdims, buf.data(), tmp.data());
    auto dst = out.component(c);
    if (factor == 1) {
      for (std::size_t q = 0; q < dst.size(); ++q) dst[q] = tmp[q] * scale;
    } else {
      std::size_t q = 0;
      for (int i0 = 0; i0 < dims[0]; ++i0)
        for (int i1 = 0; i1 < dims[1]; ++i1)
          for (int i2 = 0; i2 < dims[2]; ++i2, ++q) {
            const int f0 = map[0][i0], f1 = map[1][i1], f2 = map[2][i2];
            dst[q] = (f0 < 0 || f1 < 0 || f2 < 0)
                         ? Complex{}
                         : tmp[(static_cast<std::size_t>(f0) * fdims[1] + f1) * fdims[2] + f2] * scale;
          }
    }
  }
  if (mode == Dealiasing::TwoThirds) dealias(out);
  return out;
}

template <class Op>
Spectrum pointwise(std::initializer_list<const Spectrum*> inputs, int out_ncomp,
                   Dealiasing mode, Op&& op) {
  std::vector<const Spectrum*> v(inputs);
  return pointwise(std::span<const Spectrum* const>(v), out_ncomp, mode,
                   std::forward<Op>(op));
}

/// Squared L2 norm over the physical box from coefficients (Parseval). Exact
/// for periodic grids and for even (cosine) spectra on Neumann grids.
inline double spectral_norm_squared(const Spectrum& s) {
  double sum = 0.0;
  for (const auto& v : s.coeffs()) sum += std::norm(v);
  return s.grid().volume() * sum;
}

}  // namespace llbar
