#pragma once

/// \file random_field.hpp
/// \brief Seeded smooth random fields with prescribed spectral decay.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace llbar {

struct RandomSpectrum {
  std::uint64_t seed = 0;
  /// Coefficient amplitudes scale like (1 + |k|^2)^(-decay).
  double decay = 2.0;
  /// L2 norm of the result (after normalisation). Non-positive keeps the raw
  /// draw.
  double amplitude = 1.0;
  /// Largest |mode index| kept per axis; <= 0 keeps everything below Nyquist.
  int max_mode = 0;
};

/// Smooth random field with `ncomp` components. Deterministic in the seed
/// for a fixed build. On Neumann grids the draw is a cosine series, so the
/// field satisfies the homogeneous Neumann condition.
inline Field random_smooth_field(const Grid& grid, int ncomp, const RandomSpectrum& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid, ncomp);
  const auto dims = grid.ext_shape();

  auto kept = [&](const std::array<int, 3>& j) {
    for (int a = 0; a < grid.dim(); ++a) {
      if (grid.is_nyquist(a, j[a])) return false;
      const int idx = std::abs(grid.mode_index(a, j[a]));
      if (spec.max_mode > 0 && idx > spec.max_mode) return false;
      if (!grid.periodic() && idx >= grid.n(a)) return false;
    }
    return true;
  };

  for (int c = 0; c < ncomp; ++c) {
    auto coeffs = s.component(c);
    if (grid.periodic()) {
      std::vector<Complex> z(coeffs.size());
      for (auto& v : z) v = Complex(normal(rng), normal(rng));
      detail::for_each_mode(grid, [&](std::size_t q, const auto& k, const auto& j) {
        if (!kept(j)) return;
        std::array<int, 3> mj{};
        for (int a = 0; a < 3; ++a) mj[a] = j[a] == 0 ? 0 : dims[a] - j[a];
        const std::size_t mq =
            (static_cast<std::size_t>(mj[0]) * dims[1] + mj[1]) * dims[2] + mj[2];
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        coeffs[q] = 0.5 * (z[q] + std::conj(z[mq])) * std::pow(1.0 + k2, -spec.decay);
      });
    } else {
      // One real amplitude per non-negative index tuple (cosine product),
      // spread over the signed images with the half-cell phase shift of the
      // cell-centred grid.
      const std::array<int, 3> half{grid.n(0), grid.dim() > 1 ? grid.n(1) : 1, 1};
      std::vector<double> amp(static_cast<std::size_t>(half[0]) * half[1] * half[2]);
      for (auto& v : amp) v = normal(rng);
      detail::for_each_mode(grid, [&](std::size_t q, const auto& k, const auto& j) {
        if (!kept(j)) return;
        std::array<int, 3> aj{0, 0, 0};
        Complex factor = 1.0;
        for (int a = 0; a < grid.dim(); ++a) {
          const int idx = grid.mode_index(a, j[a]);
          aj[a] = std::abs(idx);
          if (idx != 0) factor *= 0.5 * std::polar(1.0, 0.5 * k[a] * grid.spacing(a));
        }
        const std::size_t aq = (static_cast<std::size_t>(aj[0]) * half[1] + aj[1]) * half[2] + aj[2];
        const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        coeffs[q] = amp[aq] * factor * std::pow(1.0 + k2, -spec.decay);
      });
    }
  }
  Field f = to_physical(s);
  if (spec.amplitude > 0.0) {
    const double n = l2_norm(f);
    if (n == 0.0) throw ConfigError("random field draw has zero norm");
    f *= spec.amplitude / n;
  }
  return f;
}

}  // namespace llbar
