#pragma once

/// \file galerkin.hpp
/// \brief Low-mode Faedo-Galerkin system used as an independent oracle for
/// the pseudospectral stepper.
///
/// The solution is sought in V_n = span{e_1, ..., e_n}, the first n
/// L2-orthonormal Laplacian eigenfunctions of the box. Basis functions are
/// evaluated directly (no FFT) on an oversampled quadrature grid; every
/// nonlinearity is formed there and projected back by quadrature:
///
///   u_n' = sigma G_n - eps Lap G_n - gamma P(u_n x G_n) + P R(u_n) + P S(u_n)
///   G_n  = P(Psi(u_n) + Phi_a(u_n)) + Phi_d(u_n)
///
/// with P the L2 projection onto V_n.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "model.hpp"

namespace llbar::galerkin {

inline constexpr int kMaxModes = 64;
inline constexpr int kOversampling = 4;

/// One real eigenfunction. Periodic boxes use sqrt(2/V) cos(k.x) /
/// sqrt(2/V) sin(k.x) with k in a half space (plus the constant); Neumann
/// boxes use normalised tensor cosines.
struct Mode {
  std::array<int, 3> index{};  // integer wave index per axis
  bool sine = false;           // periodic only
  double eigenvalue = 0.0;     // mu >= 0, -Lap e = mu e
  std::array<double, 3> wavevector{};
};

class GalerkinSystem {
 public:
  GalerkinSystem(const Model& model, int n_modes)
      : model_(model), n_(n_modes) {
    if (n_modes < 1 || n_modes > kMaxModes)
      throw ConfigError("Galerkin mode count must be in [1, " +
                        std::to_string(kMaxModes) + "]");
    const Field& nu = model.current();
    for (int a = 0; a < nu.components(); ++a) {
      const auto comp = nu.component(a);
      const auto [lo, hi] = std::minmax_element(comp.begin(), comp.end());
      if (model.has_convection() && *hi - *lo > 1e-13 * (1.0 + std::abs(*hi)))
        throw ModelError("Galerkin oracle supports only a constant current density");
      nu_[a] = comp.empty() ? 0.0 : comp[0];
    }
    select_modes();
    build_quadrature();
    check_orthonormal();
    coeffs_.assign(static_cast<std::size_t>(components()) * n_, 0.0);
  }

  const Model& model() const noexcept { return model_; }
  int size() const noexcept { return n_; }
  int components() const noexcept { return model_.components(); }
  const std::vector<Mode>& modes() const noexcept { return modes_; }
  std::size_t quadrature_points() const noexcept { return npts_; }

  /// Coefficients, component-major (m x N).
  std::vector<double>& coeffs() noexcept { return coeffs_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  double coeff(int c, int i) const noexcept { return coeffs_[c * n_ + i]; }

  /// Value of mode i at physical point x.
  double basis_value(int i, const Point& x) const {
    const Grid& g = model_.grid();
    const Mode& md = modes_[i];
    if (g.periodic()) {
      if (md.eigenvalue == 0.0) return 1.0 / std::sqrt(g.volume());
      double phase = 0.0;
      for (int a = 0; a < g.dim(); ++a) phase += md.wavevector[a] * x[a];
      const double amp = std::sqrt(2.0 / g.volume());
      return amp * (md.sine ? std::sin(phase) : std::cos(phase));
    }
    double v = 1.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double len = g.length(a);
      const int j = md.index[a];
      v *= j == 0 ? 1.0 / std::sqrt(len)
                  : std::sqrt(2.0 / len) * std::cos(std::numbers::pi * j * x[a] / len);
    }
    return v;
  }

  /// Evaluates u_n on the points of `grid` (same box as the model).
  Field to_field(const Grid& grid) const {
    if (grid.dim() != model_.grid().dim() || grid.lengths() != model_.grid().lengths() ||
        grid.boundary() != model_.grid().boundary())
      throw ConfigError("target grid does not cover the Galerkin box");
    Field out(grid, components());
    for (std::size_t p = 0; p < grid.points(); ++p) {
      const Point x = out.point(p);
      for (int i = 0; i < n_; ++i) {
        const double b = basis_value(i, x);
        for (int c = 0; c < components(); ++c) out.at(c, p) += coeff(c, i) * b;
      }
    }
    return out;
  }

  /// Projection coefficients <f, e_i> of a field by trapezoidal quadrature
  /// on the field's own grid.
  std::vector<double> project_coefficients(const Field& f) const {
    const Grid& g = f.grid();
    if (g.dim() != model_.grid().dim() || g.boundary() != model_.grid().boundary() ||
        g.lengths() != model_.grid().lengths() || f.components() != components())
      throw ConfigError("field does not live on the Galerkin box");
    for (const Mode& md : modes_)
      for (int a = 0; a < g.dim(); ++a) {
        const int limit = g.periodic() ? g.n(a) / 2 : g.n(a);
        if (std::abs(md.index[a]) >= limit)
          throw ConfigError("Galerkin mode count exceeds the modes resolved by the field grid");
      }
    std::vector<double> out(static_cast<std::size_t>(components()) * n_, 0.0);
    const double w = g.cell_volume();
    for (std::size_t p = 0; p < g.points(); ++p) {
      const Point x = f.point(p);
      for (int i = 0; i < n_; ++i) {
        const double b = basis_value(i, x) * w;
        for (int c = 0; c < components(); ++c) out[c * n_ + i] += f.at(c, p) * b;
      }
    }
    return out;
  }

  /// Galerkin right-hand side for the given coefficient vector.
  std::vector<double> ode_rhs(const std::vector<double>& a) const;
  std::vector<double> ode_rhs() const { return ode_rhs(coeffs_); }

  /// Largest |(sigma + eps mu)(kappa1 - mu)| over retained modes.
  double linear_rate_bound() const {
    const auto& p = model_.params();
    double r = 0.0;
    for (const Mode& md : modes_)
      r = std::max(r, std::abs((p.sigma + p.eps * md.eigenvalue) * (p.kappa1 - md.eigenvalue)));
    return r;
  }

  /// Sum of squared coefficients (= squared L2 norm of u_n).
  double norm_squared() const {
    double s = 0.0;
    for (double v : coeffs_) s += v * v;
    return s;
  }

 private:
  void select_modes();
  void build_quadrature();
  void check_orthonormal() const;

  // Values of u (m comps) and its gradient at quadrature point p.
  void synthesise(const std::vector<double>& a, std::vector<double>& vals,
                  std::vector<double>* grads) const;
  std::vector<double> project_points(const std::vector<double>& vals, int ncomp) const;

  Model model_;
  int n_;
  std::array<double, 3> nu_{};
  std::vector<Mode> modes_;
  std::size_t npts_ = 0;
  double weight_ = 0.0;
  std::vector<double> basis_;                 // N x npts
  std::array<std::vector<double>, 3> dbasis_;  // per axis, N x npts
  std::vector<double> coeffs_;
};

inline void GalerkinSystem::select_modes() {
  const Grid& g = model_.grid();
  const int d = g.dim();
  double lmin = g.length(0);
  for (int a = 1; a < d; ++a) lmin = std::min(lmin, g.length(a));
  std::array<int, 3> kmax{0, 0, 0};
  for (int a = 0; a < d; ++a)
    kmax[a] = static_cast<int>(std::ceil(2.0 * std::pow(n_, 1.0 / d) * g.length(a) / lmin)) + 1;

  std::vector<Mode> cands;
  auto add = [&](std::array<int, 3> j, bool sine) {
    Mode md;
    md.index = j;
    md.sine = sine;
    for (int a = 0; a < d; ++a) {
      md.wavevector[a] = (g.periodic() ? 2.0 : 1.0) * std::numbers::pi * j[a] / g.length(a);
      md.eigenvalue += md.wavevector[a] * md.wavevector[a];
    }
    cands.push_back(md);
  };
  const std::array<int, 3> lo{g.periodic() ? -kmax[0] : 0, d > 1 && g.periodic() ? -kmax[1] : 0,
                              d > 2 && g.periodic() ? -kmax[2] : 0};
  for (int j0 = lo[0]; j0 <= kmax[0]; ++j0)
    for (int j1 = lo[1]; j1 <= kmax[1]; ++j1)
      for (int j2 = lo[2]; j2 <= kmax[2]; ++j2) {
        const std::array<int, 3> j{j0, j1, j2};
        if (g.periodic()) {
          // half-space representative: first non-zero index positive
          int first = 0;
          for (int a = 0; a < 3 && first == 0; ++a) first = j[a];
          if (first < 0) continue;
          add(j, false);
          if (first > 0) add(j, true);
        } else {
          add(j, false);
        }
      }
  std::sort(cands.begin(), cands.end(), [](const Mode& x, const Mode& y) {
    return std::tie(x.eigenvalue, x.index, x.sine) < std::tie(y.eigenvalue, y.index, y.sine);
  });
  cands.resize(static_cast<std::size_t>(n_));
  modes_ = std::move(cands);
}

inline void GalerkinSystem::build_quadrature() {
  const Grid& g = model_.grid();
  const int d = g.dim();
  std::array<int, 3> q{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    int k = 0;
    for (const Mode& md : modes_) k = std::max(k, std::abs(md.index[a]));
    q[a] = kOversampling * (k + 1);
  }
  npts_ = static_cast<std::size_t>(q[0]) * q[1] * q[2];
  weight_ = g.volume() / static_cast<double>(npts_);
  basis_.assign(static_cast<std::size_t>(n_) * npts_, 0.0);
  for (int a = 0; a < d; ++a) dbasis_[a].assign(static_cast<std::size_t>(n_) * npts_, 0.0);

  std::size_t p = 0;
  for (int i0 = 0; i0 < q[0]; ++i0)
    for (int i1 = 0; i1 < q[1]; ++i1)
      for (int i2 = 0; i2 < q[2]; ++i2, ++p) {
        const std::array<int, 3> ii{i0, i1, i2};
        Point x{};
        for (int a = 0; a < d; ++a) {
          const double h = g.length(a) / q[a];
          x[a] = g.periodic() ? ii[a] * h : (ii[a] + 0.5) * h;  // trapezoid / midpoint
        }
        for (int i = 0; i < n_; ++i) {
          const Mode& md = modes_[i];
          const std::size_t at = static_cast<std::size_t>(i) * npts_ + p;
          basis_[at] = basis_value(i, x);
          if (g.periodic()) {
            if (md.eigenvalue == 0.0) continue;
            double phase = 0.0;
            for (int a = 0; a < d; ++a) phase += md.wavevector[a] * x[a];
            const double amp = std::sqrt(2.0 / g.volume());
            const double dphase = md.sine ? amp * std::cos(phase) : -amp * std::sin(phase);
            for (int a = 0; a < d; ++a) dbasis_[a][at] = md.wavevector[a] * dphase;
          } else {
            for (int a = 0; a < d; ++a) {
              double v = 1.0;
              for (int b = 0; b < d; ++b) {
                const double len = g.length(b);
                const int j = md.index[b];
                const double kb = std::numbers::pi * j / len;
                const double norm = j == 0 ? 1.0 / std::sqrt(len) : std::sqrt(2.0 / len);
                v *= b == a ? -norm * kb * std::sin(kb * x[b]) : norm * std::cos(kb * x[b]);
              }
              dbasis_[a][at] = v;
            }
          }
        }
      }
}

inline void GalerkinSystem::check_orthonormal() const {
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      double s = 0.0;
      const double* bi = basis_.data() + static_cast<std::size_t>(i) * npts_;
      const double* bj = basis_.data() + static_cast<std::size_t>(j) * npts_;
      for (std::size_t p = 0; p < npts_; ++p) s += bi[p] * bj[p];
      s *= weight_;
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw ConfigError("Galerkin basis failed the orthonormality check");
    }
}

inline void GalerkinSystem::synthesise(const std::vector<double>& a, std::vector<double>& vals,
                                       std::vector<double>* grads) const {
  const int m = components();
  const int d = model_.grid().dim();
  vals.assign(static_cast<std::size_t>(m) * npts_, 0.0);
  if (grads) grads->assign(static_cast<std::size_t>(m) * d * npts_, 0.0);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < n_; ++i) {
      const double ci = a[c * n_ + i];
      if (ci == 0.0) continue;
      const double* b = basis_.data() + static_cast<std::size_t>(i) * npts_;
      double* v = vals.data() + static_cast<std::size_t>(c) * npts_;
      for (std::size_t p = 0; p < npts_; ++p) v[p] += ci * b[p];
      if (grads)
        for (int ax = 0; ax < d; ++ax) {
          const double* db = dbasis_[ax].data() + static_cast<std::size_t>(i) * npts_;
          double* gv = grads->data() + static_cast<std::size_t>(c * d + ax) * npts_;
          for (std::size_t p = 0; p < npts_; ++p) gv[p] += ci * db[p];
        }
    }
}

inline std::vector<double> GalerkinSystem::project_points(const std::vector<double>& vals,
                                                          int ncomp) const {
  std::vector<double> out(static_cast<std::size_t>(ncomp) * n_, 0.0);
  for (int c = 0; c < ncomp; ++c) {
    const double* v = vals.data() + static_cast<std::size_t>(c) * npts_;
    for (int i = 0; i < n_; ++i) {
      const double* b = basis_.data() + static_cast<std::size_t>(i) * npts_;
      double s = 0.0;
      for (std::size_t p = 0; p < npts_; ++p) s += v[p] * b[p];
      out[c * n_ + i] = s * weight_;
    }
  }
  return out;
}

inline std::vector<double> GalerkinSystem::ode_rhs(const std::vector<double>& a) const {
  const auto& p = model_.params();
  const int m = components();
  const int d = model_.grid().dim();
  const bool need_grad = p.beta1 != 0.0 || p.beta2 != 0.0 || p.chi != 0.0;
  std::vector<double> u, du;
  synthesise(a, u, need_grad ? &du : nullptr);
  auto U = [&](int c, std::size_t q) { return u[static_cast<std::size_t>(c) * npts_ + q]; };

  // Nonlinear, non-derivative parts of Psi + Phi_a at quadrature points.
  std::vector<double> local(static_cast<std::size_t>(m) * npts_, 0.0);
  const bool aniso = m == 3 && p.aniso_enabled;
  const Vec3 e = p.easy_axis;
  for (std::size_t q = 0; q < npts_; ++q) {
    double r2 = 0.0;
    for (int c = 0; c < m; ++c) r2 += U(c, q) * U(c, q);
    double eu = 0.0;
    if (aniso)
      for (int c = 0; c < 3; ++c) eu += e[c] * U(c, q);
    for (int c = 0; c < m; ++c) {
      double v = p.kappa1 * U(c, q) - p.kappa2 * r2 * U(c, q);
      if (aniso) v += (p.lambda1 * eu - p.lambda2 * eu * eu * eu) * e[c];
      local[static_cast<std::size_t>(c) * npts_ + q] = v;
    }
  }
  // G_n = P(Psi + Phi_a) + Phi_d, with P Lap u_n = -mu a exactly.
  std::vector<double> gcoef = project_points(local, m);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < n_; ++i) gcoef[c * n_ + i] -= modes_[i].eigenvalue * a[c * n_ + i];
  if (m == 3 && p.demag_enabled) {
    for (int i = 0; i < n_; ++i) {
      const Mode& md = modes_[i];
      if (md.eigenvalue == 0.0) continue;
      double ka = 0.0;
      for (int c = 0; c < 3; ++c) ka += md.wavevector[c] * a[c * n_ + i];
      for (int c = 0; c < 3; ++c) gcoef[c * n_ + i] -= md.wavevector[c] * ka / md.eigenvalue;
    }
  }

  std::vector<double> out(static_cast<std::size_t>(m) * n_, 0.0);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < n_; ++i)
      out[c * n_ + i] = (p.sigma + p.eps * modes_[i].eigenvalue) * gcoef[c * n_ + i];

  // Remaining pointwise terms, projected together.
  const bool gyro = m == 3 && p.gamma != 0.0;
  if (!gyro && !need_grad && !p.source.enabled()) return out;
  std::vector<double> g;
  if (gyro) synthesise(gcoef, g, nullptr);
  std::vector<double> extra(static_cast<std::size_t>(m) * npts_, 0.0);
  for (std::size_t q = 0; q < npts_; ++q) {
    double uu[3] = {0.0, 0.0, 0.0};
    for (int c = 0; c < m; ++c) uu[c] = U(c, q);
    double res[3] = {0.0, 0.0, 0.0};
    if (gyro) {
      const double gg[3] = {g[q], g[npts_ + q], g[2 * npts_ + q]};
      double x[3];
      cross3(uu, gg, x);
      for (int c = 0; c < 3; ++c) res[c] -= p.gamma * x[c];
    }
    if (need_grad) {
      auto DU = [&](int c, int ax) { return du[static_cast<std::size_t>(c * d + ax) * npts_ + q]; };
      double adv[3] = {0.0, 0.0, 0.0};
      for (int c = 0; c < m; ++c)
        for (int ax = 0; ax < d; ++ax) adv[c] += nu_[ax] * DU(c, ax);
      for (int c = 0; c < m; ++c) res[c] += p.beta1 * adv[c];
      if (m == 3 && p.beta2 != 0.0) {
        double x[3];
        cross3(uu, adv, x);
        for (int c = 0; c < 3; ++c) res[c] += p.beta2 * x[c];
      }
      if (p.chi != 0.0) {
        if (m == 1) {
          const Vec3 dir = model_.current_direction();
          for (int ax = 0; ax < d; ++ax) res[0] += p.chi * 2.0 * uu[0] * DU(0, ax) * dir[ax];
        } else {
          for (int c = 0; c < 3; ++c)
            for (int ax = 0; ax < d; ++ax)
              res[c] += p.chi * (DU(c, ax) * uu[ax] + uu[c] * DU(ax, ax));
        }
      }
    }
    if (p.source.enabled()) {
      double au = 0.0;
      for (int c = 0; c < m; ++c) au += p.source.a[c] * uu[c];
      for (int c = 0; c < m; ++c) res[c] += uu[c] + au * uu[c];
    }
    for (int c = 0; c < m; ++c) extra[static_cast<std::size_t>(c) * npts_ + q] = res[c];
  }
  const std::vector<double> pe = project_points(extra, m);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += pe[i];
  return out;
}

/// Galerkin system initialised with the projection of u0 onto V_N.
inline GalerkinSystem project(const Field& u0, const Model& model, int n_modes) {
  GalerkinSystem sys(model, n_modes);
  sys.coeffs() = sys.project_coefficients(u0);
  return sys;
}

/// Advances `sys` by `steps` classical RK4 steps of size dt. `step_offset`
/// only labels blow-up errors.
inline void rk4_advance(GalerkinSystem& sys, double dt, std::size_t steps,
                        double max_norm = 1e8, std::size_t step_offset = 0) {
  auto& a = sys.coeffs();
  std::vector<double> tmp(a.size());
  auto stage = [&](const std::vector<double>& k, double h) {
    for (std::size_t i = 0; i < a.size(); ++i) tmp[i] = a[i] + h * k[i];
    return sys.ode_rhs(tmp);
  };
  for (std::size_t s = 1; s <= steps; ++s) {
    const std::vector<double> k1 = sys.ode_rhs(a);
    const std::vector<double> k2 = stage(k1, 0.5 * dt);
    const std::vector<double> k3 = stage(k2, 0.5 * dt);
    const std::vector<double> k4 = stage(k3, dt);
    for (std::size_t i = 0; i < a.size(); ++i)
      a[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    double n2 = 0.0;
    bool finite = true;
    for (double v : a) {
      finite = finite && std::isfinite(v);
      n2 += v * v;
    }
    const std::size_t at = step_offset + s;
    if (!finite) throw BlowUpError(at, at * dt, "non-finite Galerkin state");
    if (std::sqrt(n2) > max_norm) throw BlowUpError(at, at * dt, "Galerkin L2 norm exceeds guard");
  }
}

/// Classical RK4 on the coefficient ODE from t = 0 to t_end.
inline GalerkinSystem integrate_rk4(GalerkinSystem sys, double dt, double t_end,
                                    double max_norm = 1e8) {
  if (!(dt > 0.0) || !(t_end >= dt)) throw ConfigError("invalid RK4 step or horizon");
  rk4_advance(sys, dt, static_cast<std::size_t>(std::llround(t_end / dt)), max_norm);
  return sys;
}

}  // namespace llbar::galerkin
