#pragma once

/// \file model.hpp
/// \brief Coefficients and terms of the fourth-order LLBar / convective
/// CH-AC system
///
///   du/dt = sigma (H + Phi_d) - eps Lap (H + Phi_d) - gamma u x (H + Phi_d)
///           + R(u) + S(u),      H = Psi(u) + Phi_a(u),
///
/// evaluated pseudospectrally: derivatives are spectral multipliers,
/// pointwise nonlinearities are formed on the working grid and dealiased
/// according to the model's policy.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "spectral.hpp"

namespace llbar {

using Vec3 = std::array<double, 3>;

inline double dot3(const double* a, const double* b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline void cross3(const double* a, const double* b, double* out) {
  out[0] = a[1] * b[2] - a[2] * b[1];
  out[1] = a[2] * b[0] - a[0] * b[2];
  out[2] = a[0] * b[1] - a[1] * b[0];
}

/// S(u) = u + (a . u) u, or no source.
struct Source {
  enum class Kind { None, AffineQuadratic };
  Kind kind = Kind::None;
  Vec3 a{0.0, 0.0, 0.0};

  static Source none() { return {}; }
  static Source affine_quadratic(Vec3 a) { return {Kind::AffineQuadratic, a}; }
  bool enabled() const noexcept { return kind != Kind::None; }
  friend bool operator==(const Source&, const Source&) = default;
};

struct ModelParams {
  double sigma = 1.0;
  double eps = 0.0;
  double gamma = 0.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Vec3 easy_axis{0.0, 0.0, 1.0};
  double beta1 = 0.0;
  double beta2 = 0.0;
  double chi = 0.0;
  Source source;
  bool demag_enabled = false;
  bool aniso_enabled = false;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Checks every coefficient constraint; throws ConfigError naming the
/// violated condition. Does not modify `p`.
inline void validate(const ModelParams& p, int components) {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(p.sigma > 0.0)) fail("sigma must be positive");
  if (!(p.eps >= 0.0)) fail("eps must be non-negative");
  if (!(p.gamma >= 0.0)) fail("gamma must be non-negative");
  // kappa2 = 0 is admitted for linear verification runs only.
  if (!(p.kappa2 >= 0.0)) fail("kappa2 must be non-negative");
  if (!(p.lambda2 >= 0.0)) fail("lambda2 must be non-negative");
  if (p.chi != 0.0 && !(2.0 * p.chi * p.chi < p.kappa2 * p.sigma * p.sigma)) {
    std::ostringstream os;
    os << "convection smallness condition 2 chi^2 < kappa2 sigma^2 violated (2 chi^2 = "
       << 2.0 * p.chi * p.chi << ", kappa2 sigma^2 = " << p.kappa2 * p.sigma * p.sigma
       << ")";
    fail(os.str());
  }
  const double e2 = dot3(p.easy_axis.data(), p.easy_axis.data());
  if (std::abs(std::sqrt(e2) - 1.0) > 1e-12) fail("easy axis must be a unit vector");
  if (components == 1 && p.gamma != 0.0)
    fail("gamma must be 0 for a scalar (m = 1) field");
}

/// Validated model: grid, coefficients, current density and product
/// dealiasing policy. For m = 1 anisotropy and demagnetisation are switched
/// off regardless of the flags supplied.
class Model {
 public:
  Model(const Grid& grid, ModelParams params, std::optional<Field> current = {},
        Dealiasing dealiasing = Dealiasing::TwoThirds)
      : grid_(grid), p_(params), dealias_(dealiasing) {
    validate(p_, grid.components());
    if (grid.components() == 1) {
      p_.aniso_enabled = false;
      p_.demag_enabled = false;
    }
    if (p_.demag_enabled && !grid.periodic())
      throw ConfigError("demagnetising field requires a periodic grid");
    if (current) {
      if (!current->grid().same_space(grid) || current->components() != grid.dim())
        throw ConfigError("current density must have d components on the model grid");
      nu_ = *current;
    } else {
      nu_ = Field(grid, grid.dim());
    }
    nu_hat_ = to_spectral(nu_);

    Vec3 mean{};
    for (int a = 0; a < grid.dim(); ++a) {
      double s = 0.0;
      for (double v : nu_.component(a)) s += v;
      mean[a] = s / static_cast<double>(grid.points());
    }
    const double len = std::sqrt(dot3(mean.data(), mean.data()));
    direction_ = len > 0.0 ? Vec3{mean[0] / len, mean[1] / len, mean[2] / len}
                           : Vec3{0.0, 0.0, 0.0};

    // nu_inf = |nu|_{H^2}^2 = |nu|^2 + |grad nu|^2 + |Lap nu|^2
    const Field gnu = to_physical(gradient(nu_hat_));
    const Field lnu = to_physical(laplacian(nu_hat_));
    nu_inf_ = l2_norm_squared(nu_) + l2_norm_squared(gnu) + l2_norm_squared(lnu);
  }

  /// Spatially constant current density.
  static Field constant_current(const Grid& grid, std::span<const double> v) {
    return Field::constant(grid, v.first(grid.dim()));
  }

  const Grid& grid() const noexcept { return grid_; }
  const ModelParams& params() const noexcept { return p_; }
  int components() const noexcept { return grid_.components(); }
  Dealiasing dealiasing() const noexcept { return dealias_; }
  const Field& current() const noexcept { return nu_; }
  const Spectrum& current_spectrum() const noexcept { return nu_hat_; }
  /// Normalised mean current direction (zero when the mean vanishes).
  const Vec3& current_direction() const noexcept { return direction_; }
  /// Squared H^2 norm of the current density.
  double nu_infinity() const noexcept { return nu_inf_; }

  bool has_convection() const noexcept {
    return p_.beta1 != 0.0 || p_.beta2 != 0.0 || p_.chi != 0.0;
  }

  /// Copy with a different damping coefficient (same current and policy).
  Model with_eps(double eps) const {
    ModelParams q = p_;
    q.eps = eps;
    return Model(grid_, q, nu_, dealias_);
  }

 private:
  Grid grid_;
  ModelParams p_;
  Dealiasing dealias_;
  Field nu_;
  Spectrum nu_hat_;
  Vec3 direction_{0.0, 0.0, 0.0};
  double nu_inf_ = 0.0;
};

// ---------------------------------------------------------------------------
// Terms on spectra

/// Psi(u) = Lap u + kappa1 u - kappa2 |u|^2 u
inline Spectrum exchange_gl_field(const Spectrum& u, const Model& model) {
  const auto& p = model.params();
  const int m = u.components();
  Spectrum cubic = pointwise({&u}, m, model.dealiasing(),
                             [m](std::span<const double> in, std::span<double> out) {
                               double r2 = 0.0;
                               for (int c = 0; c < m; ++c) r2 += in[c] * in[c];
                               for (int c = 0; c < m; ++c) out[c] = r2 * in[c];
                             });
  Spectrum psi = laplacian(u);
  psi.axpy(p.kappa1, u);
  psi.axpy(-p.kappa2, cubic);
  return psi;
}

/// Phi_a(u) = lambda1 (e.u) e - lambda2 (e.u)^3 e
inline Spectrum anisotropy_field(const Spectrum& u, const Model& model) {
  if (model.components() != 3 || !model.params().aniso_enabled)
    throw ModelError("anisotropy field requires m = 3 with anisotropy enabled");
  const auto& p = model.params();
  const Vec3 e = p.easy_axis;
  Spectrum out(u.grid(), 3);
  for (std::size_t q = 0; q < u.modes(); ++q) {
    const Complex eu = e[0] * u.at(0, q) + e[1] * u.at(1, q) + e[2] * u.at(2, q);
    for (int c = 0; c < 3; ++c) out.at(c, q) = p.lambda1 * eu * e[c];
  }
  if (p.lambda2 != 0.0) {
    Spectrum cubic = pointwise({&u}, 3, model.dealiasing(),
                               [&e](std::span<const double> in, std::span<double> o) {
                                 const double eu = dot3(e.data(), in.data());
                                 const double eu3 = eu * eu * eu;
                                 for (int c = 0; c < 3; ++c) o[c] = eu3 * e[c];
                               });
    out.axpy(-p.lambda2, cubic);
  }
  return out;
}

/// Periodic demagnetising field: the longitudinal projection
/// Phi_d(k) = -k (k . u(k)) / |k|^2 with Phi_d(0) = 0.
inline Spectrum demag_field(const Spectrum& u, const Model& model) {
  if (model.components() != 3 || !model.params().demag_enabled)
    throw ModelError("demagnetising field requires m = 3 with demag enabled");
  if (!u.grid().periodic())
    throw ModelError("demagnetising field requires a periodic grid");
  Spectrum out(u.grid(), 3);
  detail::for_each_mode(u.grid(), [&](std::size_t q, const auto& k, const auto&) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    const Complex ku = k[0] * u.at(0, q) + k[1] * u.at(1, q) + k[2] * u.at(2, q);
    for (int c = 0; c < 3; ++c) out.at(c, q) = -k[c] * ku / k2;
  });
  return out;
}

/// H = Psi(u) + Phi_a(u)
inline Spectrum effective_field(const Spectrum& u, const Model& model) {
  Spectrum h = exchange_gl_field(u, model);
  if (model.components() == 3 && model.params().aniso_enabled)
    h += anisotropy_field(u, model);
  return h;
}

/// R(u) = beta1 (nu.grad) u + beta2 u x (nu.grad) u + chi C(u).
///
/// C(u) is the quadratic flux divergence: div(u (x) u) restricted to the
/// first d components for m = 3, and div(u^2 nu_hat) for scalar fields with
/// nu_hat the mean current direction.
inline Spectrum convective_term(const Spectrum& u, const Model& model) {
  const auto& p = model.params();
  const Grid& g = u.grid();
  const int m = u.components();
  const int d = g.dim();
  Spectrum out(g, m);
  if (p.beta1 != 0.0 || p.beta2 != 0.0) {
    const Spectrum du = gradient(u);
    const Spectrum& nu = model.current_spectrum();
    const double b1 = p.beta1, b2 = m == 3 ? p.beta2 : 0.0;
    out += pointwise({&u, &du, &nu}, m, model.dealiasing(),
                     [m, d, b1, b2](std::span<const double> in, std::span<double> o) {
                       const double* uu = in.data();
                       const double* grad = in.data() + m;
                       const double* nu = in.data() + m + m * d;
                       double adv[3] = {0.0, 0.0, 0.0};
                       for (int c = 0; c < m; ++c)
                         for (int a = 0; a < d; ++a) adv[c] += nu[a] * grad[c * d + a];
                       for (int c = 0; c < m; ++c) o[c] = b1 * adv[c];
                       if (b2 != 0.0) {
                         double x[3];
                         cross3(uu, adv, x);
                         for (int c = 0; c < 3; ++c) o[c] += b2 * x[c];
                       }
                     });
  }
  if (p.chi != 0.0) {
    const Vec3 dir = model.current_direction();
    Spectrum flux = pointwise({&u}, m * d, model.dealiasing(),
                              [m, d, dir](std::span<const double> in, std::span<double> o) {
                                if (m == 1) {
                                  for (int a = 0; a < d; ++a) o[a] = in[0] * in[0] * dir[a];
                                } else {
                                  for (int c = 0; c < m; ++c)
                                    for (int a = 0; a < d; ++a) o[c * d + a] = in[c] * in[a];
                                }
                              });
    out.axpy(p.chi, divergence(flux));
  }
  return out;
}

/// S(u)
inline Spectrum source_term(const Spectrum& u, const Model& model) {
  const auto& src = model.params().source;
  const int m = u.components();
  if (!src.enabled()) return Spectrum(u.grid(), m);
  const Vec3 a = src.a;
  Spectrum out = u;
  out += pointwise({&u}, m, model.dealiasing(),
                   [m, a](std::span<const double> in, std::span<double> o) {
                     double au = 0.0;
                     for (int c = 0; c < m; ++c) au += a[c] * in[c];
                     for (int c = 0; c < m; ++c) o[c] = au * in[c];
                   });
  return out;
}

/// Full right-hand side. On Neumann grids the result is projected onto the
/// cosine basis.
inline Spectrum rhs(const Spectrum& u, const Model& model) {
  const auto& p = model.params();
  Spectrum g = effective_field(u, model);
  if (model.components() == 3 && p.demag_enabled) g += demag_field(u, model);

  Spectrum out = p.sigma * g;
  if (p.eps != 0.0) out.axpy(-p.eps, laplacian(g));
  if (p.gamma != 0.0) {
    out.axpy(-p.gamma, pointwise({&u, &g}, 3, model.dealiasing(),
                                 [](std::span<const double> in, std::span<double> o) {
                                   cross3(in.data(), in.data() + 3, o.data());
                                 }));
  }
  if (model.has_convection()) out += convective_term(u, model);
  if (p.source.enabled()) out += source_term(u, model);
  return cosine_projection(out);
}

// ---------------------------------------------------------------------------
// Field-level wrappers

namespace detail {
inline void check_model_field(const Field& u, const Model& model) {
  if (!u.grid().same_space(model.grid()) || u.components() != model.components())
    throw ConfigError("field does not match the model grid");
}
}  // namespace detail

inline Field exchange_gl_field(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(exchange_gl_field(to_spectral(u), model));
}
inline Field anisotropy_field(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(anisotropy_field(to_spectral(u), model));
}
inline Field demag_field(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(demag_field(to_spectral(u), model));
}
inline Field effective_field(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(effective_field(to_spectral(u), model));
}
inline Field convective_term(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(convective_term(to_spectral(u), model));
}
inline Field source_term(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(source_term(to_spectral(u), model));
}
inline Field rhs(const Field& u, const Model& model) {
  detail::check_model_field(u, model);
  return to_physical(rhs(to_spectral(u), model));
}

}  // namespace llbar
