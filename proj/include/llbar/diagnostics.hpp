#pragma once

/// \file diagnostics.hpp
/// \brief Norms, the Lyapunov functional and its dissipation identity,
/// steady-state residuals, trajectory distances, rate fits, absorbing-set
/// entry times and numerical audits of the term inequalities.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "model.hpp"
#include "random_field.hpp"
#include "spectral.hpp"

namespace llbar {

enum class NormKind { L2, L4, H1, H2 };

inline std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::L2: return "L2";
    case NormKind::L4: return "L4";
    case NormKind::H1: return "H1";
    case NormKind::H2: return "H2";
  }
  return "?";
}

inline double norm(const Field& u, NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return l2_norm(u);
    case NormKind::L4: {
      double s = 0.0;
      for (std::size_t p = 0; p < u.points(); ++p) {
        double r2 = 0.0;
        for (int c = 0; c < u.components(); ++c) r2 += u.at(c, p) * u.at(c, p);
        s += r2 * r2;
      }
      return std::pow(s * u.grid().cell_volume(), 0.25);
    }
    case NormKind::H1:
    case NormKind::H2: {
      const Spectrum s = to_spectral(u);
      double total = l2_norm_squared(u) + l2_norm_squared(to_physical(gradient(s)));
      if (kind == NormKind::H2) total += l2_norm_squared(to_physical(laplacian(s)));
      return std::sqrt(total);
    }
  }
  return 0.0;
}

/// L(u) = 1/2 |grad u|^2 + kappa2/4 | |u|^2 - kappa1/kappa2 |^2
inline double lyapunov(const Field& u, const ModelParams& p) {
  if (!(p.kappa2 > 0.0)) throw ModelError("Lyapunov functional requires kappa2 > 0");
  const double grad2 = l2_norm_squared(gradient(u));
  const double target = p.kappa1 / p.kappa2;
  double pot = 0.0;
  for (std::size_t q = 0; q < u.points(); ++q) {
    double r2 = 0.0;
    for (int c = 0; c < u.components(); ++c) r2 += u.at(c, q) * u.at(c, q);
    pot += (r2 - target) * (r2 - target);
  }
  pot *= u.grid().cell_volume();
  return 0.5 * grad2 + 0.25 * p.kappa2 * pot;
}

inline double lyapunov(const Field& u, const Model& model) {
  return lyapunov(u, model.params());
}

struct Sample {
  double t;
  Field u;
};

/// r_n = (L(u_{n+1}) - L(u_n)) / dt + sigma |H(m)|^2 + eps |grad H(m)|^2,
/// m = (u_n + u_{n+1}) / 2. Vanishes along exact gradient-flow trajectories.
inline std::vector<double> lyapunov_dissipation_residual(const std::vector<Sample>& samples,
                                                         const Model& model) {
  if (samples.size() < 2) throw ConfigError("dissipation residual needs at least two samples");
  const auto& p = model.params();
  std::vector<double> out;
  out.reserve(samples.size() - 1);
  double l_prev = lyapunov(samples[0].u, p);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double dt = samples[i + 1].t - samples[i].t;
    if (!(dt > 0.0)) throw ConfigError("sample times must be strictly increasing");
    const double l_next = lyapunov(samples[i + 1].u, p);
    Field mid = samples[i].u + samples[i + 1].u;
    mid *= 0.5;
    const Spectrum h = effective_field(to_spectral(mid), model);
    double diss = p.sigma * l2_norm_squared(to_physical(h));
    if (p.eps != 0.0) diss += p.eps * l2_norm_squared(to_physical(gradient(h)));
    out.push_back((l_next - l_prev) / dt + diss);
    l_prev = l_next;
  }
  return out;
}

struct SteadyResidual {
  double h_residual;    // |H(u)|_L2
  double rhs_residual;  // |rhs(u)|_L2
};

inline SteadyResidual steady_residual(const Field& u, const Model& model) {
  const Spectrum s = to_spectral(u);
  return {l2_norm(to_physical(effective_field(s, model))), l2_norm(to_physical(rhs(s, model)))};
}

inline double trajectory_distance(const Field& u, const Field& v, NormKind kind) {
  if (!u.grid().same_space(v.grid()) || u.components() != v.components())
    throw ConfigError("trajectory_distance: grid mismatch");
  return norm(u - v, kind);
}

struct RateFit {
  double slope;
  double intercept;
  double r2;
};

/// Least squares of log(distance) against log(parameter).
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw ConfigError("rate_fit needs at least three pairs");
  const double n = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pairs) {
    if (!(x > 0.0) || !(y > 0.0)) throw ConfigError("rate_fit needs positive values");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pairs) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConfigError("rate_fit needs distinct parameters");
  const double slope = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return {slope, my - slope * mx, r2};
}

/// Ordinary linear least squares y = slope * x + intercept.
inline RateFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear_fit needs matching series");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy)};
}

// ---------------------------------------------------------------------------
// Run records

struct RunRecord {
  std::vector<double> times;
  std::vector<double> l2, l4, h1, h2, lyapunov, h_residual;
  std::map<std::string, std::string> meta;

  std::size_t size() const noexcept { return times.size(); }

  /// Appends every diagnostic of u at time t. The Lyapunov column is NaN
  /// when kappa2 = 0.
  void append(double t, const Field& u, const Model& model) {
    if (!times.empty() && !(t > times.back()))
      throw ConfigError("record times must be strictly increasing");
    const Spectrum s = to_spectral(u);
    const double n0 = l2_norm_squared(u);
    const double g2 = l2_norm_squared(to_physical(gradient(s)));
    const double lap2 = l2_norm_squared(to_physical(laplacian(s)));
    times.push_back(t);
    l2.push_back(std::sqrt(n0));
    l4.push_back(norm(u, NormKind::L4));
    h1.push_back(std::sqrt(n0 + g2));
    h2.push_back(std::sqrt(n0 + g2 + lap2));
    lyapunov.push_back(model.params().kappa2 > 0.0 ? llbar::lyapunov(u, model.params())
                                                   : std::numeric_limits<double>::quiet_NaN());
    h_residual.push_back(l2_norm(to_physical(effective_field(s, model))));
  }
};

/// First recorded time from which |u|_L2^2 stays <= threshold until the end
/// of the record.
inline std::optional<double> absorbing_entry_time(const RunRecord& rec, double threshold) {
  std::optional<double> entry;
  for (std::size_t i = rec.size(); i-- > 0;) {
    if (rec.l2[i] * rec.l2[i] <= threshold)
      entry = rec.times[i];
    else
      break;
  }
  return entry;
}

// ---------------------------------------------------------------------------
// Demagnetising field constraints

struct MaxwellResidual {
  double curl;        // |curl Phi_d|, relative to |u|, nonzero modes
  double divergence;  // |div(Phi_d + u)|, relative to |u|, nonzero modes
};

/// Spectral-norm residuals of curl Phi_d(u) = 0 and div(Phi_d(u) + u) = 0,
/// each scaled by |k||u(k)| summed over the nonzero modes.
inline MaxwellResidual demag_maxwell_residual(const Field& u, const Model& model) {
  const Spectrum uh = to_spectral(u);
  const Spectrum ph = demag_field(uh, model);
  double curl2 = 0, div2 = 0, ref2 = 0;
  detail::for_each_mode(u.grid(), [&](std::size_t q, const auto& k, const auto&) {
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) return;
    const Complex p[3] = {ph.at(0, q), ph.at(1, q), ph.at(2, q)};
    const Complex w[3] = {uh.at(0, q), uh.at(1, q), uh.at(2, q)};
    const Complex c0 = k[1] * p[2] - k[2] * p[1];
    const Complex c1 = k[2] * p[0] - k[0] * p[2];
    const Complex c2 = k[0] * p[1] - k[1] * p[0];
    curl2 += std::norm(c0) + std::norm(c1) + std::norm(c2);
    const Complex dv = k[0] * (p[0] + w[0]) + k[1] * (p[1] + w[1]) + k[2] * (p[2] + w[2]);
    div2 += std::norm(dv);
    ref2 += k2 * (std::norm(w[0]) + std::norm(w[1]) + std::norm(w[2]));
  });
  if (ref2 == 0.0) return {0.0, 0.0};
  return {std::sqrt(curl2 / ref2), std::sqrt(div2 / ref2)};
}

// ---------------------------------------------------------------------------
// Inequality / identity audit

struct AuditEntry {
  std::string name;
  bool identity;         // identity (relative error) or inequality (lhs - rhs)
  double max_violation;  // worst value over all pairs
  double tolerance;
  bool passed() const noexcept { return max_violation <= tolerance; }
};

struct AuditReport {
  std::uint64_t seed = 0;
  int pairs = 0;
  std::vector<AuditEntry> entries;
  bool passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const AuditEntry& e) { return e.passed(); });
  }
};

inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kInequalitySlack = 1e-10;

namespace detail {

/// Audit model: anisotropy always on for m = 3, demag on for periodic m = 3,
/// and the model's source (or a fixed affine-quadratic one when disabled).
inline Model audit_model(const Model& model) {
  ModelParams p = model.params();
  if (model.components() == 3) {
    p.aniso_enabled = true;
    p.demag_enabled = model.grid().periodic();
  }
  if (!p.source.enabled()) p.source = Source::affine_quadratic({0.5, -0.3, 0.2});
  return Model(model.grid(), p, model.current(), model.dealiasing());
}

}  // namespace detail

/// Evaluates every audited identity and inequality on one pair (v, w).
/// Results are indexed like AuditReport::entries.
inline std::vector<double> audit_pair(const Field& v, const Field& w, const Model& model) {
  const Model am = detail::audit_model(model);
  const auto& p = am.params();
  const Grid& g = v.grid();
  const int m = v.components();
  const int d = g.dim();
  std::vector<double> out;

  const Spectrum vh = to_spectral(v), wh = to_spectral(w);
  const Field gv = to_physical(gradient(vh)), gw = to_physical(gradient(wh));
  const Field lv = to_physical(laplacian(vh)), lw = to_physical(laplacian(wh));

  // |v|^2 w and its spectral derivatives
  Field prod(g, m);
  for (std::size_t q = 0; q < v.points(); ++q) {
    double r2 = 0.0;
    for (int c = 0; c < m; ++c) r2 += v.at(c, q) * v.at(c, q);
    for (int c = 0; c < m; ++c) prod.at(c, q) = r2 * w.at(c, q);
  }
  const Spectrum ph = to_spectral(prod);
  const Field grad_prod = to_physical(gradient(ph));
  const Field lap_prod = to_physical(laplacian(ph));

  double err_grad = 0, scale_grad = 1, err_lap = 0, scale_lap = 1;
  for (std::size_t q = 0; q < v.points(); ++q) {
    double r2 = 0.0, vlv = 0.0, gv2 = 0.0;
    for (int c = 0; c < m; ++c) {
      r2 += v.at(c, q) * v.at(c, q);
      vlv += v.at(c, q) * lv.at(c, q);
      for (int a = 0; a < d; ++a) gv2 += gv.at(c * d + a, q) * gv.at(c * d + a, q);
    }
    std::array<double, 3> vdv{};  // (v . d_a v)
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < m; ++c) vdv[a] += v.at(c, q) * gv.at(c * d + a, q);
    for (int c = 0; c < m; ++c) {
      for (int a = 0; a < d; ++a) {
        const double lhs = grad_prod.at(c * d + a, q);
        const double rhs = 2.0 * w.at(c, q) * vdv[a] + r2 * gw.at(c * d + a, q);
        err_grad = std::max(err_grad, std::abs(lhs - rhs));
        scale_grad = std::max(scale_grad, std::abs(lhs));
      }
      double mixed = 0.0;
      for (int a = 0; a < d; ++a) mixed += gw.at(c * d + a, q) * vdv[a];
      const double lhs = lap_prod.at(c, q);
      const double rhs = 2.0 * gv2 * w.at(c, q) + 2.0 * vlv * w.at(c, q) + 4.0 * mixed +
                         r2 * lw.at(c, q);
      err_lap = std::max(err_lap, std::abs(lhs - rhs));
      scale_lap = std::max(scale_lap, std::abs(lhs));
    }
  }
  out.push_back(err_grad / scale_grad);
  out.push_back(err_lap / scale_lap);

  const Field diff = v - w;
  const double diff2 = l2_norm_squared(diff);
  if (m == 3) {
    const Field pa = to_physical(anisotropy_field(vh, am) - anisotropy_field(wh, am));
    out.push_back(inner(pa, diff) - p.lambda1 * diff2);
    if (p.demag_enabled) {
      out.push_back(l2_norm(to_physical(demag_field(vh, am))) - l2_norm(v));
    }
  }
  double amag = 0.0;
  for (int c = 0; c < m; ++c) amag += p.source.a[c] * p.source.a[c];
  const double lip = std::max(1.0, std::sqrt(amag));
  double vinf = 0, winf = 0;
  for (std::size_t q = 0; q < v.points(); ++q) {
    vinf = std::max(vinf, point_magnitude(v, q));
    winf = std::max(winf, point_magnitude(w, q));
  }
  const Field ds = to_physical(source_term(vh, am) - source_term(wh, am));
  out.push_back(l2_norm(ds) - lip * (1.0 + vinf + winf) * std::sqrt(diff2));
  return out;
}

inline std::vector<AuditEntry> audit_entries(const Model& model) {
  std::vector<AuditEntry> e{
      {"grad(|v|^2 w) product rule", true, 0.0, kIdentityTolerance},
      {"Lap(|v|^2 w) product rule", true, 0.0, kIdentityTolerance}};
  if (model.components() == 3) {
    e.push_back({"anisotropy monotonicity <Pa(v)-Pa(w),v-w> <= lambda1|v-w|^2", false, 0.0,
                 kInequalitySlack});
    if (model.grid().periodic())
      e.push_back({"demag bound |Phi_d(v)| <= |v|", false, 0.0, kInequalitySlack});
  }
  e.push_back({"source local Lipschitz", false, 0.0, kInequalitySlack});
  return e;
}

/// Runs audit_pair on `pairs` seeded random smooth field pairs. Fields are
/// band limited to a third of the Nyquist index so every cubic product is
/// resolved exactly on the grid.
inline AuditReport inequality_audit(std::uint64_t seed, const Model& model, int pairs = 100) {
  AuditReport rep;
  rep.seed = seed;
  rep.pairs = pairs;
  rep.entries = audit_entries(model);
  for (auto& e : rep.entries) e.max_violation = -std::numeric_limits<double>::infinity();
  const Grid& g = model.grid();
  int band = g.ext(0) / 6 - 1;
  for (int a = 1; a < g.dim(); ++a) band = std::min(band, g.ext(a) / 6 - 1);
  band = std::max(band, 1);
  for (int i = 0; i < pairs; ++i) {
    RandomSpectrum rs{seed * 1000003u + 2u * static_cast<std::uint64_t>(i), 2.0, 1.0, band};
    const Field v = random_smooth_field(g, model.components(), rs);
    rs.seed += 1;
    rs.amplitude = 0.5 + (i % 7) * 0.25;
    const Field w = random_smooth_field(g, model.components(), rs);
    const auto vals = audit_pair(v, w, model);
    for (std::size_t k = 0; k < vals.size(); ++k)
      rep.entries[k].max_violation = std::max(rep.entries[k].max_violation, vals[k]);
  }
  return rep;
}

}  // namespace llbar
