#pragma once

/// \file stepper.hpp
/// \brief IMEX time integration: the dissipative symbol
/// s(k) = -sigma |k|^2 - eps |k|^4 is treated implicitly (a diagonal
/// division), everything else explicitly. Valid down to eps = 0.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace llbar {

enum class Scheme { ImexEuler, ImexBdf2 };

inline std::string to_string(Scheme s) {
  return s == Scheme::ImexEuler ? "imex_euler" : "imex_bdf2";
}

struct StepperConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Scheme scheme = Scheme::ImexEuler;
  int record_every = 1;
  double max_field_norm = 1e8;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("t_end must be at least dt");
    if (record_every < 1) throw ConfigError("record_every must be >= 1");
    if (!(max_field_norm > 0.0)) throw ConfigError("max_field_norm must be positive");
  }

  std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

  friend bool operator==(const StepperConfig&, const StepperConfig&) = default;
};

/// s(|k|^2) = -sigma |k|^2 - eps |k|^4
inline double implicit_symbol(double k2, const ModelParams& p) {
  return -p.sigma * k2 - p.eps * k2 * k2;
}

inline double implicit_symbol(const std::array<double, 3>& k, const ModelParams& p) {
  return implicit_symbol(k[0] * k[0] + k[1] * k[1] + k[2] * k[2], p);
}

/// Advances one trajectory. Holds the spectral state and, for BDF2, the
/// previous state and explicit term.
class Integrator {
 public:
  Integrator(Model model, StepperConfig cfg, const Field& u0)
      : model_(std::move(model)), cfg_(cfg) {
    cfg_.validate();
    if (!u0.grid().same_space(model_.grid()) || u0.components() != model_.components())
      throw ConfigError("initial field does not match the model grid");
    u_ = to_spectral(u0);
    symbol_.resize(u_.modes());
    detail::for_each_mode(model_.grid(), [&](std::size_t q, const auto& k, const auto&) {
      symbol_[q] = implicit_symbol(k, model_.params());
    });
  }

  const Model& model() const noexcept { return model_; }
  const StepperConfig& config() const noexcept { return cfg_; }
  std::size_t steps_taken() const noexcept { return step_; }
  double time() const noexcept { return static_cast<double>(step_) * cfg_.dt; }
  const Spectrum& spectrum() const noexcept { return u_; }
  Field state() const { return to_physical(u_); }

  /// Explicit part N(u) = rhs(u) - s u.
  Spectrum explicit_term(const Spectrum& u) const {
    Spectrum n = rhs(u, model_);
    for (int c = 0; c < u.components(); ++c) {
      auto nc = n.component(c);
      auto uc = u.component(c);
      for (std::size_t q = 0; q < nc.size(); ++q) nc[q] -= symbol_[q] * uc[q];
    }
    return n;
  }

  void advance() {
    const double dt = cfg_.dt;
    Spectrum n = explicit_term(u_);
    Spectrum next = u_;
    const bool bdf2 = cfg_.scheme == Scheme::ImexBdf2 && prev_u_.has_value();
    for (int c = 0; c < u_.components(); ++c) {
      auto dst = next.component(c);
      auto uc = u_.component(c);
      auto nc = n.component(c);
      if (bdf2) {
        auto up = prev_u_->component(c);
        auto np = prev_n_->component(c);
        for (std::size_t q = 0; q < dst.size(); ++q)
          dst[q] = (4.0 * uc[q] - up[q] + 2.0 * dt * (2.0 * nc[q] - np[q])) /
                   (3.0 - 2.0 * dt * symbol_[q]);
      } else {
        for (std::size_t q = 0; q < dst.size(); ++q)
          dst[q] = (uc[q] + dt * nc[q]) / (1.0 - dt * symbol_[q]);
      }
    }
    if (cfg_.scheme == Scheme::ImexBdf2) {
      prev_u_ = std::move(u_);
      prev_n_ = std::move(n);
    }
    u_ = std::move(next);
    ++step_;
    check_guard();
  }

 private:
  void check_guard() const {
    for (const auto& v : u_.coeffs())
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw BlowUpError(step_, time(), "non-finite state");
    const double norm = std::sqrt(spectral_norm_squared(u_));
    if (norm > cfg_.max_field_norm)
      throw BlowUpError(step_, time(), "L2 norm " + std::to_string(norm) +
                                           " exceeds guard");
  }

  Model model_;
  StepperConfig cfg_;
  Spectrum u_;
  std::optional<Spectrum> prev_u_, prev_n_;
  std::vector<double> symbol_;
  std::size_t step_ = 0;
};

/// One step from `u` (BDF2 configurations take their Euler startup step).
inline Field step(const Field& u, const Model& model, const StepperConfig& cfg) {
  StepperConfig one = cfg;
  one.t_end = std::max(cfg.t_end, cfg.dt);
  Integrator it(model, one, u);
  it.advance();
  return it.state();
}

using Observer = std::function<void(double t, const Field& u)>;

/// Runs to cfg.t_end. The observer sees step 0, every record_every-th step
/// and the final step.
inline Field integrate(const Field& u0, const Model& model, const StepperConfig& cfg,
                       const Observer& observer = {}) {
  Integrator it(model, cfg, u0);
  const std::size_t n = cfg.steps();
  if (observer) observer(0.0, u0);
  for (std::size_t s = 1; s <= n; ++s) {
    it.advance();
    if (observer && (s % static_cast<std::size_t>(cfg.record_every) == 0 || s == n))
      observer(it.time(), it.state());
  }
  return it.state();
}

}  // namespace llbar
