#pragma once

/// \file experiments.hpp
/// \brief Experiment runners behind the command line driver. Each runner
/// returns a JSON summary and writes its artifacts into the output directory.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "checkpoint.hpp"
#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "galerkin.hpp"
#include "model.hpp"
#include "random_field.hpp"
#include "stepper.hpp"

namespace llbar {

inline constexpr const char* kThreadsEnv = "LLBAR_THREADS";

struct RunOptions {
  std::string out_dir;  // empty: use the config's output dir
  bool assert_mode = false;
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: read LLBAR_THREADS, default 1
};

struct RunOutcome {
  json summary;
  std::vector<std::string> files;
  std::vector<std::string> failures;  // threshold violations
  bool passed() const noexcept { return failures.empty(); }
};

inline int thread_count(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnv)) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

/// Applies a seed override to the seeded parts of the configuration.
inline void apply_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.initial.random.seed = seed;
  cfg.audit_seed = seed;
}

inline std::uint64_t provenance_seed(const ExperimentConfig& cfg) {
  return cfg.experiment == Experiment::Audit ? cfg.audit_seed : cfg.initial.random.seed;
}

// ---------------------------------------------------------------------------
// Writers

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class ArtifactWriter {
 public:
  ArtifactWriter(std::string dir, const ExperimentConfig& cfg, double nu_inf)
      : dir_(std::move(dir)),
        hash_(config_hash(cfg)),
        seed_(provenance_seed(cfg)),
        nu_inf_(nu_inf) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
  }

  std::string path(const std::string& name) const {
    return (std::filesystem::path(dir_) / name).string();
  }

  std::string header() const {
    return "# config_hash=" + hash_ + "\n# seed=" + std::to_string(seed_) +
           "\n# nu_inf=" + fmt(nu_inf_) + "\n";
  }

  void provenance(json& j) const {
    j["config_hash"] = hash_;
    j["seed"] = seed_;
    j["nu_inf"] = nu_inf_;
  }

  void text(const std::string& name, const std::string& body, RunOutcome& out) const {
    const std::string p = path(name);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + p + " for writing");
    f << body;
    if (!f) throw IoError("failed writing " + p);
    out.files.push_back(p);
  }

  void record(const std::string& name, const RunRecord& rec, RunOutcome& out) const {
    std::string s = header() + "t,l2,l4,h1,h2,lyapunov,h_residual\n";
    for (std::size_t i = 0; i < rec.size(); ++i) {
      s += fmt(rec.times[i]) + "," + fmt(rec.l2[i]) + "," + fmt(rec.l4[i]) + "," +
           fmt(rec.h1[i]) + "," + fmt(rec.h2[i]) + "," + fmt(rec.lyapunov[i]) + "," +
           fmt(rec.h_residual[i]) + "\n";
    }
    text(name, s, out);
  }

  void table(const std::string& name, const std::vector<std::string>& columns,
             const std::vector<std::vector<double>>& rows, RunOutcome& out) const {
    std::string s = header();
    for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
    s += "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + fmt(r[c]);
      s += "\n";
    }
    text(name, s, out);
  }

  void summary(json j, RunOutcome& out) const {
    provenance(j);
    out.summary = j;
    text("summary.json", j.dump(2) + "\n", out);
  }

  void checkpoint(const std::string& name, const Field& u, RunOutcome& out) const {
    const std::string p = path(name);
    checkpoint_save(u, p);
    out.files.push_back(p);
  }

 private:
  std::string dir_;
  std::string hash_;
  std::uint64_t seed_;
  double nu_inf_;
};

inline json fit_json(const RateFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
}

/// Integrates u0 and records diagnostics at every observer call.
inline Field recorded_run(const Field& u0, const Model& model, const StepperConfig& cfg,
                          RunRecord& rec) {
  return integrate(u0, model, cfg, [&](double t, const Field& u) {
    if (rec.size() == 0 || t > rec.times.back()) rec.append(t, u, model);
  });
}

inline Field perturbation(const ExperimentConfig& cfg, const Grid& g) {
  RandomSpectrum rs;
  rs.seed = cfg.perturbation_seed;
  rs.decay = cfg.initial.kind == InitialSpec::Kind::Random ? cfg.initial.random.decay : 2.0;
  rs.max_mode = cfg.initial.kind == InitialSpec::Kind::Random ? cfg.initial.random.max_mode : 0;
  rs.amplitude = cfg.perturbation;
  return random_smooth_field(g, g.components(), rs);
}

/// Fit of log |H| against t over the final decade of the record: from the
/// last time |H| was at least ten times its final value.
inline std::optional<RateFit> final_decade_fit(const RunRecord& rec) {
  if (rec.size() < 3) return std::nullopt;
  const double last = rec.h_residual.back();
  if (!(last > 0.0)) return std::nullopt;
  std::size_t start = 0;
  for (std::size_t i = rec.size(); i-- > 0;)
    if (rec.h_residual[i] >= 10.0 * last) {
      start = i;
      break;
    }
  std::vector<double> x, y;
  for (std::size_t i = start; i < rec.size(); ++i) {
    if (!(rec.h_residual[i] > 0.0)) continue;
    x.push_back(rec.times[i]);
    y.push_back(std::log(rec.h_residual[i]));
  }
  if (x.size() < 3) return std::nullopt;
  return linear_fit(x, y);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Runners

inline RunOutcome run_simulate(const ExperimentConfig& cfg, const std::string& dir) {
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  const Field u0 = cfg.initial_field(model.grid());
  RunRecord rec;
  try {
    const Field u = detail::recorded_run(u0, model, cfg.stepper, rec);
    w.record("record.csv", rec, out);
    w.checkpoint("final.ckpt", u, out);
    w.summary({{"experiment", "simulate"},
               {"t_end", rec.times.back()},
               {"records", rec.size()},
               {"final_l2", rec.l2.back()},
               {"final_h1", rec.h1.back()},
               {"final_lyapunov", rec.lyapunov.back()},
               {"final_h_residual", rec.h_residual.back()}},
              out);
  } catch (const BlowUpError&) {
    if (rec.size() > 0) w.record("record.csv", rec, out);
    throw;
  }
  return out;
}

inline RunOutcome run_compare(const ExperimentConfig& cfg, const std::string& dir) {
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  const Grid& g = model.grid();
  const Field u0 = cfg.initial_field(g);
  const Field v0 = u0 + detail::perturbation(cfg, g);

  RunRecord ra, rb;
  std::vector<Field> ua, ub;
  integrate(u0, model, cfg.stepper, [&](double t, const Field& u) {
    if (ra.size() && !(t > ra.times.back())) return;
    ra.append(t, u, model);
    ua.push_back(u);
  });
  integrate(v0, model, cfg.stepper, [&](double t, const Field& u) {
    if (rb.size() && !(t > rb.times.back())) return;
    rb.append(t, u, model);
    ub.push_back(u);
  });

  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ua.size(); ++i)
    rows.push_back({ra.times[i], trajectory_distance(ua[i], ub[i], NormKind::L2),
                    trajectory_distance(ua[i], ub[i], NormKind::H1),
                    trajectory_distance(ua[i], ub[i], NormKind::H2)});
  w.record("record_a.csv", ra, out);
  w.record("record_b.csv", rb, out);
  w.table("distance.csv", {"t", "d_l2", "d_h1", "d_h2"}, rows, out);

  const double d_end = trajectory_distance(ua.back(), ub.back(), cfg.compare_norm);
  const double ratio = d_end / cfg.perturbation;
  if (cfg.thresholds.compare_max_ratio > 0.0 && !(ratio <= cfg.thresholds.compare_max_ratio))
    out.failures.push_back("distance ratio " + detail::fmt(ratio) + " exceeds " +
                           detail::fmt(cfg.thresholds.compare_max_ratio));
  w.summary({{"experiment", "compare"},
             {"perturbation", cfg.perturbation},
             {"norm", to_string(cfg.compare_norm)},
             {"final_distance", d_end},
             {"distance_ratio", ratio},
             {"passed", out.passed()}},
            out);
  return out;
}

/// Final states S_eps(T) u0 for every eps in the list plus S_0(T) u0,
/// computed on up to `threads` workers. Result i belongs to eps_list[i];
/// the last entry is the eps = 0 reference.
inline std::vector<Field> sweep_final_states(const ExperimentConfig& cfg, int threads) {
  const Grid g = cfg.grid();
  const Field u0 = cfg.initial_field(g);
  const Field nu = cfg.current_field(g);
  std::vector<double> eps = cfg.eps_list;
  eps.push_back(0.0);
  std::vector<Field> finals(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < eps.size();) {
      try {
        ModelParams p = cfg.model;
        p.lambda2 = 0.0;
        p.eps = eps[i];
        const Model model(g, p, nu, cfg.dealiasing);
        finals[i] = integrate(u0, model, cfg.stepper);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(eps.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return finals;
}

inline RunOutcome run_sweep_eps(const ExperimentConfig& cfg, const std::string& dir,
                                int threads = 1) {
  if (cfg.dim > 2) throw ConfigError("sweep-eps requires d <= 2");
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  const auto finals = sweep_final_states(cfg, threads);
  const Field& ref = finals.back();

  std::vector<std::pair<double, double>> pts;
  std::vector<std::vector<double>> rows;
  json per = json::array();
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double d = trajectory_distance(finals[i], ref, cfg.sweep_norm);
    pts.emplace_back(cfg.eps_list[i], d);
    rows.push_back({cfg.eps_list[i], d});
    per.push_back({{"eps", cfg.eps_list[i]}, {"distance", d}});
  }
  w.table("sweep.csv", {"eps", "distance"}, rows, out);
  json sum = {{"experiment", "sweep-eps"},
              {"norm", to_string(cfg.sweep_norm)},
              {"t_end", cfg.stepper.t_end},
              {"lambda2", 0.0},
              {"points", per}};
  try {
    const RateFit fit = rate_fit(pts);
    sum["fit"] = detail::fit_json(fit);
    const auto& th = cfg.thresholds;
    if (!(std::abs(fit.slope - th.sweep_slope) <= th.sweep_slope_tolerance))
      out.failures.push_back("sweep slope " + detail::fmt(fit.slope) + " outside " +
                             detail::fmt(th.sweep_slope) + " +- " +
                             detail::fmt(th.sweep_slope_tolerance));
    if (!(fit.r2 >= th.sweep_r2_min))
      out.failures.push_back("sweep fit r2 " + detail::fmt(fit.r2) + " below " +
                             detail::fmt(th.sweep_r2_min));
  } catch (const ConfigError& e) {
    sum["fit"] = nullptr;
    out.failures.push_back(std::string("sweep fit unavailable: ") + e.what());
  }
  sum["passed"] = out.passed();
  w.summary(sum, out);
  return out;
}

inline RunOutcome run_steady(const ExperimentConfig& cfg, const std::string& dir) {
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  RunRecord rec;
  const Field u = detail::recorded_run(cfg.initial_field(model.grid()), model, cfg.stepper, rec);
  const SteadyResidual res = steady_residual(u, model);
  w.record("record.csv", rec, out);
  w.checkpoint("final.ckpt", u, out);

  json sum = {{"experiment", "steady"},
              {"t_end", rec.times.back()},
              {"h_residual", res.h_residual},
              {"rhs_residual", res.rhs_residual}};
  const auto& th = cfg.thresholds;
  if (!(res.h_residual < th.steady_residual_max))
    out.failures.push_back("final |H| " + detail::fmt(res.h_residual) + " not below " +
                           detail::fmt(th.steady_residual_max));
  if (const auto fit = detail::final_decade_fit(rec)) {
    sum["fit"] = detail::fit_json(*fit);
    if (!(fit->r2 >= th.steady_r2_min))
      out.failures.push_back("final-decade fit r2 " + detail::fmt(fit->r2) + " below " +
                             detail::fmt(th.steady_r2_min));
  } else {
    sum["fit"] = nullptr;
    out.failures.push_back("final-decade fit unavailable");
  }
  sum["passed"] = out.passed();
  w.summary(sum, out);
  return out;
}

struct OracleComparison {
  std::vector<double> times;
  std::vector<double> discrepancy;  // L2 distance stepper vs oracle field
  double max() const {
    return discrepancy.empty() ? 0.0 : *std::max_element(discrepancy.begin(), discrepancy.end());
  }
};

/// Runs the pseudospectral stepper and the Galerkin RK4 oracle from the same
/// projected initial state and compares them at every record time.
inline OracleComparison oracle_compare(const Field& u0, const Model& model,
                                       const StepperConfig& cfg, int n_modes,
                                       double oracle_dt = 0.0) {
  cfg.validate();
  galerkin::GalerkinSystem sys = galerkin::project(u0, model, n_modes);
  const double h = oracle_dt > 0.0 ? oracle_dt : cfg.dt;
  const double per = cfg.dt / h;
  const auto sub = static_cast<std::size_t>(std::llround(per));
  if (sub < 1 || std::abs(per - static_cast<double>(sub)) > 1e-9 * per)
    throw ConfigError("stepper dt must be an integer multiple of the oracle dt");

  const Grid& g = model.grid();
  Integrator integ(model, cfg, sys.to_field(g));
  OracleComparison cmp;
  auto compare = [&] {
    cmp.times.push_back(integ.time());
    cmp.discrepancy.push_back(l2_norm(integ.state() - sys.to_field(g)));
  };
  compare();
  const std::size_t n = cfg.steps();
  std::size_t done = 0;
  for (std::size_t s = 1; s <= n; ++s) {
    integ.advance();
    if (s % static_cast<std::size_t>(cfg.record_every) == 0 || s == n) {
      galerkin::rk4_advance(sys, h, (s - done) * sub, cfg.max_field_norm, done * sub);
      done = s;
      compare();
    }
  }
  return cmp;
}

inline RunOutcome run_oracle_check(const ExperimentConfig& cfg, const std::string& dir) {
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  const auto cmp = oracle_compare(cfg.initial_field(model.grid()), model, cfg.stepper,
                                  cfg.oracle_modes, cfg.oracle_dt);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < cmp.times.size(); ++i)
    rows.push_back({cmp.times[i], cmp.discrepancy[i]});
  w.table("oracle.csv", {"t", "discrepancy_l2"}, rows, out);
  const double mx = cmp.max();
  if (!(mx < cfg.thresholds.oracle_max_discrepancy))
    out.failures.push_back("oracle discrepancy " + detail::fmt(mx) + " not below " +
                           detail::fmt(cfg.thresholds.oracle_max_discrepancy));
  w.summary({{"experiment", "oracle-check"},
             {"modes", cfg.oracle_modes},
             {"oracle_dt", cfg.oracle_dt > 0.0 ? cfg.oracle_dt : cfg.stepper.dt},
             {"max_discrepancy", mx},
             {"final_discrepancy", cmp.discrepancy.back()},
             {"passed", out.passed()}},
            out);
  return out;
}

inline json audit_json(const AuditReport& rep) {
  json entries = json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"name", e.name},
                       {"kind", e.identity ? "identity" : "inequality"},
                       {"max_violation", e.max_violation},
                       {"tolerance", e.tolerance},
                       {"passed", e.passed()}});
  return {{"seed", rep.seed}, {"pairs", rep.pairs}, {"entries", entries}, {"passed", rep.passed()}};
}

inline RunOutcome run_audit(const ExperimentConfig& cfg, const std::string& dir) {
  const Model model = cfg.build_model();
  const detail::ArtifactWriter w(dir, cfg, model.nu_infinity());
  RunOutcome out;
  const AuditReport rep = inequality_audit(cfg.audit_seed, model, cfg.audit_pairs);
  json j = audit_json(rep);
  for (const auto& e : rep.entries)
    if (!e.passed())
      out.failures.push_back(e.name + " violation " + detail::fmt(e.max_violation) +
                             " exceeds " + detail::fmt(e.tolerance));
  j["experiment"] = "audit";
  w.text("audit.json", j.dump(2) + "\n", out);
  w.summary(j, out);
  return out;
}

/// Dispatches on cfg.experiment. Throws ConfigError, BlowUpError, IoError.
inline RunOutcome run(ExperimentConfig cfg, const RunOptions& opts = {}) {
  if (opts.seed) apply_seed(cfg, *opts.seed);
  const std::string dir = opts.out_dir.empty() ? cfg.output_dir : opts.out_dir;
  switch (cfg.experiment) {
    case Experiment::Simulate: return run_simulate(cfg, dir);
    case Experiment::Compare: return run_compare(cfg, dir);
    case Experiment::SweepEps: return run_sweep_eps(cfg, dir, thread_count(opts.threads));
    case Experiment::Steady: return run_steady(cfg, dir);
    case Experiment::OracleCheck: return run_oracle_check(cfg, dir);
    case Experiment::Audit: return run_audit(cfg, dir);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace llbar
