#pragma once

/// \file config.hpp
/// \brief Experiment configuration: JSON parsing with validation,
/// canonical serialisation and hashing.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "random_field.hpp"
#include "spectral.hpp"
#include "stepper.hpp"

namespace llbar {

using json = nlohmann::json;

enum class Experiment { Simulate, Compare, SweepEps, Steady, OracleCheck, Audit };

inline std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate: return "simulate";
    case Experiment::Compare: return "compare";
    case Experiment::SweepEps: return "sweep-eps";
    case Experiment::Steady: return "steady";
    case Experiment::OracleCheck: return "oracle-check";
    case Experiment::Audit: return "audit";
  }
  return "?";
}

inline std::optional<Experiment> experiment_from_string(const std::string& s) {
  for (auto e : {Experiment::Simulate, Experiment::Compare, Experiment::SweepEps,
                 Experiment::Steady, Experiment::OracleCheck, Experiment::Audit})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

/// A single trigonometric term. Periodic: A cos(k.x) or A sin(k.x) with
/// k_a = 2 pi wave_a / L_a. Neumann: A prod_a cos(pi wave_a x_a / L_a).
struct ModeTerm {
  int component = 0;
  double amplitude = 1.0;
  std::array<int, 3> wave{0, 0, 0};
  bool sine = false;
  friend bool operator==(const ModeTerm&, const ModeTerm&) = default;
};

inline Field sample_modes(const Grid& grid, int ncomp, const std::vector<ModeTerm>& terms) {
  for (const auto& t : terms) {
    if (t.component < 0 || t.component >= ncomp)
      throw ConfigError("mode term component out of range");
    if (!grid.periodic() && t.sine)
      throw ConfigError("sine modes are not Neumann eigenfunctions");
  }
  return Field::sample(grid, ncomp, [&](const Point& x, std::span<double> out) {
    for (const auto& t : terms) {
      if (grid.periodic()) {
        double phase = 0.0;
        for (int a = 0; a < grid.dim(); ++a)
          phase += 2.0 * std::numbers::pi * t.wave[a] * x[a] / grid.length(a);
        out[t.component] += t.amplitude * (t.sine ? std::sin(phase) : std::cos(phase));
      } else {
        double v = t.amplitude;
        for (int a = 0; a < grid.dim(); ++a)
          v *= std::cos(std::numbers::pi * t.wave[a] * x[a] / grid.length(a));
        out[t.component] += v;
      }
    }
  });
}

struct CurrentSpec {
  enum class Kind { Constant, Modes };
  Kind kind = Kind::Constant;
  Vec3 constant{0.0, 0.0, 0.0};
  std::vector<ModeTerm> modes;
  friend bool operator==(const CurrentSpec&, const CurrentSpec&) = default;
};

struct InitialSpec {
  enum class Kind { Random, Constant, Modes };
  Kind kind = Kind::Random;
  RandomSpectrum random{};
  Vec3 constant{0.0, 0.0, 0.0};
  std::vector<ModeTerm> modes;
  friend bool operator==(const InitialSpec& a, const InitialSpec& b) {
    return a.kind == b.kind && a.random.seed == b.random.seed &&
           a.random.decay == b.random.decay && a.random.amplitude == b.random.amplitude &&
           a.random.max_mode == b.random.max_mode && a.constant == b.constant &&
           a.modes == b.modes;
  }
};

/// Pass/fail thresholds used in --assert mode.
struct Thresholds {
  double oracle_max_discrepancy = 1e-4;
  double sweep_slope = 1.0;
  double sweep_slope_tolerance = 0.1;
  double sweep_r2_min = 0.98;
  double steady_residual_max = 1e-8;
  double steady_r2_min = 0.99;
  double compare_max_ratio = 0.0;  // distance(T)/delta bound; 0 disables
  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Simulate;
  // grid
  int dim = 1;
  int components = 1;
  std::array<int, 3> n{64, 64, 64};
  std::array<double, 3> lengths{2.0 * std::numbers::pi, 2.0 * std::numbers::pi,
                                2.0 * std::numbers::pi};
  Boundary boundary = Boundary::Periodic;
  // model
  ModelParams model;
  CurrentSpec current;
  Dealiasing dealiasing = Dealiasing::TwoThirds;
  // stepper
  StepperConfig stepper;
  // data
  InitialSpec initial;
  // experiment-specific
  double perturbation = 1e-3;
  std::uint64_t perturbation_seed = 7;
  NormKind compare_norm = NormKind::L2;
  std::vector<double> eps_list{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  NormKind sweep_norm = NormKind::H1;
  int oracle_modes = 8;
  double oracle_dt = 0.0;  // 0: use stepper.dt
  int audit_pairs = 100;
  std::uint64_t audit_seed = 1;
  Thresholds thresholds;
  std::string output_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  Grid grid() const {
    std::array<int, 3> nn{1, 1, 1};
    std::array<double, 3> ll{1.0, 1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
      nn[a] = n[a];
      ll[a] = lengths[a];
    }
    return Grid(dim, components, nn, ll, boundary);
  }

  Field current_field(const Grid& g) const {
    if (current.kind == CurrentSpec::Kind::Constant)
      return Model::constant_current(g, current.constant);
    return sample_modes(g, g.dim(), current.modes);
  }

  Model build_model() const {
    const Grid g = grid();
    return Model(g, model, current_field(g), dealiasing);
  }

  Field initial_field(const Grid& g) const {
    switch (initial.kind) {
      case InitialSpec::Kind::Random:
        return random_smooth_field(g, g.components(), initial.random);
      case InitialSpec::Kind::Constant:
        return Field::constant(g, std::span<const double>(initial.constant).first(g.components()));
      case InitialSpec::Kind::Modes:
        return sample_modes(g, g.components(), initial.modes);
    }
    return Field(g);
  }
};

/// Deterministic initial data from the configuration's initial-data spec.
inline Field seeded_initial_field(const InitialSpec& spec, const Grid& grid) {
  ExperimentConfig c;
  c.initial = spec;
  return c.initial_field(grid);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string name_of(Dealiasing d) {
  switch (d) {
    case Dealiasing::None: return "none";
    case Dealiasing::TwoThirds: return "two_thirds";
    case Dealiasing::Padded: return "padded";
  }
  return "?";
}

/// Typed, path-aware access to a JSON object; rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(where(key) + ": " + msg);
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::uint64_t uint64(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      fail(key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) fail(key, "expected a number or an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(key, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  Vec3 vec3(const std::string& key, Vec3 def) {
    if (!has(key)) return def;
    const auto v = numbers(key, {});
    if (v.empty() || v.size() > 3) fail(key, "expected 1 to 3 numbers");
    Vec3 out{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
  }

  std::optional<Reader> section(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), where(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline NormKind parse_norm(Reader& r, const std::string& key, NormKind def) {
  const std::string s = r.string(key, to_string(def));
  for (auto k : {NormKind::L2, NormKind::L4, NormKind::H1, NormKind::H2})
    if (to_string(k) == s) return k;
  r.fail(key, "unknown norm '" + s + "' (L2, L4, H1, H2)");
}

inline std::vector<ModeTerm> parse_modes(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw ConfigError(path + ": expected an array of mode terms");
  std::vector<ModeTerm> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader r(arr[i], path + "[" + std::to_string(i) + "]");
    ModeTerm t;
    t.component = r.integer("component", 0);
    t.amplitude = r.number("amplitude", 1.0);
    const auto w = r.numbers("wave", {0.0});
    if (w.empty() || w.size() > 3) r.fail("wave", "expected 1 to 3 integers");
    for (std::size_t a = 0; a < w.size(); ++a) {
      if (w[a] != std::floor(w[a])) r.fail("wave", "expected integers");
      t.wave[a] = static_cast<int>(w[a]);
    }
    const std::string kind = r.string("kind", "cos");
    if (kind != "cos" && kind != "sin") r.fail("kind", "expected 'cos' or 'sin'");
    t.sine = kind == "sin";
    r.finish();
    out.push_back(t);
  }
  return out;
}

inline json modes_to_json(const std::vector<ModeTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms)
    arr.push_back({{"component", t.component},
                   {"amplitude", t.amplitude},
                   {"wave", {t.wave[0], t.wave[1], t.wave[2]}},
                   {"kind", t.sine ? "sin" : "cos"}});
  return arr;
}

}  // namespace detail

/// Parses and validates a JSON experiment configuration. Syntax errors carry
/// the line and column; constraint violations name the offending key.
/// `experiment` (the CLI subcommand) takes precedence over the file's value.
inline ExperimentConfig parse_config(const std::string& text,
                                     std::optional<Experiment> experiment = std::nullopt) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  detail::Reader r(root, "");

  const std::string exp = r.string("experiment", "simulate");
  if (auto e = experiment_from_string(exp))
    cfg.experiment = *e;
  else
    r.fail("experiment", "unknown experiment '" + exp + "'");
  if (experiment) cfg.experiment = *experiment;

  if (auto g = r.section("grid")) {
    cfg.dim = g->integer("dim", 1);
    cfg.components = g->integer("components", 1);
    if (cfg.dim < 1 || cfg.dim > 3) g->fail("dim", "must be 1, 2 or 3");
    const auto n = g->numbers("n", {64.0});
    const auto l = g->numbers("lengths", {2.0 * std::numbers::pi});
    for (int a = 0; a < 3; ++a) {
      const double nv = n.size() == 1 ? n[0] : (a < static_cast<int>(n.size()) ? n[a] : 1.0);
      if (nv != std::floor(nv)) g->fail("n", "expected integers");
      cfg.n[a] = static_cast<int>(nv);
      cfg.lengths[a] = l.size() == 1 ? l[0] : (a < static_cast<int>(l.size()) ? l[a] : 1.0);
    }
    if (n.size() != 1 && static_cast<int>(n.size()) != cfg.dim)
      g->fail("n", "expected 1 or dim entries");
    if (l.size() != 1 && static_cast<int>(l.size()) != cfg.dim)
      g->fail("lengths", "expected 1 or dim entries");
    const std::string b = g->string("boundary", "periodic");
    if (b == "periodic")
      cfg.boundary = Boundary::Periodic;
    else if (b == "neumann")
      cfg.boundary = Boundary::NeumannCosine;
    else
      g->fail("boundary", "expected 'periodic' or 'neumann'");
    g->finish();
  }

  if (auto m = r.section("model")) {
    auto& p = cfg.model;
    p.sigma = m->number("sigma", p.sigma);
    p.eps = m->number("eps", p.eps);
    p.gamma = m->number("gamma", 0.0);
    p.kappa1 = m->number("kappa1", p.kappa1);
    p.kappa2 = m->number("kappa2", p.kappa2);
    p.lambda1 = m->number("lambda1", p.lambda1);
    p.lambda2 = m->number("lambda2", p.lambda2);
    p.easy_axis = m->vec3("easy_axis", p.easy_axis);
    p.beta1 = m->number("beta1", p.beta1);
    p.beta2 = m->number("beta2", p.beta2);
    p.chi = m->number("chi", p.chi);
    p.demag_enabled = m->boolean("demag", false);
    p.aniso_enabled = m->boolean("anisotropy", false);
    if (auto s = m->section("source")) {
      const std::string kind = s->string("kind", "none");
      if (kind == "none") {
        p.source = Source::none();
      } else if (kind == "affine_quadratic") {
        p.source = Source::affine_quadratic(s->vec3("a", {0.0, 0.0, 0.0}));
      } else {
        s->fail("kind", "expected 'none' or 'affine_quadratic'");
      }
      s->finish();
    }
    if (auto c = m->section("current")) {
      const bool has_const = c->has("constant");
      const bool has_modes = c->has("modes");
      if (has_const == has_modes) c->fail("", "give exactly one of 'constant' or 'modes'");
      if (has_const) {
        cfg.current.kind = CurrentSpec::Kind::Constant;
        cfg.current.constant = c->vec3("constant", {});
      } else {
        cfg.current.kind = CurrentSpec::Kind::Modes;
        cfg.current.modes = detail::parse_modes(c->raw("modes"), c->where("modes"));
      }
      c->finish();
    }
    const std::string d = m->string("dealiasing", "two_thirds");
    if (d == "two_thirds")
      cfg.dealiasing = Dealiasing::TwoThirds;
    else if (d == "padded")
      cfg.dealiasing = Dealiasing::Padded;
    else if (d == "none")
      cfg.dealiasing = Dealiasing::None;
    else
      m->fail("dealiasing", "expected 'two_thirds', 'padded' or 'none'");
    m->finish();
  }

  if (auto s = r.section("stepper")) {
    auto& st = cfg.stepper;
    st.dt = s->number("dt", st.dt);
    st.t_end = s->number("t_end", st.t_end);
    const std::string sch = s->string("scheme", "imex_euler");
    if (sch == "imex_euler")
      st.scheme = Scheme::ImexEuler;
    else if (sch == "imex_bdf2")
      st.scheme = Scheme::ImexBdf2;
    else
      s->fail("scheme", "expected 'imex_euler' or 'imex_bdf2'");
    st.record_every = s->integer("record_every", st.record_every);
    st.max_field_norm = s->number("max_field_norm", st.max_field_norm);
    s->finish();
  }

  if (auto i = r.section("initial")) {
    const std::string kind = i->string("kind", "random");
    if (kind == "random") {
      cfg.initial.kind = InitialSpec::Kind::Random;
      cfg.initial.random.seed = i->uint64("seed", 0);
      cfg.initial.random.decay = i->number("decay", 2.0);
      cfg.initial.random.amplitude = i->number("amplitude", 1.0);
      cfg.initial.random.max_mode = i->integer("max_mode", 0);
    } else if (kind == "constant") {
      cfg.initial.kind = InitialSpec::Kind::Constant;
      cfg.initial.constant = i->vec3("value", {0.0, 0.0, 0.0});
    } else if (kind == "modes") {
      cfg.initial.kind = InitialSpec::Kind::Modes;
      if (!i->has("modes")) i->fail("modes", "missing mode list");
      cfg.initial.modes = detail::parse_modes(i->raw("modes"), i->where("modes"));
    } else {
      i->fail("kind", "expected 'random', 'constant' or 'modes'");
    }
    i->finish();
  }

  if (auto c = r.section("compare")) {
    cfg.perturbation = c->number("perturbation", cfg.perturbation);
    cfg.perturbation_seed = c->uint64("perturbation_seed", cfg.perturbation_seed);
    cfg.compare_norm = detail::parse_norm(*c, "norm", cfg.compare_norm);
    c->finish();
  }
  if (auto s = r.section("sweep")) {
    cfg.eps_list = s->numbers("eps", cfg.eps_list);
    cfg.sweep_norm = detail::parse_norm(*s, "norm", cfg.sweep_norm);
    s->finish();
  }
  if (auto o = r.section("oracle")) {
    cfg.oracle_modes = o->integer("modes", cfg.oracle_modes);
    cfg.oracle_dt = o->number("dt", cfg.oracle_dt);
    o->finish();
  }
  if (auto a = r.section("audit")) {
    cfg.audit_pairs = a->integer("pairs", cfg.audit_pairs);
    cfg.audit_seed = a->uint64("seed", cfg.audit_seed);
    a->finish();
  }
  if (auto t = r.section("thresholds")) {
    auto& th = cfg.thresholds;
    th.oracle_max_discrepancy = t->number("oracle_max_discrepancy", th.oracle_max_discrepancy);
    th.sweep_slope = t->number("sweep_slope", th.sweep_slope);
    th.sweep_slope_tolerance = t->number("sweep_slope_tolerance", th.sweep_slope_tolerance);
    th.sweep_r2_min = t->number("sweep_r2_min", th.sweep_r2_min);
    th.steady_residual_max = t->number("steady_residual_max", th.steady_residual_max);
    th.steady_r2_min = t->number("steady_r2_min", th.steady_r2_min);
    th.compare_max_ratio = t->number("compare_max_ratio", th.compare_max_ratio);
    t->finish();
  }
  if (auto o = r.section("output")) {
    cfg.output_dir = o->string("dir", cfg.output_dir);
    o->finish();
  }
  r.finish();

  // Cross-field constraints.
  try {
    const Grid g = cfg.grid();
    validate(cfg.model, g.components());
    cfg.stepper.validate();
    if (g.components() == 1) {
      cfg.model.demag_enabled = false;
      cfg.model.aniso_enabled = false;
    }
    if (cfg.model.demag_enabled && !g.periodic())
      throw ConfigError("demagnetising field requires a periodic grid");
    if (cfg.experiment == Experiment::SweepEps) {
      if (cfg.dim > 2) throw ConfigError("sweep-eps requires d <= 2");
      if (cfg.eps_list.size() < 3) throw ConfigError("sweep-eps needs at least three eps values");
      for (double e : cfg.eps_list)
        if (!(e > 0.0)) throw ConfigError("sweep-eps values must be positive");
    }
    if (cfg.experiment == Experiment::OracleCheck &&
        (cfg.oracle_modes < 1 || cfg.oracle_modes > 64))
      throw ConfigError("oracle.modes must be in [1, 64]");
    if (cfg.experiment == Experiment::Audit && cfg.audit_pairs < 1)
      throw ConfigError("audit.pairs must be positive");
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

/// Canonical JSON form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c, int indent = 2) {
  const auto& p = c.model;
  json j;
  j["experiment"] = to_string(c.experiment);
  json n = json::array(), l = json::array();
  for (int a = 0; a < c.dim; ++a) {
    n.push_back(c.n[a]);
    l.push_back(c.lengths[a]);
  }
  j["grid"] = {{"dim", c.dim},
               {"components", c.components},
               {"n", n},
               {"lengths", l},
               {"boundary", to_string(c.boundary)}};
  json source = {{"kind", p.source.enabled() ? "affine_quadratic" : "none"}};
  if (p.source.enabled()) source["a"] = {p.source.a[0], p.source.a[1], p.source.a[2]};
  json current;
  if (c.current.kind == CurrentSpec::Kind::Constant)
    current["constant"] = {c.current.constant[0], c.current.constant[1], c.current.constant[2]};
  else
    current["modes"] = detail::modes_to_json(c.current.modes);
  j["model"] = {{"sigma", p.sigma},
                {"eps", p.eps},
                {"gamma", p.gamma},
                {"kappa1", p.kappa1},
                {"kappa2", p.kappa2},
                {"lambda1", p.lambda1},
                {"lambda2", p.lambda2},
                {"easy_axis", {p.easy_axis[0], p.easy_axis[1], p.easy_axis[2]}},
                {"beta1", p.beta1},
                {"beta2", p.beta2},
                {"chi", p.chi},
                {"demag", p.demag_enabled},
                {"anisotropy", p.aniso_enabled},
                {"source", source},
                {"current", current},
                {"dealiasing", detail::name_of(c.dealiasing)}};
  j["stepper"] = {{"dt", c.stepper.dt},
                  {"t_end", c.stepper.t_end},
                  {"scheme", to_string(c.stepper.scheme)},
                  {"record_every", c.stepper.record_every},
                  {"max_field_norm", c.stepper.max_field_norm}};
  json init;
  switch (c.initial.kind) {
    case InitialSpec::Kind::Random:
      init = {{"kind", "random"},
              {"seed", c.initial.random.seed},
              {"decay", c.initial.random.decay},
              {"amplitude", c.initial.random.amplitude},
              {"max_mode", c.initial.random.max_mode}};
      break;
    case InitialSpec::Kind::Constant:
      init = {{"kind", "constant"},
              {"value", {c.initial.constant[0], c.initial.constant[1], c.initial.constant[2]}}};
      break;
    case InitialSpec::Kind::Modes:
      init = {{"kind", "modes"}, {"modes", detail::modes_to_json(c.initial.modes)}};
      break;
  }
  j["initial"] = init;
  j["compare"] = {{"perturbation", c.perturbation},
                  {"perturbation_seed", c.perturbation_seed},
                  {"norm", to_string(c.compare_norm)}};
  j["sweep"] = {{"eps", c.eps_list}, {"norm", to_string(c.sweep_norm)}};
  j["oracle"] = {{"modes", c.oracle_modes}, {"dt", c.oracle_dt}};
  j["audit"] = {{"pairs", c.audit_pairs}, {"seed", c.audit_seed}};
  const auto& t = c.thresholds;
  j["thresholds"] = {{"oracle_max_discrepancy", t.oracle_max_discrepancy},
                     {"sweep_slope", t.sweep_slope},
                     {"sweep_slope_tolerance", t.sweep_slope_tolerance},
                     {"sweep_r2_min", t.sweep_r2_min},
                     {"steady_residual_max", t.steady_residual_max},
                     {"steady_r2_min", t.steady_r2_min},
                     {"compare_max_ratio", t.compare_max_ratio}};
  j["output"] = {{"dir", c.output_dir}};
  return j.dump(indent);
}

/// FNV-1a 64 of the compact canonical serialisation, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  const std::string s = serialize_config(c, -1);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace llbar
