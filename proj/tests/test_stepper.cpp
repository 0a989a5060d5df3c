#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "llbar/model.hpp"
#include "llbar/random_field.hpp"
#include "llbar/stepper.hpp"

using namespace llbar;
using std::numbers::pi;

namespace {

ModelParams linear_params(double sigma, double eps, double kappa1) {
  ModelParams p;
  p.sigma = sigma;
  p.eps = eps;
  p.kappa1 = kappa1;
  p.kappa2 = 0.0;
  return p;
}

StepperConfig config(double dt, double t_end, Scheme s = Scheme::ImexEuler) {
  StepperConfig c;
  c.dt = dt;
  c.t_end = t_end;
  c.scheme = s;
  return c;
}

Field cosine_mode(const Grid& g, int k) {
  return Field::sample(g, 1, [k](const Point& x, std::span<double> o) { o[0] = std::cos(k * x[0]); });
}

double amplitude(const Field& u, int k) {
  // <u, cos kx> / <cos kx, cos kx> on [0, 2 pi)
  const Field c = cosine_mode(u.grid(), k);
  return inner(u, c) / inner(c, c);
}

}  // namespace

TEST(ImplicitSymbol, Examples) {
  ModelParams p;
  p.sigma = 1.0;
  p.eps = 0.0;
  EXPECT_EQ(implicit_symbol(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(implicit_symbol(4.0, p), -4.0);
  p.eps = 0.1;
  EXPECT_DOUBLE_EQ(implicit_symbol(4.0, p), -5.6);
  EXPECT_DOUBLE_EQ(implicit_symbol(std::array<double, 3>{2.0, 0.0, 0.0}, p), -5.6);
}

TEST(StepperConfig, Validation) {
  EXPECT_THROW(config(0.0, 1.0).validate(), ConfigError);
  EXPECT_THROW(config(0.1, 0.01).validate(), ConfigError);
  StepperConfig c = config(0.1, 1.0);
  c.record_every = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(config(1e-3, 1.0).steps(), 1000u);
}

TEST(Step, FixedPoint) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0 * pi);
  ModelParams p;
  p.eps = 0.1;
  p.gamma = 1.0;
  p.kappa1 = 2.0;
  p.kappa2 = 2.0;
  const Model m(g, p);
  const double u0[3] = {0.0, 0.6, 0.8};
  const Field u = Field::constant(g, u0);
  for (auto s : {Scheme::ImexEuler, Scheme::ImexBdf2}) {
    const Field v = step(u, m, config(1e-2, 1.0, s));
    EXPECT_LT((v - u).max_abs(), 1e-12);
  }
}

TEST(Step, LinearEulerFormula) {
  const Grid g = Grid::uniform(1, 1, 32, 2.0 * pi);
  const ModelParams p = linear_params(1.0, 0.1, 1.0);
  const Model m(g, p);
  const int k = 3;
  const double k2 = k * k;
  const double lam = (p.sigma + p.eps * k2) * (p.kappa1 - k2);
  const double s = -p.sigma * k2 - p.eps * k2 * k2;
  const double e = lam - s;
  std::vector<double> err;
  for (double dt : {1e-3, 5e-4, 2.5e-4}) {
    const Field v = step(cosine_mode(g, k), m, config(dt, dt));
    const double a = amplitude(v, k);
    EXPECT_NEAR(a, (1.0 + dt * e) / (1.0 - dt * s), 1e-13);
    err.push_back(std::abs(a - std::exp(dt * lam)));
  }
  // local error O(dt^2)
  EXPECT_NEAR(err[0] / err[1], 4.0, 0.4);
  EXPECT_NEAR(err[1] / err[2], 4.0, 0.4);
}

TEST(Step, BdfStartsWithEuler) {
  const Grid g = Grid::uniform(1, 3, 16, 2.0 * pi);
  ModelParams p;
  p.eps = 0.05;
  const Model m(g, p);
  const Field u = random_smooth_field(g, 3, {1});
  const Field a = step(u, m, config(1e-3, 1.0, Scheme::ImexEuler));
  const Field b = step(u, m, config(1e-3, 1.0, Scheme::ImexBdf2));
  EXPECT_TRUE(a == b);
}

TEST(Integrate, SingleStepEqualsStep) {
  const Grid g = Grid::uniform(1, 1, 16, 2.0 * pi);
  const Model m(g, ModelParams{});
  const Field u = random_smooth_field(g, 1, {2});
  const StepperConfig c = config(1e-3, 1e-3);
  EXPECT_TRUE(integrate(u, m, c) == step(u, m, c));
}

TEST(Integrate, ZeroStaysZero) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0 * pi);
  ModelParams p;
  p.gamma = 1.0;
  p.eps = 0.1;
  p.beta1 = 0.3;
  p.chi = 0.1;
  const double nu[2] = {1.0, -0.5};
  const Model m(g, p, Model::constant_current(g, nu));
  bool all_zero = true;
  integrate(Field(g, 3), m, config(1e-3, 0.1), [&](double, const Field& u) {
    all_zero = all_zero && u.max_abs() == 0.0;
  });
  EXPECT_TRUE(all_zero);
}

TEST(Integrate, LinearDecayMatchesExponential) {
  const Grid g = Grid::uniform(1, 1, 32, 2.0 * pi);
  for (double eps : {0.0, 0.1}) {
    const ModelParams p = linear_params(1.0, eps, 1.0);
    const Model m(g, p);
    const int k = 2;
    const double lam = (1.0 + eps * k * k) * (1.0 - k * k);
    for (auto s : {Scheme::ImexEuler, Scheme::ImexBdf2}) {
      const Field u = integrate(cosine_mode(g, k), m, config(1e-4, 0.5, s));
      const double expect = std::exp(lam * 0.5);
      EXPECT_NEAR(amplitude(u, k) / expect, 1.0, 1e-2) << to_string(s) << " eps=" << eps;
    }
  }
}

TEST(Integrate, NeumannLinearDecay) {
  const double L = 2.0;
  const Grid g = Grid::uniform(1, 1, 32, L, Boundary::NeumannCosine);
  const ModelParams p = linear_params(1.0, 0.1, 0.5);
  const Model m(g, p);
  const double kk = pi / L;
  const Field u0 = Field::sample(g, 1, [kk](const Point& x, std::span<double> o) { o[0] = std::cos(kk * x[0]); });
  const Field u = integrate(u0, m, config(1e-4, 0.5, Scheme::ImexBdf2));
  const double lam = (1.0 + 0.1 * kk * kk) * (0.5 - kk * kk);
  EXPECT_NEAR(inner(u, u0) / inner(u0, u0) / std::exp(0.5 * lam), 1.0, 1e-6);
}

TEST(Integrate, ObserverSchedule) {
  const Grid g = Grid::uniform(1, 1, 16, 2.0 * pi);
  const Model m(g, ModelParams{});
  StepperConfig c = config(0.01, 0.25);
  c.record_every = 10;
  std::vector<double> times;
  integrate(random_smooth_field(g, 1, {3}), m, c, [&](double t, const Field&) { times.push_back(t); });
  ASSERT_EQ(times.size(), 4u);
  EXPECT_DOUBLE_EQ(times[0], 0.0);
  EXPECT_NEAR(times[1], 0.1, 1e-15);
  EXPECT_NEAR(times[2], 0.2, 1e-15);
  EXPECT_NEAR(times[3], 0.25, 1e-15);
}

TEST(Integrate, BlowUpGuard) {
  const Grid g = Grid::uniform(1, 1, 16, 2.0 * pi);
  const Model m(g, linear_params(1.0, 0.0, 50.0));
  StepperConfig c = config(1e-2, 10.0);
  c.max_field_norm = 1e3;
  try {
    integrate(Field(g, 1, 1.0), m, c);
    FAIL() << "expected blow-up";
  } catch (const BlowUpError& e) {
    EXPECT_GT(e.step(), 0u);
    EXPECT_LT(e.time(), 1.0);
  }
}

TEST(Integrate, Deterministic) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0 * pi);
  ModelParams p;
  p.gamma = 0.5;
  p.eps = 0.05;
  const Model m(g, p);
  const Field u0 = random_smooth_field(g, 3, {4});
  const StepperConfig c = config(1e-3, 0.05, Scheme::ImexBdf2);
  EXPECT_TRUE(integrate(u0, m, c) == integrate(u0, m, c));
}

TEST(Stability, ImplicitPartContracts) {
  const Grid g = Grid::uniform(2, 1, 16, 2.0 * pi);
  const Model m(g, linear_params(1.0, 0.1, 0.0));
  const Field u = random_smooth_field(g, 1, {5, 0.5, 1.0, 0});
  for (double dt : {1e-3, 1.0, 1e3}) {
    const Field v = step(u, m, config(dt, dt));
    EXPECT_LE(l2_norm(v), l2_norm(u) * (1.0 + 1e-14)) << "dt=" << dt;
  }
}

namespace {

// Independent semi-implicit Euler for the eps = 0 scalar gradient flow
// u_t = sigma (u_xx + kappa1 u - kappa2 u^3): diffusion implicit, the rest
// explicit, all products evaluated directly on the grid.
Field reference_llb_euler(Field u, double sigma, double k1, double k2, double dt, int steps) {
  const Grid& g = u.grid();
  for (int s = 0; s < steps; ++s) {
    Field f(g, 1);
    for (std::size_t q = 0; q < g.points(); ++q) {
      const double v = u.at(0, q);
      f.at(0, q) = sigma * (k1 * v - k2 * v * v * v);
    }
    Spectrum uh = to_spectral(u);
    const Spectrum fh = to_spectral(f);
    for (std::size_t q = 0; q < uh.modes(); ++q) {
      const double kk = g.wavenumber(0, static_cast<int>(q));
      uh.at(0, q) = (uh.at(0, q) + dt * fh.at(0, q)) / (1.0 + dt * sigma * kk * kk);
    }
    u = to_physical(uh);
  }
  return u;
}

}  // namespace

TEST(EpsDegeneracy, MatchesSecondOrderOnlyStepper) {
  const Grid g = Grid::uniform(1, 1, 32, 2.0 * pi);
  ModelParams p;
  p.sigma = 1.2;
  p.eps = 0.0;
  p.kappa1 = 1.0;
  p.kappa2 = 1.0;
  const Model m(g, p, std::nullopt, Dealiasing::None);
  const Field u0 = random_smooth_field(g, 1, {6, 2.0, 1.0, 0});
  const double dt = 1e-3;
  const Field a = integrate(u0, m, config(dt, 0.2));
  const Field b = reference_llb_euler(u0, p.sigma, p.kappa1, p.kappa2, dt, 200);
  EXPECT_LT((a - b).max_abs(), 1e-12);
}

namespace {

double self_convergence_ratio(Scheme scheme, double dt) {
  const Grid g = Grid::uniform(1, 1, 32, 2.0 * pi);
  ModelParams p;
  p.eps = 0.1;
  const Model m(g, p);
  const Field u0 = random_smooth_field(g, 1, {7, 2.0, 1.0, 0});
  const double T = 0.5;
  const Field ref = integrate(u0, m, config(dt / 16.0, T, Scheme::ImexBdf2));
  const double e1 = l2_norm(integrate(u0, m, config(dt, T, scheme)) - ref);
  const double e2 = l2_norm(integrate(u0, m, config(dt / 2.0, T, scheme)) - ref);
  return e1 / e2;
}

}  // namespace

TEST(SelfConvergence, EulerFirstOrder) {
  EXPECT_NEAR(self_convergence_ratio(Scheme::ImexEuler, 1e-2), 2.0, 0.4);
}

TEST(SelfConvergence, Bdf2SecondOrder) {
  EXPECT_NEAR(self_convergence_ratio(Scheme::ImexBdf2, 1e-2), 4.0, 1.2);
}
