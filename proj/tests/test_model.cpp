#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "llbar/model.hpp"
#include "llbar/random_field.hpp"

using namespace llbar;
using std::numbers::pi;

namespace {

Grid line(int m = 1, int n = 32) { return Grid::uniform(1, m, n, 2.0 * pi); }

ModelParams linear_params(double sigma, double eps, double kappa1) {
  ModelParams p;
  p.sigma = sigma;
  p.eps = eps;
  p.kappa1 = kappa1;
  p.kappa2 = 0.0;
  return p;
}

double max_diff(const Field& a, const Field& b) { return (a - b).max_abs(); }

Field vec_sample(const Grid& g, std::function<void(const Point&, std::span<double>)> f) {
  return Field::sample(g, 3, f);
}

}  // namespace

TEST(Params, Validation) {
  ModelParams p;
  EXPECT_NO_THROW(validate(p, 3));
  auto bad = [](auto mutate, int m = 3) {
    ModelParams q;
    mutate(q);
    EXPECT_THROW(validate(q, m), ConfigError);
  };
  bad([](ModelParams& q) { q.sigma = 0.0; });
  bad([](ModelParams& q) { q.eps = -1e-3; });
  bad([](ModelParams& q) { q.gamma = -1.0; });
  bad([](ModelParams& q) { q.kappa2 = -1.0; });
  bad([](ModelParams& q) { q.lambda2 = -0.5; });
  bad([](ModelParams& q) { q.easy_axis = {1.0, 1.0, 0.0}; });
  bad([](ModelParams& q) { q.gamma = 1.0; }, 1);
  // 2 chi^2 < kappa2 sigma^2 with sigma = kappa2 = 1: chi = 0.75 violates it
  bad([](ModelParams& q) { q.chi = 0.75; });
  ModelParams ok;
  ok.chi = 0.7;
  EXPECT_NO_THROW(validate(ok, 1));
}

TEST(Params, SmallnessMessageNamesCondition) {
  ModelParams p;
  p.chi = 1.0;
  try {
    validate(p, 1);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("2 chi^2 < kappa2 sigma^2"), std::string::npos);
  }
}

TEST(ModelCtor, ScalarDisablesVectorTerms) {
  ModelParams p;
  p.aniso_enabled = true;
  p.demag_enabled = true;
  const Model m(line(1), p);
  EXPECT_FALSE(m.params().aniso_enabled);
  EXPECT_FALSE(m.params().demag_enabled);
  EXPECT_THROW(anisotropy_field(Field(line(1), 1), m), ModelError);
}

TEST(ModelCtor, ScalarWithGammaRejected) {
  ModelParams p;
  p.gamma = 0.5;
  EXPECT_THROW(Model(line(1), p), ConfigError);
}

TEST(ModelCtor, NuInfinity) {
  const Grid g = line(1, 32);
  const Field nu = Field::sample(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::sin(x[0]); });
  const Model m(g, ModelParams{}, nu);
  // |nu|^2 + |nu'|^2 + |nu''|^2 = pi + pi + pi
  EXPECT_NEAR(m.nu_infinity(), 3.0 * pi, 1e-12);
}

TEST(Exchange, ZeroAndMinimizer) {
  const Grid g = line(3);
  ModelParams p;
  const Model m(g, p);
  EXPECT_EQ(exchange_gl_field(Field(g, 3), m).max_abs(), 0.0);
  const double e1[3] = {1.0, 0.0, 0.0};
  EXPECT_LT(exchange_gl_field(Field::constant(g, e1), m).max_abs(), 1e-14);
}

TEST(Exchange, SineCubicOracle) {
  const Grid g = line(3, 64);
  ModelParams p;
  p.kappa1 = 0.0;
  p.kappa2 = 1.0;
  const Model m(g, p);
  const Field u = vec_sample(g, [](const Point& x, std::span<double> o) { o[0] = std::sin(x[0]); });
  const Field psi = exchange_gl_field(u, m);
  // Independent pointwise evaluation: Lap sin = -sin, |u|^2 u = sin^3.
  for (std::size_t q = 0; q < g.points(); ++q) {
    const double s = std::sin(u.point(q)[0]);
    EXPECT_NEAR(psi.at(0, q), -s - s * s * s, 1e-12);
    EXPECT_NEAR(psi.at(0, q), -s - (3.0 * s - std::sin(3.0 * u.point(q)[0])) / 4.0, 1e-12);
    EXPECT_EQ(psi.at(1, q), 0.0);
  }
}

TEST(Anisotropy, Examples) {
  const Grid g = Grid::uniform(2, 3, 8, 1.0);
  ModelParams p;
  p.lambda1 = 1.0;
  p.lambda2 = 1.0;
  p.aniso_enabled = true;
  const Model m(g, p);
  const double u0[3] = {0.0, 0.0, 2.0};
  const Field h = anisotropy_field(Field::constant(g, u0), m);
  for (std::size_t q = 0; q < g.points(); ++q) {
    EXPECT_NEAR(h.at(0, q), 0.0, 1e-14);
    EXPECT_NEAR(h.at(2, q), -6.0, 1e-13);
  }
  const Field perp = vec_sample(g, [](const Point& x, std::span<double> o) {
    o[0] = std::sin(2.0 * pi * x[0]);
    o[1] = std::cos(2.0 * pi * x[1]);
  });
  EXPECT_LT(anisotropy_field(perp, m).max_abs(), 1e-14);
}

TEST(Anisotropy, PointwiseOracle) {
  const Grid g = Grid::uniform(2, 3, 32, 2.0 * pi);
  ModelParams p;
  p.lambda1 = 0.7;
  p.lambda2 = 0.4;
  p.easy_axis = {0.6, 0.0, 0.8};
  p.aniso_enabled = true;
  const Model m(g, p, std::nullopt, Dealiasing::Padded);
  const Field u = random_smooth_field(g, 3, {2, 2.0, 1.0, 3});
  const Field h = anisotropy_field(u, m);
  for (std::size_t q = 0; q < g.points(); ++q) {
    const double eu = 0.6 * u.at(0, q) + 0.8 * u.at(2, q);
    const double s = 0.7 * eu - 0.4 * eu * eu * eu;
    EXPECT_NEAR(h.at(0, q), 0.6 * s, 1e-12);
    EXPECT_NEAR(h.at(1, q), 0.0, 1e-12);
    EXPECT_NEAR(h.at(2, q), 0.8 * s, 1e-12);
  }
  ModelParams lin = p;
  lin.lambda2 = 0.0;
  const Field hl = anisotropy_field(u, Model(g, lin));
  for (std::size_t q = 0; q < g.points(); ++q) {
    const double eu = 0.6 * u.at(0, q) + 0.8 * u.at(2, q);
    EXPECT_NEAR(hl.at(0, q), 0.7 * eu * 0.6, 1e-12);
    EXPECT_NEAR(hl.at(2, q), 0.7 * eu * 0.8, 1e-12);
  }
}

TEST(Anisotropy, Monotonicity) {
  const Grid g = Grid::uniform(2, 3, 32, 2.0 * pi);
  ModelParams p;
  p.lambda1 = 1.3;
  p.lambda2 = 0.8;
  p.easy_axis = {0.0, 0.6, 0.8};
  p.aniso_enabled = true;
  const Model m(g, p);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field v = random_smooth_field(g, 3, {s, 2.0, 2.0, 4});
    const Field w = random_smooth_field(g, 3, {s + 50, 2.0, 0.5, 4});
    const Field dv = v - w;
    const double lhs = inner(anisotropy_field(v, m) - anisotropy_field(w, m), dv);
    EXPECT_LE(lhs, p.lambda1 * l2_norm_squared(dv) + 1e-10);
  }
}

TEST(Demag, ConstantAndTransverse) {
  const Grid g = Grid::uniform(3, 3, 8, 2.0 * pi);
  ModelParams p;
  p.demag_enabled = true;
  const Model m(g, p);
  const double c[3] = {0.3, -1.0, 2.0};
  EXPECT_LT(demag_field(Field::constant(g, c), m).max_abs(), 1e-14);
  // k = (1, 2, 0), m_hat = (2, -1, 0) / sqrt(5) is orthogonal to k
  const Field tr = vec_sample(g, [](const Point& x, std::span<double> o) {
    const double s = std::sin(x[0] + 2.0 * x[1]);
    o[0] = 2.0 * s / std::sqrt(5.0);
    o[1] = -s / std::sqrt(5.0);
  });
  EXPECT_LT(demag_field(tr, m).max_abs(), 1e-14);
  const Field lon = vec_sample(g, [](const Point& x, std::span<double> o) {
    const double s = std::sin(x[0] + 2.0 * x[1]);
    o[0] = s / std::sqrt(5.0);
    o[1] = 2.0 * s / std::sqrt(5.0);
  });
  EXPECT_LT(max_diff(demag_field(lon, m), lon * -1.0), 1e-14);
}

TEST(Demag, BoundAndRequirements) {
  const Grid g = Grid::uniform(3, 3, 8, 2.0 * pi);
  ModelParams p;
  p.demag_enabled = true;
  const Model m(g, p);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field v = random_smooth_field(g, 3, {s, 1.0, 1.0, 0});
    EXPECT_LE(l2_norm(demag_field(v, m)), l2_norm(v) * (1.0 + 1e-12));
  }
  const Grid nm = Grid::uniform(2, 3, 8, 1.0, Boundary::NeumannCosine);
  EXPECT_THROW(Model(nm, p), ConfigError);
  ModelParams off;
  EXPECT_THROW(demag_field(Field(g, 3), Model(g, off)), ModelError);
}

TEST(EffectiveField, MinimizerZeroAndLinearity) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0);
  ModelParams p;
  p.kappa1 = 2.0;
  p.kappa2 = 0.5;
  const Model m(g, p);
  const double r = std::sqrt(p.kappa1 / p.kappa2);
  const double u0[3] = {0.0, r * 0.6, r * 0.8};
  EXPECT_LT(effective_field(Field::constant(g, u0), m).max_abs(), 1e-13);
  EXPECT_EQ(effective_field(Field(g, 3), m).max_abs(), 0.0);

  ModelParams lin;
  lin.kappa1 = 1.5;
  lin.kappa2 = 0.0;
  lin.lambda1 = 0.4;
  lin.aniso_enabled = true;
  const Model ml(g, lin);
  const Field u = random_smooth_field(g, 3, {1, 2.0, 1.0, 0});
  const Field v = random_smooth_field(g, 3, {2, 2.0, 1.0, 0});
  const Field lhs = effective_field(u + v, ml);
  const Field rhs_ = effective_field(u, ml) + effective_field(v, ml);
  EXPECT_LT(max_diff(lhs, rhs_), 1e-10);
}

TEST(Convection, ZeroCurrent) {
  ModelParams p;
  p.beta1 = 1.0;
  p.beta2 = 1.0;
  const Grid g = line(3);
  const Field u = random_smooth_field(g, 3, {3});
  EXPECT_EQ(convective_term(u, Model(g, p)).max_abs(), 0.0);
  // The scalar quadratic flux follows the current direction, which is absent.
  p.beta2 = 0.0;
  p.chi = 0.5;
  const Grid s = line(1);
  EXPECT_EQ(convective_term(random_smooth_field(s, 1, {3}), Model(s, p)).max_abs(), 0.0);
}

TEST(Convection, DirectionalDerivative) {
  const Grid g = line(3);
  ModelParams p;
  p.beta1 = 1.0;
  const double ex[1] = {1.0};
  const Model m(g, p, Model::constant_current(g, ex));
  const Field u = vec_sample(g, [](const Point& x, std::span<double> o) { o[2] = std::sin(x[0]); });
  const Field r = convective_term(u, m);
  for (std::size_t q = 0; q < g.points(); ++q) {
    EXPECT_NEAR(r.at(2, q), std::cos(u.point(q)[0]), 1e-13);
    EXPECT_NEAR(r.at(0, q), 0.0, 1e-14);
  }
}

TEST(Convection, GyroTermVanishesForFixedDirection) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0 * pi);
  ModelParams p;
  p.beta2 = 1.0;
  const double nu[2] = {1.0, 0.5};
  const Model m(g, p, Model::constant_current(g, nu));
  const Field u = vec_sample(g, [](const Point& x, std::span<double> o) {
    const double f = std::sin(x[0]) * std::cos(x[1]);
    o[0] = 0.48 * f;
    o[1] = 0.6 * f;
    o[2] = 0.64 * f;
  });
  EXPECT_LT(convective_term(u, m).max_abs(), 1e-14);
}

TEST(Convection, ScalarQuadraticFlux) {
  const Grid g = line(1, 32);
  ModelParams p;
  p.chi = 0.5;
  const double ex[1] = {2.0};
  const Model m(g, p, Model::constant_current(g, ex));
  const Field u = Field::sample(g, 1, [](const Point& x, std::span<double> o) { o[0] = std::sin(x[0]); });
  const Field r = convective_term(u, m);
  // chi d/dx (sin^2 x) = chi sin 2x; the direction is normalised
  for (std::size_t q = 0; q < g.points(); ++q)
    EXPECT_NEAR(r.at(0, q), 0.5 * std::sin(2.0 * u.point(q)[0]), 1e-13);
}

TEST(Convection, VectorQuadraticFlux) {
  const Grid g = Grid::uniform(3, 3, 16, 2.0 * pi);
  ModelParams p;
  p.chi = 0.5;
  const Model m(g, p);
  const Field u = vec_sample(g, [](const Point& x, std::span<double> o) {
    o[0] = std::sin(x[0]);
    o[1] = std::cos(x[2]);
  });
  const Field r = convective_term(u, m);
  // C_i = d_j(u_i u_j): C_x = d_x sin^2 x = sin 2x,
  // C_y = d_x(cos z sin x) + d_y(cos^2 z) = cos z cos x
  for (std::size_t q = 0; q < g.points(); ++q) {
    const Point x = u.point(q);
    EXPECT_NEAR(r.at(0, q), 0.5 * std::sin(2.0 * x[0]), 1e-13);
    EXPECT_NEAR(r.at(1, q), 0.5 * std::cos(x[2]) * std::cos(x[0]), 1e-13);
    EXPECT_NEAR(r.at(2, q), 0.0, 1e-13);
  }
}

TEST(Source, Examples) {
  const Grid g = line(3);
  ModelParams p;
  p.source = Source::affine_quadratic({2.0, 0.0, 0.0});
  const Model m(g, p);
  EXPECT_EQ(source_term(Field(g, 3), m).max_abs(), 0.0);
  const double e1[3] = {1.0, 0.0, 0.0};
  const Field s = source_term(Field::constant(g, e1), m);
  for (std::size_t q = 0; q < g.points(); ++q) EXPECT_NEAR(s.at(0, q), 3.0, 1e-14);

  ModelParams z;
  z.source = Source::affine_quadratic({0.0, 0.0, 0.0});
  const Field u = random_smooth_field(g, 3, {4});
  EXPECT_LT(max_diff(source_term(u, Model(g, z)), u), 1e-14);
}

TEST(Source, LocalLipschitz) {
  const Grid g = Grid::uniform(2, 3, 32, 2.0 * pi);
  ModelParams p;
  const Vec3 a{1.5, -0.5, 2.0};
  p.source = Source::affine_quadratic(a);
  const Model m(g, p, std::nullopt, Dealiasing::Padded);
  const double C = std::max(1.0, std::sqrt(dot3(a.data(), a.data())));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Field v = random_smooth_field(g, 3, {s, 2.0, 3.0, 4});
    const Field w = random_smooth_field(g, 3, {s + 9, 2.0, 1.0, 4});
    double vinf = 0.0, winf = 0.0;
    for (std::size_t q = 0; q < g.points(); ++q) {
      vinf = std::max(vinf, point_magnitude(v, q));
      winf = std::max(winf, point_magnitude(w, q));
    }
    const double lhs = l2_norm(source_term(v, m) - source_term(w, m));
    EXPECT_LE(lhs, C * (1.0 + vinf + winf) * l2_norm(v - w) + 1e-10);
  }
}

TEST(Rhs, LinearModeSymbol) {
  for (double eps : {0.0, 0.1}) {
    const Grid g = Grid::uniform(2, 1, 16, 2.0 * pi);
    const ModelParams p = linear_params(1.3, eps, 2.0);
    const Model m(g, p);
    for (int kx : {0, 1, 3}) {
      for (int ky : {0, 2}) {
        const Field u = Field::sample(g, 1, [&](const Point& x, std::span<double> o) {
          o[0] = std::cos(kx * x[0] + ky * x[1]);
        });
        const double k2 = kx * kx + ky * ky;
        const double lam = (p.sigma + eps * k2) * (p.kappa1 - k2);
        // eps = 0: sigma (kappa1 - k2), no fourth-order content
        if (eps == 0.0) EXPECT_DOUBLE_EQ(lam, p.sigma * (p.kappa1 - k2));
        EXPECT_LT(max_diff(rhs(u, m), u * lam), 1e-12 * std::max(1.0, std::abs(lam)));
      }
    }
  }
}

TEST(Rhs, NeumannLinearModeSymbol) {
  const double L = 3.0;
  const Grid g = Grid::uniform(1, 1, 32, L, Boundary::NeumannCosine);
  const ModelParams p = linear_params(1.0, 0.1, 1.0);
  const Model m(g, p);
  const Field u = Field::sample(g, 1, [L](const Point& x, std::span<double> o) {
    o[0] = std::cos(2.0 * pi * x[0] / L);
  });
  const double k2 = std::pow(2.0 * pi / L, 2);
  const double lam = (1.0 + 0.1 * k2) * (1.0 - k2);
  EXPECT_LT(max_diff(rhs(u, m), u * lam), 1e-10 * std::abs(lam));
}

TEST(Rhs, FixedPoint) {
  const Grid g = Grid::uniform(2, 3, 16, 2.0);
  ModelParams p;
  p.eps = 0.1;
  p.gamma = 1.0;
  const Model m(g, p);
  const double u0[3] = {0.6, 0.0, 0.8};
  EXPECT_LT(rhs(Field::constant(g, u0), m).max_abs(), 1e-13);
}

TEST(Rhs, GyroTermIsOrthogonalToField) {
  // rhs(gamma) - rhs(0) = -gamma u x H, orthogonal to H pointwise
  const Grid g = Grid::uniform(1, 3, 64, 2.0 * pi);
  ModelParams p;
  p.kappa2 = 0.0;
  const Model m0(g, p, std::nullopt, Dealiasing::Padded);
  p.gamma = 1.0;
  const Model m1(g, p, std::nullopt, Dealiasing::Padded);
  const Field u = random_smooth_field(g, 3, {5, 2.0, 1.0, 8});
  const Field d = rhs(u, m1) - rhs(u, m0);
  const Field h = effective_field(u, m1);
  double worst = 0.0;
  for (std::size_t q = 0; q < g.points(); ++q) {
    double dot = 0.0;
    for (int c = 0; c < 3; ++c) dot += d.at(c, q) * h.at(c, q);
    worst = std::max(worst, std::abs(dot));
  }
  EXPECT_LT(worst, 1e-10);
  EXPECT_GT(d.max_abs(), 1e-3);
}
