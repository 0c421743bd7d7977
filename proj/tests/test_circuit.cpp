#include <gtest/gtest.h>

#include <random>

#include "fluxon/circuit.hpp"
#include "fluxon/grid.hpp"

using namespace fluxon;

namespace {

// Random parameters in the fluxon regime.
struct ParamGen {
  std::mt19937_64 rng{12345};
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  CircuitParams params() { return {uniform(1.0, 30.0), uniform(1.0, 30.0), uniform(0.1, 2.0), uniform(0.05, 0.5)}; }
};

}  // namespace

TEST(Potential1D, KnownValues) {
  EXPECT_DOUBLE_EQ(potential_1d(2.0, 0.15, 1.0, pi), 4.0);
  EXPECT_NEAR(potential_1d(2.0, 0.15, 1.0, 0.0), 0.15 * pi * pi, 1e-14);
  EXPECT_NEAR(potential_1d(2.0, 0.15, 0.0, 0.0), 0.0, 1e-15);
}

TEST(Potential1D, MirrorSymmetryAboutBarrier) {
  ParamGen g;
  for (int i = 0; i < 200; ++i) {
    const CircuitParams p = g.params();
    const double d = g.uniform(-0.3, 0.3), x = g.uniform(-6.0, 6.0);
    EXPECT_NEAR(potential_1d(p, 1.0 + d, pi + x), potential_1d(p, 1.0 - d, pi - x), 1e-9 * (1.0 + p.ejf));
  }
}

TEST(Potential1D, SlopeAndCurvatureMatchFiniteDifferences) {
  ParamGen g;
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const CircuitParams p = g.params();
    const double d = g.uniform(0.8, 1.2), x = g.uniform(-6.0, 12.0);
    const double fd = (potential_1d(p, d, x + h) - potential_1d(p, d, x - h)) / (2 * h);
    EXPECT_NEAR(potential_1d_slope(p.ejf, p.el, d, x), fd, 1e-6 * (1.0 + p.ejf));
    const double fd2 = (potential_1d_slope(p.ejf, p.el, d, x + h) - potential_1d_slope(p.ejf, p.el, d, x - h)) / (2 * h);
    EXPECT_NEAR(potential_1d_curvature(p.ejf, p.el, x), fd2, 1e-6 * (1.0 + p.ejf));
  }
}

TEST(Potential2D, OffsetVanishesForTrappedFluxonAndZeroFlux) {
  const CircuitParams p{20, 22, 0.5, 0.15};
  EXPECT_NEAR(potential_2d_offset(p, {0.0, 1.0, 0.0}), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(potential_2d_offset(p, {0.0, 0.0, 0.0}), 0.0);
}

TEST(Potential2D, ThreeDegenerateWellsAtTrappedFluxon) {
  const CircuitParams p{20, 22, 0.5, 0.15};
  const FluxConfig f{0.0, 1.0, 0.0};
  EXPECT_NEAR(potential_2d(p, f, 0, 0), potential_2d(p, f, two_pi, 0), 1e-12);
  EXPECT_NEAR(potential_2d(p, f, 0, 0), potential_2d(p, f, 0, -two_pi), 1e-12);
}

TEST(Potential2D, ZeroCouplingIsSeparable) {
  ParamGen g;
  for (int i = 0; i < 100; ++i) {
    const CircuitParams p = g.params();
    const FluxConfig f{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
    const double x = g.uniform(-8, 8), y = g.uniform(-8, 8);
    const double sum = potential_1d(p.ejf, p.el, f.delta_f(), x) + potential_1d(p.ejm, p.el, f.delta_m(), y) +
                       potential_2d_offset(p, f);
    EXPECT_NEAR(potential_2d(p, f, x, y, 0.0), sum, 1e-9 * (1 + std::abs(sum)));
  }
}

TEST(Potential2D, GradientAndHessianMatchFiniteDifferences) {
  ParamGen g;
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const CircuitParams p = g.params();
    const FluxConfig f{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
    const double x = g.uniform(-8, 8), y = g.uniform(-8, 8);
    const Gradient2 gr = potential_2d_gradient(p, f, x, y);
    EXPECT_NEAR(gr.df, (potential_2d(p, f, x + h, y) - potential_2d(p, f, x - h, y)) / (2 * h), 1e-5 * (1 + p.ejf));
    EXPECT_NEAR(gr.dm, (potential_2d(p, f, x, y + h) - potential_2d(p, f, x, y - h)) / (2 * h), 1e-5 * (1 + p.ejm));
    const Hessian2 he = potential_2d_hessian(p, x, y);
    const Gradient2 gx = potential_2d_gradient(p, f, x + h, y), gy = potential_2d_gradient(p, f, x, y + h);
    EXPECT_NEAR(he.ff, (gx.df - gr.df) / h, 1e-3 * (1 + p.ejf));
    EXPECT_NEAR(he.fm, (gy.df - gr.df) / h, 1e-3);
    EXPECT_NEAR(he.mm, (gy.dm - gr.dm) / h, 1e-3 * (1 + p.ejm));
  }
}

TEST(FluxConfig, DeltaSigmaRoundTrip) {
  const FluxConfig f = FluxConfig::from_delta_sigma(0.9, 1.0, 0.2);
  EXPECT_DOUBLE_EQ(f.delta_f(), 0.9);
  EXPECT_DOUBLE_EQ(f.sigma_f(), 1.0);
  EXPECT_DOUBLE_EQ(f.phim, 0.2);
}

TEST(Validate, RejectsNonPositiveEnergies) {
  EXPECT_THROW(validate_params({0.0, 1, 1, 1}), Error);
  EXPECT_THROW(validate_params({1, 1, -1, 1}), Error);
  EXPECT_THROW(validate_params({1, 1, 1, std::nan("")}), Error);
  EXPECT_THROW(validate_params({1, 1, 1, 1}, {std::numeric_limits<double>::infinity(), 0, 0}), Error);
  try {
    validate_params({1, 1, 1, 0});
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_params);
  }
}

TEST(Validate, WarningsOutsideRegime) {
  EXPECT_TRUE(validate_params({2, 2, 0.5, 0.15}).empty());
  EXPECT_EQ(validate_params({0.1, 2, 0.5, 0.15}).size(), 2u);  // beta_f < 1 and ejf/ec < 1
  EXPECT_EQ(validate_params({2, 0.1, 0.5, 0.15}).size(), 1u);
}

TEST(Grid1D, GeometryAndRefinement) {
  const PhaseGrid1D g = PhaseGrid1D::two_cell_default();
  EXPECT_EQ(g.size(), 2001u);
  EXPECT_DOUBLE_EQ(g.point(0), -2 * pi);
  EXPECT_NEAR(g.point(2000), 4 * pi, 1e-12);
  EXPECT_EQ(g.nearest_index(pi), 1000u);
  EXPECT_EQ(g.nearest_index(-100), 0u);
  EXPECT_EQ(g.nearest_index(100), 2000u);
  const PhaseGrid1D r = g.refined();
  EXPECT_EQ(r.size(), 4001u);
  EXPECT_NEAR(r.point(2 * 37), g.point(37), 1e-12);
  EXPECT_THROW(PhaseGrid1D(0, 1, 2), Error);
  EXPECT_THROW(PhaseGrid1D(1, 0, 10), Error);
}

TEST(Grid2D, CenteredOnVertex) {
  const PhaseGrid2D g = PhaseGrid2D::centered_on({0.0, 1.0, 0.0}, 61);
  EXPECT_NEAR(g.f.phi_min(), pi - 3 * pi, 1e-12);
  EXPECT_NEAR(g.m.phi_max(), -pi + 3 * pi, 1e-12);
  EXPECT_EQ(g.size(), 61u * 61u);
  EXPECT_EQ(g.index(2, 3), 2u * 61u + 3u);
}
