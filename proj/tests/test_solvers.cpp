#include <gtest/gtest.h>

#include "crystalpr/datagen.hpp"
#include "crystalpr/solvers.hpp"

using namespace crystalpr;

namespace {

Signal random_signal(const AbelianGroup& g, Field f, Rng& rng)
{
  Signal x(g, f);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = f == Field::Real ? Complex{rng.normal(), 0.0} : Complex{rng.normal(), rng.normal()};
  return x;
}

double dist2(const Signal& a, const Signal& b)
{
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::norm(a[i] - b[i]);
  return d;
}

}  // namespace

TEST(ProjectS, KeepsLargestAndBreaksTiesLow)
{
  auto g = AbelianGroup::cyclic(6);
  auto x = Signal::real(g, {1, -3, 2, -2, 0.5, 3});
  auto p = project_S(x, 3);
  EXPECT_EQ(p, Signal::real(g, {0, -3, 2, 0, 0, 3}));
  EXPECT_EQ(project_S(p, 3), p);
  EXPECT_EQ(project_S(x, 6), x);
  EXPECT_EQ(project_S(x, 0), Signal(g, Field::Real));
  EXPECT_THROW(project_S(x, 7), std::domain_error);
}

TEST(ProjectS, IsNearestSparsePoint)
{
  Rng rng(21);
  auto g = AbelianGroup::cyclic(7);
  for (int t = 0; t < 20; ++t) {
    auto x = random_signal(g, Field::Complex, rng);
    const double best = dist2(x, project_S(x, 3));
    for_each_subset(7, 3, [&](const std::vector<std::size_t>& idx) {
      Signal y(g, Field::Complex);
      for (auto i : idx) y[i] = x[i];
      EXPECT_LE(best, dist2(x, y) + 1e-12);
    });
  }
}

TEST(ProjectB, MatchesMagnitudeAndIsIdempotent)
{
  Rng rng(22);
  for (auto g : {AbelianGroup::cyclic(9), AbelianGroup({3, 4})})
    for (Field f : {Field::Real, Field::Complex}) {
      auto target = random_signal(g, f, rng);
      const auto y0 = fourier_magnitude(target);
      auto x = random_signal(g, f, rng);
      auto p = project_B(x, y0);
      const auto m = fourier_magnitude(p);
      for (std::size_t k = 0; k < g.order(); ++k) EXPECT_NEAR(m.values[k], y0.values[k], 1e-10);
      EXPECT_LT(max_abs_diff(project_B(p, y0), p), 1e-10);
      EXPECT_LT(max_abs_diff(project_B(target, y0), target), 1e-10);
    }
}

TEST(ProjectB, IsNearestPointInComplexCase)
{
  Rng rng(23);
  auto g = AbelianGroup::cyclic(8);
  const auto y0 = fourier_magnitude(random_signal(g, Field::Complex, rng));
  for (int t = 0; t < 10; ++t) {
    auto x = random_signal(g, Field::Complex, rng);
    const double best = dist2(x, project_B(x, y0));
    for (int s = 0; s < 50; ++s) {
      // Random point of B: y0 with random phases.
      Signal z(g, Field::Complex);
      for (std::size_t k = 0; k < 8; ++k) z[k] = std::polar(y0.values[k], rng.uniform(0.0, 6.283185307179586));
      EXPECT_LE(best, dist2(x, idft(z)) + 1e-10);
    }
  }
}

TEST(Rrr, BetaOneIsDouglasRachford)
{
  Rng rng(24);
  auto g = AbelianGroup::cyclic(10);
  const auto y0 = fourier_magnitude(random_signal(g, Field::Real, rng));
  auto x = random_signal(g, Field::Real, rng);
  auto ps = project_S(x, 3);
  Signal r = ps;
  for (std::size_t i = 0; i < 10; ++i) r[i] = 2.0 * ps[i] - x[i];
  auto pb = project_B(r, y0);
  Signal dr = x;
  for (std::size_t i = 0; i < 10; ++i) dr[i] += pb[i] - ps[i];
  EXPECT_LT(max_abs_diff(rrr_step(x, y0, 3, 1.0), dr), 1e-14);
  EXPECT_THROW(rrr_step(x, y0, 3, 2.0), std::invalid_argument);
}

TEST(Rrr, SolutionIsFixedPoint)
{
  const auto inst = plant_generic(AbelianGroup::cyclic(12), 3, 4);
  EXPECT_LT(max_abs_diff(rrr_step(inst.x_true, inst.y0, 3, 0.5), inst.x_true), 1e-12);
}

TEST(Eta, EnergyFraction)
{
  auto g = AbelianGroup::cyclic(4);
  EXPECT_DOUBLE_EQ(eta_index(Signal::real(g, {3, 0, 4, 0}), 2), 1.0);
  EXPECT_DOUBLE_EQ(eta_index(Signal::real(g, {1, 1, 1, 1}), 1), 0.25);
  EXPECT_THROW(eta_index(Signal(g, Field::Real), 1), std::domain_error);
}

TEST(Solve, RecoversPlantedSignalWithOracle)
{
  const auto inst = plant_generic(AbelianGroup::cyclic(20), 3, 8);
  SolverConfig cfg;
  cfg.max_iter = 200000;
  cfg.seed = 3;
  const auto res = solve(inst.y0, 3, cfg, Field::Real, &inst.x_true);
  ASSERT_TRUE(res.converged);
  EXPECT_LT(res.final_error, 1e-8);
  EXPECT_LT(relative_error(res.estimate, inst.x_true).error, 1e-8);
}

TEST(Solve, EtaCriterionWithoutOracle)
{
  const auto inst = plant_generic(AbelianGroup::cyclic(20), 3, 8);
  SolverConfig cfg;
  cfg.max_iter = 200000;
  cfg.seed = 3;
  const auto res = solve(inst.y0, 3, cfg);
  ASSERT_TRUE(res.converged);
  EXPECT_GT(res.final_eta, 1.0 - 1e-10);
  EXPECT_TRUE(std::isnan(res.final_error));
  EXPECT_LT(relative_error(res.estimate, inst.x_true).error, 1e-6);
}

TEST(Solve, ComplexField)
{
  PlantOptions po;
  po.field = Field::Complex;
  const auto inst = plant_generic(AbelianGroup::cyclic(16), 3, 2, po);
  SolverConfig cfg;
  cfg.max_iter = 500000;
  cfg.seed = 1;
  const auto res = solve(inst.y0, 3, cfg, Field::Complex, &inst.x_true);
  EXPECT_TRUE(res.converged);
}

TEST(Solve, DeterministicAndTrajectory)
{
  const auto inst = plant_generic(AbelianGroup::cyclic(15), 3, 5);
  SolverConfig cfg;
  cfg.max_iter = 300;
  cfg.seed = 9;
  cfg.record_trajectory = true;
  cfg.trajectory_stride = 10;
  cfg.variant = SolverVariant::AlternatingProjection;
  const auto a = solve(inst.y0, 3, cfg, Field::Real, &inst.x_true);
  const auto b = solve(inst.y0, 3, cfg, Field::Real, &inst.x_true);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.iterations, b.iterations);
  ASSERT_FALSE(a.trajectory.empty());
  for (const auto& p : a.trajectory) EXPECT_EQ(p.iter % 10, 0u);
}

TEST(Solve, ValidatesConfig)
{
  const auto inst = plant_generic(AbelianGroup::cyclic(10), 2, 1);
  SolverConfig cfg;
  cfg.beta = 0.0;
  EXPECT_THROW(solve(inst.y0, 2, cfg), std::invalid_argument);
  cfg = {};
  cfg.max_iter = 0;
  EXPECT_THROW(solve(inst.y0, 2, cfg), std::invalid_argument);
  EXPECT_THROW(solve(inst.y0, 11, SolverConfig{}), std::domain_error);
  EXPECT_THROW(variant_from_string("hio"), std::invalid_argument);
}

TEST(IterationStudy, ThreadIndependentAndFailuresAtCap)
{
  SolverConfig cfg;
  cfg.max_iter = 40;
  cfg.seed = 17;
  const auto a = iteration_study(10, {3, 4}, cfg, {12, false, 1});
  const auto b = iteration_study(10, {3, 4}, cfg, {12, false, 3});
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t r = 0; r < 2; ++r) {
    EXPECT_EQ(a[r].counts, b[r].counts);
    EXPECT_EQ(a[r].converged, b[r].converged);
    for (std::size_t t = 0; t < a[r].counts.size(); ++t)
      if (!a[r].converged[t]) EXPECT_EQ(a[r].counts[t], 40u);
  }
}

TEST(IterationStudy, QuantileInterpolates)
{
  EXPECT_DOUBLE_EQ(quantile_sorted({1, 2, 3, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted({5}, 0.9), 5.0);
  EXPECT_DOUBLE_EQ(quantile_sorted({}, 0.5), 0.0);
}
