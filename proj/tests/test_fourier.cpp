#include <gtest/gtest.h>

#include <numbers>

#include "crystalpr/fourier.hpp"
#include "crystalpr/rng.hpp"

using namespace crystalpr;

namespace {

Signal random_signal(const AbelianGroup& g, Field f, Rng& rng)
{
  Signal x(g, f);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = f == Field::Real ? Complex{rng.normal(), 0.0} : Complex{rng.normal(), rng.normal()};
  return x;
}

// Direct sum over coordinates: xhat[k] = sum_n x[n] exp(-2 pi i sum_d k_d n_d / N_d).
Signal brute_dft(const Signal& x)
{
  const auto& g = x.group();
  Signal out(g, Field::Complex);
  for (std::size_t k = 0; k < g.order(); ++k) {
    const auto ek = g.element_of(k);
    for (std::size_t n = 0; n < g.order(); ++n) {
      const auto en = g.element_of(n);
      double t = 0.0;
      for (std::size_t d = 0; d < g.rank(); ++d)
        t += static_cast<double>(ek.coords[d]) * en.coords[d] / g.moduli()[d];
      out[k] += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * t);
    }
  }
  return out;
}

const std::vector<AbelianGroup> groups = {AbelianGroup::cyclic(1), AbelianGroup::cyclic(7), AbelianGroup::cyclic(16),
                                          AbelianGroup({4, 4}),   AbelianGroup({2, 3, 5}),  AbelianGroup({6, 5})};

}  // namespace

TEST(Dft, MatchesBruteForce)
{
  Rng rng(1);
  for (const auto& g : groups) {
    auto x = random_signal(g, Field::Complex, rng);
    EXPECT_LT(max_abs_diff(dft(x), brute_dft(x)), 1e-10) << g.to_string();
  }
}

TEST(Dft, InverseRoundTrip)
{
  Rng rng(2);
  for (const auto& g : groups) {
    auto x = random_signal(g, Field::Complex, rng);
    EXPECT_LT(max_abs_diff(idft(dft(x)), x), 1e-12) << g.to_string();
  }
}

TEST(Dft, LargeCyclicUsesFactoredPath)
{
  Rng rng(3);
  auto g = AbelianGroup::cyclic(600);
  auto x = random_signal(g, Field::Complex, rng);
  EXPECT_LT(max_abs_diff(idft(dft(x)), x), 1e-11);
  const auto xhat = dft(x);
  Complex direct{};
  for (std::size_t n = 0; n < g.order(); ++n) direct += x[n] * std::polar(1.0, -2.0 * std::numbers::pi * 7.0 * n / 600.0);
  EXPECT_LT(std::abs(xhat[7] - direct), 1e-9);
}

TEST(Dft, Parseval)
{
  Rng rng(4);
  for (const auto& g : groups) {
    auto x = random_signal(g, Field::Complex, rng);
    EXPECT_NEAR(dft(x).squared_norm(), static_cast<double>(g.order()) * x.squared_norm(), 1e-9 * g.order());
  }
}

TEST(Autocorrelation, HandExample)
{
  // x = (1, 2, 0, 0) on Z_4: a[0] = 5, a[1] = 2, a[2] = 0, a[3] = 2.
  auto a = periodic_autocorrelation(Signal::real(AbelianGroup::cyclic(4), {1, 2, 0, 0}));
  EXPECT_EQ(a.values, (std::vector<Complex>{5.0, 2.0, 0.0, 2.0}));
  EXPECT_EQ(a.on_classes(), (std::vector<Complex>{5.0, 2.0, 0.0}));
}

TEST(Autocorrelation, ConventionConjugatesShiftedFactor)
{
  auto g = AbelianGroup::cyclic(3);
  Signal x(g, Field::Complex, {Complex{0, 1}, 1.0, 0.0});
  // a[1] = x0 conj(x1) + x1 conj(x2) + x2 conj(x0) = i.
  EXPECT_LT(std::abs(periodic_autocorrelation(x).values[1] - Complex{0, 1}), 1e-15);
}

TEST(Autocorrelation, SpectralAgreesWithReference)
{
  Rng rng(5);
  for (const auto& g : groups)
    for (Field f : {Field::Real, Field::Complex}) {
      auto x = random_signal(g, f, rng);
      const auto a = periodic_autocorrelation(x), b = periodic_autocorrelation_spectral(x);
      for (std::size_t i = 0; i < g.order(); ++i) EXPECT_LT(std::abs(a.values[i] - b.values[i]), 1e-10);
    }
}

TEST(Autocorrelation, HermitianSymmetry)
{
  Rng rng(6);
  auto g = AbelianGroup({3, 4});
  auto x = random_signal(g, Field::Complex, rng);
  const auto a = periodic_autocorrelation(x);
  for (std::size_t l = 0; l < g.order(); ++l) EXPECT_LT(std::abs(a.values[g.index_negate(l)] - std::conj(a.values[l])), 1e-12);
}

TEST(Wiener, IdentityHoldsOnAllGroups)
{
  Rng rng(7);
  for (const auto& g : groups)
    for (Field f : {Field::Real, Field::Complex}) {
      auto x = random_signal(g, f, rng);
      EXPECT_LT(wiener_check(x), 1e-10 * std::max(1.0, x.squared_norm())) << g.to_string();
    }
}

TEST(FourierMagnitude, ShiftInvariant)
{
  Rng rng(8);
  auto g = AbelianGroup::cyclic(10);
  auto x = random_signal(g, Field::Complex, rng);
  Signal y(g, Field::Complex);
  for (std::size_t i = 0; i < 10; ++i) y[i] = x[(i + 3) % 10];
  const auto a = fourier_magnitude(x), b = fourier_magnitude(y);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
}

TEST(Aperiodic, HandExampleAndCyclicOnly)
{
  auto b = aperiodic_autocorrelation(Signal::real(AbelianGroup::cyclic(3), {1, 2, 3}));
  EXPECT_EQ(b, (std::vector<Complex>{14.0, 8.0, 3.0}));
  EXPECT_THROW(aperiodic_autocorrelation(Signal(AbelianGroup({2, 2}), Field::Real)), std::domain_error);
}
