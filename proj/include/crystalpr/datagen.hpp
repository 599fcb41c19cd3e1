#pragma once

// Synthetic instances: planted sparse signals, binary indicator signals,
// and Poisson-noised Fourier intensities.

#include <optional>
#include <random>

#include "crystalpr/diffsets.hpp"
#include "crystalpr/fourier.hpp"
#include "crystalpr/rng.hpp"

namespace crystalpr {

enum class ValueDistribution { Uniform01, StdNormal };

struct PlantedInstance {
  Signal x_true;
  FourierMagnitude y0;
  SupportSet support;
  std::uint64_t seed = 0;
  std::optional<double> photon_scale;  // set when y0 carries Poisson noise
};

struct PlantOptions {
  ValueDistribution values = ValueDistribution::Uniform01;
  Field field = Field::Real;
  /// Redraw the support until |S-S| > K.
  bool require_large_diffset = false;
  std::size_t max_support_draws = 100000;
};

namespace detail {

inline double nonzero_draw(ValueDistribution dist, Rng& rng)
{
  for (;;) {
    double v = dist == ValueDistribution::Uniform01 ? rng.uniform01() : rng.normal();
    if (v != 0.0) return v;
  }
}

inline SupportSet draw_support(const AbelianGroup& g, std::size_t k, Rng& rng, const PlantOptions& opt)
{
  for (std::size_t attempt = 0; attempt < opt.max_support_draws; ++attempt) {
    SupportSet s = sample_support(g, k, rng);
    if (!opt.require_large_diffset || difference_set(s).size() > k) return s;
  }
  throw std::domain_error("plant: no support with |S-S| > K found; K is too large for this group");
}

}  // namespace detail

/// Random support of size K with i.i.d. nonzero values; reproducible from `seed`.
inline PlantedInstance plant_generic(const AbelianGroup& g, std::size_t k, std::uint64_t seed,
                                     const PlantOptions& opt = {})
{
  if (k > g.order()) throw std::domain_error("plant_generic: K exceeds group order");
  Rng rng(seed);
  SupportSet s = detail::draw_support(g, k, rng, opt);
  Signal x(g, opt.field);
  for (auto i : s.indices()) {
    const double re = detail::nonzero_draw(opt.values, rng);
    const double im = opt.field == Field::Complex ? rng.normal() : 0.0;
    x[i] = Complex{re, im};
  }
  auto y0 = fourier_magnitude(x);
  return PlantedInstance{std::move(x), std::move(y0), std::move(s), seed, std::nullopt};
}

inline PlantedInstance plant_binary(const AbelianGroup& g, std::size_t k, std::uint64_t seed)
{
  if (k > g.order()) throw std::domain_error("plant_binary: K exceeds group order");
  Rng rng(seed);
  SupportSet s = sample_support(g, k, rng);
  Signal x(g, Field::Real);
  for (auto i : s.indices()) x[i] = 1.0;
  auto y0 = fourier_magnitude(x);
  return PlantedInstance{std::move(x), std::move(y0), std::move(s), seed, std::nullopt};
}

/// Photon-count noise on intensities: I' = Poisson(scale * |y|^2) / scale,
/// returned as sqrt(I').  E[I'] = |y|^2.
inline FourierMagnitude poissonize(const FourierMagnitude& y0, double photon_scale, Rng& rng)
{
  if (!(photon_scale > 0.0)) throw std::invalid_argument("poissonize: photon_scale must be positive");
  FourierMagnitude out = y0;
  for (auto& v : out.values) {
    const double mean = photon_scale * v * v;
    if (mean <= 0.0) {
      v = 0.0;
      continue;
    }
    std::poisson_distribution<long long> pois(mean);
    const auto count = pois(rng.engine());
    v = std::sqrt(static_cast<double>(count) / photon_scale);
  }
  return out;
}

inline PlantedInstance with_poisson_noise(PlantedInstance inst, double photon_scale, Rng& rng)
{
  inst.y0 = poissonize(inst.y0, photon_scale, rng);
  inst.photon_scale = photon_scale;
  return inst;
}

}  // namespace crystalpr
