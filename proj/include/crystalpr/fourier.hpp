#pragma once

// Measurement operators: DFT over a finite abelian group, Fourier magnitude,
// periodic autocorrelation (direct and spectral), aperiodic autocorrelation.
//
// Conventions:
//   forward   xhat[k] = sum_l x[l] exp(-2 pi i <k,l>)      (unnormalized)
//   inverse   x[l]    = |A|^-1 sum_k xhat[k] exp(+2 pi i <k,l>)
//   autocorr  a[l]    = sum_i x[i] conj(x[i+l])
// With these, dft(a)[k] = |xhat[-k]|^2, which is |xhat[k]|^2 for real x.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "crystalpr/group.hpp"

namespace crystalpr {

/// Precomputed twiddles for the separable transform over Z_{N1} x ... x Z_{NM}.
/// Cost is |A| * (N1 + ... + NM) per transform.
class DftPlan {
public:
  explicit DftPlan(const AbelianGroup& group) : group_(group)
  {
    for (int n : group_.moduli()) {
      std::vector<Complex> w(static_cast<std::size_t>(n));
      for (int m = 0; m < n; ++m) {
        const double t = -2.0 * std::numbers::pi * m / n;
        w[static_cast<std::size_t>(m)] = Complex{std::cos(t), std::sin(t)};
      }
      std::vector<Complex> wi(w.size());
      for (std::size_t m = 0; m < w.size(); ++m) wi[m] = std::conj(w[m]);
      twiddles_.push_back(std::move(w));
      inv_twiddles_.push_back(std::move(wi));
      max_len_ = std::max<std::size_t>(max_len_, static_cast<std::size_t>(n));
    }
    line_.resize(max_len_);
    if (group_.is_cyclic() && group_.order() <= dense_limit) {
      const std::size_t n = group_.order();
      dense_.resize(n * n);
      dense_inv_.resize(n * n);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
          dense_[k * n + j] = twiddles_[0][(k * j) % n];
          dense_inv_[k * n + j] = inv_twiddles_[0][(k * j) % n];
        }
    }
  }

  const AbelianGroup& group() const { return group_; }

  void forward(std::span<Complex> data) { transform(data, false); }

  /// Inverse including the 1/|A| scale.
  void inverse(std::span<Complex> data)
  {
    transform(data, true);
    const double s = 1.0 / static_cast<double>(group_.order());
    for (auto& v : data) v *= s;
  }

private:
  static constexpr std::size_t dense_limit = 512;

  void transform(std::span<Complex> data, bool inverse)
  {
    if (!dense_.empty()) {
      dense_transform(data, inverse ? dense_inv_ : dense_);
      return;
    }
    const auto& mod = group_.moduli();
    const auto& strides = group_.strides();
    const std::size_t total = group_.order();
    for (std::size_t d = 0; d < mod.size(); ++d) {
      const auto n = static_cast<std::size_t>(mod[d]);
      if (n == 1) continue;
      const std::size_t stride = strides[d];
      const auto& w = inverse ? inv_twiddles_[d] : twiddles_[d];
      // Lines along axis d start at every index whose d-th coordinate is 0.
      for (std::size_t base = 0; base < total; ++base) {
        if ((base / stride) % n != 0) continue;
        for (std::size_t k = 0; k < n; ++k) {
          // Plain real arithmetic avoids the NaN-recovery path of complex operator*.
          double re = 0.0, im = 0.0;
          std::size_t e = 0;
          for (std::size_t j = 0; j < n; ++j) {
            const Complex a = data[base + j * stride];
            re += a.real() * w[e].real() - a.imag() * w[e].imag();
            im += a.real() * w[e].imag() + a.imag() * w[e].real();
            e += k;
            if (e >= n) e -= n;
          }
          line_[k] = Complex{re, im};
        }
        for (std::size_t k = 0; k < n; ++k) data[base + k * stride] = line_[k];
      }
    }
  }

  void dense_transform(std::span<Complex> data, const std::vector<Complex>& m)
  {
    const std::size_t n = data.size();
    for (std::size_t k = 0; k < n; ++k) {
      const Complex* row = m.data() + k * n;
      double re = 0.0, im = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        re += data[j].real() * row[j].real() - data[j].imag() * row[j].imag();
        im += data[j].real() * row[j].imag() + data[j].imag() * row[j].real();
      }
      line_[k] = Complex{re, im};
    }
    std::copy(line_.begin(), line_.begin() + static_cast<std::ptrdiff_t>(n), data.begin());
  }

  AbelianGroup group_;
  std::vector<Complex> dense_, dense_inv_;  // full matrices for small cyclic groups
  std::vector<std::vector<Complex>> twiddles_;
  std::vector<std::vector<Complex>> inv_twiddles_;
  std::vector<Complex> line_;
  std::size_t max_len_ = 1;
};

struct FourierMagnitude {
  AbelianGroup group;
  std::vector<double> values;

  bool operator==(const FourierMagnitude&) const = default;
};

struct Autocorrelation {
  AbelianGroup group;
  Field field = Field::Real;
  std::vector<Complex> values;

  /// Value at the representative of each reflection class, in index order.
  std::vector<Complex> on_classes() const
  {
    std::vector<Complex> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (reflection_class_index(group, i) == i) out.push_back(values[i]);
    return out;
  }
};

inline Signal dft(const Signal& x)
{
  Signal out(x.group(), Field::Complex, std::vector<Complex>(x.values().begin(), x.values().end()));
  DftPlan plan(x.group());
  plan.forward(out.values());
  return out;
}

inline Signal idft(const Signal& xhat)
{
  Signal out(xhat.group(), Field::Complex, std::vector<Complex>(xhat.values().begin(), xhat.values().end()));
  DftPlan plan(xhat.group());
  plan.inverse(out.values());
  return out;
}

inline FourierMagnitude fourier_magnitude(const Signal& x)
{
  Signal xhat = dft(x);
  FourierMagnitude y{x.group(), std::vector<double>(x.size())};
  for (std::size_t k = 0; k < x.size(); ++k) y.values[k] = std::abs(xhat[k]);
  return y;
}

/// Reference O(|A|^2) evaluation.
inline Autocorrelation periodic_autocorrelation(const Signal& x)
{
  const auto& g = x.group();
  const std::size_t n = g.order();
  Autocorrelation a{g, x.field(), std::vector<Complex>(n)};
  for (std::size_t l = 0; l < n; ++l) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] == Complex{}) continue;
      acc += x[i] * std::conj(x[g.index_add(i, l)]);
    }
    a.values[l] = acc;
  }
  return a;
}

/// Same map through the spectral identity; agrees with the reference to ~1e-12.
inline Autocorrelation periodic_autocorrelation_spectral(const Signal& x)
{
  const auto& g = x.group();
  Signal xhat = dft(x);
  Signal power(g, Field::Complex);
  for (std::size_t k = 0; k < g.order(); ++k) power[k] = std::norm(xhat[g.index_negate(k)]);
  Signal a = idft(power);
  Autocorrelation out{g, x.field(), std::vector<Complex>(a.values().begin(), a.values().end())};
  if (x.field() == Field::Real)
    for (auto& v : out.values) v = Complex{v.real(), 0.0};
  return out;
}

/// max_k |dft(a_x)[k] - |xhat[-k]|^2|.  Cross-validates the two forward maps.
inline double wiener_check(const Signal& x)
{
  const auto& g = x.group();
  Autocorrelation a = periodic_autocorrelation(x);
  Signal ahat = dft(Signal(g, Field::Complex, a.values));
  Signal xhat = dft(x);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.order(); ++k)
    worst = std::max(worst, std::abs(ahat[k] - std::norm(xhat[g.index_negate(k)])));
  return worst;
}

/// b[l] = sum_{i=0}^{N-l-1} x[i] conj(x[i+l]) on a single cyclic factor.
inline std::vector<Complex> aperiodic_autocorrelation(const Signal& x)
{
  if (!x.group().is_cyclic()) throw std::domain_error("aperiodic_autocorrelation: group must be cyclic");
  const std::size_t n = x.size();
  std::vector<Complex> b(n);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t i = 0; i + l < n; ++i) b[l] += x[i] * std::conj(x[i + l]);
  return b;
}

}  // namespace crystalpr
