#pragma once

// Intrinsic symmetries D_A = (phase x A) x| Z_2 acting on signals and
// supports: global phase (sign for real data), translation, and
// conjugate-reflection.  Orbit enumeration, stabilizers, and the
// symmetry-aware relative error live here too.

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "crystalpr/group.hpp"

namespace crystalpr {

/// g = (phase, shift, reflect) acts as
///   (g.x)[n] = phase * x[n - shift]                 reflect == false
///   (g.x)[n] = phase * conj(x[shift - n])           reflect == true
/// `shift` is a row-major group index.
struct SymmetryElement {
  Complex phase{1.0, 0.0};
  std::size_t shift = 0;
  bool reflect = false;

  bool operator==(const SymmetryElement&) const = default;
};

inline SymmetryElement identity_symmetry() { return {}; }

inline bool is_sign(Complex p) { return p.imag() == 0.0 && std::abs(p.real()) == 1.0; }

/// Composition so that (compose(g,h)).x == g.(h.x).
inline SymmetryElement compose(const AbelianGroup& grp, const SymmetryElement& g, const SymmetryElement& h)
{
  SymmetryElement out;
  out.phase = g.phase * (g.reflect ? std::conj(h.phase) : h.phase);
  out.shift = grp.index_add(g.shift, g.reflect ? grp.index_negate(h.shift) : h.shift);
  out.reflect = g.reflect != h.reflect;
  return out;
}

inline SymmetryElement inverse(const AbelianGroup& grp, const SymmetryElement& g)
{
  if (g.reflect) return g;  // reflections are involutions for unit phases
  return SymmetryElement{std::conj(g.phase), grp.index_negate(g.shift), false};
}

inline Signal apply(const SymmetryElement& g, const Signal& x)
{
  if (std::abs(std::abs(g.phase) - 1.0) > 1e-12) throw std::domain_error("apply: phase must have unit modulus");
  if (x.field() == Field::Real && !is_sign(g.phase))
    throw std::domain_error("apply: complex phase applied to a real signal");
  const auto& grp = x.group();
  if (g.shift >= grp.order()) throw std::domain_error("apply: shift outside group");
  Signal out(grp, x.field());
  for (std::size_t n = 0; n < grp.order(); ++n) {
    const Complex v = g.reflect ? std::conj(x[grp.index_sub(g.shift, n)]) : x[grp.index_sub(n, g.shift)];
    out[n] = g.phase * v;
  }
  return out;
}

inline SupportSet apply_to_support(const SymmetryElement& g, const SupportSet& s)
{
  const auto& grp = s.group();
  std::vector<std::size_t> img;
  img.reserve(s.size());
  for (auto i : s.indices()) img.push_back(g.reflect ? grp.index_sub(g.shift, i) : grp.index_add(i, g.shift));
  return SupportSet(grp, std::move(img));
}

/// The 2|A| translations and reflections (phase 1).
inline std::vector<SymmetryElement> dihedral_elements(const AbelianGroup& grp)
{
  std::vector<SymmetryElement> out;
  out.reserve(2 * grp.order());
  for (int r = 0; r < 2; ++r)
    for (std::size_t s = 0; s < grp.order(); ++s) out.push_back({Complex{1.0, 0.0}, s, r == 1});
  return out;
}

/// The whole finite group D for real data: signs x translations x reflection.
inline std::vector<SymmetryElement> real_intrinsic_elements(const AbelianGroup& grp)
{
  std::vector<SymmetryElement> out;
  out.reserve(4 * grp.order());
  for (double sgn : {1.0, -1.0})
    for (const auto& d : dihedral_elements(grp)) out.push_back({Complex{sgn, 0.0}, d.shift, d.reflect});
  return out;
}

/// Witness g with g.S == S', if any.
inline std::optional<SymmetryElement> are_equivalent_supports(const SupportSet& s, const SupportSet& sp)
{
  if (!(s.group() == sp.group())) throw std::domain_error("are_equivalent_supports: different groups");
  if (s.size() != sp.size()) return std::nullopt;
  for (const auto& g : dihedral_elements(s.group()))
    if (apply_to_support(g, s) == sp) return g;
  return std::nullopt;
}

/// Lexicographically least member of the dihedral orbit of S.
inline SupportSet canonical_support(const SupportSet& s)
{
  SupportSet best = s;
  for (const auto& g : dihedral_elements(s.group())) {
    SupportSet img = apply_to_support(g, s);
    if (img < best) best = std::move(img);
  }
  return best;
}

/// Number of dihedral elements fixing S setwise.
inline std::size_t dihedral_stabilizer_order(const SupportSet& s)
{
  std::size_t c = 0;
  for (const auto& g : dihedral_elements(s.group()))
    if (apply_to_support(g, s) == s) ++c;
  return c;
}

inline std::size_t orbit_size(const SupportSet& s) { return 2 * s.group().order() / dihedral_stabilizer_order(s); }

/// Calls f(indices) for every K-subset of [0, n) in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f)
{
  if (k > n) return;
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  while (true) {
    f(static_cast<const std::vector<std::size_t>&>(c));
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

inline constexpr std::uint64_t default_enumeration_cap = 50'000'000;

inline void check_enumeration_cap(std::size_t n, std::size_t k, std::uint64_t cap)
{
  const auto count = binomial(n, k);
  if (count > cap)
    throw CapExceeded("C(" + std::to_string(n) + "," + std::to_string(k) + ") = " + std::to_string(count) +
                      " subsets exceeds the enumeration cap " + std::to_string(cap));
}

/// One canonical representative per dihedral orbit of K-subsets, sorted.
inline std::vector<SupportSet> enumerate_support_classes(const AbelianGroup& grp, std::size_t k,
                                                         std::uint64_t cap = default_enumeration_cap)
{
  if (k > grp.order()) throw std::domain_error("enumerate_support_classes: K exceeds group order");
  check_enumeration_cap(grp.order(), k, cap);
  std::vector<SupportSet> out;
  for_each_subset(grp.order(), k, [&](const std::vector<std::size_t>& idx) {
    SupportSet s(grp, idx);
    if (canonical_support(s) == s) out.push_back(std::move(s));
  });
  return out;
}

struct Stabilizer {
  SupportSet support;
  Field field = Field::Real;
  /// Real: every (+-1, shift, reflect) fixing S.  Complex: the dihedral
  /// fixers with phase 1; the full stabilizer is these times S^1.
  std::vector<SymmetryElement> elements;

  std::size_t order() const { return elements.size(); }
  bool has_circle_factor() const { return field == Field::Complex; }
};

inline Stabilizer stabilizer(const SupportSet& s, Field field)
{
  Stabilizer st{s, field, {}};
  const auto& candidates = field == Field::Real ? real_intrinsic_elements(s.group()) : dihedral_elements(s.group());
  for (const auto& g : candidates)
    if (apply_to_support(g, s) == s) st.elements.push_back(g);
  return st;
}

struct RelativeError {
  double error = 0.0;
  SymmetryElement argmin;
};

/// min_{g in D} ||g.x_est - x0||^2 / ||x0||^2.  The phase (sign for real
/// data) is optimized in closed form for each translation/reflection.
inline RelativeError relative_error(const AbelianGroup& grp, Field field, std::span<const Complex> x_est,
                                    std::span<const Complex> x0)
{
  const std::size_t n = grp.order();
  if (x_est.size() != n || x0.size() != n) throw std::domain_error("relative_error: size mismatch");
  double nx = 0.0, n0 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nx += std::norm(x_est[i]);
    n0 += std::norm(x0[i]);
  }
  if (n0 == 0.0) throw std::domain_error("relative_error: reference signal is zero");

  RelativeError best{std::numeric_limits<double>::infinity(), {}};
  for (int r = 0; r < 2; ++r) {
    for (std::size_t s = 0; s < n; ++s) {
      Complex c{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) {
        if (x0[i] == Complex{}) continue;
        const Complex v = r ? std::conj(x_est[grp.index_sub(s, i)]) : x_est[grp.index_sub(i, s)];
        c += std::conj(x0[i]) * v;
      }
      double gain;
      Complex phase;
      if (field == Field::Real) {
        gain = std::abs(c.real());
        phase = Complex{c.real() < 0.0 ? -1.0 : 1.0, 0.0};
      } else {
        gain = std::abs(c);
        phase = gain > 0.0 ? std::conj(c) / gain : Complex{1.0, 0.0};
      }
      const double err = std::max(0.0, (nx + n0 - 2.0 * gain) / n0);
      if (err < best.error) best = {err, SymmetryElement{phase, s, r == 1}};
    }
  }
  return best;
}

inline RelativeError relative_error(const Signal& x_est, const Signal& x0)
{
  if (!(x_est.group() == x0.group())) throw std::domain_error("relative_error: different groups");
  if (x_est.field() != x0.field()) throw std::domain_error("relative_error: different fields");
  return relative_error(x0.group(), x0.field(), x_est.values(), x0.values());
}

}  // namespace crystalpr
