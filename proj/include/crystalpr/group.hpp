#pragma once

// Finite abelian groups Z_{N1} x ... x Z_{NM}, their elements, and the
// signal / support containers that live on them.
//
// Elements are addressed either by coordinates or by a row-major index
// (the last coordinate varies fastest), so Z_3 x Z_4 element (1,2) has
// index 1*4 + 2 = 6.  All file formats use this index order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crystalpr {

using Complex = std::complex<double>;

enum class Field { Real, Complex };

inline const char* to_string(Field f) { return f == Field::Real ? "real" : "complex"; }

inline Field field_from_string(const std::string& s)
{
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw std::invalid_argument("unknown field '" + s + "' (expected real|complex)");
}

/// Raised when an enumeration would exceed a configured combinatorial cap.
class CapExceeded : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct GroupElement {
  std::vector<int> coords;

  auto operator<=>(const GroupElement&) const = default;
};

class AbelianGroup {
public:
  AbelianGroup() : AbelianGroup(std::vector<int>{1}) {}

  explicit AbelianGroup(std::vector<int> moduli) : moduli_(std::move(moduli))
  {
    if (moduli_.empty()) throw std::invalid_argument("AbelianGroup: need at least one modulus");
    order_ = 1;
    for (int n : moduli_) {
      if (n < 1) throw std::invalid_argument("AbelianGroup: moduli must be >= 1");
      order_ *= static_cast<std::size_t>(n);
    }
    strides_.assign(moduli_.size(), 1);
    for (std::size_t i = moduli_.size(); i-- > 1;)
      strides_[i - 1] = strides_[i] * static_cast<std::size_t>(moduli_[i]);
  }

  static AbelianGroup cyclic(int n) { return AbelianGroup(std::vector<int>{n}); }

  const std::vector<int>& moduli() const { return moduli_; }
  std::size_t rank() const { return moduli_.size(); }
  std::size_t order() const { return order_; }
  bool is_cyclic() const { return moduli_.size() == 1; }

  bool operator==(const AbelianGroup& o) const { return moduli_ == o.moduli_; }

  std::size_t index_of(const GroupElement& a) const
  {
    check_element(a);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      idx += static_cast<std::size_t>(a.coords[i]) * strides_[i];
    return idx;
  }

  GroupElement element_of(std::size_t idx) const
  {
    if (idx >= order_) throw std::domain_error("element_of: index out of range");
    GroupElement a;
    a.coords.resize(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      a.coords[i] = static_cast<int>(idx / strides_[i]);
      idx %= strides_[i];
    }
    return a;
  }

  /// Reduces arbitrary integer coordinates into canonical range.
  GroupElement make(std::vector<int> coords) const
  {
    if (coords.size() != moduli_.size()) throw std::domain_error("element has wrong rank for group");
    for (std::size_t i = 0; i < coords.size(); ++i) {
      coords[i] %= moduli_[i];
      if (coords[i] < 0) coords[i] += moduli_[i];
    }
    return GroupElement{std::move(coords)};
  }

  GroupElement zero() const { return GroupElement{std::vector<int>(moduli_.size(), 0)}; }

  GroupElement add(const GroupElement& a, const GroupElement& b) const
  {
    check_element(a);
    check_element(b);
    GroupElement c = a;
    for (std::size_t i = 0; i < moduli_.size(); ++i) c.coords[i] = (a.coords[i] + b.coords[i]) % moduli_[i];
    return c;
  }

  GroupElement negate(const GroupElement& a) const
  {
    check_element(a);
    GroupElement c = a;
    for (std::size_t i = 0; i < moduli_.size(); ++i) c.coords[i] = (moduli_[i] - a.coords[i]) % moduli_[i];
    return c;
  }

  // Index-level arithmetic used by the hot loops; no allocation.

  std::size_t index_add(std::size_t i, std::size_t j) const
  {
    if (moduli_.size() == 1) {
      std::size_t s = i + j;
      return s >= order_ ? s - order_ : s;
    }
    std::size_t out = 0;
    for (std::size_t d = 0; d < moduli_.size(); ++d) {
      const auto n = static_cast<std::size_t>(moduli_[d]);
      std::size_t ci = (i / strides_[d]) % n;
      std::size_t cj = (j / strides_[d]) % n;
      std::size_t c = ci + cj;
      if (c >= n) c -= n;
      out += c * strides_[d];
    }
    return out;
  }

  std::size_t index_negate(std::size_t i) const
  {
    if (moduli_.size() == 1) return i == 0 ? 0 : order_ - i;
    std::size_t out = 0;
    for (std::size_t d = 0; d < moduli_.size(); ++d) {
      const auto n = static_cast<std::size_t>(moduli_[d]);
      std::size_t c = (i / strides_[d]) % n;
      out += ((n - c) % n) * strides_[d];
    }
    return out;
  }

  std::size_t index_sub(std::size_t i, std::size_t j) const { return index_add(i, index_negate(j)); }

  /// <k, l>_A = sum_j k_j l_j / N_j, reduced to [0,1).
  double pairing(std::size_t k, std::size_t l) const
  {
    double t = 0.0;
    for (std::size_t d = 0; d < moduli_.size(); ++d) {
      const auto n = static_cast<std::size_t>(moduli_[d]);
      std::size_t ck = (k / strides_[d]) % n;
      std::size_t cl = (l / strides_[d]) % n;
      t += static_cast<double>((ck * cl) % n) / static_cast<double>(n);
    }
    return t - std::floor(t);
  }

  const std::vector<std::size_t>& strides() const { return strides_; }

  std::string to_string() const
  {
    std::string s;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      if (i) s += "x";
      s += "Z" + std::to_string(moduli_[i]);
    }
    return s;
  }

private:
  void check_element(const GroupElement& a) const
  {
    if (a.coords.size() != moduli_.size()) throw std::domain_error("element does not belong to group " + to_string());
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      if (a.coords[i] < 0 || a.coords[i] >= moduli_[i])
        throw std::domain_error("element coordinate not reduced modulo its modulus");
  }

  std::vector<int> moduli_;
  std::vector<std::size_t> strides_;
  std::size_t order_ = 1;
};

// Free-function spellings of the group operations.

inline std::size_t index_of(const AbelianGroup& g, const GroupElement& a) { return g.index_of(a); }
inline GroupElement element_of(const AbelianGroup& g, std::size_t idx) { return g.element_of(idx); }
inline GroupElement group_add(const AbelianGroup& g, const GroupElement& a, const GroupElement& b) { return g.add(a, b); }
inline GroupElement group_negate(const AbelianGroup& g, const GroupElement& a) { return g.negate(a); }

/// Orbit of {a, -a}; the representative is the lexicographically smaller member.
struct ReflectionClass {
  GroupElement representative;

  auto operator<=>(const ReflectionClass&) const = default;
};

inline ReflectionClass reflection_class(const AbelianGroup& g, const GroupElement& a)
{
  GroupElement n = g.negate(a);
  return ReflectionClass{std::min(a, n)};
}

/// Index of the class representative: min over {i, -i} in row-major order.
/// Row-major index order agrees with lexicographic coordinate order.
inline std::size_t reflection_class_index(const AbelianGroup& g, std::size_t i)
{
  return std::min(i, g.index_negate(i));
}

/// Dense scalar field on a group, row-major.  Real signals are stored as
/// complex numbers with zero imaginary part.
class Signal {
public:
  Signal() = default;

  Signal(AbelianGroup group, Field field)
      : group_(std::move(group)), field_(field), values_(group_.order(), Complex{0.0, 0.0})
  {
  }

  Signal(AbelianGroup group, Field field, std::vector<Complex> values)
      : group_(std::move(group)), field_(field), values_(std::move(values))
  {
    if (values_.size() != group_.order()) throw std::invalid_argument("Signal: value count does not match group order");
    if (field_ == Field::Real)
      for (const auto& v : values_)
        if (v.imag() != 0.0) throw std::invalid_argument("Signal: real signal with nonzero imaginary part");
  }

  static Signal real(AbelianGroup group, const std::vector<double>& values)
  {
    std::vector<Complex> v(values.begin(), values.end());
    return Signal(std::move(group), Field::Real, std::move(v));
  }

  const AbelianGroup& group() const { return group_; }
  Field field() const { return field_; }
  std::size_t size() const { return values_.size(); }

  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }

  double squared_norm() const
  {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return s;
  }

  /// Drops any imaginary residue; used after transforms of real data.
  void force_real()
  {
    field_ = Field::Real;
    for (auto& v : values_) v = Complex{v.real(), 0.0};
  }

  bool operator==(const Signal& o) const
  {
    return group_ == o.group_ && field_ == o.field_ && values_ == o.values_;
  }

private:
  AbelianGroup group_;
  Field field_ = Field::Real;
  std::vector<Complex> values_ = std::vector<Complex>(1);
};

inline double max_abs_diff(const Signal& a, const Signal& b)
{
  if (!(a.group() == b.group())) throw std::domain_error("signals on different groups");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// A finite subset of a group, kept as sorted row-major indices.
class SupportSet {
public:
  SupportSet() = default;

  SupportSet(AbelianGroup group, std::vector<std::size_t> indices) : group_(std::move(group)), idx_(std::move(indices))
  {
    std::sort(idx_.begin(), idx_.end());
    if (std::adjacent_find(idx_.begin(), idx_.end()) != idx_.end())
      throw std::invalid_argument("SupportSet: duplicate elements");
    if (!idx_.empty() && idx_.back() >= group_.order()) throw std::domain_error("SupportSet: index outside group");
  }

  static SupportSet of_elements(const AbelianGroup& group, const std::vector<GroupElement>& elems)
  {
    std::vector<std::size_t> idx;
    idx.reserve(elems.size());
    for (const auto& e : elems) idx.push_back(group.index_of(e));
    return SupportSet(group, std::move(idx));
  }

  const AbelianGroup& group() const { return group_; }
  const std::vector<std::size_t>& indices() const { return idx_; }
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }

  bool contains(std::size_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

  std::vector<GroupElement> elements() const
  {
    std::vector<GroupElement> out;
    out.reserve(idx_.size());
    for (auto i : idx_) out.push_back(group_.element_of(i));
    return out;
  }

  bool operator==(const SupportSet& o) const { return group_ == o.group_ && idx_ == o.idx_; }
  /// Lexicographic order on the sorted index lists (same group assumed).
  bool operator<(const SupportSet& o) const { return idx_ < o.idx_; }

private:
  AbelianGroup group_;
  std::vector<std::size_t> idx_;
};

inline SupportSet support_of(const Signal& x, double tol = 0.0)
{
  if (tol < 0.0) throw std::invalid_argument("support_of: tolerance must be nonnegative");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > tol) idx.push_back(i);
  return SupportSet(x.group(), std::move(idx));
}

/// Binomial coefficient with saturation at UINT64_MAX.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k)
{
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace crystalpr
