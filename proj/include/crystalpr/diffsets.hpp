#pragma once

// Difference sets S-S and multisets (taken modulo a ~ -a), collisions,
// arithmetic progressions, and the random-support experiments.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "crystalpr/group.hpp"
#include "crystalpr/parallel.hpp"
#include "crystalpr/rng.hpp"
#include "crystalpr/symmetry.hpp"

namespace crystalpr {

/// Reflection classes (representative indices, ascending) of all differences.
struct DifferenceSet {
  AbelianGroup group;
  std::vector<std::size_t> classes;

  std::size_t size() const { return classes.size(); }
  bool operator==(const DifferenceSet&) const = default;
};

/// Class -> number of unordered pairs {i,j} (i == j included for class 0).
struct DifferenceMultiset {
  AbelianGroup group;
  std::map<std::size_t, std::size_t> multiplicities;

  std::size_t total() const
  {
    std::size_t t = 0;
    for (const auto& [c, m] : multiplicities) t += m;
    return t;
  }

  std::size_t count(std::size_t cls) const
  {
    auto it = multiplicities.find(cls);
    return it == multiplicities.end() ? 0 : it->second;
  }

  bool operator==(const DifferenceMultiset&) const = default;
};

inline DifferenceMultiset difference_multiset(const SupportSet& s)
{
  if (s.empty()) throw std::domain_error("difference_multiset: empty support");
  const auto& g = s.group();
  const auto& idx = s.indices();
  DifferenceMultiset m{g, {}};
  m.multiplicities[0] = idx.size();
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) ++m.multiplicities[reflection_class_index(g, g.index_sub(idx[b], idx[a]))];
  return m;
}

inline DifferenceSet difference_set(const SupportSet& s)
{
  auto m = difference_multiset(s);
  DifferenceSet d{s.group(), {}};
  for (const auto& [c, k] : m.multiplicities) d.classes.push_back(c);
  return d;
}

/// Sum over nonzero classes of (multiplicity - 1)^+.
inline std::size_t collision_count(const SupportSet& s)
{
  if (s.size() < 2) return 0;
  std::size_t c = 0;
  for (const auto& [cls, m] : difference_multiset(s).multiplicities)
    if (cls != 0 && m > 1) c += m - 1;
  return c;
}

inline bool is_collision_free(const SupportSet& s) { return collision_count(s) == 0; }

struct ArithmeticProgression {
  std::size_t start = 0;  // c_0
  std::size_t step = 0;   // d, normalized to [1, N/2]

  bool operator==(const ArithmeticProgression&) const = default;
};

/// S = {c0 + l d mod N : l = 0..K-1} for some (c0, d)?  Smallest d wins.
inline std::optional<ArithmeticProgression> arithmetic_progression(const SupportSet& s)
{
  const auto& g = s.group();
  if (!g.is_cyclic()) throw std::domain_error("arithmetic_progression: group must be cyclic");
  if (s.empty()) return std::nullopt;
  const std::size_t n = g.order();
  const std::size_t k = s.size();
  if (k == 1) return ArithmeticProgression{s.indices()[0], 1};
  // A progression with step d read backwards has step N-d, so d <= N/2 covers all.
  for (std::size_t d = 1; d <= n / 2; ++d) {
    if (n / std::gcd(n, d) < k) continue;  // terms would repeat
    for (auto c0 : s.indices()) {
      bool ok = true;
      for (std::size_t l = 1; l < k && ok; ++l) ok = s.contains((c0 + l * d) % n);
      if (ok) return ArithmeticProgression{c0, d};
    }
  }
  return std::nullopt;
}

/// Uniform random K-subset.
inline SupportSet sample_support(const AbelianGroup& g, std::size_t k, Rng& rng)
{
  if (k > g.order()) throw std::domain_error("sample_support: K exceeds group order");
  std::vector<std::size_t> all(g.order());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> pick;
  pick.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(pick), static_cast<std::ptrdiff_t>(k), rng.engine());
  return SupportSet(g, std::move(pick));
}

namespace detail {

// |S-S| and collision count for a support on Z_N using a reusable buffer.
struct DiffCounter {
  std::vector<std::uint32_t> mult;

  std::pair<std::size_t, std::size_t> count(const SupportSet& s)
  {
    const auto& g = s.group();
    mult.assign(g.order(), 0);
    const auto& idx = s.indices();
    std::size_t distinct = idx.empty() ? 0 : 1;
    std::size_t collisions = 0;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        auto c = reflection_class_index(g, g.index_sub(idx[b], idx[a]));
        if (c == 0) continue;
        if (mult[c]++ == 0)
          ++distinct;
        else
          ++collisions;
      }
    return {distinct, collisions};
  }
};

}  // namespace detail

struct DiffsetHistogram {
  std::size_t n = 0, k = 0, trials = 0;
  std::uint64_t seed = 0;
  std::map<std::size_t, std::size_t> counts;  // |S-S| -> trials
  std::size_t violations = 0;                 // trials with |S-S| <= K

  double fraction_above_k() const
  {
    return trials ? 1.0 - static_cast<double>(violations) / static_cast<double>(trials) : 0.0;
  }
};

/// Samples `trials` uniform K-subsets of Z_N and tabulates |S-S|.
inline DiffsetHistogram diffset_histogram_experiment(std::size_t n, std::size_t k, std::size_t trials,
                                                     std::uint64_t seed, unsigned threads = 1)
{
  const auto g = AbelianGroup::cyclic(static_cast<int>(n));
  std::vector<std::size_t> sizes(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, {k, t});
    detail::DiffCounter dc;
    sizes[t] = dc.count(sample_support(g, k, rng)).first;
  });
  DiffsetHistogram h{n, k, trials, seed, {}, 0};
  for (auto sz : sizes) {
    ++h.counts[sz];
    if (sz <= k) ++h.violations;
  }
  return h;
}

struct CollisionStats {
  std::size_t n = 0, k = 0, trials = 0;
  std::uint64_t seed = 0;
  std::size_t collision_free = 0;
  double mean_collisions = 0.0;
};

inline CollisionStats collision_experiment(std::size_t n, std::size_t k, std::size_t trials, std::uint64_t seed,
                                           unsigned threads = 1)
{
  const auto g = AbelianGroup::cyclic(static_cast<int>(n));
  std::vector<std::size_t> coll(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, {k, t});
    detail::DiffCounter dc;
    coll[t] = dc.count(sample_support(g, k, rng)).second;
  });
  CollisionStats st{n, k, trials, seed, 0, 0.0};
  double sum = 0.0;
  for (auto c : coll) {
    if (c == 0) ++st.collision_free;
    sum += static_cast<double>(c);
  }
  st.mean_collisions = trials ? sum / static_cast<double>(trials) : 0.0;
  return st;
}

inline bool is_prime(std::size_t n)
{
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct KempermanReport {
  std::size_t n = 0;
  std::size_t max_k = 0;
  std::size_t subsets_checked = 0;
  std::size_t counterexample_count = 0;
  std::vector<SupportSet> counterexamples;  // first few, for diagnostics

  bool holds() const { return counterexample_count == 0; }
};

/// Exhaustively checks (|S-S| <= |S|) <=> (S is an arithmetic progression)
/// over all S in Z_N with 2 <= |S| <= max_k (default floor(N/2)+1).
inline KempermanReport prime_kemperman_check(std::size_t n, std::optional<std::size_t> max_k = std::nullopt,
                                             std::size_t keep = 8)
{
  if (!is_prime(n)) throw std::domain_error("prime_kemperman_check: N must be prime");
  const auto g = AbelianGroup::cyclic(static_cast<int>(n));
  KempermanReport rep{n, max_k.value_or(n / 2 + 1), 0, 0, {}};
  for (std::size_t k = 2; k <= rep.max_k; ++k) {
    for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
      SupportSet s(g, idx);
      ++rep.subsets_checked;
      const bool small = difference_set(s).size() <= k;
      const bool ap = arithmetic_progression(s).has_value();
      if (small != ap) {
        ++rep.counterexample_count;
        if (rep.counterexamples.size() < keep) rep.counterexamples.push_back(s);
      }
    });
  }
  return rep;
}

/// Fraction of K-subsets of Z_N with |S-S| <= |S|, by enumeration.
inline double small_difference_set_fraction(std::size_t n, std::size_t k, std::uint64_t cap = default_enumeration_cap)
{
  check_enumeration_cap(n, k, cap);
  const auto g = AbelianGroup::cyclic(static_cast<int>(n));
  std::size_t hits = 0, total = 0;
  for_each_subset(n, k, [&](const std::vector<std::size_t>& idx) {
    ++total;
    if (difference_set(SupportSet(g, idx)).size() <= k) ++hits;
  });
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

}  // namespace crystalpr
