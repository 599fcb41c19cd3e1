#pragma once

// Seeded random streams.  Every randomized routine takes an Rng&; parallel
// experiments derive one substream per (seed, task...) so results do not
// depend on thread count or scheduling.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace crystalpr {

class Rng {
public:
  using engine_type = std::mt19937_64;

  static constexpr const char* algorithm = "mt19937_64/seed_seq";

  explicit Rng(std::uint64_t seed) : Rng(seed, {}) {}

  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) : engine_(make_seq(seed, stream)) {}

  /// Independent child stream keyed by the parent seed and a task path.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) { return Rng(seed, path); }

  double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }
  std::uint64_t next() { return engine_(); }

  engine_type& engine() { return engine_; }

private:
  static engine_type make_seq(std::uint64_t seed, std::initializer_list<std::uint64_t> stream)
  {
    std::vector<std::uint32_t> words;
    auto push = [&](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    push(stream.size());
    for (auto s : stream) push(s);
    std::seed_seq seq(words.begin(), words.end());
    return engine_type(seq);
  }

  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace crystalpr
