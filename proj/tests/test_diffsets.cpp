#include <gtest/gtest.h>

#include "crystalpr/diffsets.hpp"

using namespace crystalpr;

namespace {

SupportSet S(int n, std::vector<std::size_t> idx) { return SupportSet(AbelianGroup::cyclic(n), std::move(idx)); }

struct Row {
  std::vector<std::size_t> s, ds;
};

void expect_classes(int n, const std::vector<Row>& rows)
{
  const auto classes = enumerate_support_classes(AbelianGroup::cyclic(n), 4);
  ASSERT_EQ(classes.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(classes[i].indices(), rows[i].s);
    const auto d = difference_set(classes[i]);
    EXPECT_EQ(d.classes, rows[i].ds) << "N=" << n << " row " << i;
    EXPECT_EQ(d.size(), rows[i].ds.size());
  }
}

}  // namespace

TEST(DifferenceSet, ClassesOfZ8K4)
{
  expect_classes(8, {{{0, 1, 2, 3}, {0, 1, 2, 3}},
                   {{0, 1, 2, 4}, {0, 1, 2, 3, 4}},
                   {{0, 1, 2, 5}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 4}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 5}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 6}, {0, 1, 2, 3}},
                   {{0, 1, 4, 5}, {0, 1, 3, 4}},
                   {{0, 2, 4, 6}, {0, 2, 4}}});
}

TEST(DifferenceSet, ClassesOfZ9K4)
{
  expect_classes(9, {{{0, 1, 2, 3}, {0, 1, 2, 3}},
                   {{0, 1, 2, 4}, {0, 1, 2, 3, 4}},
                   {{0, 1, 2, 5}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 4}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 5}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 6}, {0, 1, 2, 3, 4}},
                   {{0, 1, 3, 7}, {0, 1, 2, 3, 4}},
                   {{0, 1, 4, 5}, {0, 1, 3, 4}},
                   {{0, 1, 4, 6}, {0, 1, 2, 3, 4}},
                   {{0, 2, 4, 6}, {0, 2, 3, 4}}});
}

TEST(DifferenceSet, InvariantUnderDihedralAction)
{
  auto s = S(11, {0, 2, 3, 7});
  const auto d = difference_set(s);
  for (const auto& g : dihedral_elements(s.group())) EXPECT_EQ(difference_set(apply_to_support(g, s)), d);
}

TEST(DifferenceMultiset, CountsPairs)
{
  // {0,1,3,4} and {0,1,2,5} share a multiset in Z_8.
  auto a = difference_multiset(S(8, {0, 1, 3, 4})), b = difference_multiset(S(8, {0, 1, 2, 5}));
  EXPECT_EQ(a.multiplicities, b.multiplicities);
  EXPECT_EQ(a.total(), 4u + 6u);
  EXPECT_THROW(difference_multiset(S(8, {})), std::domain_error);
}

TEST(Collisions, CountAndCollisionFree)
{
  EXPECT_TRUE(is_collision_free(S(13, {0, 1, 3, 9})));  // a perfect difference set in Z_13
  EXPECT_EQ(collision_count(S(10, {0, 1, 2})), 1u);
  EXPECT_FALSE(is_collision_free(S(10, {0, 1, 2})));
}

TEST(ArithmeticProgression, Detection)
{
  auto ap = arithmetic_progression(S(10, {1, 4, 7, 0}));
  ASSERT_TRUE(ap.has_value());
  EXPECT_EQ(ap->step, 3u);
  EXPECT_TRUE(arithmetic_progression(S(9, {0, 2, 4, 6})).has_value());
  EXPECT_TRUE(arithmetic_progression(S(8, {0, 1, 3, 6})).has_value());  // 0, 3, 6, 9 = 1
  EXPECT_FALSE(arithmetic_progression(S(8, {0, 1, 2, 4})).has_value());
  EXPECT_THROW(arithmetic_progression(SupportSet(AbelianGroup({2, 2}), {0})), std::domain_error);
}

TEST(ArithmeticProgression, SmallDifferenceSet)
{
  // An AP of length K with K <= N/2 has exactly K difference classes.
  for (int n : {8, 9, 12})
    for (std::size_t k = 2; k <= static_cast<std::size_t>(n) / 2; ++k) {
      std::vector<std::size_t> idx;
      for (std::size_t l = 0; l < k; ++l) idx.push_back(l);
      EXPECT_EQ(difference_set(S(n, idx)).size(), k);
    }
}

TEST(Kemperman, HoldsUpToHalf)
{
  for (std::size_t n : {5, 7, 11}) {
    const auto rep = prime_kemperman_check(n, n / 2);
    EXPECT_TRUE(rep.holds()) << n;
    EXPECT_GT(rep.subsets_checked, 0u);
  }
}

TEST(Kemperman, FailsJustAboveHalf)
{
  // {0,1,2,4} in Z_7 covers every difference class with K = 4 yet is no progression.
  auto s = S(7, {0, 1, 2, 4});
  EXPECT_EQ(difference_set(s).size(), 4u);
  EXPECT_FALSE(arithmetic_progression(s).has_value());
  EXPECT_FALSE(prime_kemperman_check(7).holds());
  EXPECT_THROW(prime_kemperman_check(9), std::domain_error);
}

TEST(Density, SmallDifferenceFractionDecreasesWithPrimeN)
{
  // Fixed K/N ~ 0.3.
  const std::vector<std::pair<std::size_t, std::size_t>> nk = {{7, 2}, {11, 3}, {13, 4}, {17, 5}};
  double prev = 2.0;
  for (auto [n, k] : nk) {
    const double f = small_difference_set_fraction(n, k);
    EXPECT_LE(f, prev) << n;
    prev = f;
  }
}

TEST(Experiments, HistogramIsThreadIndependent)
{
  const auto a = diffset_histogram_experiment(200, 10, 500, 9, 1);
  const auto b = diffset_histogram_experiment(200, 10, 500, 9, 3);
  EXPECT_EQ(a.counts, b.counts);
  std::size_t total = 0;
  for (auto [sz, c] : a.counts) total += c;
  EXPECT_EQ(total, 500u);
}

TEST(Experiments, PigeonholeForcesCollisions)
{
  // Z_20 has 10 nonzero classes; 5 points give 10 pairs, 6 give 15.
  const auto st = collision_experiment(20, 6, 300, 4, 1);
  EXPECT_EQ(st.collision_free, 0u);
  EXPECT_GE(st.mean_collisions, 5.0);
  EXPECT_EQ(collision_experiment(20, 6, 300, 4, 2).mean_collisions, st.mean_collisions);
}
