#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "cylpc/error.hpp"
#include "cylpc/octree.hpp"
#include "cylpc/raht.hpp"
#include "test_support.hpp"

using namespace cylpc;

namespace {

std::vector<std::uint64_t> codes_of(std::span<const WeightedLeaf> leaves) {
  std::vector<std::uint64_t> c;
  for (const auto& l : leaves) c.push_back(l.code);
  return c;
}

std::vector<std::uint32_t> weights_of(std::span<const WeightedLeaf> leaves) {
  std::vector<std::uint32_t> w;
  for (const auto& l : leaves) w.push_back(l.weight);
  return w;
}

}  // namespace

TEST(Raht, SingleLeaf) {
  const std::vector<WeightedLeaf> leaves{{morton::encode(1, 2, 3), 77.0, 9}};
  const auto c = raht_forward(leaves, 4);
  EXPECT_EQ(c.dc, 77.0);
  EXPECT_TRUE(c.highs.empty());
  const auto back = raht_inverse(c, codes_of(leaves), weights_of(leaves), 4);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].attribute, 77.0);
}

TEST(Raht, TwoSiblings) {
  const std::vector<WeightedLeaf> leaves{{0, 4.0, 1}, {1, 8.0, 1}};
  const auto c = raht_forward(leaves, 3);
  EXPECT_NEAR(c.dc, 12.0 / std::sqrt(2.0), 1e-12);
  ASSERT_EQ(c.highs.size(), 1u);
  EXPECT_NEAR(c.highs[0], 4.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(c.dc, 8.485281, 1e-6);
  EXPECT_NEAR(c.highs[0], 2.828427, 1e-6);
}

TEST(Raht, WeightedPairButterfly) {
  // Weights 1 and 3: low = (a1 + sqrt3 a2) / 2, high = (-sqrt3 a1 + a2) / 2.
  const std::vector<WeightedLeaf> leaves{{0, 2.0, 1}, {4, 6.0, 3}};
  const auto c = raht_forward(leaves, 1);
  EXPECT_NEAR(c.dc, (2.0 + std::sqrt(3.0) * 6.0) / 2.0, 1e-12);
  EXPECT_NEAR(c.highs[0], (-std::sqrt(3.0) * 2.0 + 6.0) / 2.0, 1e-12);
}

TEST(Raht, ConstantSignalIsPureDc) {
  std::mt19937_64 rng(41);
  auto leaves = fixtures::random_leaves(rng, 2000, 8, 1);
  for (auto& l : leaves) l.attribute = 37.5;
  const auto c = raht_forward(leaves, 8);
  EXPECT_NEAR(c.dc, 37.5 * std::sqrt(static_cast<double>(leaves.size())), 1e-9);
  for (double h : c.highs) EXPECT_NEAR(h, 0.0, 1e-10);

  CoefficientStream pure{c.dc, std::vector<double>(c.highs.size(), 0.0)};
  const auto tree = build_octree(codes_of(leaves), 8);
  for (const auto& l : raht_inverse(pure, tree)) EXPECT_NEAR(l.attribute, 37.5, 1e-10);
}

TEST(Raht, ParsevalAndRoundTrip) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    const int depth = 1 + static_cast<int>(rng() % 21);
    const auto leaves = fixtures::random_leaves(rng, 3000, depth, 50);
    const auto c = raht_forward(leaves, depth);
    ASSERT_EQ(c.size(), leaves.size());
    double e_attr = 0.0;
    for (const auto& l : leaves) e_attr += l.attribute * l.attribute;
    double e_coef = c.dc * c.dc;
    for (double h : c.highs) e_coef += h * h;
    ASSERT_LE(std::abs(e_coef - e_attr) / e_attr, 1e-9);

    const auto back = raht_inverse(c, codes_of(leaves), weights_of(leaves), depth);
    ASSERT_EQ(back.size(), leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      ASSERT_EQ(back[i].code, leaves[i].code);
      ASSERT_NEAR(back[i].attribute, leaves[i].attribute, 1e-9);
    }
  }
}

TEST(Raht, MatchesSerialReference) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 50; ++t) {
    const int depth = 2 + static_cast<int>(rng() % 15);
    // Large enough that the parallel loops actually split.
    const auto leaves = fixtures::random_leaves(rng, 20000, depth, 50);
    const auto a = raht_forward(leaves, depth);
    const auto b = serial::raht_forward(leaves, depth);
    ASSERT_EQ(a.dc, b.dc);
    ASSERT_EQ(a.highs, b.highs);
    const auto ia = raht_inverse(a, codes_of(leaves), weights_of(leaves), depth);
    const auto ib = serial::raht_inverse(a, codes_of(leaves), weights_of(leaves), depth);
    ASSERT_EQ(ia.size(), ib.size());
    for (std::size_t i = 0; i < ia.size(); ++i) ASSERT_EQ(ia[i].attribute, ib[i].attribute);
  }
}

TEST(Raht, DcIsScaledWeightedMean) {
  std::mt19937_64 rng(44);
  const auto leaves = fixtures::random_leaves(rng, 500, 6, 50);
  double sw = 0.0;
  double swa = 0.0;
  for (const auto& l : leaves) {
    sw += l.weight;
    swa += std::sqrt(static_cast<double>(l.weight)) * l.attribute;
  }
  EXPECT_NEAR(raht_forward(leaves, 6).dc, swa / std::sqrt(sw), 1e-9);
}

TEST(Raht, InputValidation) {
  const std::vector<WeightedLeaf> dup{{3, 1.0, 1}, {3, 2.0, 1}};
  const std::vector<WeightedLeaf> unsorted{{4, 1.0, 1}, {3, 2.0, 1}};
  const std::vector<WeightedLeaf> zero_w{{3, 1.0, 0}};
  for (const auto* l : {&dup, &unsorted, &zero_w}) {
    try {
      raht_forward(*l, 2);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
    }
  }
  const auto tree = build_octree(std::vector<std::uint64_t>{1, 2, 3}, 2);
  CoefficientStream two{1.0, {0.5}};
  EXPECT_THROW(raht_inverse(two, tree), Error);
}

TEST(Raht, Linearity) {
  std::mt19937_64 rng(45);
  const auto x = fixtures::random_leaves(rng, 3000, 10, 50);
  auto y = x;
  std::uniform_real_distribution<double> u(-100, 100);
  for (auto& l : y) l.attribute = u(rng);
  auto mix = x;
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i].attribute = 2.5 * x[i].attribute - 0.75 * y[i].attribute;
  const auto tx = raht_forward(x, 10);
  const auto ty = raht_forward(y, 10);
  const auto tm = raht_forward(mix, 10);
  EXPECT_NEAR(tm.dc, 2.5 * tx.dc - 0.75 * ty.dc, 1e-9 * (1 + std::abs(tm.dc)));
  for (std::size_t i = 0; i < tm.highs.size(); ++i) {
    ASSERT_NEAR(tm.highs[i], 2.5 * tx.highs[i] - 0.75 * ty.highs[i], 1e-9 * (1 + std::abs(tm.highs[i])));
  }
}
