#include <random>

#include <gtest/gtest.h>

#include "momentflow/exponent.hpp"
#include "support/oracles.hpp"

using namespace momentflow;

namespace {

ExponentSet a4() { return {{0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {0, 0, 2}}; }

}  // namespace

TEST(ExponentVector, ArithmeticAndLeadingIndex) {
  ExponentVector a{1, 0, 2};
  EXPECT_EQ((a + ExponentVector{0, 1, 1}), (ExponentVector{1, 1, 3}));
  EXPECT_EQ(3u * a, (ExponentVector{3, 0, 6}));
  EXPECT_EQ(a.total_degree(), 3u);
  EXPECT_EQ(a.leading_index(), 2u);
  EXPECT_FALSE(ExponentVector(4).leading_index().has_value());
  EXPECT_EQ((ExponentVector{2, 0, 0, 0}).leading_index(), 0u);
  EXPECT_EQ((ExponentVector{3, 1, 2}).truncated(1), (ExponentVector{3, 1, 0}));
  EXPECT_THROW((a + ExponentVector{1, 1}), StructuralError);
}

TEST(ExponentVector, OrderIsLastIndexMostSignificant) {
  EXPECT_LT((ExponentVector{5, 0}), (ExponentVector{0, 1}));
  EXPECT_LT((ExponentVector{0, 1}), (ExponentVector{1, 1}));
  EXPECT_LT((ExponentVector{1, 1}), (ExponentVector{0, 2}));
}

TEST(Dominance, ProductOrder) {
  EXPECT_TRUE(dominated_by({0, 1}, {1, 1}));
  EXPECT_TRUE(dominated_by({1, 1}, {1, 1}));
  EXPECT_FALSE(dominated_by({2, 0}, {1, 2}));
  EXPECT_THROW(dominated_by({1}, {1, 1}), StructuralError);
}

TEST(PowerSet, TableOneSquare) {
  const ExponentSet expected{{0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {0, 0, 2}, {2, 0, 0},
                             {2, 2, 0}, {1, 0, 2}, {2, 4, 0}, {1, 2, 2}, {0, 0, 4}};
  EXPECT_EQ(power_set(a4(), 2), expected);
  EXPECT_EQ(power_set(a4(), 2).size(), 10u);
}

TEST(PowerSet, EdgeCases) {
  EXPECT_EQ(power_set(a4(), 0), ExponentSet{ExponentVector(3)});
  EXPECT_EQ(power_set(a4(), 1), a4());
  EXPECT_THROW(power_set(ExponentSet{}, 2), DomainError);
}

TEST(Corners, ThreeCornerStaircase) {
  const ExponentSet corners{{2, 0}, {1, 2}, {0, 3}};
  EXPECT_EQ(corner_points(corners), corners);
  const ExponentSet expected{{0, 0}, {1, 0}, {2, 0}, {1, 1}, {1, 2}, {0, 1}, {0, 2}, {0, 3}};
  EXPECT_EQ(closure(corners), expected);
  EXPECT_EQ(corner_points(expected), corners);
}

TEST(Corners, CubedSimpleSet) {
  const ExponentSet a3{{2, 0}, {0, 1}};
  const ExponentSet expected{{6, 0}, {4, 1}, {2, 2}, {0, 3}};
  EXPECT_EQ(powered_corners(a3, 3), expected);
  const auto c = closure(expected);
  EXPECT_EQ(c, oracle::naive_closure(expected));
  // The published listing has 15 members and leaves out (1,2), which lies
  // under the corner (2,2).
  const ExponentSet listed{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}, {1, 1},
                           {2, 1}, {3, 1}, {4, 1}, {2, 2}, {0, 1}, {0, 2}, {0, 3}};
  ExponentSet missing;
  for (const auto& v : c) {
    if (!listed.contains(v)) missing.insert(v);
  }
  EXPECT_EQ(c.size(), 16u);
  EXPECT_EQ(missing, (ExponentSet{{1, 2}}));
  EXPECT_TRUE(listed.is_subset_of(c));
}

TEST(Corners, Errors) {
  EXPECT_THROW(corner_points(ExponentSet{}), DomainError);
  EXPECT_THROW(powered_corners(ExponentSet{{1, 0}}, 0), DomainError);
  EXPECT_THROW(scaled_union_corners({}, ExponentSet{{1, 0}}), DomainError);
  EXPECT_THROW(count_bounds(ExponentSet{}), DomainError);
}

TEST(Corners, ZeroVectorAlone) {
  EXPECT_EQ(corner_points(ExponentSet{ExponentVector(3)}), ExponentSet{ExponentVector(3)});
  EXPECT_EQ(closure(ExponentSet{ExponentVector(3)}), ExponentSet{ExponentVector(3)});
}

TEST(LeadingClosure, KeepsOnlyOwnedMonomials) {
  const ExponentSet corners{{2, 1, 0, 0}};
  const ExponentSet expected{{0, 1, 0, 0}, {1, 1, 0, 0}, {2, 1, 0, 0}};
  EXPECT_EQ(leading_closure(corners, 1), expected);
  EXPECT_TRUE(leading_closure(corners, 2).empty());
}

TEST(CountBounds, ThreeCornerBoxes) {
  EXPECT_EQ(count_bounds(ExponentSet{{2, 1, 0}, {0, 3, 0}, {0, 0, 1}}), (CountBounds{6, 12}));
  EXPECT_EQ(count_bounds(ExponentSet{ExponentVector(2)}), (CountBounds{1, 1}));
}

TEST(CountBounds, BracketClosureSize) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 300; ++k) {
    const auto corners = corner_points(oracle::random_set(rng, 3, 3, 5));
    const auto bounds = count_bounds(corners);
    const auto n = closure(corners).size();
    EXPECT_LE(bounds.lower, n);
    EXPECT_GE(bounds.upper, n);
  }
}

TEST(Translate, ShiftsEveryMember) {
  EXPECT_EQ(translate(ExponentSet{{0, 0}, {1, 0}}, ExponentVector{0, 2}), (ExponentSet{{0, 2}, {1, 2}}));
}

TEST(ScaledUnion, OnlyLargestScaleMatters) {
  const ExponentSet a{{2, 0}, {0, 1}};
  EXPECT_EQ(scaled_union_corners({1, 3, 2}, a), powered_corners(a, 3));
}

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(4, 0), 1u);
  EXPECT_EQ(binomial(3, 4), 0u);
}

// Randomised checks against the brute-force definitions.

TEST(Property, CornersMatchDefinition) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 500; ++k) {
    const auto s = oracle::random_set(rng, 1 + k % 4, 3, 8);
    EXPECT_EQ(corner_points(s), oracle::naive_corners(s));
  }
}

TEST(Property, ClosureMatchesBoxEnumeration) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 300; ++k) {
    const auto c = corner_points(oracle::random_set(rng, 1 + k % 4, 3, 5));
    EXPECT_EQ(closure(c), oracle::naive_closure(c));
  }
}

TEST(Property, PowerSetMatchesTupleEnumeration) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto s = oracle::random_set(rng, 1 + k % 3, 2, 4);
    for (unsigned b = 1; b <= 3; ++b) EXPECT_EQ(power_set(s, b), oracle::naive_power(s, b));
  }
}

TEST(Property, CornersOfPowerArePowersOfCorners) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 400; ++k) {
    const auto s = oracle::random_set(rng, 1 + k % 4, 3, 6);
    const unsigned b = 1 + k % 3;
    EXPECT_EQ(corner_points(power_set(s, b)), powered_corners(corner_points(s), b));
  }
}

TEST(Property, SumSetCornersFromCornersOnly) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    const std::size_t m = 1 + k % 3;
    const auto g = oracle::random_set(rng, m, 3, 4);
    const auto a = oracle::random_set(rng, m, 2, 4);
    const unsigned b = 1 + k % 3;
    ExponentSet full;
    for (const auto& x : g) {
      for (const auto& y : a) full.insert(x + b * y);
    }
    EXPECT_EQ(sum_set_corners(corner_points(g), b, corner_points(a)), corner_points(full));
  }
}

TEST(Property, ClosureOfPowerOfClosedSet) {
  // For a closed set the power is closed again: closure((A*)^b) = A^b.
  std::mt19937_64 rng(6);
  for (int k = 0; k < 200; ++k) {
    const auto c = corner_points(oracle::random_set(rng, 1 + k % 3, 2, 3));
    const auto a = closure(c);
    const unsigned b = 1 + k % 3;
    EXPECT_EQ(closure(powered_corners(c, b)), power_set(a, b));
  }
}
