#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "momentflow/evaluator.hpp"
#include "momentflow/generators.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_networks.hpp"
#include "support/symbolic.hpp"

using namespace momentflow;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Evaluate, ChainOfProductsClosedForm) {
  const auto doc = fixture::network("example41");
  const auto e = evaluate(doc.network, doc.utility, "default");
  EXPECT_EQ(e.score, 2.0);
  EXPECT_EQ(e.table.at({2, 0, 0, 0}), 2.0);
  EXPECT_EQ(e.table.at({1, 1, 0, 0}), 2.0);
  EXPECT_EQ(e.table.at({0, 1, 1, 0}), 2.0);
  EXPECT_EQ(e.table.entry({2, 0, 0, 0})->provenance, Provenance::founder);
  EXPECT_EQ(e.table.entry({0, 1, 1, 0})->provenance, Provenance::propagated);
  EXPECT_EQ(e.table.entry({0, 0, 0, 1})->provenance, Provenance::requested);
}

TEST(Evaluate, ClosedFormForOtherFounderMoments) {
  auto doc = fixture::network("example41");
  for (double mean : {-0.5, 0.3, 2.0}) {
    for (double var : {0.0, 0.4}) {
      doc.network.founders[0] = GaussianFounder{mean, var};
      EXPECT_DOUBLE_EQ(evaluate(doc.network, doc.utility, "default").score, mean * mean + var);
    }
  }
}

TEST(Evaluate, ZeroWeightUtility) {
  const auto doc = fixture::network("energy");
  UtilitySpec u = doc.utility;
  for (auto& t : u.terms) t.weight = 0.0;
  EXPECT_EQ(evaluate(doc.network, u, "status_quo").score, 0.0);
}

TEST(Evaluate, LinearInFounders) {
  const auto doc = fixture::network("energy");
  UtilitySpec u{{{0.5, 1, ExponentVector::unit(9, 0), {}}, {0.25, -1, ExponentVector::unit(9, 2), {}}}, {}};
  const auto e = evaluate(doc.network, u, "expand_capacity");
  EXPECT_DOUBLE_EQ(e.score, 0.5 * 1.0 - 0.25 * 0.9);
  EXPECT_EQ(e.contributions.size(), 2u);
}

TEST(Evaluate, ContributionsSumToScore) {
  const auto doc = fixture::network("clinical-structure");
  for (const auto& d : decision_labels(doc.network)) {
    const auto e = evaluate(doc.network, doc.utility, d);
    double s = e.cost;
    for (double c : e.contributions) s += c;
    EXPECT_LE(rel(s, e.score), 1e-12);
    EXPECT_LT(e.cost, 0.0);
  }
}

TEST(Evaluate, DeterministicNetworksMatchSubstitution) {
  testnet::Options opt;
  opt.gaussian_beliefs = false;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto g = testnet::random_network(seed, opt);
    const auto e = evaluate(g.net, g.utility, "default");
    for (const auto& [a, entry] : e.table) {
      const double expected = oracle::substituted_moment(g.net, a);
      EXPECT_LE(std::abs(entry.value - expected), 1e-9 * std::max(1.0, std::abs(expected)))
          << seed << " " << a.to_string();
    }
  }
}

// The expanded clinical utility, one product of expectations per line, must
// match the published term list; summed numerically it must give the score.
TEST(Evaluate, ClinicalUtilityTerms) {
  const auto doc = fixture::network("clinical-structure");
  const auto terms = symbolic::utility_terms(doc.network, doc.utility);
  std::vector<std::string> got;
  for (const auto& t : terms) got.push_back(symbolic::text(t));
  got.push_back("-kd E[rho(d)]");
  std::vector<std::string> golden;
  std::istringstream in(fixture::read("tests/golden/clinical.terms.txt"));
  for (std::string line; std::getline(in, line);) golden.push_back(line);
  std::sort(got.begin(), got.end());
  std::sort(golden.begin(), golden.end());
  EXPECT_EQ(got, golden);

  for (const auto& d : decision_labels(doc.network)) {
    const Network r = resolve_decision(doc.network, d);
    double sum = -doc.utility.cost->weight * doc.utility.cost->rho.at(d);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto j = std::stoul(terms[k].weight.substr(1)) - 1;
      double w = 0.0;
      for (const auto& ut : doc.utility.terms) {
        if (ut.exponents == ExponentVector::unit(5, j)) w = ut.weight;
      }
      sum += terms[k].coeff * w * symbolic::value(r, terms[k].atoms);
    }
    EXPECT_LE(rel(sum, evaluate(doc.network, doc.utility, d).score), 1e-12) << d;
  }
}

TEST(Evaluate, PlanFromAnotherNetwork) {
  const auto doc = fixture::network("energy");
  const auto other = fixture::network("example41");
  const auto p = plan(other.network, other.utility);
  EXPECT_THROW(evaluate(doc.network, doc.utility, p, "status_quo"), PreconditionError);
}

TEST(Evaluate, PowerCap) {
  const auto doc = fixture::network("tree42");
  EngineLimits limits;
  try {
    evaluate(doc.network, doc.utility, plan(doc.network, doc.utility), "default", limits);
    FAIL();
  } catch (const OrderError& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds the cap"), std::string::npos);
  }
}

TEST(Rank, ClinicalStructure) {
  const auto doc = fixture::network("clinical-structure");
  const auto r = rank(doc.network, doc.utility);
  ASSERT_EQ(r.ranked.size(), 2u);
  EXPECT_EQ(r.best, "d1");
  EXPECT_FALSE(r.tie);
  EXPECT_GT(r.ranked[0].score, r.ranked[1].score);
}

TEST(Rank, SingleDecision) {
  const auto doc = fixture::network("example41");
  const auto r = rank(doc.network, doc.utility);
  EXPECT_EQ(r.best, "default");
  EXPECT_FALSE(r.tie);
  EXPECT_THROW(rank(doc.network, doc.utility, plan(doc.network, doc.utility), {}), PreconditionError);
}

TEST(Rank, SymmetricOverridesTie) {
  auto doc = fixture::network("example41");
  doc.network.decisions = {"a", "b"};
  doc.network.overrides["a"]["founders.Y1.mean"] = 0.5;
  doc.network.overrides["b"]["founders.Y1.mean"] = -0.5;
  const auto r = rank(doc.network, doc.utility);
  EXPECT_TRUE(r.tie);
  EXPECT_EQ(r.best, "a");
}

TEST(Rank, ArgmaxInvariance) {
  const auto doc = fixture::network("energy");
  const auto base = rank(doc.network, doc.utility);
  UtilitySpec shifted = doc.utility;
  shifted.terms.push_back({0.7, 1, ExponentVector(9), {}});
  UtilitySpec scaled = doc.utility;
  for (auto& t : scaled.terms) t.weight *= 0.5;
  const auto a = rank(doc.network, shifted);
  const auto b = rank(doc.network, scaled);
  EXPECT_EQ(a.best, base.best);
  EXPECT_EQ(b.best, base.best);
  for (std::size_t k = 0; k < base.ranked.size(); ++k) {
    EXPECT_NEAR(a.ranked[k].score, base.ranked[k].score + 0.7, 1e-12);
    EXPECT_NEAR(b.ranked[k].score, 0.5 * base.ranked[k].score, 1e-12);
  }
}

TEST(Rank, UnreachableOverrideLeavesScores) {
  auto doc = fixture::network("energy");
  // Y1 and Y4 reach only Y6 and Y7; the utility below reads Y5 and Y9.
  UtilitySpec u{{{1.0, 1, ExponentVector::unit(9, 4), {}}, {1.0, 1, ExponentVector::unit(9, 8), {}}}, {}};
  doc.network.decisions.push_back("b");
  doc.network.overrides["b"]["founders.Y1.mean"] = 5.0;
  doc.network.overrides["b"]["founders.Y2.mean"] = 7.0;
  doc.network.overrides["b"]["nodes.Y4.error.variance"] = 1.0;
  const auto r = rank(doc.network, u);
  ASSERT_EQ(r.ranked.size(), 3u);
  double status_quo = 0.0, b = 0.0;
  for (const auto& e : r.ranked) {
    if (e.decision == "status_quo") status_quo = e.score;
    if (e.decision == "b") b = e.score;
  }
  EXPECT_EQ(status_quo, b);
}

TEST(Rank, ReuseIsBitIdentical) {
  for (const char* name : {"energy", "clinical-structure"}) {
    const auto doc = fixture::network(name);
    const auto p = plan(doc.network, doc.utility);
    const auto fast = rank(doc.network, doc.utility, p, decision_labels(doc.network), {}, true);
    const auto slow = rank(doc.network, doc.utility, p, decision_labels(doc.network), {}, false);
    ASSERT_EQ(fast.ranked.size(), slow.ranked.size());
    for (std::size_t k = 0; k < fast.ranked.size(); ++k) {
      EXPECT_EQ(fast.ranked[k].decision, slow.ranked[k].decision);
      EXPECT_EQ(fast.ranked[k].score, slow.ranked[k].score);
      EXPECT_EQ(fast.ranked[k].table, slow.ranked[k].table);
      EXPECT_EQ(fast.ranked[k].table, evaluate(doc.network, doc.utility, p, fast.ranked[k].decision).table);
    }
  }
}

TEST(Rank, DirtyPanelsFollowDescendants) {
  const auto doc = fixture::network("energy");
  const auto a = resolve_decision(doc.network, "status_quo");
  const auto b = resolve_decision(doc.network, "expand_capacity");
  const auto dirty = detail::dirty_panels(a, b);
  EXPECT_FALSE(dirty[0]);
  EXPECT_FALSE(dirty[1]);
  EXPECT_TRUE(dirty[2]);
  EXPECT_TRUE(dirty[5]);
  EXPECT_TRUE(dirty[6]);
  EXPECT_TRUE(dirty[7]);
}

TEST(Property, ReplayIsBitIdentical) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = testnet::random_network(seed);
    const auto p = plan(g.net, g.utility);
    const auto x = evaluate(g.net, g.utility, p, "default");
    const auto y = evaluate(g.net, g.utility, p, "default");
    EXPECT_EQ(x.table, y.table);
    EXPECT_EQ(x.score, y.score);
  }
}
