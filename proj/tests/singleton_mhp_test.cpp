#include <gtest/gtest.h>

#include "pceks/singleton_mhp.hpp"
#include "test_support.hpp"

namespace pceks {
namespace {

const std::vector<Policy>& policies() {
  static const std::vector<Policy> all{
      {0, TidStrategy::Global, 1},   {1, TidStrategy::Global, 1},   {0, TidStrategy::SiteHist, 1},
      {1, TidStrategy::SiteHist, 1}, {0, TidStrategy::SitePool, 2}, {1, TidStrategy::SitePool, 2}};
  return all;
}

TEST(Count, Lattice) {
  EXPECT_EQ(increment(Count::Zero), Count::One);
  EXPECT_EQ(increment(Count::One), Count::Many);
  EXPECT_EQ(increment(Count::Many), Count::Many);
  EXPECT_EQ(clip(0), Count::Zero);
  EXPECT_EQ(clip(1), Count::One);
  EXPECT_EQ(clip(7), Count::Many);
}

TEST(CountedInject, RootCountIsOne) {
  Program p = testing::load("p_id");
  for (const auto& pol : policies()) {
    CountedState s = counted_inject(p, pol);
    EXPECT_EQ(s.count(root_atid(pol)), Count::One);
    EXPECT_EQ(s.counts.size(), 1u);
    EXPECT_EQ(s, abstract_counted(inject(p), pol));
  }
}

TEST(AStepCounted, StrongLiftedStepReplacesTheContext) {
  Program p = testing::load("p_id");
  Policy pol;
  CountedState s = counted_inject(p, pol);
  auto next = astep_counted(p, pol, s);
  ASSERT_EQ(next.size(), 1u);
  const auto& cs = next[0].base.threads.at(root_atid(pol));
  ASSERT_EQ(cs.size(), 1u);
  EXPECT_NE(cs.begin()->expr, p.root());
}

TEST(AStepCounted, SecondSpawnThroughOneIdSaturates) {
  Program p = testing::load("p_spawnjoin");
  Policy pol{0, TidStrategy::Global, 1};
  CountedStateSet r = reach_counted(p, pol);
  bool many = false;
  for (const auto& s : r.states) many |= s.count(ATid{}) == Count::Many;
  EXPECT_TRUE(many);
}

TEST(AStepCounted, SpawnJoinRootIsUpdatedStrongly) {
  Program p = testing::load("p_spawnjoin");
  Policy pol;
  CountedStateSet r = reach_counted(p, pol);
  bool halted = false;
  for (const auto& s : r.states) {
    auto it = s.base.threads.find(root_atid(pol));
    if (it != s.base.threads.end()) {
      EXPECT_EQ(it->second.size(), 1u);
    } else {
      // The root halted: its contexts are gone and its count is back to zero.
      EXPECT_EQ(s.count(root_atid(pol)), Count::Zero);
      EXPECT_TRUE(s.base.store.count(ATidAddr{root_atid(pol)}));
      halted = true;
    }
  }
  EXPECT_TRUE(halted);
}

// Along every move: the count of each id stays, increments, or drops to zero
// through a singleton halt; a strong successor lies below the weak one.
TEST(Property, CountDisciplineAndStrongBelowWeak) {
  for (const auto& name : testing::corpus_names()) {
    Program p = testing::load(name);
    for (const auto& pol : policies()) {
      CountedStateSet r = reach_counted(p, pol);
      for (const auto& s : r.states)
        for (const auto& m : moves(p, pol, s.base)) {
          CountedState n = apply_counted(s, m);
          ASSERT_TRUE(leq(n.base, apply_weak(s.base, m))) << name;
          std::set<ATid> ids;
          for (const auto& [t, c] : s.counts) ids.insert(t);
          for (const auto& [t, c] : n.counts) ids.insert(t);
          for (const auto& t : ids) {
            Count before = s.count(t), after = n.count(t);
            bool ok = after == before || after == increment(before) ||
                      (after == Count::Zero && m.halts() && t == m.tid && before == Count::One);
            ASSERT_TRUE(ok) << name;
          }
          // Live contexts imply a positive count.
          for (const auto& [t, cs] : n.base.threads) ASSERT_NE(n.count(t), Count::Zero);
        }
    }
  }
}

TEST(Mhp, ParallelBodyAndContinuation) {
  Program p = testing::load("p_par");
  Label body = testing::find_label(p, "((lambda (z) z) 1)");
  Label cont = testing::find_label(p, "((lambda (w) w) 2)");
  for (const auto& pol : policies()) {
    EXPECT_TRUE(mhp_pairs(reach_counted(p, pol)).count({body, cont}));
    EXPECT_TRUE(mhp_pairs(reach(p, pol)).count({body, cont}));
  }
  EXPECT_TRUE(testing::concrete_mhp(explore(p, 10000, 10000)).count({body, cont}));
}

TEST(Mhp, SingleThreadIsEmpty) {
  Program p = testing::load("p_id");
  for (const auto& pol : policies()) {
    EXPECT_TRUE(mhp_pairs(reach_counted(p, pol)).empty());
    EXPECT_TRUE(self_mhp(reach_counted(p, pol)).empty());
  }
}

TEST(Mhp, JoinBarrierSeparatesGenerations) {
  Program p = testing::load("p_barrier");
  auto e1 = testing::subtree(p, testing::find_label(p, "((lambda (a) a) 1)"));
  auto e2 = testing::subtree(p, testing::find_label(p, "((lambda (b) b) u)"));
  auto crosses = [&](const std::set<LabelPair>& pairs) {
    for (auto [a, b] : pairs)
      if ((e1.count(a) && e2.count(b)) || (e1.count(b) && e2.count(a))) return true;
    return false;
  };
  Policy pol{0, TidStrategy::SiteHist, 1};
  EXPECT_FALSE(crosses(mhp_pairs(reach_counted(p, pol))));
  EXPECT_TRUE(crosses(mhp_pairs(reach(p, pol))));
  EXPECT_FALSE(crosses(testing::concrete_mhp(explore(p, 10000, 10000))));
}

TEST(SelfMhp, RecursiveSpawnUnderGlobalIds) {
  Program p = parse(
      "((lambda (f) (f f 1)) (lambda (self n) (let ((t (spawn ((lambda (b) b) n)))) (self self n))))");
  Label body = testing::find_label(p, "((lambda (b) b) n)");
  CountedStateSet r = reach_counted(p, Policy{0, TidStrategy::Global, 1});
  EXPECT_TRUE(self_mhp(r).count(body));
}

TEST(SelfMhp, PoolPostJoinLabel) {
  Program p = testing::load("p_pool");
  Label post = testing::find_label(p, "(if go (self self #f) ((lambda (d) d) r))");
  EXPECT_FALSE(self_mhp(reach_counted(p, Policy{0, TidStrategy::SitePool, 2})).count(post));
  EXPECT_TRUE(self_mhp(reach_counted(p, Policy{0, TidStrategy::Global, 1})).count(post));
  EXPECT_FALSE(testing::concrete_self_mhp(explore(p, 10000, 10000)).count(post));
}

// Counting only removes facts, and never a fact that a concrete run exhibits.
TEST(Property, PrecisionOrderingAndConcreteCoverage) {
  for (const auto& name : testing::corpus_names()) {
    Program p = testing::load(name);
    Exploration x = explore(p, 10000, 10000);
    auto cm = testing::concrete_mhp(x);
    auto cs = testing::concrete_self_mhp(x);
    for (const auto& pol : policies()) {
      CountedStateSet c = reach_counted(p, pol);
      StateSet u = reach(p, pol);
      auto mc = mhp_pairs(c), mu = mhp_pairs(u);
      auto sc = self_mhp(c), su = self_mhp(u);
      EXPECT_TRUE(std::includes(mu.begin(), mu.end(), mc.begin(), mc.end())) << name;
      EXPECT_TRUE(std::includes(su.begin(), su.end(), sc.begin(), sc.end())) << name;
      EXPECT_TRUE(std::includes(mc.begin(), mc.end(), cm.begin(), cm.end())) << name;
      EXPECT_TRUE(std::includes(sc.begin(), sc.end(), cs.begin(), cs.end())) << name;
    }
  }
}

}  // namespace
}  // namespace pceks
