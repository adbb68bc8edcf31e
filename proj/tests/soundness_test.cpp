#include <gtest/gtest.h>

#include "pceks/soundness.hpp"
#include "random_programs.hpp"
#include "test_support.hpp"

namespace pceks {
namespace {

const std::vector<Policy>& policies() {
  static const std::vector<Policy> all{
      {0, TidStrategy::Global, 1},   {1, TidStrategy::Global, 1},   {0, TidStrategy::SiteHist, 1},
      {1, TidStrategy::SiteHist, 1}, {0, TidStrategy::SitePool, 2}, {1, TidStrategy::SitePool, 2}};
  return all;
}

TEST(Simulation, Corpus) {
  for (const auto& name : testing::corpus_names()) {
    Program p = testing::load(name);
    for (const auto& pol : policies())
      for (bool counted : {false, true}) {
        SimulationResult r = check_simulation(p, pol, counted);
        EXPECT_FALSE(r.concrete_truncated) << name;
        EXPECT_GT(r.checked_pairs, 0u) << name;
        EXPECT_TRUE(r.ok()) << name << " " << to_string(pol.tid) << " k=" << pol.k
                            << (counted ? " counted" : "") << ": "
                            << (r.violations.empty() ? "" : r.violations[0].description);
      }
  }
}

// The same property on generated programs, including ones that get stuck,
// loop, rebind continuations, and race on cas.
TEST(Simulation, RandomPrograms) {
  testing::ProgramGen gen(2024);
  SimulationLimits lim;
  lim.max_states = 400;
  lim.max_depth = 30;
  lim.max_abstract_states = 5000;
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    std::string text = gen.program(3);
    Program p = parse(text);
    for (const auto& pol : {policies()[0], policies()[3], policies()[4]})
      for (bool counted : {false, true}) {
        SimulationResult r = check_simulation(p, pol, counted, lim);
        if (r.abstract_truncated) continue;
        ++checked;
        ASSERT_EQ(r.violation_count, 0u) << text << "\n" << r.violations[0].description;
      }
  }
  EXPECT_GT(checked, 500);
}

// A deliberately unsound abstraction must be caught: drop every successor.
TEST(Simulation, DetectsMissingSuccessors) {
  Program p = testing::load("p_par");
  SimulationLimits lim;
  lim.max_abstract_states = 1;  // only the injection survives
  SimulationResult r = check_simulation(p, Policy{}, false, lim);
  EXPECT_TRUE(r.abstract_truncated);
  EXPECT_GT(r.violation_count, 0u);
  EXPECT_FALSE(r.ok());
}

}  // namespace
}  // namespace pceks
