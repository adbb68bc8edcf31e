// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "../state_gen.hpp"
#include "../test_support.hpp"
#include "pceks/flow_collapsed.hpp"
#include "pceks/report.hpp"
#include "pceks/singleton_mhp.hpp"
#include "pceks/soundness.hpp"

namespace pceks {
namespace {

using testing::load;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << why;
    pass = false;
  }
};

std::vector<Policy> all_policies() {
  std::vector<Policy> out;
  for (auto tid : {TidStrategy::Global, TidStrategy::SiteHist, TidStrategy::SitePool})
    for (std::size_t k : {0u, 1u}) out.push_back(Policy{k, tid, 2});
  return out;
}

std::string describe(const std::string& name, const Policy& pol) {
  return name + " [" + to_string(pol.tid) + " k=" + std::to_string(pol.k) + "]";
}

// 1. Every concrete edge is simulated by every covering abstract state, for
// the uncounted and counted analyses.
void soundness(Outcome& o) {
  std::size_t runs = 0, pairs = 0;
  double worst = 0;
  for (const auto& name : testing::corpus_names()) {
    Program p = load(name);
    auto start = std::chrono::steady_clock::now();
    for (auto tid : {TidStrategy::Global, TidStrategy::SiteHist})
      for (std::size_t k : {0u, 1u})
        for (bool counted : {false, true}) {
          Policy pol{k, tid, 1};
          SimulationLimits lim;
          lim.max_states = 10000;
          SimulationResult r = check_simulation(p, pol, counted, lim);
          ++runs;
          pairs += r.checked_pairs;
          if (!r.ok())
            o.fail(describe(name, pol) + (counted ? " counted: " : " uncounted: ") +
                   (r.violations.empty() ? std::string("abstract search truncated") : r.violations[0].description));
        }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    worst = std::max(worst, secs);
    if (secs >= 60) o.fail(name + " took " + std::to_string(secs) + " s");
  }
  o.detail << (o.pass ? "" : "; ") << runs << " runs, " << pairs << " edge/state pairs, slowest program "
           << worst << " s";
}

// 2. P_PAR body and continuation are MHP concretely and abstractly; P_ID has none.
void mhp_ground_truth(Outcome& o) {
  Program par = load("p_par");
  Label body = testing::find_label(par, "((lambda (z) z) 1)");
  Label cont = testing::find_label(par, "((lambda (w) w) 2)");
  LabelPair pair{std::min(body, cont), std::max(body, cont)};
  if (!testing::concrete_mhp(explore(par, 10000, 10000)).count(pair)) o.fail("no concrete interleaving");
  Policy pol;
  if (!mhp_pairs(reach_counted(par, pol)).count(pair)) o.fail("counted analysis misses the pair");
  if (!mhp_pairs(reach(par, pol)).count(pair)) o.fail("uncounted analysis misses the pair");
  Program id = load("p_id");
  auto id_pairs = mhp_pairs(reach_counted(id, pol));
  if (!id_pairs.empty()) o.fail("P_ID reports " + std::to_string(id_pairs.size()) + " pairs");
  if (!testing::concrete_mhp(explore(id, 10000, 10000)).empty()) o.fail("P_ID concretely parallel");
  o.detail << (o.pass ? "" : "; ") << "P_PAR pair (" << pair.first << "," << pair.second << "), P_ID pairs "
           << id_pairs.size();
}

// 3. Join barrier: counted SiteHist separates E1 from E2, uncounted does not,
// and no concrete interleaving has both live.
void singleton_precision(Outcome& o) {
  Program p = load("p_barrier");
  auto e1 = testing::subtree(p, testing::find_label(p, "((lambda (a) a) 1)"));
  auto e2 = testing::subtree(p, testing::find_label(p, "((lambda (b) b) u)"));
  auto cross = [&](const std::set<LabelPair>& pairs) {
    std::size_t n = 0;
    for (auto [a, b] : pairs) n += (e1.count(a) && e2.count(b)) || (e1.count(b) && e2.count(a));
    return n;
  };
  for (std::size_t k : {0u, 1u}) {
    Policy pol{k, TidStrategy::SiteHist, 1};
    std::size_t counted = cross(mhp_pairs(reach_counted(p, pol)));
    std::size_t uncounted = cross(mhp_pairs(reach(p, pol)));
    if (counted != 0) o.fail("counted reports " + std::to_string(counted) + " E1/E2 pairs");
    if (uncounted == 0) o.fail("uncounted reports no E1/E2 pair");
    if (k == 0) o.detail << "counted " << counted << ", uncounted " << uncounted << " E1/E2 pairs";
  }
  std::size_t concrete = cross(testing::concrete_mhp(explore(p, 10000, 10000)));
  if (concrete != 0) o.fail("concrete exploration has E1 and E2 co-live");
  o.detail << ", concrete " << concrete;
}

// 4. P_POOL post-join label: not self-MHP with a pool of two, self-MHP with
// one global id.
void self_parallel(Outcome& o) {
  Program p = load("p_pool");
  Label post = testing::find_label(p, "(if go (self self #f) ((lambda (d) d) r))");
  bool pool = self_mhp(reach_counted(p, Policy{0, TidStrategy::SitePool, 2})).count(post);
  bool global = self_mhp(reach_counted(p, Policy{0, TidStrategy::Global, 1})).count(post);
  bool concrete = testing::concrete_self_mhp(explore(p, 10000, 10000)).count(post);
  if (pool) o.fail("self-MHP under SitePool(2)");
  if (!global) o.fail("not self-MHP under Global");
  if (concrete) o.fail("concretely self-parallel");
  o.detail << "label " << post << ": pool " << pool << ", global " << global << ", concrete " << concrete;
}

// 5. Collapsed analysis over-approximates the state-set analysis.
void collapsed_soundness(Outcome& o) {
  std::size_t configs = 0;
  for (const auto& name : testing::corpus_names()) {
    Program p = load(name);
    for (const auto& pol : all_policies()) {
      ++configs;
      StateSet r = reach(p, pol);
      CollapsedState c = lfp_collapsed(p, pol);
      if (!leq(collapse(r.states), c)) o.fail(describe(name, pol) + ": collapse(reach) not below");
      auto fr = flows_to(p, r.states), fc = flows_to(p, c);
      if (!std::includes(fc.begin(), fc.end(), fr.begin(), fr.end()))
        o.fail(describe(name, pol) + ": flow facts missing from collapsed");
    }
  }
  o.detail << (o.pass ? "" : "; ") << configs << " configurations";
}

// 6. Observed collapsed passes never exceed the bound.
void iteration_bound_holds(Outcome& o) {
  std::size_t worst_passes = 0;
  std::uint64_t tightest = std::numeric_limits<std::uint64_t>::max();
  for (const auto& name : testing::corpus_names()) {
    Program p = load(name);
    for (const auto& pol : all_policies()) {
      std::size_t passes = lfp_collapsed(p, pol).passes();
      std::uint64_t bound = iteration_bound(p, pol);
      if (passes > bound)
        o.fail(describe(name, pol) + ": " + std::to_string(passes) + " > " + std::to_string(bound));
      worst_passes = std::max(worst_passes, passes);
      tightest = std::min(tightest, bound);
    }
  }
  o.detail << (o.pass ? "" : "; ") << "max passes " << worst_passes << ", smallest bound " << tightest;
}

// 7. Kleene iteration of the global transfer function equals the worklist.
void kleene(Outcome& o) {
  std::size_t longest = 0;
  for (const auto& name : testing::corpus_names()) {
    Program p = load(name);
    for (const auto& pol : all_policies()) {
      KleeneResult k = lfp_transfer(p, pol);
      if (k.truncated) o.fail(describe(name, pol) + ": chain did not stabilize");
      if (!same_states(k.states, reach(p, pol).states)) o.fail(describe(name, pol) + ": differs from reach");
      longest = std::max(longest, k.chain_sizes.size());
    }
  }
  o.detail << (o.pass ? "" : "; ") << "longest chain " << longest << " iterates";
}

// 8. Futures: no thread id reaches the strict position of the plain value.
void futures(Outcome& o) {
  Program p = load("p_fut");
  Label site = testing::find_label(p, "p", testing::find_label(p, "(join p)"));
  for (const auto& pol : all_policies()) {
    StateSet r = reach(p, pol);
    CountedStateSet c = reach_counted(p, pol);
    std::vector<AState> bases;
    for (const auto& s : c.states) bases.push_back(s.base);
    for (const auto* facts : {&r.states, &bases})
      for (const auto& f : flows_to(p, *facts))
        if (f.site == site && std::holds_alternative<ATidVal>(f.value))
          o.fail(describe("p_fut", pol) + ": thread id flows to the site");
  }
  // Concretely: p is bound in some explored state and never holds a thread id.
  Exploration x = explore(p, 10000, 10000);
  Symbol var = *p.lookup("p");
  std::size_t bound = 0;
  for (const auto& s : x.states)
    for (const auto& [t, c] : s.threads) {
      auto a = c.env.find(var);
      if (a == c.env.end()) continue;
      ++bound;
      if (std::holds_alternative<TidVal>(s.store.at(a->second))) o.fail("concrete thread id bound to p");
    }
  if (bound == 0) o.fail("p is never bound concretely");
  if (x.truncated) o.fail("concrete exploration truncated");
  o.detail << (o.pass ? "" : "; ") << "site " << site << ", " << bound << " concrete contexts with p bound";
}


// 9. Lattice laws on random states, and byte-identical JSON across runs.
void laws_and_determinism(Outcome& o) {
  testing::StateGen g(99);
  constexpr int kCases = 1000;
  for (int i = 0; i < kCases && o.pass; ++i) {
    AState x = g.state(), y = g.state(), z = g.state();
    AState j = join(x, y);
    if (!leq(x, x)) o.fail("reflexivity");
    if (leq(x, y) && leq(y, x) && !(x == y)) o.fail("antisymmetry");
    if (leq(x, y) && leq(y, z) && !leq(x, z)) o.fail("transitivity");
    AState up = g.above(x), upup = g.above(up);
    if (!(leq(x, up) && leq(up, upup) && leq(x, upup))) o.fail("transitivity chain");
    if (!leq(x, j) || !leq(y, j)) o.fail("join is not an upper bound");
    if (leq(x, z) && leq(y, z) && !leq(j, z)) o.fail("join is not least");
    if (!(j == join(y, x))) o.fail("join commutativity");
    if (!(join(j, z) == join(x, join(y, z)))) o.fail("join associativity");
    if (!(join(x, x) == x)) o.fail("join idempotence");
    if (leq(x, y) != (j == y)) o.fail("order/join consistency");
    CountedState cx = g.counted(), cy = g.counted();
    if (!leq(cx, cx) || (leq(cx, cy) && leq(cy, cx) && !(cx == cy))) o.fail("counted order");
  }
  std::size_t reports = 0;
  for (const auto& name : testing::corpus_names())
    for (Mode m : {Mode::Explore, Mode::Analyze, Mode::AnalyzeCounted, Mode::AnalyzeCollapsed}) {
      RunConfig c;
      c.input = testing::corpus_path(name);
      c.mode = m;
      std::string a = emit(run(c), Format::Json), b = emit(run(c), Format::Json);
      ++reports;
      if (a != b) o.fail(name + " " + to_string(m) + ": JSON differs between runs");
      if (!(report_from_json(a) == run(c))) o.fail(name + " " + to_string(m) + ": JSON does not round-trip");
    }
  o.detail << (o.pass ? "" : "; ") << kCases << " random cases, " << reports << " reports compared";
}

}  // namespace
}  // namespace pceks

int main() {
  using namespace pceks;
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"soundness simulation", soundness},
      {"MHP ground truth", mhp_ground_truth},
      {"singleton precision", singleton_precision},
      {"self-MHP", self_parallel},
      {"collapsed-analysis soundness", collapsed_soundness},
      {"iteration bound", iteration_bound_holds},
      {"Kleene equivalence", kleene},
      {"futures use case", futures},
      {"lattice laws and determinism", laws_and_determinism},
  };
  int failures = 0;
  int n = 0;
  for (const auto& [title, check] : criteria) {
    Outcome o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", ++n, title, o.detail.str().c_str());
  }
  std::printf("%d/%d criteria passed\n", n - failures, n);
  return failures == 0 ? 0 : 1;
}
