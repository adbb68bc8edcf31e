#include "pceks/soundness.hpp"

#include <limits>
#include <set>

#include "pceks/concrete_machine.hpp"
#include "pceks/singleton_mhp.hpp"
#include "pceks/state_table.hpp"

namespace pceks {

namespace {

template <class AS, class Abstract>
SimulationResult simulate(const Program& p, const Exploration& x, const std::vector<AS>& states,
                          const std::vector<std::vector<std::size_t>>& successors, Abstract&& abstract,
                          const SimulationLimits& limits, SimulationResult r) {
  r.concrete_states = x.states.size();
  r.concrete_edges = x.edges.size();
  r.concrete_truncated = x.truncated;
  r.abstract_states = states.size();

  auto report = [&](SimulationViolation v) {
    ++r.violation_count;
    if (r.violations.size() < limits.max_reported) r.violations.push_back(std::move(v));
  };

  // Distinct abstractions of the explored states, and for each the reachable
  // abstract states above it.
  StateTable<AS> alphas;
  std::vector<std::size_t> alpha_of(x.states.size());
  for (std::size_t i = 0; i < x.states.size(); ++i) alpha_of[i] = alphas.insert(abstract(x.states[i])).first;
  std::vector<std::vector<std::size_t>> covering(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a)
    for (std::size_t j = 0; j < states.size(); ++j)
      if (leq(alphas[a], states[j])) covering[a].push_back(j);

  for (std::size_t i = 0; i < x.states.size(); ++i)
    if (covering[alpha_of[i]].empty())
      report({i, i, std::numeric_limits<std::size_t>::max(),
              "no reachable abstract state covers concrete state " + std::to_string(i)});

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : x.edges) {
    std::size_t from = alpha_of[e.from], to = alpha_of[e.to];
    if (!seen.emplace(from, to).second) continue;
    for (std::size_t j : covering[from]) {
      ++r.checked_pairs;
      bool matched = false;
      for (std::size_t s : successors[j])
        if (leq(alphas[to], states[s])) {
          matched = true;
          break;
        }
      if (!matched)
        report({e.from, e.to, j,
                "abstract state " + std::to_string(j) + " has no successor covering concrete edge " +
                    std::to_string(e.from) + " -> " + std::to_string(e.to) + " (thread " +
                    std::to_string(e.tid_seq) + ")"});
    }
  }
  (void)p;
  return r;
}

}  // namespace

SimulationResult check_simulation(const Program& p, const Policy& pol, bool counted,
                                  const SimulationLimits& limits) {
  Exploration x = explore(p, limits.max_states, limits.max_depth);
  SimulationResult r;
  r.counted = counted;
  if (counted) {
    CountedStateSet a = reach_counted(p, pol, limits.max_abstract_states);
    r.abstract_truncated = a.truncated;
    return simulate(p, x, a.states, a.successors,
                    [&](const CState& s) { return abstract_counted(s, pol); }, limits, r);
  }
  StateSet a = reach(p, pol, limits.max_abstract_states);
  r.abstract_truncated = a.truncated;
  return simulate(p, x, a.states, a.successors,
                  [&](const CState& s) { return abstract_state(s, pol); }, limits, r);
}

}  // namespace pceks
