#pragma once

// Simulation check of an abstract analysis against bounded concrete
// exploration: for every concrete edge s => s' and every reachable abstract
// state S with alpha(s) <= S, some successor S' of S has alpha(s') <= S'.
// Also checks that every explored concrete state is covered by some
// reachable abstract state.

#include <cstddef>
#include <string>
#include <vector>

#include "pceks/abstract_domain.hpp"

namespace pceks {

struct SimulationLimits {
  std::size_t max_states = 10000;
  std::size_t max_depth = 10000;
  std::size_t max_abstract_states = 1'000'000;
  std::size_t max_reported = 8;
};

struct SimulationViolation {
  std::size_t concrete_from = 0;
  std::size_t concrete_to = 0;
  std::size_t abstract_state = 0;  // SIZE_MAX for a coverage failure
  std::string description;
};

struct SimulationResult {
  bool counted = false;
  std::size_t concrete_states = 0;
  std::size_t concrete_edges = 0;
  std::size_t abstract_states = 0;
  std::size_t checked_pairs = 0;  // (edge class, covering abstract state) pairs examined
  bool concrete_truncated = false;
  bool abstract_truncated = false;
  std::size_t violation_count = 0;
  std::vector<SimulationViolation> violations;  // first max_reported only
  bool ok() const { return violation_count == 0 && !abstract_truncated; }
};

/// Counted mode abstracts concrete states with live-thread counts and
/// compares with the count order as well.
SimulationResult check_simulation(const Program& p, const Policy& pol, bool counted,
                                  const SimulationLimits& limits = {});

}  // namespace pceks
