#pragma once

// Flow facts, and the interleaving-insensitive analysis that folds every
// visited state into one accumulator.
//
// CollapsedState deliberately does not expose its thread map: once states are
// joined, two contexts in the accumulator need not have coexisted, so MHP
// questions cannot be asked of it.

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "pceks/abstract_machine.hpp"

namespace pceks {

struct FlowFact {
  Label site = 0;
  AValue value;
  auto operator<=>(const FlowFact&) const = default;
};

/// Every abstract value of every atomic expression inside a context's focus
/// expression, evaluated in the context's environment. Occurrences under a
/// binder inside the focus that rebinds one of their free variables are
/// skipped: the context's environment says nothing about that inner binding.
std::set<FlowFact> flows_to(const Program& p, const AState& s);
std::set<FlowFact> flows_to(const Program& p, const std::vector<AState>& states);

class CollapsedState {
 public:
  CollapsedState() = default;

  const AStore& store() const { return state_.store; }
  /// Number of (thread, context) entries in the accumulator.
  std::size_t context_count() const;
  /// Transfer passes run, counting the final pass that changed nothing.
  std::size_t passes() const { return passes_; }
  const std::set<DeadEnd>& dead_ends() const { return dead_; }

  bool operator==(const CollapsedState& o) const { return state_ == o.state_; }

  friend CollapsedState collapse(const std::vector<AState>& states);
  friend CollapsedState lfp_collapsed(const Program& p, const Policy& pol);
  friend std::set<FlowFact> flows_to(const Program& p, const CollapsedState& c);
  friend bool leq(const CollapsedState& x, const CollapsedState& y);
  friend bool leq(const AState& x, const CollapsedState& y);
  friend std::string to_sexpr(const Program& p, const CollapsedState& c);

 private:
  AState state_;
  std::size_t passes_ = 0;
  std::set<DeadEnd> dead_;
};

/// Join of all states; bottom for the empty collection.
CollapsedState collapse(const std::vector<AState>& states);

/// Least fixed point of f(s) = s join (join of all successors of s), from the
/// injection.
CollapsedState lfp_collapsed(const Program& p, const Policy& pol);

std::set<FlowFact> flows_to(const Program& p, const CollapsedState& c);
bool leq(const CollapsedState& x, const CollapsedState& y);
bool leq(const AState& x, const CollapsedState& y);
std::string to_sexpr(const Program& p, const CollapsedState& c);

/// Sizes of the finite sets bounding the collapsed iteration. Each is an
/// upper bound on what the analysis can construct for this program:
///   hists     sum_{i<=k} S^i, S = number of call, callcc, spawn and join sites
///   tids      1 root + spawn sites x (hists | pool size); 1 when global
///   addrs     bound vars x hists + (let sites + 1) x hists + tids
///   contexts  sum over labels of hists^|scope| x kont addrs x hists
///   values    closures (sum over lambdas of hists^|fv|) + 2 booleans + 1
///             number + continuations + tids + addrs
/// and bound = tids x contexts + addrs x values. Every pass but the last adds
/// at least one (tid, context) or (addr, value) pair, so passes <= bound.
/// Arithmetic saturates at the maximum uint64.
struct BoundBreakdown {
  std::uint64_t hists = 0;
  std::uint64_t tids = 0;
  std::uint64_t addrs = 0;
  std::uint64_t contexts = 0;
  std::uint64_t values = 0;
  std::uint64_t bound = 0;
};

BoundBreakdown bound_breakdown(const Program& p, const Policy& pol);
std::uint64_t iteration_bound(const Program& p, const Policy& pol);

}  // namespace pceks
