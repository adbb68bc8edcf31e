#pragma once

// Abstract small-step semantics over AState, the reachable-state search, and
// the Kleene iteration of the global transfer function it must agree with.
//
// Each transition is first computed as a Move: the context that stepped, what
// it steps to, and the store cells it joins into. The uncounted machine applies
// a move by pure joining (the stepped context is kept); the counted machine in
// singleton_mhp applies the same moves with strong updates where the count
// permits. Sharing the move enumerator keeps the two machines in lockstep.

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pceks/abstract_domain.hpp"

namespace pceks {

/// Abstract atomic evaluation: a set of values, empty when a variable's
/// cell is still unwritten.
AValueSet a_atomic_eval(const Program& p, Label ae, const AEnv& env, const AStore& store);

/// The abstract ids a spawn at `site` may allocate, given the history
/// recorded at the spawn.
std::vector<ATid> new_tids(const Policy& pol, Label site, const AHist& recorded);

struct Move {
  ATid tid;
  AContext from;
  std::optional<AContext> to;                         // absent when the thread halts
  std::optional<std::pair<ATid, AContext>> spawned;
  AValueSet result;                                   // the halting thread's return values
  std::vector<std::pair<AAddr, AValueSet>> writes;    // joined into the store
  bool halts() const { return !to.has_value(); }
};

/// A label at which some abstract value cannot take the step a concrete
/// run would need (applying a number, arity mismatch, joining a non-thread).
struct DeadEnd {
  Label label = 0;
  std::string kind;
  auto operator<=>(const DeadEnd&) const = default;
};

/// Every move of every context of every thread in `s`. Contexts that are
/// blocked (a join on a thread with no return value yet) produce nothing.
std::vector<Move> moves(const Program& p, const Policy& pol, const AState& s,
                        std::set<DeadEnd>* dead = nullptr);

/// Moves of one context, with `tid` left defaulted.
void context_moves(const Program& p, const Policy& pol, const AContext& c, const AStore& store,
                   std::vector<Move>& out, std::set<DeadEnd>* dead = nullptr);

/// Sequential transitions of one context. A step that returns to the halt
/// continuation has no `next` and carries the delivered values in `result`.
struct ASeqStep {
  std::optional<AContext> next;
  AValueSet result;
  AStore store;
};
std::vector<ASeqStep> astep_seq(const Program& p, const Policy& pol, const AContext& c,
                                const AStore& store);

AState ainject(const Program& p, const Policy& pol);

/// Weak application: contexts and store cells only grow.
AState apply_weak(const AState& s, const Move& m);

/// All successors of `s`, deduplicated, in a deterministic order.
std::vector<AState> astep(const Program& p, const Policy& pol, const AState& s);

struct StateSet {
  std::vector<AState> states;                       // states[0] is the injection
  std::vector<std::vector<std::size_t>> successors; // sorted, deduplicated ids
  std::set<DeadEnd> dead_ends;
  bool truncated = false;
};

/// Reachable states by FIFO worklist search. `max_states` bounds the table;
/// hitting it sets `truncated`.
StateSet reach(const Program& p, const Policy& pol, std::size_t max_states = 1'000'000);

struct KleeneResult {
  std::vector<AState> states;           // sorted
  std::vector<std::size_t> chain_sizes; // |F^i(bottom)| for i = 1.. up to the fixed point
  bool truncated = false;
};

/// Least fixed point of F(S) = {inject} u S u step(S), iterated from the
/// empty set, stepping every member on every round.
KleeneResult lfp_transfer(const Program& p, const Policy& pol, std::size_t max_states = 1'000'000);

/// True when the two collections hold the same set of states.
bool same_states(std::vector<AState> a, std::vector<AState> b);

}  // namespace pceks
