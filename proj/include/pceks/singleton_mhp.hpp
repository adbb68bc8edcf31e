#pragma once

// Thread counting. Each abstract thread id carries a count in {0, 1, many}
// of the concrete threads it stands for. While the count is exactly one the
// thread's context set can be updated strongly: the stepped context is
// replaced rather than joined with its successor. The counted reachable set
// gives the may-happen-in-parallel relation and self-parallelism per label.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "pceks/abstract_machine.hpp"

namespace pceks {

enum class Count : std::uint8_t { Zero, One, Many };

const char* to_string(Count c);
Count increment(Count c);
/// Clips a concrete thread count.
Count clip(std::size_t n);

struct CountedState {
  AState base;
  std::map<ATid, Count> counts;  // Zero entries are not stored
  auto operator<=>(const CountedState&) const = default;
  friend std::size_t hash_value(const CountedState& s) {
    std::size_t h = hash_value(s.base);
    hash_combine(h, s.counts);
    return h;
  }
  Count count(const ATid& t) const;
};

/// Base order plus the pointwise count order Zero < One < Many.
bool leq(const CountedState& x, const CountedState& y);

/// The structural abstraction extended with the number of live concrete
/// threads per abstract id.
CountedState abstract_counted(const CState& s, const Policy& pol);

CountedState counted_inject(const Program& p, const Policy& pol);

/// Applies a move: strong on the stepping thread's contexts when its count is
/// one, weak otherwise. The store is always joined.
CountedState apply_counted(const CountedState& s, const Move& m);

std::vector<CountedState> astep_counted(const Program& p, const Policy& pol, const CountedState& s);

struct CountedStateSet {
  std::vector<CountedState> states;
  std::vector<std::vector<std::size_t>> successors;
  std::set<DeadEnd> dead_ends;
  bool truncated = false;
};

CountedStateSet reach_counted(const Program& p, const Policy& pol, std::size_t max_states = 1'000'000);

/// Unordered label pairs (first < second) of distinct thread entries that
/// coexist in one state. Pairs of equal labels are reported by self_mhp.
using LabelPair = std::pair<Label, Label>;
std::set<LabelPair> mhp_pairs(const AState& s);
std::set<LabelPair> mhp_pairs(const StateSet& r);
std::set<LabelPair> mhp_pairs(const CountedStateSet& r);

/// Labels that two concrete threads may occupy at once: some state has a
/// context there under a count other than one, or two distinct entries there.
std::set<Label> self_mhp(const CountedStateSet& r);
/// Without counts every abstract id may stand for many threads, so any label
/// reached by some context is reported.
std::set<Label> self_mhp(const StateSet& r);

}  // namespace pceks
