#pragma once

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pceks/hash.hpp"

namespace pceks {

/// Interns states by structural equality; ids are dense and stable.
template <class State>
class StateTable {
 public:
  /// Returns (id, inserted).
  std::pair<std::size_t, bool> insert(State s) {
    std::size_t h = hash_value(s);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (states_[it->second] == s) return {it->second, false};
    std::size_t id = states_.size();
    states_.push_back(std::move(s));
    index_.emplace(h, id);
    return {id, true};
  }

  std::optional<std::size_t> find(const State& s) const {
    auto [lo, hi] = index_.equal_range(hash_value(s));
    for (auto it = lo; it != hi; ++it)
      if (states_[it->second] == s) return it->second;
    return std::nullopt;
  }

  const State& operator[](std::size_t id) const { return states_[id]; }
  std::size_t size() const { return states_.size(); }
  std::vector<State> release() && { return std::move(states_); }

 private:
  std::vector<State> states_;
  std::unordered_multimap<std::size_t, std::size_t> index_;
};

}  // namespace pceks
