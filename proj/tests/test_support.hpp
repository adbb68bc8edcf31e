#pragma once

// Shared fixtures: corpus loading and oracles computed directly from
// concrete exploration, independent of the abstract machinery.

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pceks/concrete_machine.hpp"
#include "pceks/syntax.hpp"

namespace pceks::testing {

inline const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names{"p_id",   "p_spawnjoin", "p_par", "p_cas",
                                              "p_repl", "p_pool",      "p_fut", "p_barrier"};
  return names;
}

inline std::string corpus_path(const std::string& name) {
  return std::string(PCEKS_CORPUS_DIR) + "/" + name + ".pceks";
}

inline Program load(const std::string& name) { return parse_file(corpus_path(name)); }

/// Label pairs focused by two distinct live threads in one explored state.
inline std::set<std::pair<Label, Label>> concrete_mhp(const Exploration& x) {
  std::set<std::pair<Label, Label>> out;
  for (const auto& s : x.states)
    for (auto i = s.threads.begin(); i != s.threads.end(); ++i)
      for (auto j = std::next(i); j != s.threads.end(); ++j) {
        Label a = i->second.expr, b = j->second.expr;
        if (a != b) out.emplace(std::min(a, b), std::max(a, b));
      }
  return out;
}

/// Labels focused by two distinct live threads at once.
inline std::set<Label> concrete_self_mhp(const Exploration& x) {
  std::set<Label> out;
  for (const auto& s : x.states)
    for (auto i = s.threads.begin(); i != s.threads.end(); ++i)
      for (auto j = std::next(i); j != s.threads.end(); ++j)
        if (i->second.expr == j->second.expr) out.insert(i->second.expr);
  return out;
}

/// All labels of the subtree at `l`.
inline std::set<Label> subtree(const Program& p, Label l) {
  std::set<Label> out;
  for (Label i = l; i <= p.subtree_end(l); ++i) out.insert(i);
  return out;
}

/// First label whose rendering equals `text`, searching in pre-order.
inline Label find_label(const Program& p, const std::string& text, Label from = 0) {
  for (Label l = from; l < p.size(); ++l)
    if (to_sexpr(p, l) == text) return l;
  throw std::runtime_error("no subexpression " + text);
}

}  // namespace pceks::testing
