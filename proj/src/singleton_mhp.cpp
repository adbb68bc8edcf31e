#include "pceks/singleton_mhp.hpp"

#include <algorithm>
#include <deque>

#include "pceks/state_table.hpp"

namespace pceks {

const char* to_string(Count c) {
  switch (c) {
    case Count::Zero: return "0";
    case Count::One: return "1";
    case Count::Many: return "many";
  }
  return "?";
}

Count increment(Count c) { return c == Count::Zero ? Count::One : Count::Many; }

Count clip(std::size_t n) { return n == 0 ? Count::Zero : n == 1 ? Count::One : Count::Many; }

Count CountedState::count(const ATid& t) const {
  auto it = counts.find(t);
  return it == counts.end() ? Count::Zero : it->second;
}

bool leq(const CountedState& x, const CountedState& y) {
  if (!leq(x.base, y.base)) return false;
  for (const auto& [t, c] : x.counts)
    if (c > y.count(t)) return false;
  return true;
}

CountedState abstract_counted(const CState& s, const Policy& pol) {
  CountedState out{abstract_state(s, pol), {}};
  std::map<ATid, std::size_t> live;
  for (const auto& [t, c] : s.threads) ++live[alpha(t, pol)];
  for (const auto& [t, n] : live) out.counts.emplace(t, clip(n));
  return out;
}

CountedState counted_inject(const Program& p, const Policy& pol) {
  CountedState s{ainject(p, pol), {}};
  s.counts.emplace(root_atid(pol), Count::One);
  return s;
}

CountedState apply_counted(const CountedState& s, const Move& m) {
  CountedState n = s;
  auto& threads = n.base.threads;
  const bool strong = s.count(m.tid) == Count::One;
  if (strong) {
    auto it = threads.find(m.tid);
    if (it != threads.end()) it->second.erase(m.from);
    if (m.halts()) {
      threads.erase(m.tid);
      n.counts.erase(m.tid);
    }
  }
  if (m.to) threads[m.tid].insert(*m.to);
  if (m.spawned) {
    const ATid& child = m.spawned->first;
    n.counts[child] = increment(n.count(child));
    threads[child].insert(m.spawned->second);
  }
  for (const auto& [a, vs] : m.writes) join_into(n.base.store, a, vs);
  if (m.halts()) join_into(n.base.store, ATidAddr{m.tid}, m.result);
  std::erase_if(threads, [](const auto& kv) { return kv.second.empty(); });
  return n;
}

std::vector<CountedState> astep_counted(const Program& p, const Policy& pol, const CountedState& s) {
  std::vector<CountedState> out;
  for (const auto& m : moves(p, pol, s.base)) out.push_back(apply_counted(s, m));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CountedStateSet reach_counted(const Program& p, const Policy& pol, std::size_t max_states) {
  CountedStateSet r;
  StateTable<CountedState> table;
  table.insert(counted_inject(p, pol));
  std::deque<std::size_t> work{0};
  while (!work.empty()) {
    std::size_t i = work.front();
    work.pop_front();
    const CountedState s = table[i];
    std::vector<std::size_t> succ;
    for (const auto& m : moves(p, pol, s.base, &r.dead_ends)) {
      CountedState n = apply_counted(s, m);
      std::optional<std::size_t> id = table.find(n);
      if (!id) {
        if (table.size() >= max_states) {
          r.truncated = true;
          continue;
        }
        id = table.insert(std::move(n)).first;
        work.push_back(*id);
      }
      succ.push_back(*id);
    }
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    if (r.successors.size() <= i) r.successors.resize(i + 1);
    r.successors[i] = std::move(succ);
  }
  r.successors.resize(table.size());
  r.states = std::move(table).release();
  return r;
}

std::set<LabelPair> mhp_pairs(const AState& s) {
  std::vector<Label> labels;
  for (const auto& [t, cs] : s.threads)
    for (const auto& c : cs) labels.push_back(c.expr);
  std::set<LabelPair> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      if (labels[i] != labels[j]) out.emplace(std::min(labels[i], labels[j]), std::max(labels[i], labels[j]));
  return out;
}

std::set<LabelPair> mhp_pairs(const StateSet& r) {
  std::set<LabelPair> out;
  for (const auto& s : r.states) out.merge(mhp_pairs(s));
  return out;
}

std::set<LabelPair> mhp_pairs(const CountedStateSet& r) {
  std::set<LabelPair> out;
  for (const auto& s : r.states) out.merge(mhp_pairs(s.base));
  return out;
}

std::set<Label> self_mhp(const CountedStateSet& r) {
  std::set<Label> out;
  for (const auto& s : r.states) {
    std::map<Label, std::size_t> entries;
    for (const auto& [t, cs] : s.base.threads) {
      bool single = s.count(t) == Count::One;
      for (const auto& c : cs) {
        if (!single) out.insert(c.expr);
        ++entries[c.expr];
      }
    }
    for (const auto& [l, n] : entries)
      if (n > 1) out.insert(l);
  }
  return out;
}

std::set<Label> self_mhp(const StateSet& r) {
  std::set<Label> out;
  for (const auto& s : r.states)
    for (const auto& [t, cs] : s.threads)
      for (const auto& c : cs) out.insert(c.expr);
  return out;
}

}  // namespace pceks
