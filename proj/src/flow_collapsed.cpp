#include "pceks/flow_collapsed.hpp"

#include <algorithm>
#include <limits>

namespace pceks {

namespace {

void scan(const Program& p, Label l, const AContext& c, const AStore& store,
          std::vector<Symbol>& shadowed, std::set<FlowFact>& out) {
  const Node& nd = p.node(l);
  if (is_aexp(nd.kind)) {
    bool ok = true;
    for (Symbol v : p.free_vars(l)) {
      if (!c.env.count(v) || std::find(shadowed.begin(), shadowed.end(), v) != shadowed.end()) {
        ok = false;
        break;
      }
    }
    if (ok)
      for (auto& v : a_atomic_eval(p, l, c.env, store)) out.insert(FlowFact{l, std::move(v)});
  }
  const std::size_t mark = shadowed.size();
  switch (nd.kind) {
    case NodeKind::Lam:
      shadowed.insert(shadowed.end(), nd.params.begin(), nd.params.end());
      scan(p, nd.kids[0], c, store, shadowed, out);
      break;
    case NodeKind::Let:
      scan(p, nd.kids[0], c, store, shadowed, out);
      shadowed.push_back(nd.var);
      scan(p, nd.kids[1], c, store, shadowed, out);
      break;
    default:
      for (Label k : nd.kids) scan(p, k, c, store, shadowed, out);
  }
  shadowed.resize(mark);
}

void flows_into(const Program& p, const AState& s, std::set<FlowFact>& out) {
  std::vector<Symbol> shadowed;
  for (const auto& [t, cs] : s.threads)
    for (const auto& c : cs) scan(p, c.expr, c, s.store, shadowed, out);
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_add_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  return __builtin_mul_overflow(a, b, &r) ? std::numeric_limits<std::uint64_t>::max() : r;
}

std::uint64_t sat_pow(std::uint64_t base, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) r = sat_mul(r, base);
  return r;
}

}  // namespace

std::set<FlowFact> flows_to(const Program& p, const AState& s) {
  std::set<FlowFact> out;
  flows_into(p, s, out);
  return out;
}

std::set<FlowFact> flows_to(const Program& p, const std::vector<AState>& states) {
  std::set<FlowFact> out;
  for (const auto& s : states) flows_into(p, s, out);
  return out;
}

std::set<FlowFact> flows_to(const Program& p, const CollapsedState& c) { return flows_to(p, c.state_); }

std::size_t CollapsedState::context_count() const {
  std::size_t n = 0;
  for (const auto& [t, cs] : state_.threads) n += cs.size();
  return n;
}

CollapsedState collapse(const std::vector<AState>& states) {
  CollapsedState c;
  for (const auto& s : states) join_into(c.state_, s);
  return c;
}

CollapsedState lfp_collapsed(const Program& p, const Policy& pol) {
  CollapsedState c;
  c.state_ = ainject(p, pol);
  for (;;) {
    ++c.passes_;
    AState next = c.state_;
    // Successors are computed from the snapshot, then joined.
    for (const auto& m : moves(p, pol, c.state_, &c.dead_)) {
      if (m.to) next.threads[m.tid].insert(*m.to);
      if (m.spawned) next.threads[m.spawned->first].insert(m.spawned->second);
      for (const auto& [a, vs] : m.writes) join_into(next.store, a, vs);
      if (m.halts()) join_into(next.store, ATidAddr{m.tid}, m.result);
    }
    if (next == c.state_) break;
    c.state_ = std::move(next);
  }
  return c;
}

bool leq(const CollapsedState& x, const CollapsedState& y) { return leq(x.state_, y.state_); }
bool leq(const AState& x, const CollapsedState& y) { return leq(x, y.state_); }

std::string to_sexpr(const Program& p, const CollapsedState& c) { return to_sexpr(p, c.state_); }

BoundBreakdown bound_breakdown(const Program& p, const Policy& pol) {
  std::uint64_t sites = 0, spawns = 0, lets = 0;
  std::set<Symbol> binders;
  for (const Node& nd : p.nodes()) {
    switch (nd.kind) {
      case NodeKind::Spawn: ++spawns; [[fallthrough]];
      case NodeKind::App:
      case NodeKind::CallCC:
      case NodeKind::Join: ++sites; break;
      case NodeKind::Let:
        ++lets;
        binders.insert(nd.var);
        break;
      case NodeKind::Lam: binders.insert(nd.params.begin(), nd.params.end()); break;
      default: break;
    }
  }

  BoundBreakdown b;
  for (std::size_t i = 0; i <= pol.k; ++i) b.hists = sat_add(b.hists, sat_pow(sites, i));
  const std::uint64_t H = b.hists;
  switch (pol.tid) {
    case TidStrategy::Global: b.tids = 1; break;
    case TidStrategy::SiteHist: b.tids = sat_add(1, sat_mul(spawns, H)); break;
    case TidStrategy::SitePool:
      b.tids = sat_add(1, sat_mul(spawns, std::max<std::size_t>(pol.pool_n, 1)));
      break;
  }
  const std::uint64_t kont_addrs = sat_mul(lets + 1, H);
  b.addrs = sat_add(sat_add(sat_mul(binders.size(), H), kont_addrs), b.tids);

  std::uint64_t closures = 0, frames = 1;  // the halt continuation
  for (Label l = 0; l < p.size(); ++l) {
    const Node& nd = p.node(l);
    std::uint64_t envs = sat_pow(H, p.scope(l).size());
    b.contexts = sat_add(b.contexts, sat_mul(sat_mul(envs, kont_addrs), H));
    if (nd.kind == NodeKind::Lam) closures = sat_add(closures, sat_pow(H, p.free_vars(l).size()));
    if (nd.kind == NodeKind::Let) frames = sat_add(frames, sat_mul(envs, kont_addrs));
  }
  b.values = sat_add(sat_add(sat_add(closures, 3), sat_add(frames, b.tids)), b.addrs);
  b.bound = sat_add(sat_mul(b.tids, b.contexts), sat_mul(b.addrs, b.values));
  return b;
}

std::uint64_t iteration_bound(const Program& p, const Policy& pol) { return bound_breakdown(p, pol).bound; }

}  // namespace pceks
