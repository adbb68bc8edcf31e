#include "pceks/abstract_machine.hpp"

#include <algorithm>
#include <deque>

#include "pceks/state_table.hpp"

namespace pceks {

AValueSet a_atomic_eval(const Program& p, Label ae, const AEnv& env, const AStore& store) {
  const Node& nd = p.node(ae);
  switch (nd.kind) {
    case NodeKind::Num: return {AnyNum{}};
    case NodeKind::Bool: return {ABool{nd.boolean}};
    case NodeKind::Var: {
      auto it = env.find(nd.var);
      if (it == env.end()) return {};
      auto cell = store.find(it->second);
      return cell == store.end() ? AValueSet{} : cell->second;
    }
    case NodeKind::Lam: {
      AClo c{ae, {}};
      for (Symbol v : p.free_vars(ae)) {
        auto it = env.find(v);
        if (it == env.end()) return {};
        c.env.emplace(v, it->second);
      }
      return {c};
    }
    default:
      return {};
  }
}

std::vector<ATid> new_tids(const Policy& pol, Label site, const AHist& recorded) {
  ATid t;
  t.kind = pol.tid;
  switch (pol.tid) {
    case TidStrategy::Global:
      return {t};
    case TidStrategy::SiteHist:
      t.site = site;
      t.hist = recorded;
      return {t};
    case TidStrategy::SitePool: {
      std::vector<ATid> out;
      t.site = site;
      for (std::size_t i = 0; i < std::max<std::size_t>(pol.pool_n, 1); ++i) {
        t.slot = static_cast<std::uint32_t>(i);
        out.push_back(t);
      }
      return out;
    }
  }
  return {t};
}

namespace {

const char* describe(const AValue& v) {
  switch (v.index()) {
    case 0: return "closure";
    case 1: return "boolean";
    case 2: return "number";
    case 3: return "continuation";
    case 4: return "thread id";
    default: return "address";
  }
}

const AValueSet kEmpty;

const AValueSet& cell(const AStore& store, const AAddr& a) {
  auto it = store.find(a);
  return it == store.end() ? kEmpty : it->second;
}

void deliver(const AKont& k, const AValueSet& vals, const AHist& h, Move m, std::vector<Move>& out) {
  if (std::holds_alternative<HaltKont>(k)) {
    m.to.reset();
    m.result = vals;
    out.push_back(std::move(m));
    return;
  }
  const auto& f = std::get<AFrame>(k);
  AAddr a = AVarAddr{f.var, h};
  AEnv env = f.env;
  env.insert_or_assign(f.var, a);
  m.writes.emplace_back(a, vals);
  m.to = AContext{f.body, std::move(env), f.next, h};
  out.push_back(std::move(m));
}

/// Delivers `vals` to every continuation stored at `ka`.
void return_to(const AStore& store, const AAddr& ka, const AValueSet& vals, const AHist& h,
               const Move& base, std::vector<Move>& out) {
  for (const auto& v : cell(store, ka))
    if (const auto* kv = std::get_if<AKontVal>(&v)) deliver(kv->k, vals, h, base, out);
}

/// May two concrete values with these abstractions be equal / differ?
bool may_equal(const AValue& x, const AValue& y) { return x == y; }

bool may_differ(const AValue& x, const AValue& y) {
  if (x.index() != y.index()) return true;
  if (std::holds_alternative<ABool>(x)) return x != y;
  return true;
}

}  // namespace

void context_moves(const Program& p, const Policy& pol, const AContext& c, const AStore& store,
                   std::vector<Move>& out, std::set<DeadEnd>* dead) {
  const Node& nd = p.node(c.expr);
  auto dead_end = [&](std::string kind) {
    if (dead) dead->insert({c.expr, std::move(kind)});
  };
  Move base;
  base.from = c;

  switch (nd.kind) {
    case NodeKind::Let: {
      AAddr ka = AKontAddr{c.expr, c.hist};
      Move m = base;
      m.writes.emplace_back(ka, AValueSet{AKontVal{AFrame{nd.var, nd.kids[1], c.env, c.kont}}});
      m.to = AContext{nd.kids[0], c.env, ka, c.hist};
      out.push_back(std::move(m));
      return;
    }
    case NodeKind::Lam:
    case NodeKind::Var:
    case NodeKind::Num:
    case NodeKind::Bool: {
      AValueSet vals = a_atomic_eval(p, c.expr, c.env, store);
      if (vals.empty()) return;
      return_to(store, c.kont, vals, c.hist, base, out);
      return;
    }
    case NodeKind::App: {
      AHist h = arecord(p, c.expr, c.hist, pol.k);
      AValueSet fs = a_atomic_eval(p, nd.kids[0], c.env, store);
      std::vector<AValueSet> args;
      for (std::size_t i = 1; i < nd.kids.size(); ++i) {
        args.push_back(a_atomic_eval(p, nd.kids[i], c.env, store));
        if (args.back().empty()) return;
      }
      for (const auto& f : fs) {
        if (const auto* clo = std::get_if<AClo>(&f)) {
          const Node& lam = p.node(clo->lam);
          if (lam.params.size() != args.size()) {
            dead_end("arity mismatch");
            continue;
          }
          Move m = base;
          AEnv env = clo->env;
          for (std::size_t i = 0; i < args.size(); ++i) {
            AAddr a = AVarAddr{lam.params[i], h};
            env.insert_or_assign(lam.params[i], a);
            m.writes.emplace_back(a, args[i]);
          }
          m.to = AContext{lam.kids[0], std::move(env), c.kont, h};
          out.push_back(std::move(m));
        } else if (const auto* av = std::get_if<AAddrVal>(&f)) {
          if (args.size() != 1) {
            dead_end("continuation arity");
            continue;
          }
          return_to(store, av->a, args[0], h, base, out);
        } else if (const auto* kv = std::get_if<AKontVal>(&f)) {
          if (args.size() != 1) {
            dead_end("continuation arity");
            continue;
          }
          deliver(kv->k, args[0], h, base, out);
        } else {
          dead_end(std::string("apply ") + describe(f));
        }
      }
      return;
    }
    case NodeKind::CallCC: {
      AHist h = arecord(p, c.expr, c.hist, pol.k);
      for (const auto& f : a_atomic_eval(p, nd.kids[0], c.env, store)) {
        const auto* clo = std::get_if<AClo>(&f);
        if (!clo) {
          dead_end(std::string("callcc ") + describe(f));
          continue;
        }
        const Node& lam = p.node(clo->lam);
        if (lam.params.size() != 1) {
          dead_end("callcc arity");
          continue;
        }
        Move m = base;
        AAddr a = AVarAddr{lam.params[0], h};
        AEnv env = clo->env;
        env.insert_or_assign(lam.params[0], a);
        m.writes.emplace_back(a, AValueSet{AAddrVal{c.kont}});
        m.to = AContext{lam.kids[0], std::move(env), c.kont, h};
        out.push_back(std::move(m));
      }
      return;
    }
    case NodeKind::SetBang: {
      auto it = c.env.find(nd.var);
      if (it == c.env.end()) return;
      AValueSet vals = a_atomic_eval(p, nd.kids[0], c.env, store);
      if (vals.empty()) return;
      Move m = base;
      m.writes.emplace_back(it->second, std::move(vals));
      return_to(store, c.kont, {ABool{false}}, c.hist, m, out);
      return;
    }
    case NodeKind::If: {
      AValueSet cond = a_atomic_eval(p, nd.kids[0], c.env, store);
      bool then_arm = std::any_of(cond.begin(), cond.end(),
                                  [](const AValue& v) { return v != AValue{ABool{false}}; });
      bool else_arm = cond.count(ABool{false}) > 0;
      for (auto [taken, arm] : {std::pair{then_arm, nd.kids[1]}, std::pair{else_arm, nd.kids[2]}}) {
        if (!taken) continue;
        Move m = base;
        m.to = AContext{arm, c.env, c.kont, c.hist};
        out.push_back(std::move(m));
      }
      return;
    }
    case NodeKind::Cas: {
      auto it = c.env.find(nd.var);
      if (it == c.env.end()) return;
      const AValueSet& cur = cell(store, it->second);
      AValueSet olds = a_atomic_eval(p, nd.kids[0], c.env, store);
      AValueSet news = a_atomic_eval(p, nd.kids[1], c.env, store);
      if (cur.empty() || olds.empty() || news.empty()) return;
      bool eq = false, ne = false;
      for (const auto& x : cur)
        for (const auto& y : olds) {
          eq |= may_equal(x, y);
          ne |= may_differ(x, y);
        }
      if (eq) {
        Move m = base;
        m.writes.emplace_back(it->second, news);
        return_to(store, c.kont, {ABool{true}}, c.hist, m, out);
      }
      if (ne) return_to(store, c.kont, {ABool{false}}, c.hist, base, out);
      return;
    }
    case NodeKind::Spawn: {
      AHist h = arecord(p, c.expr, c.hist, pol.k);
      for (const ATid& child : new_tids(pol, c.expr, h)) {
        Move m = base;
        m.spawned.emplace(child, AContext{nd.kids[0], c.env, ahalt_addr(), {}});
        return_to(store, c.kont, {ATidVal{child}}, h, m, out);
      }
      return;
    }
    case NodeKind::Join: {
      AHist h = arecord(p, c.expr, c.hist, pol.k);
      for (const auto& v : a_atomic_eval(p, nd.kids[0], c.env, store)) {
        const auto* tv = std::get_if<ATidVal>(&v);
        if (!tv) {
          dead_end(std::string("join ") + describe(v));
          continue;
        }
        const AValueSet& done = cell(store, ATidAddr{tv->t});
        if (done.empty()) continue;  // blocked
        return_to(store, c.kont, done, h, base, out);
      }
      return;
    }
  }
}

std::vector<Move> moves(const Program& p, const Policy& pol, const AState& s, std::set<DeadEnd>* dead) {
  std::vector<Move> out;
  for (const auto& [tid, ctxs] : s.threads) {
    for (const auto& c : ctxs) {
      std::size_t first = out.size();
      context_moves(p, pol, c, s.store, out, dead);
      for (std::size_t i = first; i < out.size(); ++i) out[i].tid = tid;
    }
  }
  return out;
}

std::vector<ASeqStep> astep_seq(const Program& p, const Policy& pol, const AContext& c,
                                const AStore& store) {
  NodeKind kind = p.node(c.expr).kind;
  if (kind == NodeKind::Spawn || kind == NodeKind::Join) return {};
  std::vector<Move> ms;
  context_moves(p, pol, c, store, ms);
  std::vector<ASeqStep> out;
  for (auto& m : ms) {
    ASeqStep st{std::move(m.to), std::move(m.result), store};
    for (const auto& [a, vs] : m.writes) join_into(st.store, a, vs);
    out.push_back(std::move(st));
  }
  return out;
}

AState ainject(const Program& p, const Policy& pol) {
  if (!p.free_vars(p.root()).empty()) throw ProgramError("program is not closed");
  AState s;
  s.threads[root_atid(pol)].insert(AContext{p.root(), {}, ahalt_addr(), {}});
  s.store[ahalt_addr()].insert(AKontVal{HaltKont{}});
  return s;
}

AState apply_weak(const AState& s, const Move& m) {
  AState n = s;
  if (m.to) n.threads[m.tid].insert(*m.to);
  if (m.spawned) n.threads[m.spawned->first].insert(m.spawned->second);
  for (const auto& [a, vs] : m.writes) join_into(n.store, a, vs);
  if (m.halts()) join_into(n.store, ATidAddr{m.tid}, m.result);
  return n;
}

std::vector<AState> astep(const Program& p, const Policy& pol, const AState& s) {
  std::vector<AState> out;
  for (const auto& m : moves(p, pol, s)) out.push_back(apply_weak(s, m));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

StateSet reach(const Program& p, const Policy& pol, std::size_t max_states) {
  StateSet r;
  StateTable<AState> table;
  table.insert(ainject(p, pol));
  std::deque<std::size_t> work{0};
  while (!work.empty()) {
    std::size_t i = work.front();
    work.pop_front();
    const AState s = table[i];
    std::vector<std::size_t> succ;
    for (const auto& m : moves(p, pol, s, &r.dead_ends)) {
      AState n = apply_weak(s, m);
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

KleeneResult lfp_transfer(const Program& p, const Policy& pol, std::size_t max_states) {
  KleeneResult r;
  std::set<AState> current;
  const AState init = ainject(p, pol);
  for (;;) {
    std::set<AState> next = current;
    next.insert(init);
    for (const auto& s : current)
      for (auto& n : astep(p, pol, s)) next.insert(std::move(n));
    r.chain_sizes.push_back(next.size());
    bool stable = next.size() == current.size();
    current = std::move(next);
    if (stable) break;
    if (current.size() > max_states) {
      r.truncated = true;
      break;
    }
  }
  r.states.assign(current.begin(), current.end());
  return r;
}

bool same_states(std::vector<AState> a, std::vector<AState> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return a == b;
}

}  // namespace pceks
