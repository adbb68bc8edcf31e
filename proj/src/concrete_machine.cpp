#include "pceks/concrete_machine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace pceks {

Hist record(const Program& p, Label expr, const Hist& h) {
  switch (p.node(expr).kind) {
    case NodeKind::App:
    case NodeKind::CallCC:
    case NodeKind::Spawn:
    case NodeKind::Join: {
      Hist out;
      out.sites.reserve(h.sites.size() + 1);
      out.sites.push_back(expr);
      out.sites.insert(out.sites.end(), h.sites.begin(), h.sites.end());
      return out;
    }
    default:
      return h;
  }
}

Tid root_tid() { return Tid{0, kRootSite, {}}; }

Addr halt_addr() { return KontAddr{kRootSite, {}, 0}; }

CState inject(const Program& p) {
  if (!p.free_vars(p.root()).empty())
    throw ProgramError("program is not closed; free variables: " +
                       [&] {
                         std::string s;
                         for (const auto& v : free_vars(p, p.root())) s += (s.empty() ? "" : " ") + v;
                         return s;
                       }());
  CState s;
  s.threads.emplace(root_tid(), Context{p.root(), {}, halt_addr(), {}});
  s.store.emplace(halt_addr(), KontVal{HaltKont{}});
  s.next_seq = 1;
  return s;
}

Value atomic_eval(const Program& p, Label ae, const Env& env, const Store& store) {
  const Node& nd = p.node(ae);
  switch (nd.kind) {
    case NodeKind::Num: return Num{nd.number};
    case NodeKind::Bool: return Bool{nd.boolean};
    case NodeKind::Var: {
      auto it = env.find(nd.var);
      if (it == env.end()) throw EvalError("unbound variable " + p.name(nd.var));
      auto cell = store.find(it->second);
      if (cell == store.end()) throw EvalError("dangling address for " + p.name(nd.var));
      return cell->second;
    }
    case NodeKind::Lam: {
      Clo c{ae, {}};
      for (Symbol v : p.free_vars(ae)) {
        auto it = env.find(v);
        if (it == env.end()) throw EvalError("unbound variable " + p.name(v));
        c.env.emplace(v, it->second);
      }
      return c;
    }
    default:
      throw EvalError(std::string("not an atomic expression: ") + to_string(nd.kind));
  }
}

namespace {

bool truthy(const Value& v) {
  const auto* b = std::get_if<Bool>(&v);
  return !(b && !b->b);
}

const char* describe(const Value& v) {
  switch (v.index()) {
    case 0: return "closure";
    case 1: return "boolean";
    case 2: return "number";
    case 3: return "continuation";
    case 4: return "thread id";
    default: return "address";
  }
}

/// Delivers `value` to continuation `k`.
SeqResult deliver(const Kont& k, Value value, const Hist& h, Store store, std::uint64_t seq) {
  if (std::holds_alternative<HaltKont>(k)) return Finish{std::move(value), std::move(store), seq};
  const auto& f = std::get<Frame>(k);
  Addr a = VarAddr{f.var, h, seq++};
  Env env = f.env;
  env.insert_or_assign(f.var, a);
  store.insert_or_assign(a, std::move(value));
  return Advance{Context{f.body, std::move(env), f.next, h}, std::move(store), seq};
}

const Kont& kont_at(const Store& store, const Addr& a) {
  auto it = store.find(a);
  if (it == store.end()) throw EvalError("dangling continuation address");
  const auto* kv = std::get_if<KontVal>(&it->second);
  if (!kv) throw EvalError("continuation address holds a non-continuation");
  return kv->k;
}

SeqResult return_to(const Addr& ka, Value value, const Hist& h, Store store, std::uint64_t seq) {
  const Kont k = kont_at(store, ka);
  return deliver(k, std::move(value), h, std::move(store), seq);
}

/// Applies a continuation value (an address holding a continuation, or the
/// continuation itself) to one argument.
SeqResult invoke_continuation(const Value& f, Value arg, const Hist& h, const Store& store,
                              std::uint64_t seq) {
  if (const auto* av = std::get_if<AddrVal>(&f)) {
    auto it = store.find(av->a);
    if (it == store.end()) return Stuck{"continuation address is dangling"};
    const auto* kv = std::get_if<KontVal>(&it->second);
    if (!kv) return Stuck{"applied address does not hold a continuation"};
    return deliver(kv->k, std::move(arg), h, store, seq);
  }
  return deliver(std::get<KontVal>(f).k, std::move(arg), h, store, seq);
}

}  // namespace

SeqResult step_seq(const Program& p, const Context& c, const Store& store,
                   std::uint64_t next_seq) {
  const Node& nd = p.node(c.expr);
  std::uint64_t seq = next_seq;
  switch (nd.kind) {
    case NodeKind::Let: {
      Addr ka = KontAddr{c.expr, c.hist, seq++};
      Store s = store;
      s.insert_or_assign(ka, KontVal{Frame{nd.var, nd.kids[1], c.env, c.kont}});
      return Advance{Context{nd.kids[0], c.env, ka, c.hist}, std::move(s), seq};
    }
    case NodeKind::Lam:
    case NodeKind::Var:
    case NodeKind::Num:
    case NodeKind::Bool: {
      const Kont& k = kont_at(store, c.kont);
      if (std::holds_alternative<HaltKont>(k)) return NotSequential{};
      return deliver(k, atomic_eval(p, c.expr, c.env, store), c.hist, store, seq);
    }
    case NodeKind::App: {
      Hist h = record(p, c.expr, c.hist);
      Value f = atomic_eval(p, nd.kids[0], c.env, store);
      std::vector<Value> args;
      for (std::size_t i = 1; i < nd.kids.size(); ++i)
        args.push_back(atomic_eval(p, nd.kids[i], c.env, store));
      if (const auto* clo = std::get_if<Clo>(&f)) {
        const Node& lam = p.node(clo->lam);
        if (lam.params.size() != args.size())
          return Stuck{"arity mismatch: expected " + std::to_string(lam.params.size()) +
                       " argument(s), got " + std::to_string(args.size())};
        Store s = store;
        Env env = clo->env;
        for (std::size_t i = 0; i < args.size(); ++i) {
          Addr a = VarAddr{lam.params[i], h, seq++};
          env.insert_or_assign(lam.params[i], a);
          s.insert_or_assign(a, std::move(args[i]));
        }
        return Advance{Context{lam.kids[0], std::move(env), c.kont, std::move(h)}, std::move(s),
                       seq};
      }
      if (std::holds_alternative<AddrVal>(f) || std::holds_alternative<KontVal>(f)) {
        if (args.size() != 1) return Stuck{"continuation applied to " + std::to_string(args.size()) + " arguments"};
        return invoke_continuation(f, std::move(args[0]), h, store, seq);
      }
      return Stuck{std::string("cannot apply a ") + describe(f)};
    }
    case NodeKind::CallCC: {
      Hist h = record(p, c.expr, c.hist);
      Value f = atomic_eval(p, nd.kids[0], c.env, store);
      const auto* clo = std::get_if<Clo>(&f);
      if (!clo) return Stuck{std::string("callcc expects a procedure, got a ") + describe(f)};
      const Node& lam = p.node(clo->lam);
      if (lam.params.size() != 1) return Stuck{"callcc procedure must take one argument"};
      Addr a = VarAddr{lam.params[0], h, seq++};
      Store s = store;
      s.insert_or_assign(a, AddrVal{c.kont});
      Env env = clo->env;
      env.insert_or_assign(lam.params[0], a);
      return Advance{Context{lam.kids[0], std::move(env), c.kont, std::move(h)}, std::move(s), seq};
    }
    case NodeKind::SetBang: {
      auto it = c.env.find(nd.var);
      if (it == c.env.end()) throw EvalError("unbound variable " + p.name(nd.var));
      Store s = store;
      s.insert_or_assign(it->second, atomic_eval(p, nd.kids[0], c.env, store));
      return return_to(c.kont, Bool{false}, c.hist, std::move(s), seq);
    }
    case NodeKind::If: {
      Value cond = atomic_eval(p, nd.kids[0], c.env, store);
      Label arm = truthy(cond) ? nd.kids[1] : nd.kids[2];
      return Advance{Context{arm, c.env, c.kont, c.hist}, store, seq};
    }
    case NodeKind::Cas: {
      auto it = c.env.find(nd.var);
      if (it == c.env.end()) throw EvalError("unbound variable " + p.name(nd.var));
      auto cell = store.find(it->second);
      if (cell == store.end()) throw EvalError("dangling address for " + p.name(nd.var));
      Value old = atomic_eval(p, nd.kids[0], c.env, store);
      if (cell->second == old) {
        Store s = store;
        s.insert_or_assign(it->second, atomic_eval(p, nd.kids[1], c.env, store));
        return return_to(c.kont, Bool{true}, c.hist, std::move(s), seq);
      }
      return return_to(c.kont, Bool{false}, c.hist, store, seq);
    }
    case NodeKind::Spawn:
    case NodeKind::Join:
      return NotSequential{};
  }
  return NotSequential{};
}

namespace {

/// Installs the outcome of a step of thread `t` into a copy of `s`.
void commit(CState& out, const Tid& t, SeqResult r) {
  if (auto* adv = std::get_if<Advance>(&r)) {
    out.threads.insert_or_assign(t, std::move(adv->next));
    out.store = std::move(adv->store);
    out.next_seq = adv->next_seq;
  } else if (auto* fin = std::get_if<Finish>(&r)) {
    out.threads.erase(t);
    out.store = std::move(fin->store);
    out.store.insert_or_assign(TidAddr{t}, std::move(fin->result));
    out.next_seq = fin->next_seq;
  }
}

}  // namespace

ConcurrentStep step_concurrent(const Program& p, const CState& s) {
  ConcurrentStep out;
  for (const auto& [tid, ctx] : s.threads) {
    const Node& nd = p.node(ctx.expr);
    try {
      if (nd.kind == NodeKind::Spawn) {
        std::uint64_t seq = s.next_seq;
        Hist h = record(p, ctx.expr, ctx.hist);
        Tid child{seq++, ctx.expr, h};
        SeqResult r = return_to(ctx.kont, TidVal{child}, h, s.store, seq);
        CState next = s;
        commit(next, tid, std::move(r));
        next.threads.emplace(child, Context{nd.kids[0], ctx.env, halt_addr(), {}});
        out.successors.emplace_back(tid, std::move(next));
        continue;
      }
      if (nd.kind == NodeKind::Join) {
        Value v = atomic_eval(p, nd.kids[0], ctx.env, s.store);
        const auto* tv = std::get_if<TidVal>(&v);
        if (!tv) {
          out.stuck.push_back({tid, ctx.expr, std::string("join expects a thread id, got a ") + describe(v)});
          continue;
        }
        auto done = s.store.find(TidAddr{tv->t});
        if (done == s.store.end()) continue;  // blocked until the thread halts
        Hist h = record(p, ctx.expr, ctx.hist);
        CState next = s;
        commit(next, tid, return_to(ctx.kont, done->second, h, s.store, s.next_seq));
        out.successors.emplace_back(tid, std::move(next));
        continue;
      }
      SeqResult r = step_seq(p, ctx, s.store, s.next_seq);
      if (std::holds_alternative<NotSequential>(r)) {
        // An atomic expression returning to the halt continuation.
        CState next = s;
        next.threads.erase(tid);
        next.store.insert_or_assign(TidAddr{tid}, atomic_eval(p, ctx.expr, ctx.env, s.store));
        out.successors.emplace_back(tid, std::move(next));
      } else if (const auto* st = std::get_if<Stuck>(&r)) {
        out.stuck.push_back({tid, ctx.expr, st->reason});
      } else {
        CState next = s;
        commit(next, tid, std::move(r));
        out.successors.emplace_back(tid, std::move(next));
      }
    } catch (const EvalError& e) {
      out.stuck.push_back({tid, ctx.expr, e.what()});
    }
  }
  return out;
}

std::vector<std::size_t> Exploration::finals() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (expanded[i] && !has_successor[i]) out.push_back(i);
  return out;
}

Exploration explore(const Program& p, std::size_t max_states, std::size_t max_depth) {
  Exploration x;
  std::unordered_multimap<std::size_t, std::size_t> index;

  auto find_or_add = [&](CState&& s, std::size_t depth) -> std::optional<std::pair<std::size_t, bool>> {
    std::size_t h = hash_value(s);
    auto [lo, hi] = index.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (x.states[it->second] == s) return std::pair{it->second, false};
    if (x.states.size() >= max_states) return std::nullopt;
    std::size_t id = x.states.size();
    x.states.push_back(std::move(s));
    x.depth.push_back(depth);
    x.expanded.push_back(false);
    x.has_successor.push_back(false);
    index.emplace(h, id);
    return std::pair{id, true};
  };

  std::deque<std::size_t> queue;
  if (max_states == 0) {
    x.truncated = true;
    return x;
  }
  find_or_add(inject(p), 0);
  queue.push_back(0);

  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    ConcurrentStep step = step_concurrent(p, x.states[i]);
    x.has_successor[i] = !step.successors.empty();
    if (x.depth[i] >= max_depth) {
      if (!step.successors.empty()) x.truncated = true;
      continue;
    }
    x.expanded[i] = true;
    for (const auto& st : step.stuck) x.stuck.push_back({i, st.tid.seq, st.label, st.reason});
    for (auto& [tid, next] : step.successors) {
      auto r = find_or_add(std::move(next), x.depth[i] + 1);
      if (!r) {
        x.truncated = true;
        continue;
      }
      x.edges.push_back({i, r->first, tid.seq});
      if (r->second) queue.push_back(r->first);
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

std::string site_str(Label l) { return l == kRootSite ? "root" : std::to_string(l); }

std::string hist_str(const Hist& h) {
  std::string s = "(h";
  for (Label l : h.sites) s += " " + std::to_string(l);
  return s + ")";
}

std::string tid_str(const Tid& t) {
  return "(tid " + std::to_string(t.seq) + " " + site_str(t.site) + " " + hist_str(t.birth) + ")";
}

std::string addr_str(const Program& p, const Addr& a) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarAddr>)
          return "(var-addr " + p.name(x.var) + " " + std::to_string(x.seq) + " " + hist_str(x.birth) + ")";
        else if constexpr (std::is_same_v<T, KontAddr>)
          return "(kont-addr " + site_str(x.site) + " " + std::to_string(x.seq) + " " + hist_str(x.birth) + ")";
        else
          return "(tid-addr " + tid_str(x.tid) + ")";
      },
      a);
}

std::string env_str(const Program& p, const Env& env) {
  std::vector<std::pair<std::string, const Addr*>> items;
  for (const auto& [v, a] : env) items.emplace_back(p.name(v), &a);
  std::sort(items.begin(), items.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  std::string s = "(env";
  for (const auto& [n, a] : items) s += " (" + n + " " + addr_str(p, *a) + ")";
  return s + ")";
}

std::string kont_str(const Program& p, const Kont& k) {
  if (std::holds_alternative<HaltKont>(k)) return "halt";
  const auto& f = std::get<Frame>(k);
  return "(frame " + p.name(f.var) + " " + std::to_string(f.body) + " " + env_str(p, f.env) + " " +
         addr_str(p, f.next) + ")";
}

std::string value_str(const Program& p, const Value& v) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Clo>)
          return "(clo " + std::to_string(x.lam) + " " + env_str(p, x.env) + ")";
        else if constexpr (std::is_same_v<T, Bool>)
          return x.b ? "#t" : "#f";
        else if constexpr (std::is_same_v<T, Num>)
          return "(num " + std::to_string(x.n) + ")";
        else if constexpr (std::is_same_v<T, KontVal>)
          return "(kont " + kont_str(p, x.k) + ")";
        else if constexpr (std::is_same_v<T, TidVal>)
          return "(tid-val " + tid_str(x.t) + ")";
        else
          return "(addr-val " + addr_str(p, x.a) + ")";
      },
      v);
}

std::uint64_t addr_seq(const Addr& a) {
  return std::visit(
      [](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, TidAddr>)
          return x.tid.seq;
        else
          return x.seq;
      },
      a);
}

}  // namespace

std::string dump(const Program& p, const Value& v) { return value_str(p, v); }

std::string dump(const Program& p, const CState& s) {
  std::string out = "(state (threads";
  for (const auto& [t, c] : s.threads)  // map order is tid seq order
    out += " (" + tid_str(t) + " (ctx " + std::to_string(c.expr) + " " + env_str(p, c.env) + " " +
           addr_str(p, c.kont) + " " + hist_str(c.hist) + "))";
  out += ") (store";
  std::vector<const std::pair<const Addr, Value>*> cells;
  for (const auto& cell : s.store) cells.push_back(&cell);
  std::stable_sort(cells.begin(), cells.end(), [](const auto* l, const auto* r) {
    auto ls = addr_seq(l->first), rs = addr_seq(r->first);
    if (ls != rs) return ls < rs;
    return l->first.index() < r->first.index();
  });
  for (const auto* cell : cells)
    out += " (" + addr_str(p, cell->first) + " " + value_str(p, cell->second) + ")";
  return out + "))";
}

std::string to_dot(const Program& p, const Exploration& x) {
  (void)p;
  std::ostringstream os;
  os << "digraph explore {\n";
  for (std::size_t i = 0; i < x.states.size(); ++i) {
    os << "  s" << i << " [label=\"" << i << " (" << x.states[i].threads.size() << " threads)\"";
    if (x.expanded[i] && !x.has_successor[i]) os << ", shape=doublecircle";
    os << "];\n";
  }
  for (const auto& e : x.edges) os << "  s" << e.from << " -> s" << e.to << " [label=\"t" << e.tid_seq << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace pceks
