#pragma once

// Concrete nondeterministic machine for the concurrent language: a set of
// CEK-style thread contexts sharing one store, with continuations allocated in
// the store. Used as the ground truth that the abstract interpreters are
// checked against.

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pceks/hash.hpp"
#include "pceks/syntax.hpp"

namespace pceks {

/// Thrown for programs the machine refuses to run (open terms).
class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when atomic evaluation hits an unbound variable or dangling address.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Call-site history, most recent site first.
struct Hist {
  std::vector<Label> sites;
  auto operator<=>(const Hist&) const = default;
  friend std::size_t hash_value(const Hist& h) { return hash_value(h.sites); }
};

/// Prepends the label of `expr` when it is an application, callcc, spawn, or
/// join; other expressions leave the history unchanged.
Hist record(const Program& p, Label expr, const Hist& h);

struct Tid {
  std::uint64_t seq = 0;
  Label site = kRootSite;
  Hist birth;
  auto operator<=>(const Tid&) const = default;
  friend std::size_t hash_value(const Tid& t) {
    std::size_t s = hash_value(t.seq);
    hash_combine(s, t.site);
    hash_combine(s, t.birth);
    return s;
  }
};

struct VarAddr {
  Symbol var = 0;
  Hist birth;
  std::uint64_t seq = 0;
  auto operator<=>(const VarAddr&) const = default;
  friend std::size_t hash_value(const VarAddr& a) {
    std::size_t s = hash_value(a.seq);
    hash_combine(s, a.var);
    hash_combine(s, a.birth);
    return s;
  }
};

struct KontAddr {
  Label site = kRootSite;
  Hist birth;
  std::uint64_t seq = 0;
  auto operator<=>(const KontAddr&) const = default;
  friend std::size_t hash_value(const KontAddr& a) {
    std::size_t s = hash_value(a.seq);
    hash_combine(s, a.site);
    hash_combine(s, a.birth);
    return s;
  }
};

/// The cell holding a thread's return value.
struct TidAddr {
  Tid tid;
  auto operator<=>(const TidAddr&) const = default;
  friend std::size_t hash_value(const TidAddr& a) { return hash_value(a.tid) ^ 0x51ULL; }
};

using Addr = std::variant<VarAddr, KontAddr, TidAddr>;
using Env = std::map<Symbol, Addr>;

struct Frame {
  Symbol var = 0;
  Label body = 0;
  Env env;
  Addr next;
  auto operator<=>(const Frame&) const = default;
  friend std::size_t hash_value(const Frame& f) {
    std::size_t s = hash_value(f.var);
    hash_combine(s, f.body);
    hash_combine(s, f.env);
    hash_combine(s, f.next);
    return s;
  }
};

struct HaltKont {
  auto operator<=>(const HaltKont&) const = default;
  friend std::size_t hash_value(const HaltKont&) { return 0x4a17ULL; }
};

using Kont = std::variant<Frame, HaltKont>;

struct Clo {
  Label lam = 0;
  Env env;
  auto operator<=>(const Clo&) const = default;
  friend std::size_t hash_value(const Clo& c) {
    std::size_t s = hash_value(c.lam);
    hash_combine(s, c.env);
    return s;
  }
};

struct Bool {
  bool b = false;
  auto operator<=>(const Bool&) const = default;
  friend std::size_t hash_value(const Bool& v) { return v.b ? 0xb1ULL : 0xb0ULL; }
};

struct Num {
  std::int64_t n = 0;
  auto operator<=>(const Num&) const = default;
  friend std::size_t hash_value(const Num& v) { return hash_value(v.n); }
};

struct KontVal {
  Kont k;
  auto operator<=>(const KontVal&) const = default;
  friend std::size_t hash_value(const KontVal& v) { return hash_value(v.k); }
};

struct TidVal {
  Tid t;
  auto operator<=>(const TidVal&) const = default;
  friend std::size_t hash_value(const TidVal& v) { return hash_value(v.t); }
};

struct AddrVal {
  Addr a;
  auto operator<=>(const AddrVal&) const = default;
  friend std::size_t hash_value(const AddrVal& v) { return hash_value(v.a); }
};

using Value = std::variant<Clo, Bool, Num, KontVal, TidVal, AddrVal>;
using Store = std::map<Addr, Value>;

struct Context {
  Label expr = 0;
  Env env;
  Addr kont;
  Hist hist;
  auto operator<=>(const Context&) const = default;
  friend std::size_t hash_value(const Context& c) {
    std::size_t s = hash_value(c.expr);
    hash_combine(s, c.env);
    hash_combine(s, c.kont);
    hash_combine(s, c.hist);
    return s;
  }
};

/// A machine state. `next_seq` is the allocation counter: every address and
/// thread id allocated from this state gets a sequence number at least this
/// large, which keeps concrete allocation fresh along every path.
struct CState {
  std::map<Tid, Context> threads;
  Store store;
  std::uint64_t next_seq = 1;
  auto operator<=>(const CState&) const = default;
  friend std::size_t hash_value(const CState& s) {
    std::size_t h = hash_value(s.threads);
    hash_combine(h, s.store);
    hash_combine(h, s.next_seq);
    return h;
  }
};

/// The root thread id and the halt continuation's address.
Tid root_tid();
Addr halt_addr();

CState inject(const Program& p);

Value atomic_eval(const Program& p, Label ae, const Env& env, const Store& store);

/// Result of one sequential step.
///   NotSequential - the context is a spawn, a join, or an atomic expression
///                   returning to the halt continuation; the concurrent rules own it.
///   Advance       - the thread continues at `next`.
///   Finish        - the thread delivered `result` to the halt continuation.
///   Stuck         - a run-time type error; the thread can never step again.
struct NotSequential {};
struct Advance {
  Context next;
  Store store;
  std::uint64_t next_seq = 0;
};
struct Finish {
  Value result;
  Store store;
  std::uint64_t next_seq = 0;
};
struct Stuck {
  std::string reason;
};
using SeqResult = std::variant<NotSequential, Advance, Finish, Stuck>;

SeqResult step_seq(const Program& p, const Context& c, const Store& store,
                   std::uint64_t next_seq);

struct StuckThread {
  Tid tid;
  Label label = 0;
  std::string reason;
};

struct ConcurrentStep {
  /// One successor per thread that can move; `tid` is the thread that stepped.
  std::vector<std::pair<Tid, CState>> successors;
  std::vector<StuckThread> stuck;
};

ConcurrentStep step_concurrent(const Program& p, const CState& s);

struct Exploration {
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    std::uint64_t tid_seq = 0;
  };
  struct StuckRecord {
    std::size_t state = 0;
    std::uint64_t tid_seq = 0;
    Label label = 0;
    std::string reason;
  };

  std::vector<CState> states;  // states[0] is the injection
  std::vector<std::size_t> depth;
  std::vector<Edge> edges;
  std::vector<StuckRecord> stuck;
  std::vector<bool> expanded;
  std::vector<bool> has_successor;
  bool truncated = false;

  /// Expanded states with no successor at all: halted, deadlocked, or stuck.
  std::vector<std::size_t> finals() const;
};

/// Breadth-first exploration from inject(p). Threads are stepped in tid order,
/// so the result is deterministic. `max_depth` bounds the number of steps from
/// the injection; `max_states` bounds the number of distinct states kept.
Exploration explore(const Program& p, std::size_t max_states, std::size_t max_depth);

/// Canonical one-line rendering:
///   (state (threads (tid context)...) (store (addr value)...))
std::string dump(const Program& p, const CState& s);
std::string dump(const Program& p, const Value& v);

/// Graphviz rendering of an exploration's state graph.
std::string to_dot(const Program& p, const Exploration& x);

}  // namespace pceks
