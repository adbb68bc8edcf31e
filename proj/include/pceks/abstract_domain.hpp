#pragma once

// Finite abstract state-space mirroring the concrete machine, its lattice
// order, and the structural abstraction map from concrete states.

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "pceks/concrete_machine.hpp"
#include "pceks/hash.hpp"
#include "pceks/syntax.hpp"

namespace pceks {

enum class TidStrategy : std::uint8_t {
  Global,    // every thread shares one abstract id
  SiteHist,  // spawn site plus the bounded history at the spawn
  SitePool,  // spawn site plus one of n pool slots
};

const char* to_string(TidStrategy s);

/// Analysis knobs: history depth (context sensitivity) and thread partition.
struct Policy {
  std::size_t k = 0;
  TidStrategy tid = TidStrategy::SiteHist;
  std::size_t pool_n = 1;
};

/// Bounded call-site history, at most k entries, most recent first.
struct AHist {
  std::vector<Label> sites;
  auto operator<=>(const AHist&) const = default;
  friend std::size_t hash_value(const AHist& h) { return hash_value(h.sites); }
};

AHist truncate(const std::vector<Label>& sites, std::size_t k);
AHist arecord(const Program& p, Label expr, const AHist& h, std::size_t k);

struct ATid {
  TidStrategy kind = TidStrategy::Global;
  Label site = kRootSite;  // unused for Global
  AHist hist;              // SiteHist only
  std::uint32_t slot = 0;  // SitePool only
  auto operator<=>(const ATid&) const = default;
  friend std::size_t hash_value(const ATid& t) {
    std::size_t s = hash_value(t.kind);
    hash_combine(s, t.site);
    hash_combine(s, t.hist);
    hash_combine(s, t.slot);
    return s;
  }
};

ATid root_atid(const Policy& p);

struct AVarAddr {
  Symbol var = 0;
  AHist hist;
  auto operator<=>(const AVarAddr&) const = default;
  friend std::size_t hash_value(const AVarAddr& a) {
    std::size_t s = hash_value(a.var);
    hash_combine(s, a.hist);
    return s;
  }
};

struct AKontAddr {
  Label site = kRootSite;
  AHist hist;
  auto operator<=>(const AKontAddr&) const = default;
  friend std::size_t hash_value(const AKontAddr& a) {
    std::size_t s = hash_value(a.site) ^ 0x6bULL;
    hash_combine(s, a.hist);
    return s;
  }
};

struct ATidAddr {
  ATid tid;
  auto operator<=>(const ATidAddr&) const = default;
  friend std::size_t hash_value(const ATidAddr& a) { return hash_value(a.tid) ^ 0x7dULL; }
};

using AAddr = std::variant<AVarAddr, AKontAddr, ATidAddr>;
using AEnv = std::map<Symbol, AAddr>;

AAddr ahalt_addr();

struct AFrame {
  Symbol var = 0;
  Label body = 0;
  AEnv env;
  AAddr next;
  auto operator<=>(const AFrame&) const = default;
  friend std::size_t hash_value(const AFrame& f) {
    std::size_t s = hash_value(f.var);
    hash_combine(s, f.body);
    hash_combine(s, f.env);
    hash_combine(s, f.next);
    return s;
  }
};

using AKont = std::variant<AFrame, HaltKont>;

struct AClo {
  Label lam = 0;
  AEnv env;  // restricted to the lambda's free variables
  auto operator<=>(const AClo&) const = default;
  friend std::size_t hash_value(const AClo& c) {
    std::size_t s = hash_value(c.lam);
    hash_combine(s, c.env);
    return s;
  }
};

struct ABool {
  bool b = false;
  auto operator<=>(const ABool&) const = default;
  friend std::size_t hash_value(const ABool& v) { return v.b ? 0xa1ULL : 0xa0ULL; }
};

/// The single abstract number.
struct AnyNum {
  auto operator<=>(const AnyNum&) const = default;
  friend std::size_t hash_value(const AnyNum&) { return 0x4e554dULL; }
};

struct AKontVal {
  AKont k;
  auto operator<=>(const AKontVal&) const = default;
  friend std::size_t hash_value(const AKontVal& v) { return hash_value(v.k); }
};

struct ATidVal {
  ATid t;
  auto operator<=>(const ATidVal&) const = default;
  friend std::size_t hash_value(const ATidVal& v) { return hash_value(v.t); }
};

struct AAddrVal {
  AAddr a;
  auto operator<=>(const AAddrVal&) const = default;
  friend std::size_t hash_value(const AAddrVal& v) { return hash_value(v.a); }
};

using AValue = std::variant<AClo, ABool, AnyNum, AKontVal, ATidVal, AAddrVal>;
using AValueSet = std::set<AValue>;
using AStore = std::map<AAddr, AValueSet>;

struct AContext {
  Label expr = 0;
  AEnv env;
  AAddr kont;
  AHist hist;
  auto operator<=>(const AContext&) const = default;
  friend std::size_t hash_value(const AContext& c) {
    std::size_t s = hash_value(c.expr);
    hash_combine(s, c.env);
    hash_combine(s, c.kont);
    hash_combine(s, c.hist);
    return s;
  }
};

using AThreads = std::map<ATid, std::set<AContext>>;

/// Abstract state. Both maps are total with an empty-set default; entries
/// with empty sets are never stored, so structural equality is lattice
/// equality.
struct AState {
  AThreads threads;
  AStore store;
  auto operator<=>(const AState&) const = default;
  friend std::size_t hash_value(const AState& s) {
    std::size_t h = hash_value(s.threads);
    hash_combine(h, s.store);
    return h;
  }
};

/// Pointwise subset order on both maps.
bool leq(const AState& x, const AState& y);
/// Pointwise union, the least upper bound under leq.
AState join(const AState& x, const AState& y);
/// In-place join; returns true when `into` grew.
bool join_into(AState& into, const AState& from);
bool join_into(AStore& into, const AAddr& a, const AValueSet& vs);

// Structural abstraction map, component by component.
AHist alpha(const Hist& h, const Policy& pol);
ATid alpha(const Tid& t, const Policy& pol);
AAddr alpha(const Addr& a, const Policy& pol);
AEnv alpha(const Env& env, const Policy& pol);
AKont alpha(const Kont& k, const Policy& pol);
AValue alpha(const Value& v, const Policy& pol);
AContext alpha(const Context& c, const Policy& pol);

AState abstract_state(const CState& s, const Policy& pol);

/// Canonical S-expression rendering; every map and set is emitted in sorted
/// order, so equal states render to identical text.
std::string to_sexpr(const Program& p, const AState& s);
std::string render(const Program& p, const AValue& v);
std::string render(const Program& p, const AAddr& a);
std::string render(const ATid& t);
std::string render(const Program& p, const AContext& c);

}  // namespace pceks
