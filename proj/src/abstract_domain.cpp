#include "pceks/abstract_domain.hpp"

#include <algorithm>

namespace pceks {

const char* to_string(TidStrategy s) {
  switch (s) {
    case TidStrategy::Global: return "global";
    case TidStrategy::SiteHist: return "site";
    case TidStrategy::SitePool: return "pool";
  }
  return "?";
}

AHist truncate(const std::vector<Label>& sites, std::size_t k) {
  AHist h;
  h.sites.assign(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(std::min(k, sites.size())));
  return h;
}

AHist arecord(const Program& p, Label expr, const AHist& h, std::size_t k) {
  switch (p.node(expr).kind) {
    case NodeKind::App:
    case NodeKind::CallCC:
    case NodeKind::Spawn:
    case NodeKind::Join: {
      if (k == 0) return {};
      AHist out;
      out.sites.reserve(std::min(k, h.sites.size() + 1));
      out.sites.push_back(expr);
      for (std::size_t i = 0; i < h.sites.size() && out.sites.size() < k; ++i)
        out.sites.push_back(h.sites[i]);
      return out;
    }
    default:
      return h;
  }
}

ATid root_atid(const Policy& pol) {
  ATid t;
  t.kind = pol.tid;
  if (pol.tid == TidStrategy::Global) return t;
  t.site = kRootSite;
  return t;
}

AAddr ahalt_addr() { return AKontAddr{kRootSite, {}}; }

// ---------------------------------------------------------------------------
// Lattice operations.

namespace {

template <class K, class V>
bool map_of_sets_leq(const std::map<K, std::set<V>>& x, const std::map<K, std::set<V>>& y) {
  auto yi = y.begin();
  for (const auto& [key, xs] : x) {
    while (yi != y.end() && yi->first < key) ++yi;
    if (yi == y.end() || !(yi->first == key)) return false;
    if (!std::includes(yi->second.begin(), yi->second.end(), xs.begin(), xs.end())) return false;
  }
  return true;
}

template <class K, class V>
bool map_of_sets_join(std::map<K, std::set<V>>& into, const std::map<K, std::set<V>>& from) {
  bool grew = false;
  for (const auto& [key, vs] : from) {
    if (vs.empty()) continue;
    auto& dst = into[key];
    std::size_t before = dst.size();
    dst.insert(vs.begin(), vs.end());
    grew |= dst.size() != before;
  }
  return grew;
}

}  // namespace

bool leq(const AState& x, const AState& y) {
  return map_of_sets_leq(x.threads, y.threads) && map_of_sets_leq(x.store, y.store);
}

bool join_into(AState& into, const AState& from) {
  bool a = map_of_sets_join(into.threads, from.threads);
  bool b = map_of_sets_join(into.store, from.store);
  return a || b;
}

bool join_into(AStore& into, const AAddr& a, const AValueSet& vs) {
  if (vs.empty()) return false;
  auto& dst = into[a];
  std::size_t before = dst.size();
  dst.insert(vs.begin(), vs.end());
  return dst.size() != before;
}

AState join(const AState& x, const AState& y) {
  AState out = x;
  join_into(out, y);
  return out;
}

// ---------------------------------------------------------------------------
// Abstraction.

AHist alpha(const Hist& h, const Policy& pol) { return truncate(h.sites, pol.k); }

ATid alpha(const Tid& t, const Policy& pol) {
  ATid out;
  out.kind = pol.tid;
  switch (pol.tid) {
    case TidStrategy::Global:
      break;
    case TidStrategy::SiteHist:
      out.site = t.site;
      out.hist = alpha(t.birth, pol);
      break;
    case TidStrategy::SitePool:
      out.site = t.site;
      out.slot = static_cast<std::uint32_t>(t.seq % std::max<std::size_t>(pol.pool_n, 1));
      break;
  }
  return out;
}

AAddr alpha(const Addr& a, const Policy& pol) {
  return std::visit(
      [&](const auto& x) -> AAddr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarAddr>)
          return AVarAddr{x.var, alpha(x.birth, pol)};
        else if constexpr (std::is_same_v<T, KontAddr>)
          return AKontAddr{x.site, alpha(x.birth, pol)};
        else
          return ATidAddr{alpha(x.tid, pol)};
      },
      a);
}

AEnv alpha(const Env& env, const Policy& pol) {
  AEnv out;
  for (const auto& [v, a] : env) out.emplace_hint(out.end(), v, alpha(a, pol));
  return out;
}

AKont alpha(const Kont& k, const Policy& pol) {
  if (std::holds_alternative<HaltKont>(k)) return HaltKont{};
  const auto& f = std::get<Frame>(k);
  return AFrame{f.var, f.body, alpha(f.env, pol), alpha(f.next, pol)};
}

AValue alpha(const Value& v, const Policy& pol) {
  return std::visit(
      [&](const auto& x) -> AValue {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Clo>)
          return AClo{x.lam, alpha(x.env, pol)};
        else if constexpr (std::is_same_v<T, Bool>)
          return ABool{x.b};
        else if constexpr (std::is_same_v<T, Num>)
          return AnyNum{};
        else if constexpr (std::is_same_v<T, KontVal>)
          return AKontVal{alpha(x.k, pol)};
        else if constexpr (std::is_same_v<T, TidVal>)
          return ATidVal{alpha(x.t, pol)};
        else
          return AAddrVal{alpha(x.a, pol)};
      },
      v);
}

AContext alpha(const Context& c, const Policy& pol) {
  return AContext{c.expr, alpha(c.env, pol), alpha(c.kont, pol), alpha(c.hist, pol)};
}

AState abstract_state(const CState& s, const Policy& pol) {
  AState out;
  for (const auto& [t, c] : s.threads) out.threads[alpha(t, pol)].insert(alpha(c, pol));
  for (const auto& [a, v] : s.store) out.store[alpha(a, pol)].insert(alpha(v, pol));
  return out;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

std::string site_str(Label l) { return l == kRootSite ? "root" : std::to_string(l); }

std::string hist_str(const AHist& h) {
  std::string s = "(h";
  for (Label l : h.sites) s += " " + std::to_string(l);
  return s + ")";
}

std::string env_str(const Program& p, const AEnv& env) {
  std::vector<std::pair<std::string, const AAddr*>> items;
  for (const auto& [v, a] : env) items.emplace_back(p.name(v), &a);
  std::sort(items.begin(), items.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  std::string s = "(env";
  for (const auto& [n, a] : items) s += " (" + n + " " + render(p, *a) + ")";
  return s + ")";
}

std::string kont_str(const Program& p, const AKont& k) {
  if (std::holds_alternative<HaltKont>(k)) return "halt";
  const auto& f = std::get<AFrame>(k);
  return "(frame " + p.name(f.var) + " " + std::to_string(f.body) + " " + env_str(p, f.env) + " " +
         render(p, f.next) + ")";
}

}  // namespace

std::string render(const ATid& t) {
  switch (t.kind) {
    case TidStrategy::Global: return "(tid global)";
    case TidStrategy::SiteHist: return "(tid " + site_str(t.site) + " " + hist_str(t.hist) + ")";
    case TidStrategy::SitePool:
      return "(tid " + site_str(t.site) + " (slot " + std::to_string(t.slot) + "))";
  }
  return "(tid ?)";
}

std::string render(const Program& p, const AAddr& a) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AVarAddr>)
          return "(var-addr " + p.name(x.var) + " " + hist_str(x.hist) + ")";
        else if constexpr (std::is_same_v<T, AKontAddr>)
          return "(kont-addr " + site_str(x.site) + " " + hist_str(x.hist) + ")";
        else
          return "(tid-addr " + render(x.tid) + ")";
      },
      a);
}

std::string render(const Program& p, const AValue& v) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AClo>)
          return "(clo " + std::to_string(x.lam) + " " + env_str(p, x.env) + ")";
        else if constexpr (std::is_same_v<T, ABool>)
          return x.b ? "#t" : "#f";
        else if constexpr (std::is_same_v<T, AnyNum>)
          return "num";
        else if constexpr (std::is_same_v<T, AKontVal>)
          return "(kont " + kont_str(p, x.k) + ")";
        else if constexpr (std::is_same_v<T, ATidVal>)
          return "(tid-val " + render(x.t) + ")";
        else
          return "(addr-val " + render(p, x.a) + ")";
      },
      v);
}

std::string render(const Program& p, const AContext& c) {
  return "(ctx " + std::to_string(c.expr) + " " + env_str(p, c.env) + " " + render(p, c.kont) + " " +
         hist_str(c.hist) + ")";
}

std::string to_sexpr(const Program& p, const AState& s) {
  std::string out = "(astate (threads";
  for (const auto& [t, cs] : s.threads) {
    out += " (" + render(t);
    for (const auto& c : cs) out += " " + render(p, c);
    out += ")";
  }
  out += ") (store";
  for (const auto& [a, vs] : s.store) {
    out += " (" + render(p, a);
    for (const auto& v : vs) out += " " + render(p, v);
    out += ")";
  }
  return out + "))";
}

}  // namespace pceks
