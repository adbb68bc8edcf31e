#include "pceks/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace pceks {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Let: return "let";
    case NodeKind::App: return "app";
    case NodeKind::CallCC: return "callcc";
    case NodeKind::SetBang: return "set!";
    case NodeKind::If: return "if";
    case NodeKind::Cas: return "cas";
    case NodeKind::Spawn: return "spawn";
    case NodeKind::Join: return "join";
    case NodeKind::Lam: return "lambda";
    case NodeKind::Var: return "var";
    case NodeKind::Num: return "num";
    case NodeKind::Bool: return "bool";
  }
  return "?";
}

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         message),
      line_(line),
      column_(column) {}

std::optional<Symbol> Program::lookup(std::string_view name) const {
  auto it = symbol_ids_.find(name);
  if (it == symbol_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<Label> Program::parent(Label l) const {
  if (l == root()) return std::nullopt;
  return parent_.at(l);
}

namespace {

// ---------------------------------------------------------------------------
// Reader: text -> datum tree.

struct Datum {
  bool is_list = false;
  std::string atom;
  std::vector<Datum> items;
  SourceSpan span;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  Datum read_program() {
    skip_space();
    if (at_end()) throw ParseError("empty program", line_, col_);
    Datum d = read();
    skip_space();
    if (!at_end())
      throw ParseError("unexpected text after the program expression", line_, col_);
    return d;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Datum read() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", line_, col_);
    Datum d;
    d.span.line = line_;
    d.span.column = col_;
    char c = peek();
    if (c == '(') {
      advance();
      d.is_list = true;
      for (;;) {
        skip_space();
        if (at_end())
          throw ParseError("unterminated list opened here", d.span.line, d.span.column);
        if (peek() == ')') {
          advance();
          break;
        }
        d.items.push_back(read());
      }
    } else if (c == ')') {
      throw ParseError("unexpected ')'", line_, col_);
    } else {
      while (!at_end()) {
        char a = peek();
        if (a == '(' || a == ')' || a == ';' || std::isspace(static_cast<unsigned char>(a)))
          break;
        d.atom.push_back(a);
        advance();
      }
    }
    d.span.end_line = line_;
    d.span.end_column = col_;
    return d;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string render(const Datum& d) {
  if (!d.is_list) return d.atom;
  std::string out = "(";
  for (std::size_t i = 0; i < d.items.size(); ++i) {
    if (i) out += ' ';
    out += render(d.items[i]);
  }
  return out + ")";
}

bool is_integer(const std::string& s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '?' || c == '!' ||
         c == '_' || c == '$';
}

const std::set<std::string, std::less<>> kKeywords = {
    "lambda", "let", "callcc", "set!", "if", "cas", "spawn", "join"};

// ---------------------------------------------------------------------------
// Datum tree -> labeled AST.

class Builder {
 public:
  Builder(std::vector<Node>& nodes, std::vector<std::string>& symbols,
          std::map<std::string, Symbol, std::less<>>& ids)
      : nodes_(nodes), symbols_(symbols), ids_(ids) {}

  Label expr(const Datum& d) {
    if (d.is_list && !d.items.empty() && head_is(d, "let")) return let(d);
    if (is_cexp_form(d)) return cexp(d);
    return aexp(d);
  }

 private:
  static bool head_is(const Datum& d, std::string_view kw) {
    return !d.items.front().is_list && d.items.front().atom == kw;
  }

  static bool is_cexp_form(const Datum& d) {
    if (!d.is_list || d.items.empty()) return false;
    const Datum& h = d.items.front();
    if (h.is_list) return true;
    return h.atom != "lambda" && h.atom != "let";
  }

  [[noreturn]] static void fail(const Datum& d, const std::string& what) {
    throw ParseError(what + ": `" + render(d) + "`", d.span.line, d.span.column);
  }

  Label open(NodeKind kind, const Datum& d) {
    Node n;
    n.kind = kind;
    n.label = static_cast<Label>(nodes_.size());
    n.span = d.span;
    nodes_.push_back(std::move(n));
    return nodes_.back().label;
  }

  Symbol intern(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    auto s = static_cast<Symbol>(symbols_.size());
    symbols_.push_back(name);
    ids_.emplace(name, s);
    return s;
  }

  Symbol identifier(const Datum& d) {
    if (d.is_list) fail(d, "expected an identifier");
    const std::string& s = d.atom;
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0])) || is_integer(s) ||
        !std::all_of(s.begin(), s.end(), is_identifier_char))
      fail(d, "malformed identifier");
    if (kKeywords.contains(s)) fail(d, "keyword used as identifier");
    return intern(s);
  }

  Label let(const Datum& d) {
    if (d.items.size() != 3) fail(d, "let expects a single binding list and a body");
    const Datum& bindings = d.items[1];
    if (!bindings.is_list || bindings.items.size() != 1)
      fail(d, "let must have exactly one binding");
    const Datum& binding = bindings.items[0];
    if (!binding.is_list || binding.items.size() != 2) fail(binding, "malformed let binding");
    Label l = open(NodeKind::Let, d);
    Symbol v = identifier(binding.items[0]);
    const Datum& rhs = binding.items[1];
    if (!is_cexp_form(rhs))
      fail(rhs, "grammar violation: let must bind a call expression");
    Label b = cexp(rhs);
    Label body = expr(d.items[2]);
    nodes_[l].var = v;
    nodes_[l].kids = {b, body};
    return l;
  }

  void arity(const Datum& d, std::size_t n, const char* form) {
    if (d.items.size() != n)
      fail(d, std::string(form) + " expects " + std::to_string(n - 1) + " operand(s)");
  }

  Label cexp(const Datum& d) {
    if (!is_cexp_form(d)) fail(d, "grammar violation: expected a call expression");
    const Datum& h = d.items.front();
    std::string_view kw = h.is_list ? std::string_view{} : std::string_view{h.atom};
    if (kw == "callcc") {
      arity(d, 2, "callcc");
      Label l = open(NodeKind::CallCC, d);
      Label a = aexp(d.items[1]);
      nodes_[l].kids = {a};
      return l;
    }
    if (kw == "set!") {
      arity(d, 3, "set!");
      Label l = open(NodeKind::SetBang, d);
      Symbol v = identifier(d.items[1]);
      Label a = aexp(d.items[2]);
      nodes_[l].var = v;
      nodes_[l].kids = {a};
      return l;
    }
    if (kw == "if") {
      arity(d, 4, "if");
      Label l = open(NodeKind::If, d);
      Label c = aexp(d.items[1]);
      if (!is_cexp_form(d.items[2])) fail(d.items[2], "grammar violation: if arm must be a call expression");
      Label t = cexp(d.items[2]);
      if (!is_cexp_form(d.items[3])) fail(d.items[3], "grammar violation: if arm must be a call expression");
      Label e = cexp(d.items[3]);
      nodes_[l].kids = {c, t, e};
      return l;
    }
    if (kw == "cas") {
      arity(d, 4, "cas");
      Label l = open(NodeKind::Cas, d);
      Symbol v = identifier(d.items[1]);
      Label o = aexp(d.items[2]);
      Label n = aexp(d.items[3]);
      nodes_[l].var = v;
      nodes_[l].kids = {o, n};
      return l;
    }
    if (kw == "spawn") {
      arity(d, 2, "spawn");
      Label l = open(NodeKind::Spawn, d);
      Label b = expr(d.items[1]);
      nodes_[l].kids = {b};
      return l;
    }
    if (kw == "join") {
      arity(d, 2, "join");
      Label l = open(NodeKind::Join, d);
      Label a = aexp(d.items[1]);
      nodes_[l].kids = {a};
      return l;
    }
    Label l = open(NodeKind::App, d);
    std::vector<Label> kids;
    kids.reserve(d.items.size());
    for (const Datum& item : d.items) kids.push_back(aexp(item));
    nodes_[l].kids = std::move(kids);
    return l;
  }

  Label aexp(const Datum& d) {
    if (d.is_list) {
      if (d.items.empty()) fail(d, "empty application");
      if (!head_is(d, "lambda")) fail(d, "grammar violation: expected an atomic expression");
      if (d.items.size() != 3) fail(d, "lambda expects a parameter list and a single body");
      const Datum& ps = d.items[1];
      if (!ps.is_list) fail(ps, "lambda parameters must be a list");
      Label l = open(NodeKind::Lam, d);
      std::vector<Symbol> params;
      for (const Datum& p : ps.items) {
        Symbol s = identifier(p);
        if (std::find(params.begin(), params.end(), s) != params.end())
          fail(p, "duplicate lambda parameter");
        params.push_back(s);
      }
      Label body = expr(d.items[2]);
      nodes_[l].params = std::move(params);
      nodes_[l].kids = {body};
      return l;
    }
    const std::string& s = d.atom;
    if (s == "#t" || s == "#f") {
      Label l = open(NodeKind::Bool, d);
      nodes_[l].boolean = (s == "#t");
      return l;
    }
    if (!s.empty() && s[0] == '#') fail(d, "unknown literal");
    if (is_integer(s)) {
      std::int64_t n = 0;
      const char* first = s.data() + (s[0] == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), n);
      if (ec != std::errc{} || ptr != s.data() + s.size()) fail(d, "integer literal out of range");
      Label l = open(NodeKind::Num, d);
      nodes_[l].number = n;
      return l;
    }
    if (kKeywords.contains(s)) fail(d, "keyword in expression position");
    Symbol v = identifier(d);
    Label l = open(NodeKind::Var, d);
    nodes_[l].var = v;
    return l;
  }

  std::vector<Node>& nodes_;
  std::vector<std::string>& symbols_;
  std::map<std::string, Symbol, std::less<>>& ids_;
};

std::vector<Symbol> set_union(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::vector<Symbol> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Symbol> minus(std::vector<Symbol> a, std::vector<Symbol> drop) {
  std::sort(drop.begin(), drop.end());
  std::vector<Symbol> out;
  std::set_difference(a.begin(), a.end(), drop.begin(), drop.end(), std::back_inserter(out));
  return out;
}

}  // namespace

void Program::finish() {
  const std::size_t n = nodes_.size();
  parent_.assign(n, 0);
  subtree_end_.resize(n);
  free_vars_.assign(n, {});
  scope_.assign(n, {});
  for (Label l = 0; l < n; ++l)
    for (Label k : nodes_[l].kids) parent_[k] = l;

  // Children carry larger labels than their parent, so a reverse sweep is bottom-up.
  for (Label l = static_cast<Label>(n); l-- > 0;) {
    const Node& nd = nodes_[l];
    Label end = l;
    for (Label k : nd.kids) end = std::max(end, subtree_end_[k]);
    subtree_end_[l] = end;

    std::vector<Symbol> fv;
    switch (nd.kind) {
      case NodeKind::Var: fv = {nd.var}; break;
      case NodeKind::Num:
      case NodeKind::Bool: break;
      case NodeKind::Lam: fv = minus(free_vars_[nd.kids[0]], nd.params); break;
      case NodeKind::Let:
        fv = set_union(free_vars_[nd.kids[0]], minus(free_vars_[nd.kids[1]], {nd.var}));
        break;
      case NodeKind::SetBang:
      case NodeKind::Cas:
        fv = {nd.var};
        for (Label k : nd.kids) fv = set_union(fv, free_vars_[k]);
        break;
      default:
        for (Label k : nd.kids) fv = set_union(fv, free_vars_[k]);
        break;
    }
    free_vars_[l] = std::move(fv);
  }

  // Top-down scope.
  for (Label l = 0; l < n; ++l) {
    const Node& nd = nodes_[l];
    for (std::size_t i = 0; i < nd.kids.size(); ++i) {
      std::vector<Symbol> s = scope_[l];
      if (nd.kind == NodeKind::Lam) {
        std::vector<Symbol> ps = nd.params;
        std::sort(ps.begin(), ps.end());
        s = set_union(s, ps);
      } else if (nd.kind == NodeKind::Let && i == 1) {
        s = set_union(s, {nd.var});
      }
      scope_[nd.kids[i]] = std::move(s);
    }
  }
}

Program parse(std::string_view text) {
  Reader reader(text);
  Datum d = reader.read_program();
  Program p;
  p.source_ = std::string(text);
  Builder b(p.nodes_, p.symbols_, p.symbol_ids_);
  b.expr(d);
  p.finish();
  return p;
}

Program parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::vector<std::string> free_vars(const Program& p, Label l) {
  std::vector<std::string> out;
  for (Symbol s : p.free_vars(l)) out.push_back(p.name(s));
  std::sort(out.begin(), out.end());
  return out;
}

std::map<Label, const Node*> subexpressions(const Program& p, Label l) {
  std::map<Label, const Node*> out;
  std::vector<Label> stack{l};
  while (!stack.empty()) {
    Label cur = stack.back();
    stack.pop_back();
    const Node& nd = p.node(cur);
    out.emplace(cur, &nd);
    for (Label k : nd.kids) stack.push_back(k);
  }
  return out;
}

std::optional<std::string> check_grammar(const Program& p) {
  enum class Pos { Expr, CExp, AExp };
  std::optional<std::string> err;
  Label expected = 0;
  std::function<void(Label, Pos)> walk = [&](Label l, Pos pos) {
    if (err) return;
    const Node& nd = p.node(l);
    if (nd.label != l || l != expected) {
      err = "label " + std::to_string(l) + " is not in pre-order position";
      return;
    }
    ++expected;
    bool ok = pos == Pos::Expr   ? (nd.kind == NodeKind::Let || is_cexp(nd.kind) || is_aexp(nd.kind))
              : pos == Pos::CExp ? is_cexp(nd.kind)
                                 : is_aexp(nd.kind);
    if (!ok) {
      err = std::string(to_string(nd.kind)) + " at label " + std::to_string(l) +
            " is not allowed in this position";
      return;
    }
    auto need = [&](std::size_t n) {
      if (nd.kids.size() != n && !err)
        err = std::string(to_string(nd.kind)) + " at label " + std::to_string(l) +
              " has the wrong number of children";
      return !err;
    };
    switch (nd.kind) {
      case NodeKind::Let:
        if (need(2)) {
          walk(nd.kids[0], Pos::CExp);
          walk(nd.kids[1], Pos::Expr);
        }
        break;
      case NodeKind::App:
        if (nd.kids.empty()) err = "empty application";
        for (Label k : nd.kids) walk(k, Pos::AExp);
        break;
      case NodeKind::CallCC:
      case NodeKind::SetBang:
      case NodeKind::Join:
        if (need(1)) walk(nd.kids[0], Pos::AExp);
        break;
      case NodeKind::If:
        if (need(3)) {
          walk(nd.kids[0], Pos::AExp);
          walk(nd.kids[1], Pos::CExp);
          walk(nd.kids[2], Pos::CExp);
        }
        break;
      case NodeKind::Cas:
        if (need(2)) {
          walk(nd.kids[0], Pos::AExp);
          walk(nd.kids[1], Pos::AExp);
        }
        break;
      case NodeKind::Spawn:
        if (need(1)) walk(nd.kids[0], Pos::Expr);
        break;
      case NodeKind::Lam: {
        std::set<Symbol> seen(nd.params.begin(), nd.params.end());
        if (seen.size() != nd.params.size()) err = "duplicate lambda parameter";
        if (need(1)) walk(nd.kids[0], Pos::Expr);
        break;
      }
      case NodeKind::Var:
      case NodeKind::Num:
      case NodeKind::Bool:
        need(0);
        break;
    }
  };
  if (p.size() == 0) return "empty program";
  walk(p.root(), Pos::Expr);
  if (!err && expected != p.size()) err = "unreachable nodes in the node table";
  return err;
}

std::string to_sexpr(const Program& p, Label l) {
  const Node& nd = p.node(l);
  auto kid = [&](std::size_t i) { return to_sexpr(p, nd.kids[i]); };
  switch (nd.kind) {
    case NodeKind::Let:
      return "(let ((" + p.name(nd.var) + " " + kid(0) + ")) " + kid(1) + ")";
    case NodeKind::App: {
      std::string s = "(";
      for (std::size_t i = 0; i < nd.kids.size(); ++i) s += (i ? " " : "") + kid(i);
      return s + ")";
    }
    case NodeKind::CallCC: return "(callcc " + kid(0) + ")";
    case NodeKind::SetBang: return "(set! " + p.name(nd.var) + " " + kid(0) + ")";
    case NodeKind::If: return "(if " + kid(0) + " " + kid(1) + " " + kid(2) + ")";
    case NodeKind::Cas: return "(cas " + p.name(nd.var) + " " + kid(0) + " " + kid(1) + ")";
    case NodeKind::Spawn: return "(spawn " + kid(0) + ")";
    case NodeKind::Join: return "(join " + kid(0) + ")";
    case NodeKind::Lam: {
      std::string s = "(lambda (";
      for (std::size_t i = 0; i < nd.params.size(); ++i)
        s += (i ? " " : "") + p.name(nd.params[i]);
      return s + ") " + kid(0) + ")";
    }
    case NodeKind::Var: return p.name(nd.var);
    case NodeKind::Num: return std::to_string(nd.number);
    case NodeKind::Bool: return nd.boolean ? "#t" : "#f";
  }
  return "?";
}

}  // namespace pceks
