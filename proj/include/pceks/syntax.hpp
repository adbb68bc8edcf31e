#pragma once

// Labeled AST for the ANF concurrent lambda calculus and its S-expression
// reader.
//
//   e    ::= (let ((v cexp)) e) | cexp | ae
//   cexp ::= (f ae ...) | (callcc ae) | (set! v ae) | (if ae cexp cexp)
//          | (cas v ae ae) | (spawn e) | (join ae)
//   ae   ::= (lambda (v ...) e) | v | n | #t | #f
//
// Every node carries a label equal to its index in the program's node table.
// Labels are assigned in pre-order. An expression `e` that is a bare `cexp` or
// `ae` shares the label of that node: there are no separate wrapper nodes, so
// the program `42` has exactly one label.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pceks {

using Label = std::uint32_t;
using Symbol = std::uint32_t;

/// Site marker used by the root thread id and the halt continuation address.
inline constexpr Label kRootSite = std::numeric_limits<Label>::max();

struct SourceSpan {
  int line = 0;
  int column = 0;
  int end_line = 0;
  int end_column = 0;
};

enum class NodeKind : std::uint8_t {
  Let,
  App,
  CallCC,
  SetBang,
  If,
  Cas,
  Spawn,
  Join,
  Lam,
  Var,
  Num,
  Bool,
};

const char* to_string(NodeKind kind);

constexpr bool is_cexp(NodeKind k) {
  return k == NodeKind::App || k == NodeKind::CallCC || k == NodeKind::SetBang ||
         k == NodeKind::If || k == NodeKind::Cas || k == NodeKind::Spawn ||
         k == NodeKind::Join;
}

constexpr bool is_aexp(NodeKind k) {
  return k == NodeKind::Lam || k == NodeKind::Var || k == NodeKind::Num ||
         k == NodeKind::Bool;
}

/// One AST node. Child layout by kind:
///   Let     var; kids = {binding cexp, body}
///   App     kids = {f, args...}
///   CallCC  kids = {arg}
///   SetBang var; kids = {value}
///   If      kids = {cond, then, else}
///   Cas     var; kids = {old, new}
///   Spawn   kids = {body}
///   Join    kids = {arg}
///   Lam     params; kids = {body}
///   Var     var
///   Num     number
///   Bool    boolean
struct Node {
  NodeKind kind = NodeKind::Num;
  Label label = 0;
  SourceSpan span;
  Symbol var = 0;
  std::vector<Symbol> params;
  std::vector<Label> kids;
  std::int64_t number = 0;
  bool boolean = false;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class Program {
 public:
  const Node& node(Label l) const { return nodes_.at(l); }
  Label root() const { return 0; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }

  const std::string& name(Symbol s) const { return symbols_.at(s); }
  std::optional<Symbol> lookup(std::string_view name) const;
  std::size_t symbol_count() const { return symbols_.size(); }

  const std::string& source() const { return source_; }

  /// Free variables of the subtree at `l`, sorted by symbol id.
  const std::vector<Symbol>& free_vars(Label l) const { return free_vars_.at(l); }
  /// Variables lexically in scope at `l` (bound by enclosing lambdas and lets).
  const std::vector<Symbol>& scope(Label l) const { return scope_.at(l); }
  /// Enclosing node, or nullopt for the root.
  std::optional<Label> parent(Label l) const;
  /// Last label of the subtree rooted at `l`; pre-order makes subtrees contiguous.
  Label subtree_end(Label l) const { return subtree_end_.at(l); }
  bool contains(Label ancestor, Label l) const {
    return l >= ancestor && l <= subtree_end_.at(ancestor);
  }

 private:
  friend Program parse(std::string_view text);
  void finish();

  std::string source_;
  std::vector<Node> nodes_;
  std::vector<std::string> symbols_;
  std::map<std::string, Symbol, std::less<>> symbol_ids_;
  std::vector<std::vector<Symbol>> free_vars_;
  std::vector<std::vector<Symbol>> scope_;
  std::vector<Label> parent_;
  std::vector<Label> subtree_end_;
};

/// Reads one program. Throws ParseError on lexical, syntactic, or grammar errors.
Program parse(std::string_view text);
Program parse_file(const std::string& path);

/// Free variable names of the subtree at `l`, sorted by name.
std::vector<std::string> free_vars(const Program& p, Label l);

/// Every node of the subtree at `l`, keyed by label.
std::map<Label, const Node*> subexpressions(const Program& p, Label l);

/// Grammar check over an already built AST. Returns a description of the first
/// violation, or nullopt when the program conforms.
std::optional<std::string> check_grammar(const Program& p);

/// Renders the subtree at `l` back to S-expression text.
std::string to_sexpr(const Program& p, Label l);

}  // namespace pceks
