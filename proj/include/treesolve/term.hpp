#pragma once

#include <memory>
#include <string>
#include <vector>

#include "treesolve/signature.hpp"

namespace treesolve {

/// Sorted variable. Identity is (name, sort); names are unique per problem
/// (the parser and solver never reuse a name at two sorts).
struct Var {
  std::string name;
  SortId sort;

  friend bool operator==(const Var& a, const Var& b) {
    return a.name == b.name && a.sort == b.sort;
  }
  friend bool operator!=(const Var& a, const Var& b) { return !(a == b); }
  friend bool operator<(const Var& a, const Var& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.sort < b.sort;
  }
};

class Term;

enum class TermKind { Variable, App, SelApp };

struct TermNode {
  TermKind kind;
  Var var;                 // Variable
  GenId gen;               // App
  std::string sel_name;    // SelApp: selector symbol
  SortId sel_sort;         // SelApp: result sort
  std::vector<Term> args;  // App, SelApp (exactly one for SelApp)
};

/// Immutable, shareable term.
class Term {
public:
  Term() = default;

  static Term variable(Var v);
  static Term app(GenId g, std::vector<Term> args);
  static Term selector(std::string name, SortId result, Term arg);

  bool is_variable() const { return node_->kind == TermKind::Variable; }
  bool is_app() const { return node_->kind == TermKind::App; }
  bool is_selector() const { return node_->kind == TermKind::SelApp; }

  const Var& var() const { return node_->var; }
  GenId gen() const { return node_->gen; }
  const std::string& sel_name() const { return node_->sel_name; }
  SortId sel_sort() const { return node_->sel_sort; }
  const std::vector<Term>& args() const { return node_->args; }

  SortId sort(const Signature& sig) const;

  /// Structural equality.
  friend bool operator==(const Term& a, const Term& b) { return equal(a, b); }
  friend bool operator!=(const Term& a, const Term& b) { return !equal(a, b); }

  explicit operator bool() const { return node_ != nullptr; }

private:
  static bool equal(const Term& a, const Term& b);
  std::shared_ptr<const TermNode> node_;
};

/// Appends every variable occurrence's variable to out (no deduplication).
void collect_variables(const Term& t, std::vector<Var>& out);

/// True iff no selector application occurs in t.
bool selector_free(const Term& t);

/// Replaces every occurrence of variable v by r.
Term substitute(const Term& t, const Var& v, const Term& r);

std::string to_string(const Term& t, const Signature& sig);

} // namespace treesolve
