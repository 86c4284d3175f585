#pragma once

#include <memory>
#include <string>
#include <vector>

#include "treesolve/term.hpp"

namespace treesolve {

enum class FormulaKind {
  True,
  False,
  Eq,
  Fin,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Exists,
  Forall,
};

class Formula;

struct FormulaNode {
  FormulaKind kind;
  Term lhs;                  // Eq lhs, Fin argument
  Term rhs;                  // Eq rhs
  std::vector<Var> bound;    // Exists, Forall
  std::vector<Formula> sub;  // Not: 1, And/Or: n, Implies/Iff: 2, quantifiers: 1
};

/// Immutable, shareable first-order formula over equality and fin.
class Formula {
public:
  Formula() = default;

  static Formula truth();
  static Formula falsity();
  static Formula eq(Term a, Term b);
  static Formula fin(Term t);
  static Formula negation(Formula f);
  /// Empty list yields truth; a single element is returned unchanged.
  static Formula conjunction(std::vector<Formula> fs);
  /// Empty list yields falsity; a single element is returned unchanged.
  static Formula disjunction(std::vector<Formula> fs);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  /// Empty bound list returns body unchanged.
  static Formula exists(std::vector<Var> bound, Formula body);
  static Formula forall(std::vector<Var> bound, Formula body);

  FormulaKind kind() const { return node_->kind; }
  const Term& lhs() const { return node_->lhs; }
  const Term& rhs() const { return node_->rhs; }
  const std::vector<Var>& bound() const { return node_->bound; }
  const std::vector<Formula>& sub() const { return node_->sub; }

  explicit operator bool() const { return node_ != nullptr; }

  friend bool operator==(const Formula& a, const Formula& b) {
    return equal(a, b);
  }
  friend bool operator!=(const Formula& a, const Formula& b) {
    return !equal(a, b);
  }

private:
  static bool equal(const Formula& a, const Formula& b);
  static Formula make(FormulaNode n);
  std::shared_ptr<const FormulaNode> node_;
};

/// Free variables in first-occurrence order.
std::vector<Var> free_variables(const Formula& f);

/// Throws SortError on ill-sorted formulae: mismatched equation sorts,
/// arity errors, duplicate or empty binder lists. Selector applications are
/// rejected unless allow_selectors is set (only the datatype frontend deals
/// with them).
void check_well_sorted(const Formula& f, const Signature& sig,
                       bool allow_selectors = false);

/// Renames free occurrences of `from` to the variable `to`, respecting
/// shadowing binders. The caller guarantees `to` is fresh.
Formula substitute_var(const Formula& f, const Var& from, const Var& to);

/// Alpha-renames bound variables to _v0, _v1, ... by traversal order and
/// sorts and/or operands by a name-insensitive structural key. Idempotent;
/// two formulae equal up to bound names and conjunct order canonicalize to
/// the same value.
Formula canonicalize(const Formula& f);

std::string to_string(const Formula& f, const Signature& sig);

} // namespace treesolve
