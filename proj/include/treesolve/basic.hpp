#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "treesolve/formula.hpp"

namespace treesolve {

/// Generator applied to variables only.
struct FlatApp {
  GenId gen;
  std::vector<Var> args;

  friend bool operator==(const FlatApp& a, const FlatApp& b) {
    return a.gen == b.gen && a.args == b.args;
  }
  friend bool operator!=(const FlatApp& a, const FlatApp& b) {
    return !(a == b);
  }
};

/// lhs = rhs where rhs is a variable or a flat application.
struct Equation {
  Var lhs;
  std::variant<Var, FlatApp> rhs;

  bool rhs_is_var() const { return std::holds_alternative<Var>(rhs); }
  const Var& rhs_var() const { return std::get<Var>(rhs); }
  const FlatApp& rhs_app() const { return std::get<FlatApp>(rhs); }

  friend bool operator==(const Equation& a, const Equation& b) {
    return a.lhs == b.lhs && a.rhs == b.rhs;
  }
  friend bool operator!=(const Equation& a, const Equation& b) {
    return !(a == b);
  }
};

/// Conjunction of flat equations and fin atoms.
struct BasicFormula {
  std::vector<Equation> eqs;
  std::vector<Var> fins;

  bool empty() const { return eqs.empty() && fins.empty(); }
  size_t size() const { return eqs.size() + fins.size(); }

  bool has_fin(const Var& v) const;
  /// First equation with the given left-hand side, if any.
  const Equation* find_lhs(const Var& v) const;
  /// True iff some conjunct (equation side or fin atom) mentions v.
  bool mentions(const Var& v) const;
  bool contains(const Equation& e) const;

  friend bool operator==(const BasicFormula& a, const BasicFormula& b) {
    return a.eqs == b.eqs && a.fins == b.fins;
  }
  friend bool operator!=(const BasicFormula& a, const BasicFormula& b) {
    return !(a == b);
  }
};

/// Equality as conjunct sets, ignoring order and duplicates.
bool same_conjuncts(const BasicFormula& a, const BasicFormula& b);

/// Copy of b without the conjuncts (equations and fin atoms) that occur
/// syntactically in common.
BasicFormula strip_conjuncts(const BasicFormula& b, const BasicFormula& common);

/// Total variable order: free variables first (smallest), then bound
/// variables outer to inner. Extended by appending.
class VarOrder {
public:
  VarOrder() = default;

  /// Appends v as the new largest variable. Re-pushing a known name keeps
  /// its original rank.
  void push(const Var& v);
  void push_all(const std::vector<Var>& vs);

  bool contains(const std::string& name) const {
    return rank_.count(name) != 0;
  }
  size_t rank(const Var& v) const;
  /// a < b in the order.
  bool less(const Var& a, const Var& b) const {
    return rank(a) < rank(b);
  }
  const std::vector<Var>& vars() const { return vars_; }
  size_t size() const { return vars_.size(); }

private:
  std::vector<Var> vars_;
  std::map<std::string, size_t> rank_;
};

/// Monotone fresh-variable source with the reserved "_v" prefix.
class FreshSource {
public:
  Var fresh(SortId sort) {
    return Var{"_v" + std::to_string(counter_++), sort};
  }
  uint64_t issued() const { return counter_; }

private:
  uint64_t counter_ = 0;
};

/// Flattens a list of Eq/Fin atoms into a basic formula, introducing fresh
/// existential variables for nested subterms. Fresh variables are appended
/// to fresh_bound in introduction order.
BasicFormula flatten_to_basic(const std::vector<Formula>& atoms,
                              const Signature& sig, FreshSource& fresh,
                              std::vector<Var>& fresh_bound);

/// Variables reachable from start by following equations lhs -> rhs
/// variables; includes start itself.
std::set<std::string> reachable_set(const Var& start, const BasicFormula& b);

/// Closure of reachable_set over a set of seed variable names.
std::set<std::string> reachable_set(const std::set<std::string>& seeds,
                                    const BasicFormula& b);

/// True iff v is reachable from itself through at least one equation.
bool is_properly_reachable(const Var& v, const BasicFormula& b);

struct SortAnalysis;

/// Checks both solved conditions of a basic formula: distinct lhs and fin
/// variables with oriented variable equations, and fin only on sorts with
/// both finite and infinite trees.
bool is_solved_basic(const VarOrder& order, const BasicFormula& b,
                     const SortAnalysis& analysis);

/// Canonical presentation of a solved basic formula. Solved forms are
/// unique only up to the choice of representatives inside variable classes;
/// this collapses every class onto its smallest member (variable equations
/// become a star, right-hand sides mention representatives only) and sorts
/// the conjuncts, so equivalent solved forms compare equal.
BasicFormula canonical_solved_basic(const VarOrder& order,
                                    const BasicFormula& b);

/// Renders the basic formula as a conjunction of atoms (truth if empty).
Formula basic_to_formula(const BasicFormula& b);

std::string to_string(const BasicFormula& b, const Signature& sig);

} // namespace treesolve
