#include "treesolve/normal.hpp"

#include <algorithm>
#include <set>

#include "treesolve/errors.hpp"

namespace treesolve {

int NormalFormula::depth() const {
  int d = 0;
  for (const NormalFormula& c : children) d = std::max(d, c.depth());
  return 1 + d;
}

namespace {

struct Scope {
  std::vector<Var> bound;
  std::vector<Formula> atoms;
  std::vector<NormalFormula> children;
};

NormalFormula to_nf(const Formula& g, const Signature& sig,
                    FreshSource& fresh, std::set<std::string>& used);

bool is_sugar(FormulaKind k) {
  return k == FormulaKind::Or || k == FormulaKind::Implies ||
         k == FormulaKind::Iff || k == FormulaKind::Forall;
}

/// One step of rewriting the derived connectives into and/not/exists.
Formula desugar_step(const Formula& g) {
  switch (g.kind()) {
    case FormulaKind::Or: {
      // a or b == not(not a and not b)
      std::vector<Formula> negs;
      for (const Formula& c : g.sub()) negs.push_back(Formula::negation(c));
      return Formula::negation(Formula::conjunction(std::move(negs)));
    }
    case FormulaKind::Implies:
      // a => b == not(a and not b)
      return Formula::negation(Formula::conjunction(
          {g.sub()[0], Formula::negation(g.sub()[1])}));
    case FormulaKind::Iff:
      return Formula::conjunction(
          {Formula::implies(g.sub()[0], g.sub()[1]),
           Formula::implies(g.sub()[1], g.sub()[0])});
    case FormulaKind::Forall:
      // forall x. h == not(exists x. not h)
      return Formula::negation(
          Formula::exists(g.bound(), Formula::negation(g.sub()[0])));
    default:
      return g;
  }
}

/// Gathers g into the scope of one not(exists ...) level: conjunction is
/// merged, existential binders are hoisted (renamed apart on collision),
/// atoms are collected, and everything else becomes a negated child.
/// Double negations are collapsed so derived connectives do not pile up
/// spurious nesting levels.
void collect(const Formula& g0, Scope& scope, const Signature& sig,
             FreshSource& fresh, std::set<std::string>& used) {
  Formula g = g0;
  while (is_sugar(g.kind())) g = desugar_step(g);
  switch (g.kind()) {
    case FormulaKind::True:
      return;
    case FormulaKind::False:
      scope.children.push_back(NormalFormula{});
      return;
    case FormulaKind::Eq:
    case FormulaKind::Fin:
      scope.atoms.push_back(g);
      return;
    case FormulaKind::And:
      for (const Formula& c : g.sub()) collect(c, scope, sig, fresh, used);
      return;
    case FormulaKind::Exists: {
      Formula body = g.sub()[0];
      for (const Var& x : g.bound()) {
        if (used.count(x.name)) {
          Var fresh_var = fresh.fresh(x.sort);
          body = substitute_var(body, x, fresh_var);
          used.insert(fresh_var.name);
          scope.bound.push_back(fresh_var);
        } else {
          used.insert(x.name);
          scope.bound.push_back(x);
        }
      }
      collect(body, scope, sig, fresh, used);
      return;
    }
    case FormulaKind::Not: {
      Formula h = g.sub()[0];
      while (is_sugar(h.kind())) h = desugar_step(h);
      if (h.kind() == FormulaKind::Not) {
        collect(h.sub()[0], scope, sig, fresh, used);
      } else if (h.kind() == FormulaKind::True) {
        scope.children.push_back(NormalFormula{});
      } else if (h.kind() == FormulaKind::False) {
        // not false, drop.
      } else {
        scope.children.push_back(to_nf(h, sig, fresh, used));
      }
      return;
    }
    default:
      return; // unreachable: sugar was rewritten above
  }
}

NormalFormula to_nf(const Formula& g, const Signature& sig,
                    FreshSource& fresh, std::set<std::string>& used) {
  Scope scope;
  collect(g, scope, sig, fresh, used);
  std::vector<Var> flat_bound;
  NormalFormula nf;
  nf.alpha = flatten_to_basic(scope.atoms, sig, fresh, flat_bound);
  nf.bound = std::move(scope.bound);
  for (const Var& v : flat_bound) {
    used.insert(v.name);
    nf.bound.push_back(v);
  }
  nf.children = std::move(scope.children);
  return nf;
}

} // namespace

NormalFormula normalize(const Formula& f, const Signature& sig,
                        FreshSource& fresh) {
  // The result encodes f itself, shaped as not(exists ...) applied to
  // the negation's gathered body.
  std::set<std::string> used;
  for (const Var& v : free_variables(f)) used.insert(v.name);
  return to_nf(Formula::negation(f), sig, fresh, used);
}

Formula to_formula(const NormalFormula& nf) {
  std::vector<Formula> parts;
  Formula alpha = basic_to_formula(nf.alpha);
  if (alpha.kind() != FormulaKind::True) parts.push_back(alpha);
  for (const NormalFormula& c : nf.children) parts.push_back(to_formula(c));
  return Formula::negation(
      Formula::exists(nf.bound, Formula::conjunction(std::move(parts))));
}

std::string to_string(const NormalFormula& nf, const Signature& sig) {
  return to_string(to_formula(nf), sig);
}

} // namespace treesolve
