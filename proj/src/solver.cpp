#include "treesolve/solver.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <string>
#include <utility>

#include "treesolve/budget.hpp"
#include "treesolve/errors.hpp"

namespace treesolve {

namespace {

Term rhs_term(const Equation& e) {
  if (e.rhs_is_var()) return Term::variable(e.rhs_var());
  std::vector<Term> args;
  args.reserve(e.rhs_app().args.size());
  for (const Var& a : e.rhs_app().args) args.push_back(Term::variable(a));
  return Term::app(e.rhs_app().gen, std::move(args));
}

std::vector<Formula> atom_formulas(const BasicFormula& b) {
  std::vector<Formula> out;
  out.reserve(b.eqs.size() + b.fins.size());
  for (const Equation& e : b.eqs)
    out.push_back(Formula::eq(Term::variable(e.lhs), rhs_term(e)));
  for (const Var& v : b.fins)
    out.push_back(Formula::fin(Term::variable(v)));
  return out;
}

std::set<std::string> mentioned_names(const BasicFormula& b) {
  std::set<std::string> out;
  for (const Equation& e : b.eqs) {
    out.insert(e.lhs.name);
    if (e.rhs_is_var()) {
      out.insert(e.rhs_var().name);
    } else {
      for (const Var& a : e.rhs_app().args) out.insert(a.name);
    }
  }
  for (const Var& v : b.fins) out.insert(v.name);
  return out;
}

/// not(exists. true and nothing), the normal form of "false".
bool is_not_true(const NormalFormula& nf) {
  return nf.bound.empty() && nf.alpha.empty() && nf.children.empty();
}

/// Renders the negation of a solved normal formula positively:
/// exists xs. alpha and all not(exists ys_i. beta_i). With strip, child
/// conjuncts already present in alpha are dropped.
Formula positive_formula(const NormalFormula& nf, bool strip) {
  std::vector<Formula> parts = atom_formulas(nf.alpha);
  for (const NormalFormula& ch : nf.children) {
    BasicFormula beta =
        strip ? strip_conjuncts(ch.alpha, nf.alpha) : ch.alpha;
    parts.push_back(Formula::negation(
        Formula::exists(ch.bound, Formula::conjunction(atom_formulas(beta)))));
  }
  return Formula::exists(nf.bound, Formula::conjunction(std::move(parts)));
}

/// Rebuilds a stripped child conjunction. The solved form keeps every
/// equation of alpha in each child, so those are re-added; alpha's fin
/// atoms are not, because a child equation for the same variable means the
/// fin constraint was rewritten onto subtrees inside the child.
BasicFormula merge_alpha(const BasicFormula& alpha, const BasicFormula& beta) {
  BasicFormula out;
  out.eqs = alpha.eqs;
  for (const Equation& e : beta.eqs)
    if (!alpha.contains(e)) out.eqs.push_back(e);
  out.fins = beta.fins;
  return out;
}

struct Solver {
  const Signature& sig;
  const SortAnalysis& analysis;
  const SolveOptions& opts;
  SolveStats* stats;
  Budget budget;
  FreshSource fresh;

  Solver(const Signature& s, const SortAnalysis& a, const SolveOptions& o,
         SolveStats* st)
      : sig(s), analysis(a), opts(o), stats(st) {
    budget.remaining = o.budget;
  }

  VarOrder make_order(const std::vector<Var>& free,
                      const std::vector<Var>& bound,
                      const std::vector<Var>* inner = nullptr) const {
    VarOrder order;
    order.push_all(free);
    order.push_all(bound);
    if (inner) order.push_all(*inner);
    return order;
  }

  /// Simplifies not(exists xs. alpha and children) into a set of solved
  /// normal formulae whose conjunction is equivalent to it. Children are
  /// simplified bottom-up after absorbing alpha, then the reassembled
  /// formula goes to solve_final.
  std::vector<NormalFormula> solve_nested(const std::vector<Var>& free,
                                          NormalFormula phi) {
    budget.tick();
    VarOrder top = make_order(free, phi.bound);
    auto alpha = solve_basic(top, std::move(phi.alpha), analysis, budget,
                             opts.scheduler);
    if (!alpha) return {};  // alpha contradictory: phi is trivially true
    phi.alpha = std::move(*alpha);

    std::vector<NormalFormula> new_children;
    for (NormalFormula& child : phi.children) {
      // The child constrains alpha's solutions, so it absorbs alpha's
      // conjuncts before being solved in its own right.
      BasicFormula beta = phi.alpha;
      beta.eqs.insert(beta.eqs.end(), child.alpha.eqs.begin(),
                      child.alpha.eqs.end());
      beta.fins.insert(beta.fins.end(), child.alpha.fins.begin(),
                       child.alpha.fins.end());
      VarOrder child_order = make_order(free, phi.bound, &child.bound);
      auto solved =
          solve_basic(child_order, std::move(beta), analysis, budget,
                      opts.scheduler);
      if (!solved) continue;  // contradictory child imposes nothing
      BasicFormula b = std::move(*solved);
      // Keep alpha's presentation for variables alpha defines: solving may
      // have turned alpha's "u = t" into "u = v" plus "v = t", and restoring
      // the former keeps alpha's equations a syntactic subset of the
      // child's. Sound because both forms pin u and v to the same tree.
      for (Equation& e : b.eqs) {
        if (const Equation* a = phi.alpha.find_lhs(e.lhs)) e = *a;
      }

      std::vector<Var> inner_free = free;
      inner_free.insert(inner_free.end(), phi.bound.begin(), phi.bound.end());
      NormalFormula sub;
      sub.bound = child.bound;
      sub.alpha = std::move(b);
      sub.children = std::move(child.children);
      for (NormalFormula& psi : solve_nested(inner_free, std::move(sub)))
        new_children.push_back(std::move(psi));
    }
    // The children form a set; drop duplicates up to bound renaming.
    std::set<std::string> seen;
    phi.children.clear();
    for (NormalFormula& child : new_children) {
      std::string key = to_string(canonicalize(to_formula(child)), sig);
      if (seen.insert(key).second) phi.children.push_back(std::move(child));
    }
    return solve_final(free, std::move(phi));
  }

  /// Finishes a formula whose children are already solved: refutation by a
  /// child restating alpha, depth reduction, case splits, and finally the
  /// removal of unreachable parts.
  std::vector<NormalFormula> solve_final(const std::vector<Var>& free,
                                         NormalFormula phi) {
    budget.tick();
    assert(phi.depth() <= 3);

    // A child restating exactly alpha leaves no room for a solution.
    for (const NormalFormula& child : phi.children)
      if (child.children.empty() && same_conjuncts(child.alpha, phi.alpha))
        return {};

    if (phi.depth() == 3) return reduce_depth(free, std::move(phi));

    auto inst = find_instantiation(free, phi, sig, analysis, fresh,
                                   opts.splice_all_unique, opts.strategy);
    if (inst) {
      if (stats) {
        InstantiationEvent event;
        event.target = inst->target;
        event.condition = inst->condition;
        for (const InstantiationCase& c : inst->cases)
          event.cases.push_back(Formula::exists(
              c.bound, Formula::conjunction(atom_formulas(c.atoms))));
        stats->events.push_back(std::move(event));
      }
      std::vector<NormalFormula> out;
      for (NormalFormula& case_nf : apply_instantiation(phi, *inst))
        for (NormalFormula& psi : solve_nested(free, std::move(case_nf)))
          out.push_back(std::move(psi));
      return out;
    }

    return {remove_unreachable(free, phi)};
  }

  /// Splits one depth-2 child off a depth-3 formula: the child's own basic
  /// part stays behind as a leaf, and each grandchild is hoisted into a
  /// separate formula under the combined binders. Grandchild conjuncts
  /// subsume both alpha and the child's basic part (they absorbed them on
  /// the way down), so only the grandchild conjuncts need to be kept.
  std::vector<NormalFormula> reduce_depth(const std::vector<Var>& free,
                                          NormalFormula phi) {
    size_t j = phi.children.size();
    for (size_t i = 0; i < phi.children.size(); ++i) {
      if (!phi.children[i].children.empty()) {
        j = i;
        break;
      }
    }
    assert(j < phi.children.size());
    NormalFormula deep = std::move(phi.children[j]);

    std::vector<NormalFormula> others;
    for (size_t i = 0; i < phi.children.size(); ++i)
      if (i != j) others.push_back(phi.children[i]);

    NormalFormula flat;
    flat.bound = phi.bound;
    flat.alpha = phi.alpha;
    flat.children = others;
    NormalFormula leaf;
    leaf.bound = deep.bound;
    leaf.alpha = deep.alpha;
    flat.children.insert(flat.children.begin() + static_cast<long>(j),
                         std::move(leaf));

    std::vector<NormalFormula> out = solve_final(free, std::move(flat));
    for (NormalFormula& grand : deep.children) {
      NormalFormula hoisted;
      hoisted.bound = phi.bound;
      hoisted.bound.insert(hoisted.bound.end(), deep.bound.begin(),
                           deep.bound.end());
      hoisted.bound.insert(hoisted.bound.end(), grand.bound.begin(),
                           grand.bound.end());
      hoisted.alpha = std::move(grand.alpha);
      hoisted.children = others;
      for (NormalFormula& psi : solve_nested(free, std::move(hoisted)))
        out.push_back(std::move(psi));
    }
    return out;
  }

  /// Restricts a depth <= 2 formula with nothing left to instantiate to the
  /// parts reachable from the free variables; the rest quantifies over
  /// unconstrained trees and cannot affect the solutions.
  NormalFormula remove_unreachable(const std::vector<Var>& free,
                                   const NormalFormula& phi) {
    assert(phi.depth() <= 2);
    std::set<std::string> seeds;
    for (const Var& v : free) seeds.insert(v.name);
    std::set<std::string> reach = reachable_set(seeds, phi.alpha);

    NormalFormula out;
    BasicFormula lost_fins;
    for (const Var& x : phi.bound)
      if (reach.count(x.name)) out.bound.push_back(x);
    for (const Equation& e : phi.alpha.eqs)
      if (reach.count(e.lhs.name)) out.alpha.eqs.push_back(e);
    for (const Var& v : phi.alpha.fins) {
      if (reach.count(v.name)) {
        out.alpha.fins.push_back(v);
      } else {
        lost_fins.fins.push_back(v);
      }
    }
    // Unreachable binders split by whether alpha defines them: defined ones
    // migrate into the children that use them, undefined ones range over
    // arbitrary trees and void every child that mentions them.
    std::vector<Var> defined;
    std::set<std::string> undefined;
    for (const Var& x : phi.bound) {
      if (reach.count(x.name)) continue;
      if (phi.alpha.find_lhs(x)) {
        defined.push_back(x);
      } else {
        undefined.insert(x.name);
      }
    }

    for (const NormalFormula& child : phi.children) {
      assert(child.children.empty());
      BasicFormula beta = strip_conjuncts(child.alpha, lost_fins);
      std::vector<Var> binders = defined;
      binders.insert(binders.end(), child.bound.begin(), child.bound.end());
      std::set<std::string> binder_names;
      for (const Var& y : binders) binder_names.insert(y.name);
      std::set<std::string> child_seeds;
      for (const std::string& n : mentioned_names(beta))
        if (!binder_names.count(n)) child_seeds.insert(n);
      std::set<std::string> child_reach = reachable_set(child_seeds, beta);

      NormalFormula kept;
      for (const Var& y : binders)
        if (child_reach.count(y.name)) kept.bound.push_back(y);
      for (const Equation& e : beta.eqs)
        if (child_reach.count(e.lhs.name)) kept.alpha.eqs.push_back(e);
      for (const Var& v : beta.fins)
        if (child_reach.count(v.name)) kept.alpha.fins.push_back(v);

      bool voided = false;
      for (const std::string& n : mentioned_names(kept.alpha)) {
        if (undefined.count(n)) {
          voided = true;
          break;
        }
      }
      if (!voided) out.children.push_back(std::move(kept));
    }
    return out;
  }
};

} // namespace

Formula SolveOutcome::formula() const {
  switch (result) {
    case SolveResult::True:
      return Formula::truth();
    case SolveResult::False:
      return Formula::falsity();
    case SolveResult::Simplified:
      return Formula::disjunction(disjuncts);
  }
  return Formula::falsity();
}

SolveOutcome solve(const Formula& phi, const Signature& sig,
                   const SortAnalysis& analysis, const SolveOptions& opts,
                   SolveStats* stats) {
  Solver solver(sig, analysis, opts, stats);
  // The machinery simplifies negated normal forms, so feed it not(phi):
  // the conjunction of the returned solved formulae is equivalent to
  // not(phi), making phi the disjunction of their negations.
  NormalFormula tilde =
      normalize(Formula::negation(phi), sig, solver.fresh);
  std::vector<Var> free = free_variables(phi);
  std::vector<NormalFormula> psi = solver.solve_nested(free, std::move(tilde));

  // The results form a set; drop duplicates up to bound renaming.
  std::set<std::string> seen;
  std::vector<NormalFormula> unique;
  for (NormalFormula& p : psi) {
    std::string key = to_string(canonicalize(to_formula(p)), sig);
    if (seen.insert(key).second) unique.push_back(std::move(p));
  }

  SolveOutcome out;
  if (unique.empty()) {
    // An empty conjunction is true, so not(phi) always holds.
    out.result = SolveResult::False;
  } else if (std::any_of(unique.begin(), unique.end(),
                         [](const NormalFormula& p) { return is_not_true(p); })) {
    // A not(true) member makes the conjunction false, so phi always holds.
    out.result = SolveResult::True;
  } else {
    out.result = SolveResult::Simplified;
    for (const NormalFormula& p : unique)
      out.disjuncts.push_back(positive_formula(p, true));
    out.solved = std::move(unique);
  }
  if (stats) stats->steps = solver.budget.used;
  return out;
}

SimplifiedCheck check_fully_simplified(const Formula& psi,
                                       const Signature& sig,
                                       const SortAnalysis& analysis,
                                       bool stripped_children) {
  auto fail = [](int condition, std::string detail) {
    return SimplifiedCheck{false, condition, std::move(detail)};
  };

  FreshSource fresh;
  NormalFormula nf = normalize(Formula::negation(psi), sig, fresh);
  if (nf.depth() > 2)
    return fail(0, "negation normal form is deeper than 2");

  std::vector<Var> free = free_variables(psi);
  if (stripped_children)
    for (NormalFormula& child : nf.children)
      child.alpha = merge_alpha(nf.alpha, child.alpha);

  // The required order only fixes bound above free; among the free
  // variables any total order qualifies, so pick one that puts every
  // variable equation's left-hand side above its right-hand side, if
  // possible.
  std::set<std::string> free_names;
  for (const Var& v : free) free_names.insert(v.name);
  std::map<std::string, std::set<std::string>> below;
  auto add_constraints = [&](const BasicFormula& b) {
    for (const Equation& e : b.eqs)
      if (e.rhs_is_var() && free_names.count(e.lhs.name) &&
          free_names.count(e.rhs_var().name) &&
          e.lhs.name != e.rhs_var().name)
        below[e.lhs.name].insert(e.rhs_var().name);
  };
  add_constraints(nf.alpha);
  for (const NormalFormula& child : nf.children) add_constraints(child.alpha);
  std::vector<Var> ordered_free;
  std::set<std::string> placed;
  while (ordered_free.size() < free.size()) {
    bool advanced = false;
    for (const Var& v : free) {
      if (placed.count(v.name)) continue;
      bool ready = true;
      for (const std::string& smaller : below[v.name]) {
        if (!placed.count(smaller)) {
          ready = false;
          break;
        }
      }
      if (ready) {
        ordered_free.push_back(v);
        placed.insert(v.name);
        advanced = true;
      }
    }
    if (!advanced)
      return fail(1, "free variable equations cannot be oriented consistently");
  }

  VarOrder top;
  top.push_all(ordered_free);
  top.push_all(nf.bound);
  if (!is_solved_basic(top, nf.alpha, analysis))
    return fail(1, "top conjunction is not solved");
  for (size_t i = 0; i < nf.children.size(); ++i) {
    VarOrder order = top;
    order.push_all(nf.children[i].bound);
    if (!is_solved_basic(order, nf.children[i].alpha, analysis))
      return fail(1, "negated conjunction " + std::to_string(i + 1) +
                         " is not solved");
  }

  for (size_t i = 0; i < nf.children.size(); ++i)
    for (const Equation& e : nf.alpha.eqs)
      if (!nf.children[i].alpha.contains(e))
        return fail(2, "negated conjunction " + std::to_string(i + 1) +
                           " misses the equation for " + e.lhs.name);

  for (size_t i = 0; i < nf.children.size(); ++i)
    if (strip_conjuncts(nf.children[i].alpha, nf.alpha).empty())
      return fail(3, "negated conjunction " + std::to_string(i + 1) +
                         " adds nothing to the top conjunction");

  std::vector<InstantiableVar> cands =
      instantiable_vars(free, nf, sig, analysis);
  if (!cands.empty())
    return fail(4, "variable " + cands.front().var.name +
                       " is instantiable by condition " +
                       std::to_string(cands.front().condition));

  {
    std::set<std::string> bound_names;
    for (const Var& x : nf.bound) bound_names.insert(x.name);
    std::set<std::string> seeds;
    for (const std::string& n : mentioned_names(nf.alpha))
      if (!bound_names.count(n)) seeds.insert(n);
    std::set<std::string> reach = reachable_set(seeds, nf.alpha);
    for (const Var& x : nf.bound)
      if (!reach.count(x.name))
        return fail(5, "binder " + x.name +
                           " is unreachable from the free variables");
  }
  for (size_t i = 0; i < nf.children.size(); ++i) {
    const NormalFormula& child = nf.children[i];
    std::set<std::string> bound_names;
    for (const Var& y : child.bound) bound_names.insert(y.name);
    std::set<std::string> seeds;
    for (const std::string& n : mentioned_names(child.alpha))
      if (!bound_names.count(n)) seeds.insert(n);
    std::set<std::string> reach = reachable_set(seeds, child.alpha);
    for (const Var& y : child.bound)
      if (!reach.count(y.name))
        return fail(5, "binder " + y.name + " of negated conjunction " +
                           std::to_string(i + 1) +
                           " is unreachable from the free variables");
  }

  return SimplifiedCheck{};
}

bool is_fully_simplified(const Formula& psi, const Signature& sig,
                         const SortAnalysis& analysis,
                         bool stripped_children) {
  return check_fully_simplified(psi, sig, analysis, stripped_children).ok;
}

} // namespace treesolve
