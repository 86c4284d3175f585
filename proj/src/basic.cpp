#include "treesolve/basic.hpp"

#include <algorithm>
#include <stdexcept>

#include "treesolve/analysis.hpp"
#include "treesolve/errors.hpp"

namespace treesolve {

bool BasicFormula::has_fin(const Var& v) const {
  for (const Var& f : fins)
    if (f == v) return true;
  return false;
}

const Equation* BasicFormula::find_lhs(const Var& v) const {
  for (const Equation& e : eqs)
    if (e.lhs == v) return &e;
  return nullptr;
}

bool BasicFormula::mentions(const Var& v) const {
  for (const Equation& e : eqs) {
    if (e.lhs == v) return true;
    if (e.rhs_is_var()) {
      if (e.rhs_var() == v) return true;
    } else {
      for (const Var& a : e.rhs_app().args)
        if (a == v) return true;
    }
  }
  return has_fin(v);
}

bool BasicFormula::contains(const Equation& e) const {
  for (const Equation& own : eqs)
    if (own == e) return true;
  return false;
}

namespace {

std::string eq_key(const Equation& e) {
  std::string k = e.lhs.name + "=";
  if (e.rhs_is_var()) {
    k += e.rhs_var().name;
  } else {
    k += "#" + std::to_string(e.rhs_app().gen.index) + "(";
    for (const Var& a : e.rhs_app().args) k += a.name + ",";
    k += ")";
  }
  return k;
}

} // namespace

bool same_conjuncts(const BasicFormula& a, const BasicFormula& b) {
  std::set<std::string> ka, kb;
  for (const Equation& e : a.eqs) ka.insert(eq_key(e));
  for (const Equation& e : b.eqs) kb.insert(eq_key(e));
  if (ka != kb) return false;
  std::set<std::string> fa, fb;
  for (const Var& v : a.fins) fa.insert(v.name);
  for (const Var& v : b.fins) fb.insert(v.name);
  return fa == fb;
}

BasicFormula strip_conjuncts(const BasicFormula& b, const BasicFormula& common) {
  BasicFormula out;
  for (const Equation& e : b.eqs)
    if (!common.contains(e)) out.eqs.push_back(e);
  for (const Var& v : b.fins)
    if (!common.has_fin(v)) out.fins.push_back(v);
  return out;
}

void VarOrder::push(const Var& v) {
  if (rank_.count(v.name)) return;
  rank_[v.name] = vars_.size();
  vars_.push_back(v);
}

void VarOrder::push_all(const std::vector<Var>& vs) {
  for (const Var& v : vs) push(v);
}

size_t VarOrder::rank(const Var& v) const {
  auto it = rank_.find(v.name);
  if (it == rank_.end())
    throw std::logic_error("variable not in order: " + v.name);
  return it->second;
}

namespace {

/// Flattens term t; returns the variable standing for it. Non-variable
/// subterms get fresh variables and defining equations.
Var flatten_term(const Term& t, const Signature& sig, FreshSource& fresh,
                 std::vector<Var>& fresh_bound, BasicFormula& out) {
  if (t.is_variable()) return t.var();
  if (!t.is_app())
    throw SortError("selector terms cannot appear in tree formulae");
  const Generator& g = sig.generator(t.gen());
  FlatApp app;
  app.gen = t.gen();
  for (const Term& a : t.args())
    app.args.push_back(flatten_term(a, sig, fresh, fresh_bound, out));
  Var v = fresh.fresh(g.result_sort);
  fresh_bound.push_back(v);
  out.eqs.push_back(Equation{v, std::move(app)});
  return v;
}

/// Like flatten_term but keeps the top application in place for lhs = f(..).
FlatApp flatten_top_app(const Term& t, const Signature& sig,
                        FreshSource& fresh, std::vector<Var>& fresh_bound,
                        BasicFormula& out) {
  FlatApp app;
  app.gen = t.gen();
  for (const Term& a : t.args())
    app.args.push_back(flatten_term(a, sig, fresh, fresh_bound, out));
  return app;
}

} // namespace

BasicFormula flatten_to_basic(const std::vector<Formula>& atoms,
                              const Signature& sig, FreshSource& fresh,
                              std::vector<Var>& fresh_bound) {
  BasicFormula out;
  for (const Formula& a : atoms) {
    switch (a.kind()) {
      case FormulaKind::Eq: {
        const Term& l = a.lhs();
        const Term& r = a.rhs();
        if (l.is_variable() && r.is_variable()) {
          out.eqs.push_back(Equation{l.var(), r.var()});
        } else if (l.is_variable()) {
          out.eqs.push_back(Equation{
              l.var(), flatten_top_app(r, sig, fresh, fresh_bound, out)});
        } else if (r.is_variable()) {
          out.eqs.push_back(Equation{
              r.var(), flatten_top_app(l, sig, fresh, fresh_bound, out)});
        } else {
          Var v = fresh.fresh(l.sort(sig));
          fresh_bound.push_back(v);
          out.eqs.push_back(Equation{
              v, flatten_top_app(l, sig, fresh, fresh_bound, out)});
          out.eqs.push_back(Equation{
              v, flatten_top_app(r, sig, fresh, fresh_bound, out)});
        }
        break;
      }
      case FormulaKind::Fin: {
        const Term& t = a.lhs();
        if (t.is_variable()) {
          out.fins.push_back(t.var());
        } else {
          Var v = flatten_term(t, sig, fresh, fresh_bound, out);
          out.fins.push_back(v);
        }
        break;
      }
      default:
        throw std::logic_error("flatten_to_basic: non-atomic formula");
    }
  }
  return out;
}

std::set<std::string> reachable_set(const Var& start, const BasicFormula& b) {
  return reachable_set(std::set<std::string>{start.name}, b);
}

std::set<std::string> reachable_set(const std::set<std::string>& seeds,
                                    const BasicFormula& b) {
  std::set<std::string> seen = seeds;
  std::vector<std::string> work(seeds.begin(), seeds.end());
  while (!work.empty()) {
    std::string v = work.back();
    work.pop_back();
    for (const Equation& e : b.eqs) {
      if (e.lhs.name != v) continue;
      auto visit = [&](const Var& w) {
        if (seen.insert(w.name).second) work.push_back(w.name);
      };
      if (e.rhs_is_var()) {
        visit(e.rhs_var());
      } else {
        for (const Var& a : e.rhs_app().args) visit(a);
      }
    }
  }
  return seen;
}

bool is_properly_reachable(const Var& v, const BasicFormula& b) {
  // One step out of v, then reachability back to v.
  for (const Equation& e : b.eqs) {
    if (e.lhs != v) continue;
    auto reaches_v = [&](const Var& w) {
      return reachable_set(w, b).count(v.name) != 0;
    };
    if (e.rhs_is_var()) {
      if (reaches_v(e.rhs_var())) return true;
    } else {
      for (const Var& a : e.rhs_app().args)
        if (reaches_v(a)) return true;
    }
  }
  return false;
}

bool is_solved_basic(const VarOrder& order, const BasicFormula& b,
                     const SortAnalysis& analysis) {
  std::set<std::string> lhs_seen;
  for (const Equation& e : b.eqs) {
    if (!lhs_seen.insert(e.lhs.name).second) return false;
    if (e.rhs_is_var()) {
      // Oriented: larger variable on the left.
      if (!order.less(e.rhs_var(), e.lhs)) return false;
    }
  }
  std::set<std::string> fin_seen;
  for (const Var& v : b.fins) {
    if (!fin_seen.insert(v.name).second) return false;
    if (lhs_seen.count(v.name)) return false;
    if (!analysis.fin_meaningful(v.sort)) return false;
  }
  return true;
}

BasicFormula canonical_solved_basic(const VarOrder& order,
                                    const BasicFormula& b) {
  std::map<std::string, Var> parent;
  for (const Equation& e : b.eqs)
    if (e.rhs_is_var()) parent.emplace(e.lhs.name, e.rhs_var());
  auto rep = [&](Var v) {
    // Orientation makes the chains descend, so this terminates.
    auto it = parent.find(v.name);
    while (it != parent.end()) {
      v = it->second;
      it = parent.find(v.name);
    }
    return v;
  };

  BasicFormula out;
  for (const Equation& e : b.eqs) {
    if (e.rhs_is_var()) {
      out.eqs.push_back(Equation{e.lhs, rep(e.rhs_var())});
    } else {
      FlatApp app = e.rhs_app();
      for (Var& a : app.args) a = rep(a);
      out.eqs.push_back(Equation{e.lhs, std::move(app)});
    }
  }
  for (const Var& v : b.fins) out.fins.push_back(rep(v));

  std::sort(out.eqs.begin(), out.eqs.end(),
            [&](const Equation& a, const Equation& c) {
              return order.rank(a.lhs) < order.rank(c.lhs);
            });
  std::sort(out.fins.begin(), out.fins.end(), [&](const Var& a, const Var& c) {
    return order.rank(a) < order.rank(c);
  });
  return out;
}

Formula basic_to_formula(const BasicFormula& b) {
  std::vector<Formula> parts;
  for (const Equation& e : b.eqs) {
    Term lhs = Term::variable(e.lhs);
    Term rhs;
    if (e.rhs_is_var()) {
      rhs = Term::variable(e.rhs_var());
    } else {
      std::vector<Term> args;
      for (const Var& a : e.rhs_app().args) args.push_back(Term::variable(a));
      rhs = Term::app(e.rhs_app().gen, std::move(args));
    }
    parts.push_back(Formula::eq(lhs, rhs));
  }
  for (const Var& v : b.fins)
    parts.push_back(Formula::fin(Term::variable(v)));
  return Formula::conjunction(std::move(parts));
}

std::string to_string(const BasicFormula& b, const Signature& sig) {
  return to_string(basic_to_formula(b), sig);
}

} // namespace treesolve
