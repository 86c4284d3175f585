#include "treesolve/formula.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "treesolve/errors.hpp"

namespace treesolve {

Formula Formula::make(FormulaNode n) {
  Formula f;
  f.node_ = std::make_shared<const FormulaNode>(std::move(n));
  return f;
}

Formula Formula::truth() { return make({FormulaKind::True, {}, {}, {}, {}}); }
Formula Formula::falsity() { return make({FormulaKind::False, {}, {}, {}, {}}); }

Formula Formula::eq(Term a, Term b) {
  return make({FormulaKind::Eq, std::move(a), std::move(b), {}, {}});
}

Formula Formula::fin(Term t) {
  return make({FormulaKind::Fin, std::move(t), {}, {}, {}});
}

Formula Formula::negation(Formula f) {
  return make({FormulaKind::Not, {}, {}, {}, {std::move(f)}});
}

Formula Formula::conjunction(std::vector<Formula> fs) {
  if (fs.empty()) return truth();
  if (fs.size() == 1) return fs[0];
  return make({FormulaKind::And, {}, {}, {}, std::move(fs)});
}

Formula Formula::disjunction(std::vector<Formula> fs) {
  if (fs.empty()) return falsity();
  if (fs.size() == 1) return fs[0];
  return make({FormulaKind::Or, {}, {}, {}, std::move(fs)});
}

Formula Formula::implies(Formula a, Formula b) {
  return make({FormulaKind::Implies, {}, {}, {}, {std::move(a), std::move(b)}});
}

Formula Formula::iff(Formula a, Formula b) {
  return make({FormulaKind::Iff, {}, {}, {}, {std::move(a), std::move(b)}});
}

Formula Formula::exists(std::vector<Var> bound, Formula body) {
  if (bound.empty()) return body;
  return make({FormulaKind::Exists, {}, {}, std::move(bound), {std::move(body)}});
}

Formula Formula::forall(std::vector<Var> bound, Formula body) {
  if (bound.empty()) return body;
  return make({FormulaKind::Forall, {}, {}, std::move(bound), {std::move(body)}});
}

bool Formula::equal(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Eq:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    case FormulaKind::Fin:
      return a.lhs() == b.lhs();
    default:
      break;
  }
  if (a.bound() != b.bound()) return false;
  if (a.sub().size() != b.sub().size()) return false;
  for (size_t i = 0; i < a.sub().size(); ++i)
    if (a.sub()[i] != b.sub()[i]) return false;
  return true;
}

namespace {

void free_vars_rec(const Formula& f, std::vector<Var>& shadow,
                   std::vector<Var>& out, std::set<std::string>& seen) {
  auto visit_term = [&](const Term& t) {
    std::vector<Var> vars;
    collect_variables(t, vars);
    for (const Var& v : vars) {
      bool shadowed = false;
      for (const Var& s : shadow)
        if (s.name == v.name) {
          shadowed = true;
          break;
        }
      if (!shadowed && seen.insert(v.name).second) out.push_back(v);
    }
  };
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Eq:
      visit_term(f.lhs());
      visit_term(f.rhs());
      return;
    case FormulaKind::Fin:
      visit_term(f.lhs());
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      size_t mark = shadow.size();
      for (const Var& v : f.bound()) shadow.push_back(v);
      free_vars_rec(f.sub()[0], shadow, out, seen);
      shadow.resize(mark);
      return;
    }
    default:
      for (const Formula& g : f.sub()) free_vars_rec(g, shadow, out, seen);
      return;
  }
}

} // namespace

std::vector<Var> free_variables(const Formula& f) {
  std::vector<Var> shadow, out;
  std::set<std::string> seen;
  free_vars_rec(f, shadow, out, seen);
  return out;
}

namespace {

void check_term(const Term& t, const Signature& sig, bool allow_selectors) {
  if (t.is_variable()) {
    if (!t.var().sort.valid() || t.var().sort.index >= sig.sort_count())
      throw SortError("variable '" + t.var().name + "' has an unknown sort");
    return;
  }
  if (t.is_selector()) {
    if (!allow_selectors)
      throw SortError("selector '" + t.sel_name() +
                      "' is not part of the tree theory");
    check_term(t.args()[0], sig, allow_selectors);
    return;
  }
  const Generator& g = sig.generator(t.gen());
  if (t.args().size() != g.arity())
    throw SortError("generator '" + g.name + "' expects " +
                    std::to_string(g.arity()) + " arguments, got " +
                    std::to_string(t.args().size()));
  for (size_t i = 0; i < t.args().size(); ++i) {
    check_term(t.args()[i], sig, allow_selectors);
    if (t.args()[i].sort(sig) != g.arg_sorts[i])
      throw SortError("argument " + std::to_string(i + 1) + " of '" + g.name +
                      "' has sort '" +
                      sig.sort_name(t.args()[i].sort(sig)) + "', expected '" +
                      sig.sort_name(g.arg_sorts[i]) + "'");
  }
}

} // namespace

void check_well_sorted(const Formula& f, const Signature& sig,
                       bool allow_selectors) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Eq: {
      check_term(f.lhs(), sig, allow_selectors);
      check_term(f.rhs(), sig, allow_selectors);
      if (f.lhs().sort(sig) != f.rhs().sort(sig))
        throw SortError("equation between sorts '" +
                        sig.sort_name(f.lhs().sort(sig)) + "' and '" +
                        sig.sort_name(f.rhs().sort(sig)) + "'");
      return;
    }
    case FormulaKind::Fin:
      check_term(f.lhs(), sig, allow_selectors);
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      if (f.bound().empty())
        throw SortError("quantifier with an empty variable list");
      std::set<std::string> names;
      for (const Var& v : f.bound()) {
        if (!names.insert(v.name).second)
          throw SortError("duplicate bound variable '" + v.name + "'");
        if (v.sort.index >= sig.sort_count())
          throw SortError("bound variable '" + v.name +
                          "' has an unknown sort");
      }
      check_well_sorted(f.sub()[0], sig, allow_selectors);
      return;
    }
    default:
      for (const Formula& g : f.sub())
        check_well_sorted(g, sig, allow_selectors);
      return;
  }
}

namespace {

Term substitute_term_var(const Term& t, const Var& from, const Var& to) {
  return substitute(t, from, Term::variable(to));
}

} // namespace

Formula substitute_var(const Formula& f, const Var& from, const Var& to) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Eq:
      return Formula::eq(substitute_term_var(f.lhs(), from, to),
                         substitute_term_var(f.rhs(), from, to));
    case FormulaKind::Fin:
      return Formula::fin(substitute_term_var(f.lhs(), from, to));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      for (const Var& v : f.bound())
        if (v.name == from.name) return f;  // shadowed
      Formula body = substitute_var(f.sub()[0], from, to);
      if (f.kind() == FormulaKind::Exists)
        return Formula::exists(f.bound(), std::move(body));
      return Formula::forall(f.bound(), std::move(body));
    }
    default: {
      std::vector<Formula> subs;
      subs.reserve(f.sub().size());
      for (const Formula& g : f.sub())
        subs.push_back(substitute_var(g, from, to));
      switch (f.kind()) {
        case FormulaKind::Not:
          return Formula::negation(std::move(subs[0]));
        case FormulaKind::And:
          return Formula::conjunction(std::move(subs));
        case FormulaKind::Or:
          return Formula::disjunction(std::move(subs));
        case FormulaKind::Implies:
          return Formula::implies(std::move(subs[0]), std::move(subs[1]));
        case FormulaKind::Iff:
          return Formula::iff(std::move(subs[0]), std::move(subs[1]));
        default:
          throw Error("unreachable formula kind");
      }
    }
  }
}

namespace {

// Structural key that ignores bound-variable names, so that sorting by it is
// stable under alpha-renaming (which makes canonicalize idempotent).
void skeleton_term(const Term& t, const std::set<std::string>& bound,
                   std::string& out) {
  if (t.is_variable()) {
    if (bound.count(t.var().name))
      out += "b" + std::to_string(t.var().sort.index);
    else
      out += "f:" + t.var().name;
    return;
  }
  if (t.is_selector()) {
    out += "(s:" + t.sel_name();
    for (const Term& a : t.args()) {
      out += " ";
      skeleton_term(a, bound, out);
    }
    out += ")";
    return;
  }
  out += "(g" + std::to_string(t.gen().index);
  for (const Term& a : t.args()) {
    out += " ";
    skeleton_term(a, bound, out);
  }
  out += ")";
}

void skeleton(const Formula& f, std::set<std::string>& bound,
              std::string& out) {
  switch (f.kind()) {
    case FormulaKind::True:
      out += "T";
      return;
    case FormulaKind::False:
      out += "F";
      return;
    case FormulaKind::Eq:
      out += "(= ";
      skeleton_term(f.lhs(), bound, out);
      out += " ";
      skeleton_term(f.rhs(), bound, out);
      out += ")";
      return;
    case FormulaKind::Fin:
      out += "(fin ";
      skeleton_term(f.lhs(), bound, out);
      out += ")";
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      out += f.kind() == FormulaKind::Exists ? "(E" : "(A";
      out += std::to_string(f.bound().size());
      std::vector<std::string> added;
      for (const Var& v : f.bound())
        if (bound.insert(v.name).second) added.push_back(v.name);
      out += " ";
      skeleton(f.sub()[0], bound, out);
      out += ")";
      for (const std::string& n : added) bound.erase(n);
      return;
    }
    case FormulaKind::Not:
      out += "(! ";
      skeleton(f.sub()[0], bound, out);
      out += ")";
      return;
    default: {
      switch (f.kind()) {
        case FormulaKind::And: out += "(& "; break;
        case FormulaKind::Or: out += "(| "; break;
        case FormulaKind::Implies: out += "(> "; break;
        default: out += "(~ "; break;
      }
      for (const Formula& g : f.sub()) {
        skeleton(g, bound, out);
        out += " ";
      }
      out += ")";
      return;
    }
  }
}

Formula sort_conjuncts(const Formula& f, std::set<std::string>& bound) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
    case FormulaKind::Fin:
      return f;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<std::string> added;
      for (const Var& v : f.bound())
        if (bound.insert(v.name).second) added.push_back(v.name);
      Formula body = sort_conjuncts(f.sub()[0], bound);
      for (const std::string& n : added) bound.erase(n);
      if (f.kind() == FormulaKind::Exists)
        return Formula::exists(f.bound(), std::move(body));
      return Formula::forall(f.bound(), std::move(body));
    }
    default: {
      std::vector<Formula> subs;
      subs.reserve(f.sub().size());
      for (const Formula& g : f.sub()) subs.push_back(sort_conjuncts(g, bound));
      if (f.kind() == FormulaKind::And || f.kind() == FormulaKind::Or) {
        std::vector<std::pair<std::string, Formula>> keyed;
        keyed.reserve(subs.size());
        for (Formula& g : subs) {
          std::string key;
          skeleton(g, bound, key);
          keyed.emplace_back(std::move(key), std::move(g));
        }
        std::stable_sort(keyed.begin(), keyed.end(),
                         [](const auto& a, const auto& b) {
                           return a.first < b.first;
                         });
        subs.clear();
        for (auto& [key, g] : keyed) subs.push_back(std::move(g));
        if (f.kind() == FormulaKind::And)
          return Formula::conjunction(std::move(subs));
        return Formula::disjunction(std::move(subs));
      }
      switch (f.kind()) {
        case FormulaKind::Not:
          return Formula::negation(std::move(subs[0]));
        case FormulaKind::Implies:
          return Formula::implies(std::move(subs[0]), std::move(subs[1]));
        case FormulaKind::Iff:
          return Formula::iff(std::move(subs[0]), std::move(subs[1]));
        default:
          throw Error("unreachable formula kind");
      }
    }
  }
}

// Bound variables get canonical names in the order they first occur in the
// (already conjunct-sorted) body, so formulae that only differ in binder
// names or binder order compare equal after canonicalization.
struct Binding {
  Var original;
  std::optional<Var> assigned;
  int order = -1;
};

Term rename_term(const Term& t, std::map<std::string, Binding*>& active,
                 int& counter) {
  if (t.is_variable()) {
    auto it = active.find(t.var().name);
    if (it == active.end()) return t;
    Binding* b = it->second;
    if (!b->assigned) {
      b->assigned = Var{"_v" + std::to_string(counter), t.var().sort};
      b->order = counter;
      ++counter;
    }
    return Term::variable(*b->assigned);
  }
  if (t.is_selector())
    return Term::selector(t.sel_name(), t.sel_sort(),
                          rename_term(t.args()[0], active, counter));
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args())
    args.push_back(rename_term(a, active, counter));
  return Term::app(t.gen(), std::move(args));
}

Formula rename_bound(const Formula& f, std::map<std::string, Binding*>& active,
                     int& counter) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Eq:
      return Formula::eq(rename_term(f.lhs(), active, counter),
                         rename_term(f.rhs(), active, counter));
    case FormulaKind::Fin:
      return Formula::fin(rename_term(f.lhs(), active, counter));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<Binding> frame;
      frame.reserve(f.bound().size());
      for (const Var& v : f.bound()) frame.push_back({v, std::nullopt, -1});
      std::vector<std::pair<std::string, Binding*>> saved;
      for (Binding& b : frame) {
        auto it = active.find(b.original.name);
        saved.emplace_back(b.original.name,
                           it != active.end() ? it->second : nullptr);
        active[b.original.name] = &b;
      }
      Formula body = rename_bound(f.sub()[0], active, counter);
      // Binders never mentioned in the body come last, in original order.
      for (Binding& b : frame) {
        if (!b.assigned) {
          b.assigned = Var{"_v" + std::to_string(counter), b.original.sort};
          b.order = counter;
          ++counter;
        }
      }
      for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
        if (it->second)
          active[it->first] = it->second;
        else
          active.erase(it->first);
      }
      std::stable_sort(frame.begin(), frame.end(),
                       [](const Binding& a, const Binding& b) {
                         return a.order < b.order;
                       });
      std::vector<Var> fresh;
      fresh.reserve(frame.size());
      for (const Binding& b : frame) fresh.push_back(*b.assigned);
      if (f.kind() == FormulaKind::Exists)
        return Formula::exists(std::move(fresh), std::move(body));
      return Formula::forall(std::move(fresh), std::move(body));
    }
    default: {
      std::vector<Formula> subs;
      subs.reserve(f.sub().size());
      for (const Formula& g : f.sub())
        subs.push_back(rename_bound(g, active, counter));
      switch (f.kind()) {
        case FormulaKind::Not:
          return Formula::negation(std::move(subs[0]));
        case FormulaKind::And:
          return Formula::conjunction(std::move(subs));
        case FormulaKind::Or:
          return Formula::disjunction(std::move(subs));
        case FormulaKind::Implies:
          return Formula::implies(std::move(subs[0]), std::move(subs[1]));
        case FormulaKind::Iff:
          return Formula::iff(std::move(subs[0]), std::move(subs[1]));
        default:
          throw Error("unreachable formula kind");
      }
    }
  }
}

} // namespace

Formula canonicalize(const Formula& f) {
  std::set<std::string> bound;
  Formula sorted = sort_conjuncts(f, bound);
  std::map<std::string, Binding*> active;
  int counter = 0;
  return rename_bound(sorted, active, counter);
}

std::string to_string(const Formula& f, const Signature& sig) {
  switch (f.kind()) {
    case FormulaKind::True:
      return "true";
    case FormulaKind::False:
      return "false";
    case FormulaKind::Eq:
      return "(= " + to_string(f.lhs(), sig) + " " + to_string(f.rhs(), sig) +
             ")";
    case FormulaKind::Fin:
      return "(fin " + to_string(f.lhs(), sig) + ")";
    case FormulaKind::Not:
      return "(not " + to_string(f.sub()[0], sig) + ")";
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::string out =
          f.kind() == FormulaKind::Exists ? "(exists (" : "(forall (";
      for (size_t i = 0; i < f.bound().size(); ++i) {
        if (i) out += " ";
        out += "(" + f.bound()[i].name + " " +
               sig.sort_name(f.bound()[i].sort) + ")";
      }
      out += ") " + to_string(f.sub()[0], sig) + ")";
      return out;
    }
    default: {
      std::string head;
      switch (f.kind()) {
        case FormulaKind::And: head = "and"; break;
        case FormulaKind::Or: head = "or"; break;
        case FormulaKind::Implies: head = "=>"; break;
        default: head = "<=>"; break;
      }
      std::string out = "(" + head;
      for (const Formula& g : f.sub()) out += " " + to_string(g, sig);
      out += ")";
      return out;
    }
  }
}

} // namespace treesolve
