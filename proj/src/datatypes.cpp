#include "treesolve/datatypes.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treesolve/errors.hpp"

namespace treesolve {

namespace {

const char* kind_word(DeclKind k) {
  return k == DeclKind::Datatype ? "datatype" : "codatatype";
}

/// Looks the selector up and checks the application against its declaration.
const SelectorInfo& resolve_selector(const Term& t,
                                     const DeclaredSignature& ds) {
  auto it = ds.selectors.find(t.sel_name());
  if (it == ds.selectors.end())
    throw FrontendError("unknown selector '" + t.sel_name() + "'");
  const SelectorInfo& info = it->second;
  if (t.sel_sort() != info.result)
    throw SortError("selector '" + t.sel_name() + "' has result sort '" +
                    ds.sig.sort_name(info.result) + "', not '" +
                    ds.sig.sort_name(t.sel_sort()) + "'");
  SortId arg = t.args()[0].sort(ds.sig);
  if (arg != info.domain)
    throw SortError("selector '" + t.sel_name() + "' applied to sort '" +
                    ds.sig.sort_name(arg) + "', expected '" +
                    ds.sig.sort_name(info.domain) + "'");
  return info;
}

/// Copies src's nodes into dst and returns the new index of src's root.
uint32_t append_tree(RationalTree& dst, const RationalTree& src) {
  uint32_t base = static_cast<uint32_t>(dst.nodes.size());
  for (const RationalTree::Node& n : src.nodes) {
    RationalTree::Node m{n.gen, n.children};
    for (uint32_t& c : m.children) c += base;
    dst.nodes.push_back(std::move(m));
  }
  return base + src.root;
}

/// Minimal depth of a ground term per sort (a constant has depth 1);
/// INT_MAX for sorts with no finite trees.
std::vector<int> min_ground_depths(const Signature& sig) {
  const int none = std::numeric_limits<int>::max();
  std::vector<int> depth(sig.sort_count(), none);
  for (bool changed = true; changed;) {
    changed = false;
    for (uint32_t gi = 0; gi < sig.generator_count(); ++gi) {
      const Generator& g = sig.generator(GenId{gi});
      int d = 1;
      bool ok = true;
      for (SortId a : g.arg_sorts) {
        if (depth[a.index] == none) {
          ok = false;
          break;
        }
        d = std::max(d, depth[a.index] + 1);
      }
      if (ok && d < depth[g.result_sort.index]) {
        depth[g.result_sort.index] = d;
        changed = true;
      }
    }
  }
  return depth;
}

bool has_quantifier(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
    case FormulaKind::Fin:
      return false;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return true;
    default:
      for (const Formula& g : f.sub())
        if (has_quantifier(g)) return true;
      return false;
  }
}

} // namespace

DeclaredSignature check_declarations(const std::vector<DatatypeDecl>& decls) {
  DeclaredSignature out;
  for (const DatatypeDecl& d : decls) {
    if (d.constructors.empty())
      throw FrontendError(std::string(kind_word(d.kind)) + " '" + d.name +
                          "' declares no constructors");
    if (out.sig.find_sort(d.name))
      throw FrontendError("sort '" + d.name + "' is declared twice");
    out.sig.add_sort(d.name);
    out.kinds.push_back(d.kind);
  }
  for (const DatatypeDecl& d : decls) {
    SortId s = *out.sig.find_sort(d.name);
    for (const ConstructorDecl& c : d.constructors) {
      if (out.sig.find_generator(c.name))
        throw FrontendError("constructor '" + c.name + "' is declared twice");
      std::vector<SortId> args;
      for (const auto& [sel, sort_name] : c.selectors) {
        auto arg = out.sig.find_sort(sort_name);
        if (!arg)
          throw FrontendError("constructor '" + c.name +
                              "' references the undeclared sort '" +
                              sort_name + "'");
        if (out.kinds[arg->index] != d.kind)
          throw FrontendError(std::string("mixed declaration: ") +
                              kind_word(d.kind) + " '" + d.name +
                              "' constructor '" + c.name + "' takes the " +
                              kind_word(out.kinds[arg->index]) + " '" +
                              sort_name + "'");
        args.push_back(*arg);
      }
      GenId g = out.sig.add_generator(c.name, args, s);
      for (size_t i = 0; i < c.selectors.size(); ++i) {
        const std::string& sel = c.selectors[i].first;
        if (!out.selectors.emplace(sel, SelectorInfo{g, i, s, args[i]}).second)
          throw FrontendError("selector '" + sel + "' is declared twice");
      }
    }
  }
  // Well-foundedness: every datatype needs a finite value. The no-mixing
  // rule keeps datatype constructor arguments inside the datatype-only
  // sub-signature, so its zero sets are well defined.
  Signature dsub;
  for (const DatatypeDecl& d : decls)
    if (d.kind == DeclKind::Datatype) dsub.add_sort(d.name);
  for (const DatatypeDecl& d : decls) {
    if (d.kind != DeclKind::Datatype) continue;
    SortId s = *dsub.find_sort(d.name);
    for (const ConstructorDecl& c : d.constructors) {
      std::vector<SortId> args;
      for (const auto& [sel, sort_name] : c.selectors)
        args.push_back(*dsub.find_sort(sort_name));
      dsub.add_generator(c.name, args, s);
    }
  }
  SortSet s0f, s0i;
  compute_zero_sets(dsub, s0f, s0i);
  for (SortId s : s0f.members())
    throw FrontendError("datatype '" + dsub.sort_name(s) +
                        "' is not well-founded: it has no finite values");
  return out;
}

RationalTree default_value_for(const Signature& sig,
                               const SortAnalysis& analysis, SortId sort) {
  if (sig.generators_of(sort).empty())
    throw SignatureError("sort '" + sig.sort_name(sort) +
                         "' has no generators");
  const int none = std::numeric_limits<int>::max();
  std::vector<int> depth = min_ground_depths(sig);
  RationalTree out;
  std::map<uint32_t, uint32_t> loop_node;
  std::function<uint32_t(SortId)> build = [&](SortId s) -> uint32_t {
    if (!analysis.s0f.contains(s)) {
      // The lexicographically smallest generator achieving the minimal
      // ground depth of the sort.
      GenId best;
      for (GenId g : sig.generators_of(s)) {
        const Generator& gen = sig.generator(g);
        int d = 1;
        bool ok = true;
        for (SortId a : gen.arg_sorts) {
          if (depth[a.index] == none) {
            ok = false;
            break;
          }
          d = std::max(d, depth[a.index] + 1);
        }
        if (!ok || d != depth[s.index]) continue;
        if (!best.valid() || gen.name < sig.generator(best).name) best = g;
      }
      uint32_t id = static_cast<uint32_t>(out.nodes.size());
      out.nodes.push_back({best, {}});
      for (SortId a : sig.generator(best).arg_sorts) {
        uint32_t c = build(a);
        out.nodes[id].children.push_back(c);
      }
      return id;
    }
    // No finite tree exists: loop through one node per sort, picking the
    // lexicographically smallest generator. Every generator of such a sort
    // has an argument back in S_0F, so the path closes into a cycle.
    auto it = loop_node.find(s.index);
    if (it != loop_node.end()) return it->second;
    GenId best;
    for (GenId g : sig.generators_of(s))
      if (!best.valid() || sig.generator(g).name < sig.generator(best).name)
        best = g;
    uint32_t id = static_cast<uint32_t>(out.nodes.size());
    out.nodes.push_back({best, {}});
    loop_node.emplace(s.index, id);
    for (SortId a : sig.generator(best).arg_sorts) {
      uint32_t c = build(a);
      out.nodes[id].children.push_back(c);
    }
    return id;
  };
  out.root = build(sort);
  return out;
}

DefaultValueTable auto_defaults(const DeclaredSignature& ds,
                                const SortAnalysis& analysis) {
  DefaultValueTable table;
  for (const auto& [name, info] : ds.selectors)
    table.set(info.constructor, info.index,
              default_value_for(ds.sig, analysis, info.result));
  return table;
}

bool selector_free(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Eq:
      return selector_free(f.lhs()) && selector_free(f.rhs());
    case FormulaKind::Fin:
      return selector_free(f.lhs());
    default:
      for (const Formula& g : f.sub())
        if (!selector_free(g)) return false;
      return true;
  }
}

Formula equate_to_tree(const Term& lhs, const RationalTree& value,
                       const Signature& sig, FreshSource& fresh) {
  if (is_finite_tree(value)) {
    std::function<Term(uint32_t)> term_of = [&](uint32_t n) -> Term {
      std::vector<Term> args;
      for (uint32_t c : value.nodes[n].children) args.push_back(term_of(c));
      return Term::app(value.nodes[n].gen, std::move(args));
    };
    return Formula::eq(lhs, term_of(value.root));
  }
  // One variable per distinct subtree; the equations have that tree as
  // their unique solution.
  std::vector<uint32_t> order;
  std::map<uint32_t, Var> var_of;
  std::function<void(uint32_t)> visit = [&](uint32_t n) {
    if (var_of.count(n)) return;
    var_of.emplace(n,
                   fresh.fresh(sig.generator(value.nodes[n].gen).result_sort));
    order.push_back(n);
    for (uint32_t c : value.nodes[n].children) visit(c);
  };
  visit(value.root);
  std::vector<Formula> conj;
  conj.push_back(Formula::eq(lhs, Term::variable(var_of.at(value.root))));
  std::vector<Var> bound;
  for (uint32_t n : order) {
    bound.push_back(var_of.at(n));
    std::vector<Term> args;
    for (uint32_t c : value.nodes[n].children)
      args.push_back(Term::variable(var_of.at(c)));
    conj.push_back(Formula::eq(Term::variable(var_of.at(n)),
                               Term::app(value.nodes[n].gen, std::move(args))));
  }
  return Formula::exists(std::move(bound), Formula::conjunction(std::move(conj)));
}

namespace {

/// Default-value selector elimination: isolate every selector application
/// into an equation x = sel(t) with t selector-free, then case-split on
/// whether t is built by sel's constructor.
struct DefaultElim {
  const DeclaredSignature& ds;
  const DefaultValueTable& defaults;
  FreshSource& fresh;

  Term strip(const Term& t, std::vector<std::pair<Var, Term>>& bindings) {
    if (t.is_variable()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(strip(a, bindings));
    if (t.is_app()) return Term::app(t.gen(), std::move(args));
    const SelectorInfo& info = resolve_selector(t, ds);
    Var x = fresh.fresh(info.result);
    bindings.emplace_back(
        x, Term::selector(t.sel_name(), t.sel_sort(), std::move(args[0])));
    return Term::variable(x);
  }

  Formula expand(const Var& x, const Term& sel) {
    const SelectorInfo& info = resolve_selector(sel, ds);
    const Generator& c = ds.sig.generator(info.constructor);
    const Term& s = sel.args()[0];
    auto match = [&](std::vector<Var>& vs) {
      std::vector<Term> args;
      for (SortId a : c.arg_sorts) {
        Var v = fresh.fresh(a);
        vs.push_back(v);
        args.push_back(Term::variable(v));
      }
      return Formula::eq(s, Term::app(info.constructor, std::move(args)));
    };
    std::vector<Var> vs1;
    Formula eq_cons = match(vs1);
    Formula projected =
        Formula::eq(Term::variable(x), Term::variable(vs1[info.index]));
    Formula first = Formula::exists(
        vs1, Formula::conjunction({eq_cons, projected}));
    std::vector<Var> vs2;
    Formula match2 = match(vs2);
    Formula other = Formula::negation(Formula::exists(vs2, std::move(match2)));
    const RationalTree* dv = defaults.find(info.constructor, info.index);
    if (!dv)
      throw FrontendError("no default value for selector '" + sel.sel_name() +
                          "' of constructor '" + c.name + "'");
    Formula fallback =
        equate_to_tree(Term::variable(x), *dv, ds.sig, fresh);
    Formula second = Formula::conjunction({other, fallback});
    return Formula::disjunction({first, second});
  }

  Formula atom(const Formula& a) {
    std::vector<std::pair<Var, Term>> bindings;
    Formula core;
    if (a.kind() == FormulaKind::Eq) {
      Term l = strip(a.lhs(), bindings);
      Term r = strip(a.rhs(), bindings);
      if (bindings.empty()) return a;
      core = Formula::eq(std::move(l), std::move(r));
    } else {
      Term l = strip(a.lhs(), bindings);
      if (bindings.empty()) return a;
      core = Formula::fin(std::move(l));
    }
    std::vector<Formula> conj;
    conj.push_back(std::move(core));
    std::vector<Var> bound;
    for (const auto& [x, sel] : bindings) {
      bound.push_back(x);
      conj.push_back(expand(x, sel));
    }
    return Formula::exists(std::move(bound),
                           Formula::conjunction(std::move(conj)));
  }

  Formula run(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False:
        return f;
      case FormulaKind::Eq:
      case FormulaKind::Fin:
        return atom(f);
      case FormulaKind::Not:
        return Formula::negation(run(f.sub()[0]));
      case FormulaKind::And:
      case FormulaKind::Or: {
        std::vector<Formula> subs;
        subs.reserve(f.sub().size());
        for (const Formula& g : f.sub()) subs.push_back(run(g));
        return f.kind() == FormulaKind::And
                   ? Formula::conjunction(std::move(subs))
                   : Formula::disjunction(std::move(subs));
      }
      case FormulaKind::Implies: {
        Formula a = run(f.sub()[0]);
        Formula b = run(f.sub()[1]);
        return Formula::implies(std::move(a), std::move(b));
      }
      case FormulaKind::Iff: {
        Formula a = run(f.sub()[0]);
        Formula b = run(f.sub()[1]);
        return Formula::iff(std::move(a), std::move(b));
      }
      case FormulaKind::Exists:
        return Formula::exists(f.bound(), run(f.sub()[0]));
      case FormulaKind::Forall:
        return Formula::forall(f.bound(), run(f.sub()[0]));
    }
    throw Error("unreachable formula kind");
  }
};

/// First selector application in traversal order whose argument is
/// selector-free.
bool find_innermost(const Term& t, Term& out) {
  if (t.is_variable()) return false;
  for (const Term& a : t.args())
    if (find_innermost(a, out)) return true;
  if (t.is_selector()) {
    out = t;
    return true;
  }
  return false;
}

bool find_innermost(const Formula& f, Term& out) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return false;
    case FormulaKind::Eq:
      return find_innermost(f.lhs(), out) || find_innermost(f.rhs(), out);
    case FormulaKind::Fin:
      return find_innermost(f.lhs(), out);
    default:
      for (const Formula& g : f.sub())
        if (find_innermost(g, out)) return true;
      return false;
  }
}

Term replace_term(const Term& t, const Term& target, const Term& repl) {
  if (t == target) return repl;
  if (t.is_variable()) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(replace_term(a, target, repl));
  if (t.is_selector())
    return Term::selector(t.sel_name(), t.sel_sort(), std::move(args[0]));
  return Term::app(t.gen(), std::move(args));
}

Formula replace_term(const Formula& f, const Term& target, const Term& repl) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Eq:
      return Formula::eq(replace_term(f.lhs(), target, repl),
                         replace_term(f.rhs(), target, repl));
    case FormulaKind::Fin:
      return Formula::fin(replace_term(f.lhs(), target, repl));
    case FormulaKind::Not:
      return Formula::negation(replace_term(f.sub()[0], target, repl));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> subs;
      subs.reserve(f.sub().size());
      for (const Formula& g : f.sub())
        subs.push_back(replace_term(g, target, repl));
      return f.kind() == FormulaKind::And
                 ? Formula::conjunction(std::move(subs))
                 : Formula::disjunction(std::move(subs));
    }
    case FormulaKind::Implies: {
      Formula a = replace_term(f.sub()[0], target, repl);
      Formula b = replace_term(f.sub()[1], target, repl);
      return Formula::implies(std::move(a), std::move(b));
    }
    case FormulaKind::Iff: {
      Formula a = replace_term(f.sub()[0], target, repl);
      Formula b = replace_term(f.sub()[1], target, repl);
      return Formula::iff(std::move(a), std::move(b));
    }
    default:
      throw FrontendError("quantifier in quantifier-free rewriting");
  }
}

} // namespace

Formula eliminate_selectors_default(const Formula& f,
                                    const DeclaredSignature& ds,
                                    const DefaultValueTable& defaults,
                                    FreshSource& fresh) {
  if (selector_free(f)) return f;
  DefaultElim elim{ds, defaults, fresh};
  return elim.run(f);
}

Formula eliminate_selectors_standard(const Formula& f,
                                     const DeclaredSignature& ds,
                                     FreshSource& fresh) {
  if (has_quantifier(f))
    throw FrontendError(
        "standard-semantics selector elimination needs a quantifier-free "
        "formula; the default-value semantics handles quantified input");
  struct Binding {
    Var v;
    std::string sel;
    SelectorInfo info;
    Term arg;
  };
  std::vector<Binding> bindings;
  Formula cur = f;
  Term t;
  // Replace innermost selector terms by fresh variables, all occurrences of
  // the same term at once.
  while (find_innermost(cur, t)) {
    const SelectorInfo& info = resolve_selector(t, ds);
    Var v = fresh.fresh(info.result);
    bindings.push_back({v, t.sel_name(), info, t.args()[0]});
    cur = replace_term(cur, t, Term::variable(v));
  }
  if (bindings.empty()) return f;
  std::vector<Formula> conj;
  for (const Binding& b : bindings) {
    // forall zs. arg = C(zs) -> zs_i = v
    const Generator& c = ds.sig.generator(b.info.constructor);
    std::vector<Var> zs;
    std::vector<Term> args;
    for (SortId a : c.arg_sorts) {
      Var z = fresh.fresh(a);
      zs.push_back(z);
      args.push_back(Term::variable(z));
    }
    Formula matches =
        Formula::eq(b.arg, Term::app(b.info.constructor, std::move(args)));
    Formula projected = Formula::eq(Term::variable(zs[b.info.index]),
                                    Term::variable(b.v));
    conj.push_back(Formula::forall(
        std::move(zs),
        Formula::implies(std::move(matches), std::move(projected))));
  }
  // Functional consistency between occurrences of the same selector.
  for (size_t j = 0; j < bindings.size(); ++j)
    for (size_t k = j + 1; k < bindings.size(); ++k) {
      if (bindings[j].sel != bindings[k].sel) continue;
      conj.push_back(Formula::implies(
          Formula::eq(bindings[j].arg, bindings[k].arg),
          Formula::eq(Term::variable(bindings[j].v),
                      Term::variable(bindings[k].v))));
    }
  conj.push_back(std::move(cur));
  return Formula::conjunction(std::move(conj));
}

namespace {

Formula embed_rec(const Formula& f, const DeclaredSignature& ds) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
    case FormulaKind::Fin:
      return f;
    case FormulaKind::Not:
      return Formula::negation(embed_rec(f.sub()[0], ds));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> subs;
      subs.reserve(f.sub().size());
      for (const Formula& g : f.sub()) subs.push_back(embed_rec(g, ds));
      return f.kind() == FormulaKind::And
                 ? Formula::conjunction(std::move(subs))
                 : Formula::disjunction(std::move(subs));
    }
    case FormulaKind::Implies: {
      Formula a = embed_rec(f.sub()[0], ds);
      Formula b = embed_rec(f.sub()[1], ds);
      return Formula::implies(std::move(a), std::move(b));
    }
    case FormulaKind::Iff: {
      Formula a = embed_rec(f.sub()[0], ds);
      Formula b = embed_rec(f.sub()[1], ds);
      return Formula::iff(std::move(a), std::move(b));
    }
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::vector<Formula> guards;
      for (const Var& v : f.bound())
        if (ds.is_datatype(v.sort))
          guards.push_back(Formula::fin(Term::variable(v)));
      Formula body = embed_rec(f.sub()[0], ds);
      if (f.kind() == FormulaKind::Exists) {
        if (guards.empty()) return Formula::exists(f.bound(), std::move(body));
        guards.push_back(std::move(body));
        return Formula::exists(f.bound(),
                               Formula::conjunction(std::move(guards)));
      }
      if (guards.empty()) return Formula::forall(f.bound(), std::move(body));
      // forall vs. b becomes not(exists vs. fins and not b): the guards
      // restrict the datatype binders to finite trees.
      guards.push_back(Formula::negation(std::move(body)));
      return Formula::negation(Formula::exists(
          f.bound(), Formula::conjunction(std::move(guards))));
    }
  }
  throw Error("unreachable formula kind");
}

} // namespace

Formula embed_in_trees(const Formula& f, const DeclaredSignature& ds) {
  if (!selector_free(f))
    throw FrontendError(
        "embedding needs a selector-free formula; run a selector "
        "elimination first");
  Formula body = embed_rec(f, ds);
  std::vector<Formula> conj;
  for (const Var& v : free_variables(f))
    if (ds.is_datatype(v.sort)) conj.push_back(Formula::fin(Term::variable(v)));
  if (conj.empty()) return body;
  conj.push_back(std::move(body));
  return Formula::conjunction(std::move(conj));
}

namespace {

/// Shared term evaluation for the two reference semantics. eval_selector
/// decides what a selector returns on a wrong-constructor argument.
template <typename WrongConstructor>
RationalTree eval_term(const Term& t, const DeclaredSignature& ds,
                       const Valuation& vals, WrongConstructor&& wrong) {
  if (t.is_variable()) {
    auto it = vals.find(t.var().name);
    if (it == vals.end())
      throw SortError("variable '" + t.var().name + "' has no value");
    return it->second;
  }
  if (t.is_app()) {
    RationalTree out;
    out.nodes.push_back({t.gen(), {}});
    for (const Term& a : t.args()) {
      RationalTree sub = eval_term(a, ds, vals, wrong);
      uint32_t r = append_tree(out, sub);
      out.nodes[0].children.push_back(r);
    }
    return out;
  }
  const SelectorInfo& info = resolve_selector(t, ds);
  RationalTree arg = eval_term(t.args()[0], ds, vals, wrong);
  if (arg.nodes[arg.root].gen == info.constructor) {
    arg.root = arg.nodes[arg.root].children[info.index];
    return arg;
  }
  return wrong(t, info, arg);
}

template <typename WrongConstructor>
bool eval_qf(const Formula& f, const DeclaredSignature& ds,
             const Valuation& vals, WrongConstructor&& wrong) {
  switch (f.kind()) {
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Eq:
      return rational_tree_equal(eval_term(f.lhs(), ds, vals, wrong),
                                 eval_term(f.rhs(), ds, vals, wrong));
    case FormulaKind::Fin:
      return is_finite_tree(eval_term(f.lhs(), ds, vals, wrong));
    case FormulaKind::Not:
      return !eval_qf(f.sub()[0], ds, vals, wrong);
    case FormulaKind::And:
      for (const Formula& g : f.sub())
        if (!eval_qf(g, ds, vals, wrong)) return false;
      return true;
    case FormulaKind::Or:
      for (const Formula& g : f.sub())
        if (eval_qf(g, ds, vals, wrong)) return true;
      return false;
    case FormulaKind::Implies:
      return !eval_qf(f.sub()[0], ds, vals, wrong) ||
             eval_qf(f.sub()[1], ds, vals, wrong);
    case FormulaKind::Iff:
      return eval_qf(f.sub()[0], ds, vals, wrong) ==
             eval_qf(f.sub()[1], ds, vals, wrong);
    default:
      throw FrontendError("selector-semantics evaluation is quantifier-free "
                          "only");
  }
}

} // namespace

bool eval_default_semantics(const Formula& f, const DeclaredSignature& ds,
                            const DefaultValueTable& defaults,
                            const Valuation& valuation) {
  auto wrong = [&](const Term& t, const SelectorInfo& info,
                   const RationalTree&) -> RationalTree {
    const RationalTree* dv = defaults.find(info.constructor, info.index);
    if (!dv)
      throw FrontendError("no default value for selector '" + t.sel_name() +
                          "' of constructor '" +
                          ds.sig.generator(info.constructor).name + "'");
    return *dv;
  };
  return eval_qf(f, ds, valuation, wrong);
}

std::vector<RationalTree> truncated_domain(const Signature& sig, SortId sort,
                                           int depth) {
  std::map<std::pair<uint32_t, int>, std::vector<RationalTree>> memo;
  std::function<const std::vector<RationalTree>&(SortId, int)> build =
      [&](SortId s, int d) -> const std::vector<RationalTree>& {
    auto key = std::make_pair(s.index, d);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<RationalTree> out;
    if (d > 0) {
      for (GenId g : sig.generators_of(s)) {
        const Generator& gen = sig.generator(g);
        std::vector<const std::vector<RationalTree>*> doms;
        bool ok = true;
        for (SortId a : gen.arg_sorts) {
          const std::vector<RationalTree>& dom = build(a, d - 1);
          if (dom.empty()) {
            ok = false;
            break;
          }
          doms.push_back(&dom);
        }
        if (!ok) continue;
        std::vector<size_t> idx(doms.size(), 0);
        while (true) {
          RationalTree t;
          t.nodes.push_back({g, {}});
          for (size_t i = 0; i < doms.size(); ++i) {
            uint32_t r = append_tree(t, (*doms[i])[idx[i]]);
            t.nodes[0].children.push_back(r);
          }
          out.push_back(std::move(t));
          size_t k = 0;
          while (k < idx.size()) {
            if (++idx[k] < doms[k]->size()) break;
            idx[k] = 0;
            ++k;
          }
          if (k == idx.size()) break;
        }
      }
    }
    return memo.emplace(key, std::move(out)).first->second;
  };
  return build(sort, depth);
}

namespace {

/// Signal that evaluation hit a selector cell with no assigned value yet.
struct CellMiss {
  std::string key;
  SortId result;
};

bool sat_search(const Formula& f, const DeclaredSignature& ds,
                const std::vector<std::vector<RationalTree>>& domains,
                const Valuation& vals,
                std::map<std::string, RationalTree>& cells) {
  auto wrong = [&](const Term& t, const SelectorInfo& info,
                   const RationalTree& arg) -> RationalTree {
    std::string key = t.sel_name() + "|" + to_string(arg, ds.sig);
    auto it = cells.find(key);
    if (it == cells.end()) throw CellMiss{std::move(key), info.result};
    return it->second;
  };
  try {
    return eval_qf(f, ds, vals, wrong);
  } catch (const CellMiss& miss) {
    for (const RationalTree& cand : domains[miss.result.index]) {
      cells[miss.key] = cand;
      if (sat_search(f, ds, domains, vals, cells)) return true;
    }
    cells.erase(miss.key);
    return false;
  }
}

} // namespace

bool sat_standard_truncated(const Formula& f, const DeclaredSignature& ds,
                            int depth) {
  if (has_quantifier(f))
    throw FrontendError("the standard-semantics oracle is quantifier-free "
                        "only");
  std::vector<std::vector<RationalTree>> domains;
  domains.reserve(ds.sig.sort_count());
  for (uint32_t i = 0; i < ds.sig.sort_count(); ++i)
    domains.push_back(truncated_domain(ds.sig, SortId{i}, depth));
  std::vector<Var> vars = free_variables(f);
  for (const Var& v : vars)
    if (domains[v.sort.index].empty()) return false;
  std::vector<size_t> idx(vars.size(), 0);
  while (true) {
    Valuation vals;
    for (size_t i = 0; i < vars.size(); ++i)
      vals.emplace(vars[i].name, domains[vars[i].sort.index][idx[i]]);
    std::map<std::string, RationalTree> cells;
    if (sat_search(f, ds, domains, vals, cells)) return true;
    size_t k = 0;
    while (k < vars.size()) {
      if (++idx[k] < domains[vars[k].sort.index].size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == vars.size()) return false;
  }
}

Formula random_datatype_formula(uint64_t seed, const DeclaredSignature& ds,
                                const DatatypeFormulaProfile& p) {
  std::mt19937_64 rng(seed ^ 0x5bf0f7775e4b3c21ULL);
  rng.discard(7);
  auto pick = [&](size_t n) { return static_cast<size_t>(rng() % n); };
  const Signature& sig = ds.sig;
  const int none = std::numeric_limits<int>::max();
  std::vector<int> depth = min_ground_depths(sig);

  auto vars_of = [&](SortId s) {
    std::vector<Var> vs;
    for (const Var& v : p.free_vars)
      if (v.sort == s) vs.push_back(v);
    return vs;
  };
  auto reachable = [&](SortId s, int d) {
    return !vars_of(s).empty() ||
           (depth[s.index] != none && depth[s.index] <= d);
  };
  std::function<Term(SortId)> ground_min = [&](SortId s) -> Term {
    GenId best;
    for (GenId g : sig.generators_of(s)) {
      const Generator& gen = sig.generator(g);
      int d = 1;
      bool ok = true;
      for (SortId a : gen.arg_sorts) {
        if (depth[a.index] == none) {
          ok = false;
          break;
        }
        d = std::max(d, depth[a.index] + 1);
      }
      if (ok && d == depth[s.index]) {
        best = g;
        break;
      }
    }
    std::vector<Term> args;
    for (SortId a : sig.generator(best).arg_sorts)
      args.push_back(ground_min(a));
    return Term::app(best, std::move(args));
  };

  std::function<Term(SortId, int)> term = [&](SortId s, int d) -> Term {
    struct Choice {
      int kind;  // 0 variable, 1 constructor, 2 selector
      GenId g;
      const std::string* sel_name = nullptr;
      const SelectorInfo* sel = nullptr;
    };
    std::vector<Choice> choices;
    std::vector<Var> vs = vars_of(s);
    if (!vs.empty()) {
      choices.push_back({0, {}, nullptr, nullptr});
      choices.push_back({0, {}, nullptr, nullptr});
    }
    if (d > 0) {
      for (GenId g : sig.generators_of(s)) {
        bool ok = true;
        for (SortId a : sig.generator(g).arg_sorts)
          if (!reachable(a, d - 1)) {
            ok = false;
            break;
          }
        if (ok) choices.push_back({1, g, nullptr, nullptr});
      }
      for (const auto& [name, info] : ds.selectors)
        if (info.result == s && reachable(info.domain, d - 1)) {
          choices.push_back({2, {}, &name, &info});
          choices.push_back({2, {}, &name, &info});
        }
    }
    if (choices.empty()) return ground_min(s);
    const Choice& c = choices[pick(choices.size())];
    if (c.kind == 0) return Term::variable(vs[pick(vs.size())]);
    if (c.kind == 1) {
      std::vector<Term> args;
      for (SortId a : sig.generator(c.g).arg_sorts)
        args.push_back(term(a, d - 1));
      return Term::app(c.g, std::move(args));
    }
    return Term::selector(*c.sel_name, c.sel->result,
                          term(c.sel->domain, d - 1));
  };

  std::vector<SortId> atom_sorts;
  for (uint32_t i = 0; i < sig.sort_count(); ++i)
    if (reachable(SortId{i}, p.max_term_depth)) atom_sorts.push_back(SortId{i});
  if (atom_sorts.empty())
    throw FrontendError("no sort is usable for random atoms");
  int atoms_left = p.max_atoms;
  auto atom = [&]() {
    --atoms_left;
    SortId s = atom_sorts[pick(atom_sorts.size())];
    Term l = term(s, p.max_term_depth);
    Term r = term(s, p.max_term_depth);
    return Formula::eq(std::move(l), std::move(r));
  };
  std::function<Formula(int)> gen = [&](int d) -> Formula {
    if (d <= 0 || atoms_left <= 1) return atom();
    switch (pick(8)) {
      case 0:
      case 1:
      case 2:
        return atom();
      case 3:
        return Formula::negation(gen(d - 1));
      case 4: {
        Formula a = gen(d - 1);
        Formula b = gen(d - 1);
        return Formula::conjunction({std::move(a), std::move(b)});
      }
      case 5: {
        Formula a = gen(d - 1);
        Formula b = gen(d - 1);
        return Formula::disjunction({std::move(a), std::move(b)});
      }
      case 6: {
        Formula a = gen(d - 1);
        Formula b = gen(d - 1);
        return Formula::implies(std::move(a), std::move(b));
      }
      default: {
        Formula a = gen(d - 1);
        Formula b = gen(d - 1);
        return Formula::iff(std::move(a), std::move(b));
      }
    }
  };
  return gen(p.max_connective_depth);
}

} // namespace treesolve
