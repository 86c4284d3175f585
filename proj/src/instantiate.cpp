#include "treesolve/instantiate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "treesolve/errors.hpp"
#include "treesolve/formula.hpp"
#include "treesolve/term.hpp"

namespace treesolve {

namespace {

bool is_loop_var(const Var& v) { return v.name.rfind("$u_", 0) == 0; }

int var_depth_rec(const Var& v, const BasicFormula& b,
                  std::set<std::string>& visiting) {
  if (is_properly_reachable(v, b)) return 0;
  const Equation* e = b.find_lhs(v);
  if (!e) return 0;
  if (!visiting.insert(v.name).second) return 0;
  int d = 0;
  if (e->rhs_is_var()) {
    d = var_depth_rec(e->rhs_var(), b, visiting);
  } else {
    for (const Var& w : e->rhs_app().args)
      d = std::max(d, var_depth_rec(w, b, visiting));
    d += 1;
  }
  visiting.erase(v.name);
  return d;
}

/// Case for "u = t" where t may mention the reserved looping variables of
/// sorts with a unique infinite tree. The needed looping variables are
/// renamed fresh, bound, and pinned by their defining equations; the
/// equation is then flattened.
InstantiationCase case_for_term(const Var& u, const Term& t,
                                const Signature& sig,
                                const SortAnalysis& analysis,
                                FreshSource& fresh, bool splice_all) {
  std::vector<Var> loop_vars;
  std::set<std::string> seen;
  auto add_loop_var = [&](const Var& v) {
    if (seen.insert(v.name).second) loop_vars.push_back(v);
  };
  std::vector<Var> occurring;
  collect_variables(t, occurring);
  for (const Var& v : occurring)
    if (is_loop_var(v)) add_loop_var(v);

  std::vector<UniqueTreeEquation> eqs;
  std::set<std::string> eq_lhs;
  auto add_eqs_for = [&](SortId s) {
    for (const UniqueTreeEquation& e : analysis.unique_tree_eqs[s.index])
      if (eq_lhs.insert(e.lhs.name).second) eqs.push_back(e);
  };
  if (splice_all) {
    for (SortId s : analysis.s1i.members()) add_eqs_for(s);
  } else {
    for (const Var& v : loop_vars) add_eqs_for(v.sort);
  }
  for (const UniqueTreeEquation& e : eqs) {
    add_loop_var(e.lhs);
    add_loop_var(e.arg);
  }

  std::map<std::string, Var> rename;
  InstantiationCase out;
  for (const Var& v : loop_vars) {
    Var nv = fresh.fresh(v.sort);
    rename.emplace(v.name, nv);
    out.bound.push_back(nv);
  }
  Term rhs = t;
  for (const auto& [name, nv] : rename)
    rhs = substitute(rhs, Var{name, nv.sort}, Term::variable(nv));

  std::vector<Formula> atoms;
  atoms.push_back(Formula::eq(Term::variable(u), rhs));
  for (const UniqueTreeEquation& e : eqs)
    atoms.push_back(Formula::eq(
        Term::variable(rename.at(e.lhs.name)),
        Term::app(e.gen, {Term::variable(rename.at(e.arg.name))})));

  std::vector<Var> flat_bound;
  out.atoms = flatten_to_basic(atoms, sig, fresh, flat_bound);
  out.bound.insert(out.bound.end(), flat_bound.begin(), flat_bound.end());
  return out;
}

} // namespace

int var_depth(const Var& v, const BasicFormula& b) {
  std::set<std::string> visiting;
  return var_depth_rec(v, b, visiting);
}

std::vector<InstantiableVar> instantiable_vars(
    const std::vector<Var>& free_vars, const NormalFormula& phi,
    const Signature& sig, const SortAnalysis& analysis) {
  (void)sig;
  if (phi.depth() > 2)
    throw DepthError("instantiation requires a normal formula of depth <= 2");

  std::vector<BasicFormula> stripped;
  stripped.reserve(phi.children.size());
  for (const NormalFormula& ch : phi.children)
    stripped.push_back(strip_conjuncts(ch.alpha, phi.alpha));

  std::vector<Var> scan = free_vars;
  scan.insert(scan.end(), phi.bound.begin(), phi.bound.end());

  std::vector<InstantiableVar> out;
  for (const Var& u : scan) {
    int condition = 0;
    // Every sort has finitely many generators, so only the equation and
    // reachability parts of the first condition need checking.
    for (size_t i = 0; i < stripped.size() && condition == 0; ++i) {
      for (const Equation& e : stripped[i].eqs) {
        if (e.lhs == u && !e.rhs_is_var() &&
            !is_properly_reachable(u, phi.children[i].alpha)) {
          condition = 1;
          break;
        }
      }
    }
    auto occurs_stripped = [&] {
      for (const BasicFormula& b : stripped)
        if (b.mentions(u)) return true;
      return false;
    };
    if (condition == 0 && analysis.finite_domain(u.sort) &&
        phi.alpha.find_lhs(u) == nullptr && occurs_stripped()) {
      condition = 2;
    }
    if (condition == 0 && analysis.sff.contains(u.sort) &&
        phi.alpha.has_fin(u) && occurs_stripped()) {
      condition = 3;
    }
    if (condition == 0 && analysis.sfi.contains(u.sort)) {
      for (const BasicFormula& b : stripped) {
        if (!b.empty() && b.eqs.empty() && b.has_fin(u)) {
          condition = 4;
          break;
        }
      }
    }
    if (condition != 0) out.push_back({u, condition});
  }
  return out;
}

std::optional<Instantiation> find_instantiation(
    const std::vector<Var>& free_vars, const NormalFormula& phi,
    const Signature& sig, const SortAnalysis& analysis, FreshSource& fresh,
    bool splice_all_unique, InstantiationStrategy* strategy) {
  std::vector<InstantiableVar> cands =
      instantiable_vars(free_vars, phi, sig, analysis);
  if (cands.empty()) return std::nullopt;
  size_t idx = strategy ? strategy->choose(cands) : 0;
  const Var& u = cands[idx].var;

  Instantiation inst;
  inst.target = u;
  inst.condition = cands[idx].condition;
  switch (inst.condition) {
    case 1: {
      for (GenId g : sig.generators_of(u.sort)) {
        InstantiationCase c;
        FlatApp app{g, {}};
        for (SortId arg_sort : sig.generator(g).arg_sorts) {
          Var z = fresh.fresh(arg_sort);
          c.bound.push_back(z);
          app.args.push_back(z);
        }
        c.atoms.eqs.push_back({u, std::move(app)});
        inst.cases.push_back(std::move(c));
      }
      break;
    }
    case 2: {
      for (const Term& t : analysis.fin_inhabitants[u.sort.index])
        inst.cases.push_back(
            case_for_term(u, t, sig, analysis, fresh, splice_all_unique));
      for (const Term& t : analysis.infin_inhabitants[u.sort.index])
        inst.cases.push_back(
            case_for_term(u, t, sig, analysis, fresh, splice_all_unique));
      break;
    }
    case 3: {
      // Finite inhabitants are closed, so no looping equations are needed.
      for (const Term& t : analysis.fin_inhabitants[u.sort.index])
        inst.cases.push_back(case_for_term(u, t, sig, analysis, fresh, false));
      break;
    }
    case 4: {
      InstantiationCase fin_case;
      fin_case.atoms.fins.push_back(u);
      inst.cases.push_back(std::move(fin_case));
      for (const Term& t : analysis.infin_inhabitants[u.sort.index])
        inst.cases.push_back(
            case_for_term(u, t, sig, analysis, fresh, splice_all_unique));
      break;
    }
    default:
      throw Error("unexpected instantiation condition");
  }
  return inst;
}

std::vector<NormalFormula> apply_instantiation(const NormalFormula& phi,
                                               const Instantiation& inst) {
  std::vector<NormalFormula> out;
  out.reserve(inst.cases.size());
  for (const InstantiationCase& c : inst.cases) {
    NormalFormula nf;
    nf.bound = phi.bound;
    nf.bound.insert(nf.bound.end(), c.bound.begin(), c.bound.end());
    nf.alpha = phi.alpha;
    nf.alpha.eqs.insert(nf.alpha.eqs.end(), c.atoms.eqs.begin(),
                        c.atoms.eqs.end());
    nf.alpha.fins.insert(nf.alpha.fins.end(), c.atoms.fins.begin(),
                         c.atoms.fins.end());
    nf.children = phi.children;
    out.push_back(std::move(nf));
  }
  return out;
}

std::vector<int> instantiation_measure(const std::vector<Var>& free_vars,
                                       const NormalFormula& phi,
                                       const Signature& sig,
                                       const SortAnalysis& analysis) {
  std::vector<int> counts;
  for (const InstantiableVar& cand :
       instantiable_vars(free_vars, phi, sig, analysis)) {
    int d = 0;
    for (const NormalFormula& ch : phi.children)
      d = std::max(d, var_depth(cand.var, ch.alpha));
    if (static_cast<int>(counts.size()) <= d) counts.resize(d + 1, 0);
    ++counts[d];
  }
  return counts;
}

bool measure_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  size_t k = std::max(a.size(), b.size());
  for (size_t i = k; i-- > 0;) {
    int av = i < a.size() ? a[i] : 0;
    int bv = i < b.size() ? b[i] : 0;
    if (av != bv) return av < bv;
  }
  return false;
}

} // namespace treesolve
