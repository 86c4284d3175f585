#include "treesolve/basic_solver.hpp"

#include <cassert>

namespace treesolve {

namespace {

// Equation rules, tried in this order at every step:
//   DropRefl   drop u=u
//   Orient     turn u=v into v=u when u<v
//   Chain      v=u and v=t with u<v: keep v=u first, the other becomes u=t
//   Clash      v=f(..) and v=g(..), f and g distinct: inconsistent
//   Decompose  v=f(y..) and v=f(z..): keep the first, equate args pointwise
// Finiteness rules, run after the equations reach a fixpoint:
//   DedupFin   drop a duplicate fin(u)
//   FinFollow  fin(v) with an equation v=u: becomes fin(u)
//   FinCycle   fin(u) with u on an equation cycle: inconsistent
//   FinArgs    fin(u) with u=f(y..): becomes fin(y) for each argument
//   FinTrivial fin(u) over a sort with only finite trees: drop; over a
//              sort with only infinite trees: inconsistent
enum class Rule {
  DropRefl,
  Orient,
  Chain,
  Clash,
  Decompose,
  DedupFin,
  FinFollow,
  FinCycle,
  FinArgs,
  FinTrivial,
};

struct Candidate {
  Rule rule;
  size_t i = 0;
  size_t j = 0;
};

bool oriented_var_rhs(const VarOrder& order, const Equation& e) {
  return e.rhs_is_var() && order.less(e.rhs_var(), e.lhs);
}

std::vector<Candidate> equation_candidates(const VarOrder& order,
                                           const BasicFormula& b) {
  std::vector<Candidate> out;
  for (size_t i = 0; i < b.eqs.size(); ++i) {
    const Equation& e = b.eqs[i];
    if (e.rhs_is_var() && e.rhs_var() == e.lhs)
      out.push_back({Rule::DropRefl, i, 0});
  }
  for (size_t i = 0; i < b.eqs.size(); ++i) {
    const Equation& e = b.eqs[i];
    if (e.rhs_is_var() && order.less(e.lhs, e.rhs_var()))
      out.push_back({Rule::Orient, i, 0});
  }
  for (Rule r : {Rule::Chain, Rule::Clash, Rule::Decompose}) {
    for (size_t i = 0; i < b.eqs.size(); ++i) {
      for (size_t j = i + 1; j < b.eqs.size(); ++j) {
        const Equation& a = b.eqs[i];
        const Equation& c = b.eqs[j];
        if (a.lhs != c.lhs) continue;
        bool chain = oriented_var_rhs(order, a) || oriented_var_rhs(order, c);
        if (r == Rule::Chain && chain) {
          out.push_back({Rule::Chain, i, j});
        } else if (!chain && !a.rhs_is_var() && !c.rhs_is_var()) {
          bool same_gen = a.rhs_app().gen == c.rhs_app().gen;
          if (r == Rule::Clash && !same_gen)
            out.push_back({Rule::Clash, i, j});
          if (r == Rule::Decompose && same_gen)
            out.push_back({Rule::Decompose, i, j});
        }
      }
    }
  }
  return out;
}

/// Applies one equation rule; returns false on inconsistency.
bool apply_equation_rule(const Candidate& c, const VarOrder& order,
                         BasicFormula& b) {
  switch (c.rule) {
    case Rule::DropRefl:
      b.eqs.erase(b.eqs.begin() + static_cast<ptrdiff_t>(c.i));
      return true;
    case Rule::Orient: {
      Equation& e = b.eqs[c.i];
      Var lhs = e.rhs_var();
      Var rhs = e.lhs;
      e.lhs = lhs;
      e.rhs = rhs;
      return true;
    }
    case Rule::Chain: {
      // The first position ends up holding v=u, the second u=t.
      Equation& first = b.eqs[c.i];
      Equation& second = b.eqs[c.j];
      if (oriented_var_rhs(order, first)) {
        second.lhs = first.rhs_var();
      } else {
        Var u = second.rhs_var();
        Equation rewritten{u, first.rhs};
        first = Equation{first.lhs, u};
        second = rewritten;
      }
      return true;
    }
    case Rule::Clash:
      return false;
    case Rule::Decompose: {
      const FlatApp& left = b.eqs[c.i].rhs_app();
      const FlatApp& right = b.eqs[c.j].rhs_app();
      assert(left.args.size() == right.args.size());
      std::vector<Equation> pointwise;
      for (size_t k = 0; k < left.args.size(); ++k)
        pointwise.push_back(Equation{left.args[k], right.args[k]});
      b.eqs.erase(b.eqs.begin() + static_cast<ptrdiff_t>(c.j));
      b.eqs.insert(b.eqs.begin() + static_cast<ptrdiff_t>(c.j),
                   pointwise.begin(), pointwise.end());
      return true;
    }
    default:
      assert(false);
      return false;
  }
}

std::vector<Candidate> fin_candidates(const VarOrder& order,
                                      const BasicFormula& b,
                                      const SortAnalysis& analysis) {
  std::vector<Candidate> out;
  for (size_t i = 0; i < b.fins.size(); ++i)
    for (size_t j = i + 1; j < b.fins.size(); ++j)
      if (b.fins[i] == b.fins[j]) out.push_back({Rule::DedupFin, i, j});
  for (size_t i = 0; i < b.fins.size(); ++i) {
    const Equation* e = b.find_lhs(b.fins[i]);
    if (e && oriented_var_rhs(order, *e))
      out.push_back({Rule::FinFollow, i, 0});
  }
  for (size_t i = 0; i < b.fins.size(); ++i)
    if (is_properly_reachable(b.fins[i], b))
      out.push_back({Rule::FinCycle, i, 0});
  for (size_t i = 0; i < b.fins.size(); ++i) {
    const Equation* e = b.find_lhs(b.fins[i]);
    if (e && !e->rhs_is_var()) out.push_back({Rule::FinArgs, i, 0});
  }
  for (size_t i = 0; i < b.fins.size(); ++i) {
    SortId s = b.fins[i].sort;
    if (analysis.s0i.contains(s) || analysis.s0f.contains(s))
      out.push_back({Rule::FinTrivial, i, 0});
  }
  return out;
}

bool apply_fin_rule(const Candidate& c, BasicFormula& b,
                    const SortAnalysis& analysis) {
  switch (c.rule) {
    case Rule::DedupFin:
      b.fins.erase(b.fins.begin() + static_cast<ptrdiff_t>(c.j));
      return true;
    case Rule::FinFollow: {
      const Equation* e = b.find_lhs(b.fins[c.i]);
      b.fins[c.i] = e->rhs_var();
      return true;
    }
    case Rule::FinCycle:
      return false;
    case Rule::FinArgs: {
      const Equation* e = b.find_lhs(b.fins[c.i]);
      std::vector<Var> args = e->rhs_app().args;
      b.fins.erase(b.fins.begin() + static_cast<ptrdiff_t>(c.i));
      b.fins.insert(b.fins.begin() + static_cast<ptrdiff_t>(c.i),
                    args.begin(), args.end());
      return true;
    }
    case Rule::FinTrivial:
      if (analysis.s0f.contains(b.fins[c.i].sort)) return false;
      b.fins.erase(b.fins.begin() + static_cast<ptrdiff_t>(c.i));
      return true;
    default:
      assert(false);
      return false;
  }
}

} // namespace

std::optional<BasicFormula> solve_basic(const VarOrder& order, BasicFormula b,
                                        const SortAnalysis& analysis,
                                        Budget& budget,
                                        RuleScheduler* scheduler) {
  budget.tick();
  for (;;) {
    std::vector<Candidate> cands = equation_candidates(order, b);
    if (cands.empty()) break;
    const Candidate& c = cands[scheduler ? scheduler->pick(cands.size()) : 0];
    budget.tick();
    if (!apply_equation_rule(c, order, b)) return std::nullopt;
  }
  for (;;) {
    std::vector<Candidate> cands = fin_candidates(order, b, analysis);
    if (cands.empty()) break;
    const Candidate& c = cands[scheduler ? scheduler->pick(cands.size()) : 0];
    budget.tick();
    if (!apply_fin_rule(c, b, analysis)) return std::nullopt;
  }
  assert(is_solved_basic(order, b, analysis));
  return b;
}

} // namespace treesolve
