#pragma once

#include <optional>
#include <vector>

#include "treesolve/analysis.hpp"
#include "treesolve/basic.hpp"
#include "treesolve/normal.hpp"
#include "treesolve/signature.hpp"

namespace treesolve {

/// One alternative "exists bound. atoms" for an instantiable variable.
struct InstantiationCase {
  std::vector<Var> bound;
  BasicFormula atoms;
};

/// A variable together with the case split that eliminates it.
struct Instantiation {
  Var target;
  int condition = 0;  // which instantiability condition fired (1..4)
  std::vector<InstantiationCase> cases;
};

struct InstantiableVar {
  Var var;
  int condition = 0;
};

/// Picks which instantiable variable to expand. The default (a null
/// strategy) takes the first candidate in scan order.
class InstantiationStrategy {
public:
  virtual ~InstantiationStrategy() = default;
  virtual size_t choose(const std::vector<InstantiableVar>& candidates) = 0;
};

/// Depth of a variable in a solved basic formula: 0 for variables on a
/// generator cycle or without a defining equation; 1 plus the maximal
/// argument depth for v = f(ws); the depth of w for v = w.
int var_depth(const Var& v, const BasicFormula& b);

/// All instantiable variables of a depth <= 2 normal formula whose basic
/// parts are solved, scanning the free variables then the top binders and
/// recording the first matching condition for each. The four conditions,
/// checked in order against the stripped children (child conjuncts minus
/// those already in alpha):
///   1. some stripped child equates u with a generator application and u is
///      not properly reachable from itself in that child;
///   2. u's sort has finite domain, u occurs in a stripped child, and alpha
///      does not define u;
///   3. u's sort has finitely many finite trees, u occurs in a stripped
///      child, and alpha contains fin(u);
///   4. u's sort has finitely many infinite trees and some nonempty stripped
///      child consists of fin atoms only, among them fin(u).
/// Throws DepthError when phi is deeper than 2.
std::vector<InstantiableVar> instantiable_vars(
    const std::vector<Var>& free_vars, const NormalFormula& phi,
    const Signature& sig, const SortAnalysis& analysis);

/// Builds the case split for the chosen instantiable variable, or nullopt
/// when no variable is instantiable. Cases enumerate, per condition:
///   1. u = g(zs) for every generator g of the sort (fresh zs);
///   2. u = t for every finite and infinite inhabitant t;
///   3. u = t for every finite inhabitant t;
///   4. fin(u), plus u = t for every infinite inhabitant t.
/// Inhabitant equations are flattened; the looping variables of infinite
/// inhabitants are renamed fresh and their defining equations spliced in.
/// With splice_all_unique, conditions 2 and 4 splice the defining equations
/// of every single-infinite-tree sort instead of only the ones the
/// inhabitant mentions; both forms are equivalent because those equations
/// always have a (unique) solution.
std::optional<Instantiation> find_instantiation(
    const std::vector<Var>& free_vars, const NormalFormula& phi,
    const Signature& sig, const SortAnalysis& analysis, FreshSource& fresh,
    bool splice_all_unique = false, InstantiationStrategy* strategy = nullptr);

/// Expands phi into one normal formula per case by extending the binder
/// list and alpha; the conjunction of the results is equivalent to phi, and
/// the target variable stops being instantiable once the children are
/// re-solved against the extended alpha.
std::vector<NormalFormula> apply_instantiation(const NormalFormula& phi,
                                               const Instantiation& inst);

/// Per-depth counts of the instantiable variables of phi: entry j counts
/// instantiable variables whose maximal var_depth over the children is j.
/// An empty vector means nothing is instantiable.
std::vector<int> instantiation_measure(const std::vector<Var>& free_vars,
                                       const NormalFormula& phi,
                                       const Signature& sig,
                                       const SortAnalysis& analysis);

/// Lexicographic comparison of measures from the highest depth downward,
/// padding the shorter vector with zeros.
bool measure_lex_less(const std::vector<int>& a, const std::vector<int>& b);

} // namespace treesolve
