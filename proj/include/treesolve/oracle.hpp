#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treesolve/analysis.hpp"
#include "treesolve/basic.hpp"
#include "treesolve/formula.hpp"
#include "treesolve/rational_tree.hpp"
#include "treesolve/signature.hpp"

namespace treesolve {

/// Assignment of rational trees to variables, keyed by name.
using Valuation = std::map<std::string, RationalTree>;

/// Evaluates f under the valuation by structural recursion: quantifiers
/// expand over enumerate_domain, equality compares trees by bisimulation,
/// fin checks finiteness. Independent of the solver; used as the reference
/// semantics in differential tests.
/// Throws InfiniteDomainError if a quantified sort has infinitely many
/// trees, SortError on a free variable missing from the valuation or on a
/// selector application.
bool eval_closed_finite(const Formula& f, const Signature& sig,
                        const SortAnalysis& analysis,
                        const Valuation& valuation = {});

/// Evaluates a formula whose bound variables are all forced by equations
/// reachable from valued variables (true for every solved output: each
/// binder is reachable from the free variables). Quantifiers evaluate by
/// value propagation instead of domain enumeration, so infinite-domain
/// sorts are fine. The valuation must cover every free variable.
/// Throws Error when some bound variable's value is not forced.
bool eval_solved(const Formula& f, const Signature& sig,
                 const SortAnalysis& analysis, const Valuation& valuation);

/// A canonical inhabitant of the sort: the smallest finite tree if the sort
/// has finite trees, otherwise a looping tree built from first generators.
RationalTree default_tree(const Signature& sig, const SortAnalysis& analysis,
                          SortId sort);

/// The first `limit` finite trees of the sort in size order (all of them if
/// fewer exist). Empty when the sort has no finite trees.
std::vector<RationalTree> finite_trees(const Signature& sig,
                                       const SortAnalysis& analysis,
                                       SortId sort, size_t limit);

/// Up to `limit` pairwise distinct infinite trees of the sort. Complete
/// when the sort has finitely many infinite trees; otherwise a generated
/// sample (root cycles of increasing length plus decorated variants).
/// Empty when the sort has no infinite trees.
std::vector<RationalTree> infinite_trees(const Signature& sig,
                                         const SortAnalysis& analysis,
                                         SortId sort, size_t limit);

/// Builds a satisfying valuation of the free variables of a fully
/// simplified formula (or a disjunction of such): picks fresh values for
/// unconstrained variables so that every negated block is falsified
/// (finite values where fin is asserted, infinite ones where fin must be
/// violated, values avoiding the finitely many forbidden trees), then reads
/// the remaining equations as a rational-tree node table whose unique
/// solution fixes the equation-defined variables. The result is verified
/// before it is returned.
/// Returns nullopt for literal falsity (no model). Throws
/// NotSimplifiedError when f is not fully simplified (the no-instantiable-
/// variables condition is tolerated to keep partially simplified inputs
/// usable); Error if no model is found within the search bounds.
std::optional<Valuation> extract_model(const Formula& f, const Signature& sig,
                                       const SortAnalysis& analysis);

/// Shape bounds for random formula generation.
struct FormulaProfile {
  int max_connective_depth = 3;
  int max_quantifiers = 3;
  int max_atoms = 8;
  int max_term_depth = 2;
  bool allow_fin = true;
  /// Variables the formula may use free (it may use fewer).
  std::vector<Var> free_vars;
  /// Sorts quantifiers range over; empty means every sort of the signature.
  std::vector<SortId> quantifier_sorts;
};

/// Deterministic pseudo-random well-sorted formula; equal seeds give equal
/// formulae. Atom terms only use in-scope variables and ground terms of
/// sorts that have finite trees.
Formula random_formula(uint64_t seed, const Signature& sig,
                       const SortAnalysis& analysis,
                       const FormulaProfile& profile);

/// Deterministic pseudo-random basic formula over the given variables, for
/// scheduler-independence tests. Every equation and fin atom mentions only
/// the supplied variables.
BasicFormula random_basic(uint64_t seed, const Signature& sig,
                          const std::vector<Var>& vars, int max_conjuncts);

} // namespace treesolve
