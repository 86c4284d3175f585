#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treesolve/analysis.hpp"
#include "treesolve/basic_solver.hpp"
#include "treesolve/formula.hpp"
#include "treesolve/instantiate.hpp"
#include "treesolve/normal.hpp"
#include "treesolve/signature.hpp"

namespace treesolve {

/// One case split performed during solving, for inspection: the expanded
/// variable, the condition that made it instantiable, and the alternatives
/// rendered as "exists fresh. atoms" formulae.
struct InstantiationEvent {
  Var target;
  int condition = 0;
  std::vector<Formula> cases;
};

struct SolveStats {
  uint64_t steps = 0;
  std::vector<InstantiationEvent> events;
};

struct SolveOptions {
  uint64_t budget = 10'000'000;
  /// Splice the defining equations of every single-infinite-tree sort into
  /// inhabitant case splits instead of only the mentioned ones.
  bool splice_all_unique = false;
  /// Candidate choice for case splits; null picks the first in scan order.
  InstantiationStrategy* strategy = nullptr;
  /// Rewrite scheduling for the basic solver; null is deterministic.
  RuleScheduler* scheduler = nullptr;
};

enum class SolveResult { True, False, Simplified };

/// Result of simplifying a formula: a truth value when it could be decided
/// outright (always for closed input), otherwise an equivalent disjunction
/// of fully simplified formulae over the free variables.
struct SolveOutcome {
  SolveResult result = SolveResult::Simplified;
  /// The solved normal formulae whose conjunction is equivalent to the
  /// negated input; each child still repeats the conjuncts of its alpha.
  std::vector<NormalFormula> solved;
  /// The negations of the solved forms, one per disjunct, with the child
  /// conjuncts that merely repeat alpha stripped for readability.
  std::vector<Formula> disjuncts;

  /// True/false constant or the disjunction of the simplified disjuncts.
  Formula formula() const;
};

/// Decides or simplifies a formula over the given signature. Closed input
/// yields True or False; input with free variables yields an equivalent
/// disjunction of fully simplified formulae (or a truth value when the
/// formula collapses to one). Throws TimeoutError when the budget runs out
/// and DepthError never (nesting is reduced internally).
SolveOutcome solve(const Formula& phi, const Signature& sig,
                   const SortAnalysis& analysis, const SolveOptions& opts = {},
                   SolveStats* stats = nullptr);

/// Diagnosis for the fully-simplified check: the first violated condition
/// (1..5 as in is_fully_simplified, 0 for a shape problem) and a short
/// explanation.
struct SimplifiedCheck {
  bool ok = true;
  int violated = 0;
  std::string detail;

  explicit operator bool() const { return ok; }
};

/// Checks whether psi is fully simplified: its negation must be a solved
/// normal formula of depth at most 2, i.e. not(exists xs. alpha and all
/// not(exists ys_i. beta_i)) with
///   1. alpha and every beta_i solved under the outside-in variable order,
///   2. the equations of alpha contained in every beta_i,
///   3. every beta_i owning at least one conjunct outside alpha,
///   4. no instantiable variables, and
///   5. the binders xs reachable from the free variables of its scope, and
///      likewise every ys_i.
/// With stripped_children, the children of psi are read as abbreviations
/// that omit the conjuncts of alpha (the shape solve() reports) and are
/// completed before checking; condition 2 then holds by construction.
SimplifiedCheck check_fully_simplified(const Formula& psi,
                                       const Signature& sig,
                                       const SortAnalysis& analysis,
                                       bool stripped_children = true);

bool is_fully_simplified(const Formula& psi, const Signature& sig,
                         const SortAnalysis& analysis,
                         bool stripped_children = true);

} // namespace treesolve
