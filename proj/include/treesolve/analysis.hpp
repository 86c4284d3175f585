#pragma once

#include <map>
#include <vector>

#include "treesolve/signature.hpp"
#include "treesolve/term.hpp"

namespace treesolve {

/// One equation u_s = g(u_s') tying a loop through the unique infinite tree
/// of a sort. The left-hand side is always a reserved u_s variable; the
/// right-hand side applies a unary generator to another u_s variable.
struct UniqueTreeEquation {
  Var lhs;
  GenId gen;
  Var arg;
};

/// Classification of every sort of a signature:
///   s0f  - sorts with no finite trees
///   s0i  - sorts with no infinite trees
///   sff  - sorts with finitely many finite trees
///   s1i  - sorts with exactly one infinite tree
///   sfi  - sorts with finitely many infinite trees
/// plus, for sff sorts, the finite inhabitants as closed terms; for sfi
/// sorts, the infinite inhabitants as terms over u_s variables; and for s1i
/// sorts, the equation set defining u_s.
struct SortAnalysis {
  SortSet s0f;
  SortSet s0i;
  SortSet sff;
  SortSet s1i;
  SortSet sfi;
  std::vector<std::vector<Term>> fin_inhabitants;    // indexed by SortId
  std::vector<std::vector<Term>> infin_inhabitants;  // indexed by SortId
  std::vector<std::vector<UniqueTreeEquation>> unique_tree_eqs;

  bool finite_domain(SortId s) const {
    return sff.contains(s) && sfi.contains(s);
  }
  /// True iff the sort has both finite and infinite trees, i.e. a fin atom
  /// on it is neither trivially true nor trivially false.
  bool fin_meaningful(SortId s) const {
    return !s0f.contains(s) && !s0i.contains(s);
  }
};

/// Reserved variable naming the unique infinite tree of a sort.
Var u_var(const Signature& sig, SortId s);

/// Computes s0f and s0i only (the two plain fixed points).
void compute_zero_sets(const Signature& sig, SortSet& s0f, SortSet& s0i);

/// Full analysis: zero sets plus the finiteness fixed points.
SortAnalysis analyze_sorts(const Signature& sig);

} // namespace treesolve
