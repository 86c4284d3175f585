#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treesolve/analysis.hpp"
#include "treesolve/signature.hpp"
#include "treesolve/term.hpp"

namespace treesolve {

/// A possibly infinite tree with finitely many distinct subtrees, stored as
/// a finite term graph: a node table plus a root. Cycles encode infinite
/// paths. Unreachable nodes are permitted (and ignored by all operations).
struct RationalTree {
  struct Node {
    GenId gen;
    std::vector<uint32_t> children;
  };
  std::vector<Node> nodes;
  uint32_t root = 0;

  SortId sort(const Signature& sig) const {
    return sig.generator(nodes[root].gen).result_sort;
  }
};

/// True iff a and b denote the same tree (bisimulation on the two graphs).
bool rational_tree_equal(const RationalTree& a, const RationalTree& b);

/// True iff the graph reachable from the root is acyclic.
bool is_finite_tree(const RationalTree& a);

/// Builds a tree from a closed term (no variables, no selectors).
RationalTree tree_from_term(const Term& t, const Signature& sig);

/// Builds a tree from a term whose variables are u_s names defined by the
/// analysis' unique-tree equations (used to materialize s_infin entries).
RationalTree tree_from_term(const Term& t, const Signature& sig,
                            const SortAnalysis& analysis);

/// All trees of the sort, finite ones first; requires a finite total domain.
/// Throws InfiniteDomainError if sort is not in S_FF ∩ S_FI.
std::vector<RationalTree> enumerate_domain(const Signature& sig,
                                           const SortAnalysis& analysis,
                                           SortId sort);

/// Renders finite trees as ground terms and infinite ones in `(mu v ...)`
/// binder notation.
std::string to_string(const RationalTree& a, const Signature& sig);

} // namespace treesolve
