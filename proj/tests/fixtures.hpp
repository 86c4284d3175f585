#pragma once

#include "treesolve/analysis.hpp"
#include "treesolve/signature.hpp"
#include "treesolve/term.hpp"

namespace treesolve::testing {

/// The six-sort reference signature used across the test suite:
///   bool:    false, true
///   nat:     zero, succ(nat)
///   list:    nil, cons(nat, list)
///   inftree: tree1(inftree), tree2(inftree, inftree)
///   d:       c1(bool), c2(nat, inftree)
///   t:       g1(bool, bool), g2(bool, nat)
inline Signature reference_signature() {
  Signature sig;
  SortId b = sig.add_sort("bool");
  SortId nat = sig.add_sort("nat");
  SortId list = sig.add_sort("list");
  SortId inftree = sig.add_sort("inftree");
  SortId d = sig.add_sort("d");
  SortId t = sig.add_sort("t");
  sig.add_generator("false", {}, b);
  sig.add_generator("true", {}, b);
  sig.add_generator("zero", {}, nat);
  sig.add_generator("succ", {nat}, nat);
  sig.add_generator("nil", {}, list);
  sig.add_generator("cons", {nat, list}, list);
  sig.add_generator("tree1", {inftree}, inftree);
  sig.add_generator("tree2", {inftree, inftree}, inftree);
  sig.add_generator("c1", {b}, d);
  sig.add_generator("c2", {nat, inftree}, d);
  sig.add_generator("g1", {b, b}, t);
  sig.add_generator("g2", {b, nat}, t);
  return sig;
}

inline Signature bool_only_signature() {
  Signature sig;
  SortId b = sig.add_sort("bool");
  sig.add_generator("false", {}, b);
  sig.add_generator("true", {}, b);
  return sig;
}

inline Signature nat_only_signature() {
  Signature sig;
  SortId nat = sig.add_sort("nat");
  sig.add_generator("zero", {}, nat);
  sig.add_generator("succ", {nat}, nat);
  return sig;
}

} // namespace treesolve::testing
