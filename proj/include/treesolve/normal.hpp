#pragma once

#include <memory>
#include <vector>

#include "treesolve/basic.hpp"

namespace treesolve {

/// Negation-normal nested form: not (exists bound. alpha and children),
/// where every child is again a normal formula.
struct NormalFormula {
  std::vector<Var> bound;
  BasicFormula alpha;
  std::vector<NormalFormula> children;

  /// 1 for not(exists. basic), 1 + max child depth otherwise.
  int depth() const;
};

/// Rewrites an arbitrary formula into the normal form of its negation:
/// normalize(f) encodes a formula equivalent to f, shaped as
/// not(exists vars. alpha and nested). Bound variables are renamed apart
/// where needed; fresh names use the reserved "_v" prefix.
NormalFormula normalize(const Formula& f, const Signature& sig,
                        FreshSource& fresh);

/// Reads the normal formula back as a Formula.
Formula to_formula(const NormalFormula& nf);

std::string to_string(const NormalFormula& nf, const Signature& sig);

} // namespace treesolve
