#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "treesolve/analysis.hpp"
#include "treesolve/basic.hpp"
#include "treesolve/formula.hpp"
#include "treesolve/oracle.hpp"
#include "treesolve/rational_tree.hpp"
#include "treesolve/signature.hpp"

namespace treesolve {

enum class DeclKind { Datatype, Codatatype };

/// One constructor of a declaration: its name and the ordered selector list.
/// Selector i names the projection onto the i-th constructor argument; the
/// second component of each pair is the argument's sort name.
struct ConstructorDecl {
  std::string name;
  std::vector<std::pair<std::string, std::string>> selectors;
};

/// A datatype or codatatype declaration. Datatype values are the finite
/// constructor trees, codatatype values all (rational) constructor trees.
struct DatatypeDecl {
  std::string name;
  DeclKind kind = DeclKind::Datatype;
  std::vector<ConstructorDecl> constructors;
};

/// Resolution of a selector symbol: the constructor it projects from, the
/// argument position, the constructor's sort (the selector's domain) and the
/// argument's sort (the selector's result).
struct SelectorInfo {
  GenId constructor;
  size_t index = 0;
  SortId domain;
  SortId result;
};

/// A checked set of declarations: the tree-theory signature whose generators
/// are the constructors, the selector symbol table, and each sort's kind.
/// The signature intentionally skips Signature::validate — a declaration
/// with a single constructor is legal here even though the tree solver
/// requires two generators per sort and will reject it at solve time.
struct DeclaredSignature {
  Signature sig;
  std::map<std::string, SelectorInfo> selectors;
  std::vector<DeclKind> kinds;  // indexed by SortId

  bool is_datatype(SortId s) const {
    return kinds.at(s.index) == DeclKind::Datatype;
  }
};

/// Checks the declarations and builds the combined signature. Enforced
/// rules: at least one constructor per declaration; sort, constructor and
/// selector names unique (selectors globally, so that a selector symbol has
/// one meaning); constructor arguments declared and of the declaring kind
/// (no mixing of datatypes and codatatypes); datatypes well-founded (every
/// datatype has a finite value; checked as S_0F = empty on the
/// datatype-only sub-signature). Throws FrontendError otherwise.
DeclaredSignature check_declarations(const std::vector<DatatypeDecl>& decls);

/// Default selector values: what selector i of constructor C returns when
/// applied to a value built by a different constructor. Keys are
/// (constructor id, argument position); values are closed trees of the
/// selector's result sort.
struct DefaultValueTable {
  std::map<std::pair<uint32_t, size_t>, RationalTree> values;

  void set(GenId constructor, size_t index, RationalTree value) {
    values[{constructor.index, index}] = std::move(value);
  }
  const RationalTree* find(GenId constructor, size_t index) const {
    auto it = values.find({constructor.index, index});
    return it == values.end() ? nullptr : &it->second;
  }
};

/// Canonical inhabitant used for auto-populated defaults: the minimal-depth
/// finite tree when the sort has one, otherwise the looping tree that picks
/// the lexicographically smallest generator at every choice.
RationalTree default_value_for(const Signature& sig,
                               const SortAnalysis& analysis, SortId sort);

/// A table covering every declared selector with default_value_for of its
/// result sort.
DefaultValueTable auto_defaults(const DeclaredSignature& ds,
                                const SortAnalysis& analysis);

/// True iff no selector application occurs anywhere in f.
bool selector_free(const Formula& f);

/// Formula stating that lhs equals the given closed tree: a plain equation
/// against a ground term when the tree is finite, otherwise an existential
/// node system (one variable and one equation per distinct subtree, pinned
/// by the unique-solution property of rational trees).
Formula equate_to_tree(const Term& lhs, const RationalTree& value,
                       const Signature& sig, FreshSource& fresh);

/// Removes selectors under the default-value semantics, preserving
/// equivalence: each selector application is isolated into an equation
/// x = sel(t) with t selector-free and then replaced by the case split
/// "t is built by sel's constructor and x is the projected argument, or t
/// is not and x is the table's default value". Works on arbitrary formulae.
/// Throws FrontendError when a needed default is missing from the table and
/// SortError on ill-sorted selector applications.
Formula eliminate_selectors_default(const Formula& f,
                                    const DeclaredSignature& ds,
                                    const DefaultValueTable& defaults,
                                    FreshSource& fresh);

/// Removes selectors under the standard (underspecified-function)
/// semantics, preserving satisfiability: each innermost selector term is
/// replaced by a fresh free variable v_j constrained by
///   forall zs. t_j = C(zs) -> zs_i = v_j
/// plus functional-consistency implications between occurrences of the same
/// selector. Input must be quantifier-free; throws FrontendError otherwise.
Formula eliminate_selectors_standard(const Formula& f,
                                     const DeclaredSignature& ds,
                                     FreshSource& fresh);

/// Embeds a selector-free (co)datatype formula into the extended theory of
/// trees, preserving satisfiability: universal quantifiers whose binders
/// include datatype variables are rewritten through negation to existential
/// ones, every existential block gains a fin(v) conjunct per datatype-sorted
/// binder, and every free datatype-sorted variable contributes a top-level
/// fin conjunct. Codatatype variables are untouched.
Formula embed_in_trees(const Formula& f, const DeclaredSignature& ds);

/// Evaluates a quantifier-free formula under the default-value selector
/// semantics: a selector applied to a value of its own constructor projects
/// the argument, applied to anything else it returns the table's default.
/// Reference semantics for differential tests; independent of the
/// elimination code paths. Throws FrontendError on quantifiers or missing
/// defaults, SortError on variables missing from the valuation.
bool eval_default_semantics(const Formula& f, const DeclaredSignature& ds,
                            const DefaultValueTable& defaults,
                            const Valuation& valuation);

/// Every constructor tree of the sort with depth <= depth (a constant has
/// depth 1). The whole universe of the sort when the signature is
/// non-recursive and depth is large enough.
std::vector<RationalTree> truncated_domain(const Signature& sig, SortId sort,
                                           int depth);

/// Satisfiability of a quantifier-free formula under the standard selector
/// semantics restricted to the depth-truncated universe: free variables
/// range over truncated domains and selectors over all functions that
/// project matching constructor arguments, with wrong-constructor values
/// drawn from the truncated result domain. Exact on non-recursive
/// signatures once depth covers every value. Throws FrontendError on
/// quantifiers.
bool sat_standard_truncated(const Formula& f, const DeclaredSignature& ds,
                            int depth);

/// Shape bounds for random datatype formula generation.
struct DatatypeFormulaProfile {
  int max_connective_depth = 3;
  int max_atoms = 5;
  int max_term_depth = 2;
  /// Variables the formula may use free (it may use fewer).
  std::vector<Var> free_vars;
};

/// Deterministic pseudo-random quantifier-free formula over the declared
/// constructors and selectors; equal seeds give equal formulae. Selector
/// applications are generated with positive probability whenever a selector
/// of the wanted sort exists.
Formula random_datatype_formula(uint64_t seed, const DeclaredSignature& ds,
                                const DatatypeFormulaProfile& profile);

} // namespace treesolve
