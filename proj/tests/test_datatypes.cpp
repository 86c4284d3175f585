#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fixtures.hpp"
#include "treesolve/datatypes.hpp"
#include "treesolve/errors.hpp"
#include "treesolve/oracle.hpp"
#include "treesolve/solver.hpp"

using namespace treesolve;
using treesolve::testing::reference_signature;

namespace {

DatatypeDecl bool_decl() {
  return {"bool", DeclKind::Datatype, {{"true", {}}, {"false", {}}}};
}

DatatypeDecl bool_list_decl() {
  return {"list",
          DeclKind::Datatype,
          {{"nil", {}}, {"cons", {{"head", "bool"}, {"tail", "list"}}}}};
}

/// Small helpers shared by the fixtures below.
struct DeclFix {
  DeclaredSignature ds;

  Term var(const std::string& n, SortId s) const {
    return Term::variable(Var{n, s});
  }
  Term app(const std::string& n, std::vector<Term> args = {}) const {
    return Term::app(*ds.sig.find_generator(n), std::move(args));
  }
  Term sel(const std::string& n, Term arg) const {
    const SelectorInfo& i = ds.selectors.at(n);
    return Term::selector(n, i.result, std::move(arg));
  }
  SortId sort(const std::string& n) const { return *ds.sig.find_sort(n); }
};

/// bool = true | false; list = nil | cons(head: bool, tail: list).
struct BoolListFix : DeclFix {
  SortAnalysis an;

  BoolListFix() {
    ds = check_declarations({bool_decl(), bool_list_decl()});
    an = analyze_sorts(ds.sig);
  }
};

/// nat = zero | succ(pred: nat); list = nil | cons(head: nat, tail: list).
struct NatListFix : DeclFix {
  SortAnalysis an;

  NatListFix() {
    DatatypeDecl nat{"nat",
                     DeclKind::Datatype,
                     {{"zero", {}}, {"succ", {{"pred", "nat"}}}}};
    DatatypeDecl list{
        "list",
        DeclKind::Datatype,
        {{"nil", {}}, {"cons", {{"head", "nat"}, {"tail", "list"}}}}};
    ds = check_declarations({nat, list});
    an = analyze_sorts(ds.sig);
  }
};

/// Codatatypes: cb = ct | cf; stream = scons(shead: cb, stail: stream).
struct StreamFix : DeclFix {
  StreamFix() {
    DatatypeDecl cb{"cb", DeclKind::Codatatype, {{"ct", {}}, {"cf", {}}}};
    DatatypeDecl stream{"stream",
                        DeclKind::Codatatype,
                        {{"scons", {{"shead", "cb"}, {"stail", "stream"}}}}};
    ds = check_declarations({cb, stream});
  }
};

/// Finite, non-recursive: color = red | green | blue;
/// wrap = w1(wc: color) | w2(wd: color). Depth-3 truncation is exact here.
struct ColorWrapFix : DeclFix {
  SortAnalysis an;

  ColorWrapFix() {
    DatatypeDecl color{"color",
                       DeclKind::Datatype,
                       {{"red", {}}, {"green", {}}, {"blue", {}}}};
    DatatypeDecl wrap{"wrap",
                      DeclKind::Datatype,
                      {{"w1", {{"wc", "color"}}}, {"w2", {{"wd", "color"}}}}};
    ds = check_declarations({color, wrap});
    an = analyze_sorts(ds.sig);
  }
};

template <typename E, typename F>
std::string thrown_message(F&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

bool solver_sat(const Formula& f, const DeclaredSignature& ds,
                const SortAnalysis& an) {
  return solve(f, ds.sig, an).result != SolveResult::False;
}

int count_fins(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Fin:
      return 1;
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
      return 0;
    default: {
      int n = 0;
      for (const Formula& g : f.sub()) n += count_fins(g);
      return n;
    }
  }
}

bool quantifier_free(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return false;
    case FormulaKind::True:
    case FormulaKind::False:
    case FormulaKind::Eq:
    case FormulaKind::Fin:
      return true;
    default:
      for (const Formula& g : f.sub())
        if (!quantifier_free(g)) return false;
      return true;
  }
}

} // namespace

TEST_CASE("declaration checking builds the constructor signature") {
  BoolListFix F;
  CHECK(F.ds.sig.sort_count() == 2);
  std::vector<std::string> list_gens;
  for (GenId g : F.ds.sig.generators_of(F.sort("list")))
    list_gens.push_back(F.ds.sig.generator(g).name);
  CHECK(list_gens == std::vector<std::string>{"nil", "cons"});

  const SelectorInfo& head = F.ds.selectors.at("head");
  CHECK(F.ds.sig.generator(head.constructor).name == "cons");
  CHECK(head.index == 0);
  CHECK(head.domain == F.sort("list"));
  CHECK(head.result == F.sort("bool"));
  const SelectorInfo& tail = F.ds.selectors.at("tail");
  CHECK(tail.index == 1);
  CHECK(tail.result == F.sort("list"));

  CHECK(F.ds.is_datatype(F.sort("bool")));
  CHECK(F.ds.is_datatype(F.sort("list")));
  CHECK_NOTHROW(F.ds.sig.validate());

  SUBCASE("mutually recursive datatypes are well-founded through a base") {
    DatatypeDecl a{"a",
                   DeclKind::Datatype,
                   {{"abase", {}}, {"awrap", {{"ab", "b"}}}}};
    DatatypeDecl b{"b", DeclKind::Datatype, {{"bwrap", {{"ba", "a"}}},
                                             {"bwrap2", {{"ba2", "a"}}}}};
    CHECK_NOTHROW(check_declarations({a, b}));
  }

  SUBCASE("a datatype without finite values is rejected") {
    DatatypeDecl inf{"infinite",
                     DeclKind::Datatype,
                     {{"next", {{"prev", "infinite"}}}}};
    CHECK(contains(
        thrown_message<FrontendError>([&] { check_declarations({inf}); }),
        "well-founded"));

    DatatypeDecl a{"a", DeclKind::Datatype, {{"wb", {{"x", "b"}}}}};
    DatatypeDecl b{"b", DeclKind::Datatype, {{"wa", {{"y", "a"}}}}};
    CHECK(contains(
        thrown_message<FrontendError>([&] { check_declarations({a, b}); }),
        "well-founded"));
  }

  SUBCASE("the same shape is legal as a codatatype") {
    DatatypeDecl inf{"infinite",
                     DeclKind::Codatatype,
                     {{"next", {{"prev", "infinite"}}}}};
    DeclaredSignature ds = check_declarations({inf});
    CHECK(ds.sig.find_generator("next").has_value());
    CHECK_FALSE(ds.is_datatype(*ds.sig.find_sort("infinite")));
    // The tree solver still needs two generators per sort, so solving over
    // this signature is rejected later, at validation time.
    CHECK_THROWS_AS(ds.sig.validate(), SignatureError);
  }

  SUBCASE("mixing datatypes into codatatypes is rejected") {
    DatatypeDecl st{"stream",
                    DeclKind::Codatatype,
                    {{"sc", {{"sx", "bool"}}}, {"sn", {}}}};
    CHECK(contains(thrown_message<FrontendError>(
                       [&] { check_declarations({bool_decl(), st}); }),
                   "mixed"));
  }

  SUBCASE("malformed declaration lists are rejected") {
    CHECK(contains(thrown_message<FrontendError>([&] {
                     check_declarations(
                         {{"empty", DeclKind::Datatype, {}}});
                   }),
                   "no constructors"));
    CHECK(contains(thrown_message<FrontendError>([&] {
                     check_declarations({bool_decl(), bool_decl()});
                   }),
                   "declared twice"));
    DatatypeDecl clash{"other", DeclKind::Datatype, {{"true", {}},
                                                     {"o2", {}}}};
    CHECK(contains(thrown_message<FrontendError>([&] {
                     check_declarations({bool_decl(), clash});
                   }),
                   "declared twice"));
    DatatypeDecl selclash{
        "pairs",
        DeclKind::Datatype,
        {{"mk", {{"head", "bool"}, {"snd", "bool"}}}, {"mk0", {}}}};
    CHECK(contains(
        thrown_message<FrontendError>([&] {
          check_declarations({bool_decl(), bool_list_decl(), selclash});
        }),
        "selector 'head'"));
    DatatypeDecl dangling{"dang", DeclKind::Datatype,
                          {{"dmk", {{"dx", "nothere"}}}, {"d0", {}}}};
    CHECK(contains(thrown_message<FrontendError>(
                       [&] { check_declarations({dangling}); }),
                   "undeclared"));
  }
}

TEST_CASE("default values pick minimal trees and canonical cycles") {
  Signature sig = reference_signature();
  SortAnalysis an = analyze_sorts(sig);
  auto tree = [&](const char* gen, std::vector<Term> args = {}) {
    return tree_from_term(Term::app(*sig.find_generator(gen), std::move(args)),
                          sig);
  };
  auto ground = [&](const char* gen) {
    return Term::app(*sig.find_generator(gen), {});
  };

  CHECK(rational_tree_equal(default_value_for(sig, an, *sig.find_sort("nat")),
                            tree("zero")));
  CHECK(rational_tree_equal(default_value_for(sig, an, *sig.find_sort("list")),
                            tree("nil")));
  CHECK(rational_tree_equal(default_value_for(sig, an, *sig.find_sort("bool")),
                            tree("false")));
  CHECK(rational_tree_equal(
      default_value_for(sig, an, *sig.find_sort("d")),
      tree("c1", {ground("false")})));
  CHECK(rational_tree_equal(
      default_value_for(sig, an, *sig.find_sort("t")),
      tree("g1", {ground("false"), ground("false")})));

  RationalTree loop;
  loop.nodes.push_back({*sig.find_generator("tree1"), {0}});
  RationalTree got = default_value_for(sig, an, *sig.find_sort("inftree"));
  CHECK_FALSE(is_finite_tree(got));
  CHECK(rational_tree_equal(got, loop));

  // 'true' is declared before 'false'; the choice is lexicographic, not
  // declaration order.
  BoolListFix F;
  RationalTree bdef = default_value_for(F.ds.sig, F.an, F.sort("bool"));
  CHECK(F.ds.sig.generator(bdef.nodes[bdef.root].gen).name == "false");

  DefaultValueTable table = auto_defaults(F.ds, F.an);
  const SelectorInfo& head = F.ds.selectors.at("head");
  const SelectorInfo& tail = F.ds.selectors.at("tail");
  REQUIRE(table.find(head.constructor, head.index) != nullptr);
  REQUIRE(table.find(tail.constructor, tail.index) != nullptr);
  CHECK(F.ds.sig
            .generator(table.find(head.constructor, head.index)
                           ->nodes[table.find(head.constructor, head.index)->root]
                           .gen)
            .name == "false");
  CHECK(F.ds.sig
            .generator(table.find(tail.constructor, tail.index)
                           ->nodes[table.find(tail.constructor, tail.index)->root]
                           .gen)
            .name == "nil");
}

TEST_CASE("equating a variable to a tree pins its value") {
  Signature sig = reference_signature();
  SortAnalysis an = analyze_sorts(sig);
  SortId inftree = *sig.find_sort("inftree");
  SortId nat = *sig.find_sort("nat");
  Term x = Term::variable(Var{"x", inftree});
  Term y = Term::variable(Var{"y", nat});

  RationalTree loop1;
  loop1.nodes.push_back({*sig.find_generator("tree1"), {0}});
  RationalTree loop2;
  loop2.nodes.push_back({*sig.find_generator("tree2"), {0, 0}});

  FreshSource fresh;
  Formula f = equate_to_tree(x, loop1, sig, fresh);
  CHECK(f.kind() == FormulaKind::Exists);
  CHECK(solve(f, sig, an).result != SolveResult::False);
  CHECK(solve(Formula::conjunction({f, Formula::fin(x)}), sig, an).result ==
        SolveResult::False);
  Formula g = equate_to_tree(x, loop2, sig, fresh);
  CHECK(solve(Formula::conjunction({f, g}), sig, an).result ==
        SolveResult::False);

  Term zero = Term::app(*sig.find_generator("zero"), {});
  Term one = Term::app(*sig.find_generator("succ"), {zero});
  Formula h = equate_to_tree(y, tree_from_term(one, sig), sig, fresh);
  CHECK(h.kind() == FormulaKind::Eq);
  CHECK(solve(Formula::conjunction({h, Formula::eq(y, zero)}), sig, an)
            .result == SolveResult::False);
  CHECK(solve(Formula::conjunction({h, Formula::eq(y, one)}), sig, an)
            .result != SolveResult::False);
}

TEST_CASE("default-value selector elimination follows the case split") {
  NatListFix F;
  SortId nat = F.sort("nat");
  SortId list = F.sort("list");
  Term zero = F.app("zero");
  Term nil = F.app("nil");
  DefaultValueTable defaults = auto_defaults(F.ds, F.an);
  const SelectorInfo& head = F.ds.selectors.at("head");

  SUBCASE("wrong-constructor selectors return the default") {
    Formula f = Formula::eq(F.sel("head", nil), zero);
    CHECK(eval_default_semantics(f, F.ds, defaults, {}));
    FreshSource fresh;
    Formula g = eliminate_selectors_default(f, F.ds, defaults, fresh);
    CHECK(selector_free(g));
    CHECK_NOTHROW(check_well_sorted(g, F.ds.sig));
    CHECK(solve(embed_in_trees(g, F.ds), F.ds.sig, F.an).result ==
          SolveResult::True);

    DefaultValueTable other = defaults;
    other.set(head.constructor, head.index,
              tree_from_term(F.app("succ", {zero}), F.ds.sig));
    CHECK_FALSE(eval_default_semantics(f, F.ds, other, {}));
    FreshSource fresh2;
    Formula g2 = eliminate_selectors_default(f, F.ds, other, fresh2);
    CHECK(solve(embed_in_trees(g2, F.ds), F.ds.sig, F.an).result ==
          SolveResult::False);
  }

  SUBCASE("matching-constructor selectors project the argument") {
    Term x = F.var("x", nat);
    Term a = F.var("a", nat);
    Term b = F.var("b", list);
    Formula f = Formula::eq(x, F.sel("head", F.app("cons", {a, b})));
    FreshSource fresh;
    Formula g = eliminate_selectors_default(f, F.ds, defaults, fresh);
    CHECK(selector_free(g));
    Formula same = Formula::iff(g, Formula::eq(x, a));
    CHECK(solve(embed_in_trees(same, F.ds), F.ds.sig, F.an).result ==
          SolveResult::True);
    Formula diff = Formula::iff(g, Formula::eq(x, F.app("succ", {a})));
    CHECK(solve(embed_in_trees(diff, F.ds), F.ds.sig, F.an).result ==
          SolveResult::Simplified);
  }

  SUBCASE("chained selectors bind innermost-first") {
    Term x = F.var("x", nat);
    Term a = F.var("a", nat);
    Term c = F.var("c", nat);
    Term inner = F.app("cons", {a, F.app("cons", {c, nil})});
    Formula f = Formula::eq(x, F.sel("head", F.sel("tail", inner)));
    FreshSource fresh;
    Formula g = eliminate_selectors_default(f, F.ds, defaults, fresh);
    CHECK(selector_free(g));
    Formula same = Formula::iff(g, Formula::eq(x, c));
    CHECK(solve(embed_in_trees(same, F.ds), F.ds.sig, F.an).result ==
          SolveResult::True);
  }

  SUBCASE("quantified input is transformed in place") {
    Var l{"l", list};
    Formula body = Formula::implies(
        Formula::eq(Term::variable(l), nil),
        Formula::eq(F.sel("head", Term::variable(l)), zero));
    Formula f = Formula::forall({l}, body);
    FreshSource fresh;
    Formula g = eliminate_selectors_default(f, F.ds, defaults, fresh);
    CHECK(selector_free(g));
    CHECK(solve(embed_in_trees(g, F.ds), F.ds.sig, F.an).result ==
          SolveResult::True);

    DefaultValueTable other = defaults;
    other.set(head.constructor, head.index,
              tree_from_term(F.app("succ", {zero}), F.ds.sig));
    FreshSource fresh2;
    Formula g2 = eliminate_selectors_default(f, F.ds, other, fresh2);
    CHECK(solve(embed_in_trees(g2, F.ds), F.ds.sig, F.an).result ==
          SolveResult::False);
  }

  SUBCASE("selector-free input is returned unchanged") {
    Formula f = Formula::eq(F.var("x", nat), zero);
    FreshSource fresh;
    CHECK(eliminate_selectors_default(f, F.ds, defaults, fresh) == f);
    CHECK(fresh.issued() == 0);
  }

  SUBCASE("a missing default is reported with both names") {
    DefaultValueTable empty;
    Formula f = Formula::eq(F.sel("head", nil), zero);
    FreshSource fresh;
    std::string msg = thrown_message<FrontendError>(
        [&] { eliminate_selectors_default(f, F.ds, empty, fresh); });
    CHECK(contains(msg, "default value"));
    CHECK(contains(msg, "head"));
    CHECK(contains(msg, "cons"));
  }
}

TEST_CASE("default-value elimination preserves truth under every valuation") {
  NatListFix F;
  SortId nat = F.sort("nat");
  SortId list = F.sort("list");
  DefaultValueTable defaults = auto_defaults(F.ds, F.an);

  std::vector<RationalTree> nat_dom = truncated_domain(F.ds.sig, nat, 3);
  std::vector<RationalTree> list_dom = truncated_domain(F.ds.sig, list, 3);
  REQUIRE(nat_dom.size() == 3);
  REQUIRE(list_dom.size() == 5);

  DatatypeFormulaProfile prof;
  prof.free_vars = {Var{"x", nat}, Var{"l", list}};
  prof.max_atoms = 4;
  prof.max_connective_depth = 2;
  prof.max_term_depth = 2;

  int mismatches = 0;
  int with_selectors = 0;
  for (uint64_t seed = 0; seed < 25; ++seed) {
    Formula f = random_datatype_formula(seed, F.ds, prof);
    if (!selector_free(f)) ++with_selectors;
    FreshSource fresh;
    Formula g = eliminate_selectors_default(f, F.ds, defaults, fresh);
    REQUIRE(selector_free(g));
    for (const RationalTree& xv : nat_dom)
      for (const RationalTree& lv : list_dom) {
        Valuation vals{{"x", xv}, {"l", lv}};
        bool direct = eval_default_semantics(f, F.ds, defaults, vals);
        FreshSource pin_fresh;
        std::vector<Formula> conj{
            g, equate_to_tree(Term::variable(Var{"x", nat}), xv, F.ds.sig,
                              pin_fresh),
            equate_to_tree(Term::variable(Var{"l", list}), lv, F.ds.sig,
                           pin_fresh)};
        Formula pinned =
            embed_in_trees(Formula::conjunction(std::move(conj)), F.ds);
        bool solved = solver_sat(pinned, F.ds, F.an);
        if (direct != solved) ++mismatches;
      }
  }
  CHECK(mismatches == 0);
  CHECK(with_selectors >= 10);
}

TEST_CASE("standard-semantics elimination is equisatisfiable") {
  BoolListFix F;
  SortId bs = F.sort("bool");
  SortId ls = F.sort("list");
  Term btrue = F.app("true");
  Term bfalse = F.app("false");
  Term nil = F.app("nil");
  Term l = F.var("l", ls);
  Term l2 = F.var("l2", ls);
  Term x = F.var("x", bs);
  Term y = F.var("y", ls);

  SUBCASE("an unconstrained selector may take any value") {
    Formula f = Formula::conjunction(
        {Formula::eq(F.sel("head", l), btrue), Formula::eq(l, nil)});
    CHECK(sat_standard_truncated(f, F.ds, 3));
    FreshSource fresh;
    Formula g = eliminate_selectors_standard(f, F.ds, fresh);
    CHECK(selector_free(g));
    CHECK(free_variables(g).size() > free_variables(f).size());
    CHECK(solver_sat(embed_in_trees(g, F.ds), F.ds, F.an));
  }

  SUBCASE("projection on the right constructor is forced") {
    Formula pos = Formula::eq(F.sel("head", F.app("cons", {x, y})), x);
    CHECK(sat_standard_truncated(pos, F.ds, 3));
    FreshSource fresh;
    CHECK(solver_sat(embed_in_trees(
                         eliminate_selectors_standard(pos, F.ds, fresh), F.ds),
                     F.ds, F.an));

    Formula neg = Formula::negation(pos);
    CHECK_FALSE(sat_standard_truncated(neg, F.ds, 3));
    FreshSource fresh2;
    CHECK_FALSE(solver_sat(
        embed_in_trees(eliminate_selectors_standard(neg, F.ds, fresh2), F.ds),
        F.ds, F.an));
  }

  SUBCASE("functional consistency ties equal arguments together") {
    Formula f = Formula::conjunction(
        {Formula::eq(l, l2),
         Formula::negation(
             Formula::eq(F.sel("head", l), F.sel("head", l2)))});
    CHECK_FALSE(sat_standard_truncated(f, F.ds, 3));
    FreshSource fresh;
    CHECK_FALSE(solver_sat(
        embed_in_trees(eliminate_selectors_standard(f, F.ds, fresh), F.ds),
        F.ds, F.an));

    Formula g = Formula::conjunction(
        {Formula::eq(F.sel("head", l), btrue),
         Formula::eq(F.sel("head", l2), bfalse)});
    CHECK(sat_standard_truncated(g, F.ds, 3));
    FreshSource fresh2;
    CHECK(solver_sat(
        embed_in_trees(eliminate_selectors_standard(g, F.ds, fresh2), F.ds),
        F.ds, F.an));
  }

  SUBCASE("selector-free input is returned unchanged") {
    Formula f = Formula::eq(l, nil);
    FreshSource fresh;
    CHECK(eliminate_selectors_standard(f, F.ds, fresh) == f);
  }

  SUBCASE("quantified input is rejected") {
    Formula f = Formula::exists({Var{"q", ls}},
                                Formula::eq(F.var("q", ls), nil));
    FreshSource fresh;
    CHECK(contains(thrown_message<FrontendError>([&] {
                     eliminate_selectors_standard(f, F.ds, fresh);
                   }),
                   "quantifier-free"));
  }
}

TEST_CASE("the standard oracle enumerates selector functions consistently") {
  BoolListFix F;
  Term btrue = F.app("true");
  Term bfalse = F.app("false");
  Term nil = F.app("nil");

  CHECK(sat_standard_truncated(Formula::eq(F.sel("head", nil), btrue),
                               F.ds, 3));
  CHECK_FALSE(sat_standard_truncated(
      Formula::conjunction({Formula::eq(F.sel("head", nil), btrue),
                            Formula::eq(F.sel("head", nil), bfalse)}),
      F.ds, 3));
  CHECK_FALSE(sat_standard_truncated(
      Formula::eq(F.sel("head", F.app("cons", {btrue, nil})), bfalse),
      F.ds, 3));
  CHECK(sat_standard_truncated(
      Formula::eq(F.sel("tail", nil), F.app("cons", {btrue, nil})), F.ds,
      3));
  CHECK_FALSE(sat_standard_truncated(
      Formula::negation(Formula::eq(F.sel("tail", nil), F.sel("tail", nil))),
      F.ds, 3));

  SUBCASE("the default-semantics evaluator handles the same terms") {
    DefaultValueTable defaults = auto_defaults(F.ds, F.an);
    Term b = F.var("b", F.sort("bool"));
    Valuation vals{{"b", tree_from_term(btrue, F.ds.sig)}};
    Formula project =
        Formula::eq(F.sel("head", F.app("cons", {b, nil})), b);
    CHECK(eval_default_semantics(project, F.ds, defaults, vals));
    Formula wrong = Formula::eq(F.sel("head", nil), btrue);
    CHECK_FALSE(eval_default_semantics(wrong, F.ds, defaults, vals));

    CHECK_THROWS_AS(eval_default_semantics(project, F.ds, defaults, {}),
                    SortError);
    CHECK_THROWS_AS(
        eval_default_semantics(
            Formula::exists({Var{"q", F.sort("bool")}},
                            Formula::eq(F.var("q", F.sort("bool")), btrue)),
            F.ds, defaults, vals),
        FrontendError);
    DefaultValueTable empty;
    CHECK_THROWS_AS(eval_default_semantics(wrong, F.ds, empty, vals),
                    FrontendError);
  }
}

TEST_CASE("embedding adds finiteness exactly on datatype variables") {
  BoolListFix F;
  SortId ls = F.sort("list");
  Term nil = F.app("nil");
  Var x{"x", ls};

  Formula e1 = Formula::exists({x}, Formula::eq(Term::variable(x), nil));
  Formula want1 = Formula::exists(
      {x}, Formula::conjunction({Formula::fin(Term::variable(x)),
                                 Formula::eq(Term::variable(x), nil)}));
  CHECK(embed_in_trees(e1, F.ds) == want1);

  Formula e2 = Formula::eq(Term::variable(x), nil);
  Formula want2 =
      Formula::conjunction({Formula::fin(Term::variable(x)),
                            Formula::eq(Term::variable(x), nil)});
  CHECK(embed_in_trees(e2, F.ds) == want2);

  SUBCASE("codatatype formulae pass through unchanged") {
    StreamFix S;
    SortId ss = S.sort("stream");
    Var s{"s", ss};
    Var t{"t", ss};
    Formula f = Formula::forall(
        {s}, Formula::exists(
                 {t}, Formula::eq(Term::variable(s),
                                  S.app("scons", {S.app("ct"),
                                                  Term::variable(t)}))));
    CHECK(embed_in_trees(f, S.ds) == f);
    CHECK(count_fins(embed_in_trees(f, S.ds)) == 0);
  }

  SUBCASE("universals over datatypes are guarded through negation") {
    DatatypeDecl cb{"cb", DeclKind::Codatatype, {{"ct", {}}, {"cf", {}}}};
    DatatypeDecl stream{"stream",
                        DeclKind::Codatatype,
                        {{"scons", {{"shead", "cb"}, {"stail", "stream"}}}}};
    DeclaredSignature mixed =
        check_declarations({bool_decl(), bool_list_decl(), cb, stream});
    SortId mls = *mixed.sig.find_sort("list");
    SortId mss = *mixed.sig.find_sort("stream");
    Var mx{"x", mls};
    Var ms{"s", mss};
    Formula body = Formula::eq(Term::variable(mx),
                               Term::app(*mixed.sig.find_generator("nil"), {}));
    Formula f = Formula::forall({mx}, Formula::exists({ms}, body));
    Formula want = Formula::negation(Formula::exists(
        {mx},
        Formula::conjunction(
            {Formula::fin(Term::variable(mx)),
             Formula::negation(Formula::exists({ms}, body))})));
    CHECK(embed_in_trees(f, mixed) == want);
    CHECK(count_fins(embed_in_trees(f, mixed)) == 1);

    std::vector<Var> free_before = free_variables(f);
    std::vector<Var> free_after = free_variables(embed_in_trees(f, mixed));
    CHECK(free_before == free_after);
  }

  SUBCASE("one fin per datatype variable, bound or free") {
    Var a{"a", ls};
    Var b{"b", ls};
    Var c{"c", F.sort("bool")};
    Formula f = Formula::exists(
        {a, b},
        Formula::conjunction(
            {Formula::eq(Term::variable(a), Term::variable(b)),
             Formula::eq(Term::variable(x), nil),
             Formula::eq(Term::variable(c), F.app("true"))}));
    Formula g = embed_in_trees(f, F.ds);
    // bound a, b plus free x, c: four datatype variables in play.
    CHECK(count_fins(g) - count_fins(f) == 4);
    std::set<std::string> before, after;
    for (const Var& v : free_variables(f)) before.insert(v.name);
    for (const Var& v : free_variables(g)) after.insert(v.name);
    CHECK(before == after);
  }

  SUBCASE("selector applications are rejected") {
    Formula f = Formula::eq(F.sel("head", Term::variable(x)), F.app("true"));
    CHECK_THROWS_AS(embed_in_trees(f, F.ds), FrontendError);
  }

  CHECK(embed_in_trees(Formula::truth(), F.ds) == Formula::truth());
}

TEST_CASE("pipelines agree with the truncated oracle on finite datatypes") {
  ColorWrapFix F;
  SortId color = F.sort("color");
  SortId wrap = F.sort("wrap");

  std::vector<RationalTree> cdom = truncated_domain(F.ds.sig, color, 3);
  std::vector<RationalTree> wdom = truncated_domain(F.ds.sig, wrap, 3);
  CHECK(cdom.size() == 3);
  CHECK(wdom.size() == 6);
  CHECK(truncated_domain(F.ds.sig, wrap, 2).size() == 6);
  for (size_t i = 0; i < wdom.size(); ++i)
    for (size_t j = i + 1; j < wdom.size(); ++j)
      CHECK_FALSE(rational_tree_equal(wdom[i], wdom[j]));

  DatatypeFormulaProfile prof;
  prof.free_vars = {Var{"c1", color}, Var{"c2", color}, Var{"w", wrap}};
  prof.max_atoms = 4;
  prof.max_connective_depth = 2;
  prof.max_term_depth = 2;

  int with_selectors = 0;
  int sat_count = 0;
  int unsat_count = 0;
  for (uint64_t seed = 0; seed < 80; ++seed) {
    Formula f = random_datatype_formula(seed, F.ds, prof);
    if (!selector_free(f)) ++with_selectors;
    bool oracle = sat_standard_truncated(f, F.ds, 3);
    FreshSource fresh;
    Formula pipeline = embed_in_trees(
        eliminate_selectors_standard(f, F.ds, fresh), F.ds);
    bool solver = solver_sat(pipeline, F.ds, F.an);
    CHECK(oracle == solver);
    (oracle ? sat_count : unsat_count) += 1;
  }
  CHECK(with_selectors >= 25);
  CHECK(sat_count >= 5);
  CHECK(unsat_count >= 5);

  SUBCASE("truncation is sound on recursive datatypes") {
    BoolListFix B;
    DatatypeFormulaProfile bprof;
    bprof.free_vars = {Var{"l", B.sort("list")}, Var{"b", B.sort("bool")}};
    bprof.max_atoms = 3;
    bprof.max_connective_depth = 2;
    bprof.max_term_depth = 2;
    for (uint64_t seed = 0; seed < 40; ++seed) {
      Formula f = random_datatype_formula(seed, B.ds, bprof);
      if (!sat_standard_truncated(f, B.ds, 3)) continue;
      FreshSource fresh;
      Formula pipeline = embed_in_trees(
          eliminate_selectors_standard(f, B.ds, fresh), B.ds);
      CHECK(solver_sat(pipeline, B.ds, B.an));
    }
  }
}

TEST_CASE("random datatype formulas are deterministic and well-formed") {
  NatListFix F;
  DatatypeFormulaProfile prof;
  prof.free_vars = {Var{"x", F.sort("nat")}, Var{"l", F.sort("list")}};

  std::set<std::string> allowed{"x", "l"};
  int with_selectors = 0;
  for (uint64_t seed = 0; seed < 150; ++seed) {
    Formula f = random_datatype_formula(seed, F.ds, prof);
    CHECK(f == random_datatype_formula(seed, F.ds, prof));
    CHECK_NOTHROW(check_well_sorted(f, F.ds.sig, /*allow_selectors=*/true));
    CHECK(quantifier_free(f));
    for (const Var& v : free_variables(f)) CHECK(allowed.count(v.name) == 1);
    if (!selector_free(f)) ++with_selectors;
  }
  CHECK(with_selectors >= 60);
}
