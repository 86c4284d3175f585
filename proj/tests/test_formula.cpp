#include <doctest.h>

#include "fixtures.hpp"
#include "treesolve/errors.hpp"
#include "treesolve/formula.hpp"

using namespace treesolve;
using treesolve::testing::reference_signature;

namespace {

struct Ctx {
  Signature sig = reference_signature();
  SortId nat = sig.find_sort("nat").value();
  SortId boolean = sig.find_sort("bool").value();
  SortId list = sig.find_sort("list").value();
  GenId zero = sig.find_generator("zero").value();
  GenId succ = sig.find_generator("succ").value();
  GenId nil = sig.find_generator("nil").value();
  GenId cons = sig.find_generator("cons").value();

  Term var(const std::string& n, SortId s) const {
    return Term::variable(Var{n, s});
  }
};

} // namespace

TEST_CASE("free variables in first occurrence order") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat};

  Formula f = Formula::conjunction(
      {Formula::fin(c.var("x", c.nat)),
       Formula::eq(c.var("x", c.nat), c.var("y", c.nat))});
  auto fv = free_variables(f);
  REQUIRE(fv.size() == 2);
  CHECK(fv[0] == x);
  CHECK(fv[1] == y);

  Formula g = Formula::exists(
      {x}, Formula::eq(c.var("x", c.nat), c.var("y", c.nat)));
  fv = free_variables(g);
  REQUIRE(fv.size() == 1);
  CHECK(fv[0] == y);

  CHECK(free_variables(Formula::truth()).empty());
}

TEST_CASE("factory normalization of degenerate connectives") {
  Ctx c;
  Formula atom = Formula::eq(c.var("x", c.nat), c.var("y", c.nat));

  CHECK(Formula::conjunction({}) == Formula::truth());
  CHECK(Formula::conjunction({atom}) == atom);
  CHECK(Formula::disjunction({}) == Formula::falsity());
  CHECK(Formula::disjunction({atom}) == atom);
  CHECK(Formula::exists({}, atom) == atom);
  CHECK(Formula::forall({}, atom) == atom);
}

TEST_CASE("structural equality") {
  Ctx c;
  Term x = c.var("x", c.nat), y = c.var("y", c.nat);
  CHECK(Formula::eq(x, y) == Formula::eq(x, y));
  CHECK(Formula::eq(x, y) != Formula::eq(y, x));
  CHECK(Formula::fin(x) != Formula::fin(y));
  CHECK(Formula::negation(Formula::truth()) !=
        Formula::negation(Formula::falsity()));
  Formula e1 = Formula::exists({Var{"x", c.nat}}, Formula::fin(x));
  Formula e2 = Formula::exists({Var{"x", c.boolean}}, Formula::fin(x));
  CHECK(e1 != e2);
}

TEST_CASE("well-sortedness checks") {
  Ctx c;

  SUBCASE("sort mismatch in equation") {
    Formula f = Formula::eq(c.var("x", c.nat), c.var("b", c.boolean));
    CHECK_THROWS_AS(check_well_sorted(f, c.sig), SortError);
  }
  SUBCASE("arity error") {
    Formula f = Formula::eq(c.var("x", c.nat), Term::app(c.succ, {}));
    CHECK_THROWS_AS(check_well_sorted(f, c.sig), SortError);
  }
  SUBCASE("argument sort mismatch") {
    Term bad = Term::app(c.succ, {c.var("b", c.boolean)});
    Formula f = Formula::eq(c.var("x", c.nat), bad);
    CHECK_THROWS_AS(check_well_sorted(f, c.sig), SortError);
  }
  SUBCASE("duplicate binders rejected") {
    Formula f = Formula::exists(
        {Var{"x", c.nat}, Var{"x", c.nat}},
        Formula::eq(c.var("x", c.nat), c.var("x", c.nat)));
    CHECK_THROWS_AS(check_well_sorted(f, c.sig), SortError);
  }
  SUBCASE("selectors rejected unless allowed") {
    Term sel = Term::selector("head", c.nat, c.var("l", c.list));
    Formula f = Formula::eq(c.var("x", c.nat), sel);
    CHECK_THROWS_AS(check_well_sorted(f, c.sig), SortError);
    CHECK_NOTHROW(check_well_sorted(f, c.sig, /*allow_selectors=*/true));
  }
  SUBCASE("valid formula passes") {
    Formula f = Formula::exists(
        {Var{"y", c.nat}},
        Formula::conjunction(
            {Formula::eq(c.var("x", c.nat),
                         Term::app(c.succ, {c.var("y", c.nat)})),
             Formula::fin(c.var("y", c.nat))}));
    CHECK_NOTHROW(check_well_sorted(f, c.sig));
  }
}

TEST_CASE("substitute_var respects shadowing") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat}, z{"z", c.nat};
  // x=y and (exists x. x=y): only the free x is renamed.
  Formula inner = Formula::exists(
      {x}, Formula::eq(c.var("x", c.nat), c.var("y", c.nat)));
  Formula f = Formula::conjunction(
      {Formula::eq(c.var("x", c.nat), c.var("y", c.nat)), inner});
  Formula g = substitute_var(f, x, z);
  CHECK(g.sub()[0] == Formula::eq(c.var("z", c.nat), c.var("y", c.nat)));
  CHECK(g.sub()[1] == inner);
}

TEST_CASE("canonicalize identifies alpha-equivalent formulae") {
  Ctx c;
  auto mk = [&](const std::string& bound_name) {
    return Formula::exists(
        {Var{bound_name, c.nat}},
        Formula::eq(c.var("x", c.nat),
                    Term::app(c.succ, {c.var(bound_name, c.nat)})));
  };
  CHECK(canonicalize(mk("a")) == canonicalize(mk("b")));
  CHECK(canonicalize(mk("a")) != canonicalize(Formula::exists(
                                     {Var{"a", c.nat}},
                                     Formula::eq(c.var("y", c.nat),
                                                 Term::app(c.succ, {c.var("a", c.nat)})))));
}

TEST_CASE("canonicalize identifies binder-order permutations") {
  Ctx c;
  auto body = [&](const std::string& hd, const std::string& tl) {
    return Formula::eq(
        c.var("x", c.list),
        Term::app(c.cons, {c.var(hd, c.nat), c.var(tl, c.list)}));
  };
  Formula a = Formula::exists({Var{"h", c.nat}, Var{"t", c.list}},
                              body("h", "t"));
  Formula b = Formula::exists({Var{"t", c.list}, Var{"h", c.nat}},
                              body("h", "t"));
  CHECK(canonicalize(a) == canonicalize(b));
  // Unused binders of the same sort are interchangeable too.
  Formula u1 = Formula::exists({Var{"p", c.nat}, Var{"q", c.nat}},
                               Formula::fin(c.var("p", c.nat)));
  Formula u2 = Formula::exists({Var{"q", c.nat}, Var{"p", c.nat}},
                               Formula::fin(c.var("q", c.nat)));
  CHECK(canonicalize(u1) == canonicalize(u2));
}

TEST_CASE("canonicalize sorts conjuncts") {
  Ctx c;
  Formula a = Formula::conjunction(
      {Formula::fin(c.var("y", c.nat)),
       Formula::eq(c.var("x", c.nat), c.var("y", c.nat))});
  Formula b = Formula::conjunction(
      {Formula::eq(c.var("x", c.nat), c.var("y", c.nat)),
       Formula::fin(c.var("y", c.nat))});
  CHECK(canonicalize(a) == canonicalize(b));
}

TEST_CASE("canonicalize is idempotent") {
  Ctx c;
  std::vector<Formula> samples = {
      Formula::truth(),
      Formula::eq(c.var("x", c.nat), Term::app(c.zero, {})),
      Formula::exists({Var{"a", c.nat}, Var{"b", c.list}},
                      Formula::conjunction(
                          {Formula::eq(c.var("l", c.list),
                                       Term::app(c.cons, {c.var("a", c.nat),
                                                          c.var("b", c.list)})),
                           Formula::fin(c.var("a", c.nat))})),
      Formula::negation(Formula::exists(
          {Var{"q", c.nat}},
          Formula::disjunction({Formula::fin(c.var("q", c.nat)),
                                Formula::eq(c.var("q", c.nat),
                                            c.var("r", c.nat))}))),
      Formula::forall({Var{"x", c.boolean}},
                      Formula::implies(Formula::fin(c.var("x", c.boolean)),
                                       Formula::truth())),
  };
  for (const Formula& f : samples) {
    Formula once = canonicalize(f);
    CHECK(canonicalize(once) == once);
  }
}

TEST_CASE("formula rendering") {
  Ctx c;
  CHECK(to_string(Formula::truth(), c.sig) == "true");
  CHECK(to_string(Formula::eq(c.var("x", c.nat), c.var("y", c.nat)), c.sig) ==
        "(= x y)");
  Formula f = Formula::exists(
      {Var{"y", c.nat}},
      Formula::conjunction(
          {Formula::eq(c.var("x", c.nat),
                       Term::app(c.succ, {c.var("y", c.nat)})),
           Formula::fin(c.var("y", c.nat))}));
  CHECK(to_string(f, c.sig) ==
        "(exists ((y nat)) (and (= x (succ y)) (fin y)))");
  CHECK(to_string(Formula::negation(Formula::falsity()), c.sig) ==
        "(not false)");
}
