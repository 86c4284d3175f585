#include <doctest.h>

#include "fixtures.hpp"
#include "treesolve/basic_solver.hpp"
#include "treesolve/formula.hpp"

using namespace treesolve;
using treesolve::testing::reference_signature;

namespace {

struct Ctx {
  Signature sig = reference_signature();
  SortAnalysis analysis = analyze_sorts(sig);
  SortId nat = sig.find_sort("nat").value();
  SortId boolean = sig.find_sort("bool").value();
  SortId list = sig.find_sort("list").value();
  SortId inftree = sig.find_sort("inftree").value();
  GenId zero = sig.find_generator("zero").value();
  GenId succ = sig.find_generator("succ").value();
  GenId nil = sig.find_generator("nil").value();
  GenId cons = sig.find_generator("cons").value();

  Budget budget;

  std::optional<BasicFormula> run(const VarOrder& order, BasicFormula b,
                                  RuleScheduler* sched = nullptr) {
    return solve_basic(order, std::move(b), analysis, budget, sched);
  }
};

} // namespace

TEST_CASE("chained equations keep the variable link first") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat}, z{"z", c.nat};
  VarOrder order;
  order.push_all({y, z, x});

  BasicFormula b;
  b.eqs.push_back(Equation{x, y});
  b.eqs.push_back(Equation{x, FlatApp{c.succ, {z}}});

  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  REQUIRE(r->eqs.size() == 2);
  CHECK(r->eqs[0] == Equation{x, y});
  CHECK(r->eqs[1] == Equation{y, FlatApp{c.succ, {z}}});
}

TEST_CASE("orientation and reflexivity") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat};
  VarOrder order;
  order.push_all({y, x});

  BasicFormula b;
  b.eqs.push_back(Equation{y, x}); // smaller variable on the left
  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  REQUIRE(r->eqs.size() == 1);
  CHECK(r->eqs[0] == Equation{x, y});

  BasicFormula refl;
  refl.eqs.push_back(Equation{x, x});
  r = c.run(order, refl);
  REQUIRE(r.has_value());
  CHECK(r->eqs.empty());
}

TEST_CASE("generator clash is inconsistent") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat};
  VarOrder order;
  order.push_all({y, x});

  BasicFormula b;
  b.eqs.push_back(Equation{x, FlatApp{c.succ, {y}}});
  b.eqs.push_back(Equation{x, FlatApp{c.zero, {}}});
  CHECK(!c.run(order, b).has_value());
}

TEST_CASE("same generator decomposes pointwise") {
  Ctx c;
  Var a{"a", c.nat}, b1{"b", c.list}, d{"d", c.nat}, e{"e", c.list},
      x{"x", c.list};
  VarOrder order;
  order.push_all({a, b1, d, e, x});

  BasicFormula b;
  b.eqs.push_back(Equation{x, FlatApp{c.cons, {a, b1}}});
  b.eqs.push_back(Equation{x, FlatApp{c.cons, {d, e}}});

  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  REQUIRE(r->eqs.size() == 3);
  CHECK(r->eqs[0] == Equation{x, FlatApp{c.cons, {a, b1}}});
  // Pointwise argument equations, oriented larger-to-smaller.
  CHECK(r->eqs[1] == Equation{d, a});
  CHECK(r->eqs[2] == Equation{e, b1});
}

TEST_CASE("cyclic equations are consistent") {
  Ctx c;
  Var x{"x", c.nat};
  VarOrder order;
  order.push(x);
  BasicFormula b;
  b.eqs.push_back(Equation{x, FlatApp{c.succ, {x}}});
  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  CHECK(r->eqs.size() == 1);
}

TEST_CASE("finiteness follows variable links") {
  Ctx c;
  Var x{"x", c.nat}, y{"y", c.nat};
  VarOrder order;
  order.push_all({y, x});
  BasicFormula b;
  b.eqs.push_back(Equation{x, y});
  b.fins = {x, y};
  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  CHECK(r->eqs.size() == 1);
  CHECK(r->fins == std::vector<Var>{y});
}

TEST_CASE("finiteness on a cycle is inconsistent") {
  Ctx c;
  Var x{"x", c.nat};
  VarOrder order;
  order.push(x);
  BasicFormula b;
  b.eqs.push_back(Equation{x, FlatApp{c.succ, {x}}});
  b.fins = {x};
  CHECK(!c.run(order, b).has_value());
}

TEST_CASE("finiteness decomposes through applications") {
  Ctx c;
  Var a{"a", c.nat}, b1{"b", c.list}, x{"x", c.list};
  VarOrder order;
  order.push_all({a, b1, x});
  BasicFormula b;
  b.eqs.push_back(Equation{x, FlatApp{c.cons, {a, b1}}});
  b.fins = {x};
  auto r = c.run(order, b);
  REQUIRE(r.has_value());
  CHECK(r->eqs.size() == 1);
  CHECK(r->fins == std::vector<Var>{a, b1});
}

TEST_CASE("trivial finiteness constraints resolve by sort") {
  Ctx c;
  Var p{"p", c.boolean}, q{"q", c.inftree};
  VarOrder order;
  order.push_all({p, q});

  BasicFormula all_finite;
  all_finite.fins = {p};
  auto r = c.run(order, all_finite);
  REQUIRE(r.has_value());
  CHECK(r->fins.empty());

  BasicFormula all_infinite;
  all_infinite.fins = {q};
  CHECK(!c.run(order, all_infinite).has_value());
}

TEST_CASE("budget exhaustion raises") {
  Ctx c;
  c.budget.remaining = 2;
  Var x{"x", c.nat}, y{"y", c.nat}, z{"z", c.nat};
  VarOrder order;
  order.push_all({z, y, x});
  BasicFormula b;
  b.eqs.push_back(Equation{x, y});
  b.eqs.push_back(Equation{x, z});
  b.eqs.push_back(Equation{y, z});
  CHECK_THROWS_AS(c.run(order, b), TimeoutError);
}

TEST_CASE("random schedules agree with the deterministic result") {
  Ctx c;
  Var a{"a", c.nat}, b1{"b", c.nat}, d{"d", c.nat}, x{"x", c.list},
      y{"y", c.list}, t{"t", c.list};
  VarOrder order;
  order.push_all({a, b1, d, x, y, t});

  BasicFormula b;
  b.eqs.push_back(Equation{t, FlatApp{c.cons, {a, x}}});
  b.eqs.push_back(Equation{t, FlatApp{c.cons, {b1, y}}});
  b.eqs.push_back(Equation{t, y});
  b.eqs.push_back(Equation{d, a});
  b.eqs.push_back(Equation{b1, d});
  b.fins = {b1, b1};

  auto det = c.run(order, b);
  REQUIRE(det.has_value());
  BasicFormula det_canon = canonical_solved_basic(order, *det);
  for (uint64_t seed = 1; seed <= 25; ++seed) {
    RandomScheduler sched(seed);
    Budget budget;
    auto r = solve_basic(order, b, c.analysis, budget, &sched);
    REQUIRE(r.has_value());
    CHECK(canonical_solved_basic(order, *r) == det_canon);
  }
}

TEST_CASE("step count stays within the quadratic bound") {
  Ctx c;
  Var a{"a", c.nat}, b1{"b", c.nat}, d{"d", c.nat}, x{"x", c.list},
      y{"y", c.list}, t{"t", c.list};
  VarOrder order;
  order.push_all({a, b1, d, x, y, t});

  BasicFormula b;
  b.eqs.push_back(Equation{t, FlatApp{c.cons, {a, x}}});
  b.eqs.push_back(Equation{t, FlatApp{c.cons, {b1, y}}});
  b.eqs.push_back(Equation{y, t});
  b.eqs.push_back(Equation{d, a});
  b.fins = {b1, a};

  uint64_t n = b.size();
  Budget budget;
  auto r = solve_basic(order, b, c.analysis, budget);
  REQUIRE(r.has_value());
  CHECK(budget.used <= 10 * (n * n + n));
}
