#include "treesolve/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treesolve/errors.hpp"
#include "treesolve/normal.hpp"
#include "treesolve/solver.hpp"

namespace treesolve {

namespace {

/// Appends src's nodes to dst and returns src's root in dst's numbering.
uint32_t import_tree(RationalTree& dst, const RationalTree& src) {
  uint32_t offset = static_cast<uint32_t>(dst.nodes.size());
  for (const RationalTree::Node& n : src.nodes) {
    RationalTree::Node copy = n;
    for (uint32_t& c : copy.children) c += offset;
    dst.nodes.push_back(std::move(copy));
  }
  return src.root + offset;
}

RationalTree subtree(const RationalTree& t, size_t child) {
  RationalTree out = t;
  out.root = t.nodes[t.root].children[child];
  return out;
}

RationalTree make_app(GenId g, const std::vector<RationalTree>& args) {
  RationalTree out;
  out.nodes.push_back({g, {}});
  out.root = 0;
  for (const RationalTree& a : args) {
    uint32_t r = import_tree(out, a);  // may reallocate out.nodes
    out.nodes[0].children.push_back(r);
  }
  return out;
}

bool tree_in(const RationalTree& t, const std::vector<RationalTree>& set) {
  for (const RationalTree& s : set)
    if (rational_tree_equal(t, s)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Enumeration-based evaluation.

struct Evaluator {
  const Signature& sig;
  const SortAnalysis& analysis;
  std::map<uint32_t, std::vector<RationalTree>> domains;

  const std::vector<RationalTree>& domain(SortId s) {
    auto it = domains.find(s.index);
    if (it == domains.end())
      it = domains.emplace(s.index, enumerate_domain(sig, analysis, s)).first;
    return it->second;
  }

  RationalTree eval_term(const Term& t, const Valuation& vals) {
    if (t.is_variable()) {
      auto it = vals.find(t.var().name);
      if (it == vals.end())
        throw SortError("variable '" + t.var().name + "' has no value");
      return it->second;
    }
    if (t.is_selector())
      throw SortError("selector application cannot be evaluated on trees");
    std::vector<RationalTree> args;
    args.reserve(t.args().size());
    for (const Term& a : t.args()) args.push_back(eval_term(a, vals));
    return make_app(t.gen(), args);
  }

  bool eval(const Formula& f, Valuation& vals) {
    switch (f.kind()) {
      case FormulaKind::True:
        return true;
      case FormulaKind::False:
        return false;
      case FormulaKind::Eq:
        return rational_tree_equal(eval_term(f.lhs(), vals),
                                   eval_term(f.rhs(), vals));
      case FormulaKind::Fin:
        return is_finite_tree(eval_term(f.lhs(), vals));
      case FormulaKind::Not:
        return !eval(f.sub()[0], vals);
      case FormulaKind::And:
        for (const Formula& g : f.sub())
          if (!eval(g, vals)) return false;
        return true;
      case FormulaKind::Or:
        for (const Formula& g : f.sub())
          if (eval(g, vals)) return true;
        return false;
      case FormulaKind::Implies:
        return !eval(f.sub()[0], vals) || eval(f.sub()[1], vals);
      case FormulaKind::Iff:
        return eval(f.sub()[0], vals) == eval(f.sub()[1], vals);
      case FormulaKind::Exists:
        return quantify(f, 0, vals, true);
      case FormulaKind::Forall:
        return quantify(f, 0, vals, false);
    }
    return false;
  }

  bool quantify(const Formula& f, size_t idx, Valuation& vals, bool some) {
    if (idx == f.bound().size()) return eval(f.sub()[0], vals);
    const Var& v = f.bound()[idx];
    std::optional<RationalTree> saved;
    auto it = vals.find(v.name);
    if (it != vals.end()) saved = it->second;
    bool result = !some;
    for (const RationalTree& t : domain(v.sort)) {
      vals[v.name] = t;
      bool b = quantify(f, idx + 1, vals, some);
      if (b == some) {
        result = some;
        break;
      }
    }
    if (saved)
      vals[v.name] = *saved;
    else
      vals.erase(v.name);
    return result;
  }
};

// ---------------------------------------------------------------------------
// Propagation-based evaluation of solved shapes.

struct ForcedEvaluator {
  const Signature& sig;
  const SortAnalysis& analysis;

  void set_value(Valuation& vals, const std::string& name,
                 const RationalTree& t, std::set<std::string>& pending) {
    vals[name] = t;
    pending.erase(name);
  }

  /// Value of (exists bound. alpha and children) under vals. Returns false
  /// as soon as an equation is unsatisfiable under the forced extension.
  bool exists_value(const NormalFormula& nf, Valuation vals) {
    std::set<std::string> pending;
    for (const Var& v : nf.bound) {
      vals.erase(v.name);
      pending.insert(v.name);
    }
    // Propagate forced values through the equations to a fixpoint.
    bool progress = true;
    while (progress) {
      progress = false;
      for (const Equation& e : nf.alpha.eqs) {
        auto lhs_it = vals.find(e.lhs.name);
        if (lhs_it != vals.end()) {
          const RationalTree& lt = lhs_it->second;
          if (e.rhs_is_var()) {
            const std::string& rn = e.rhs_var().name;
            if (pending.count(rn)) {
              set_value(vals, rn, lt, pending);
              progress = true;
            }
          } else {
            const FlatApp& app = e.rhs_app();
            if (lt.nodes[lt.root].gen != app.gen) return false;
            for (size_t i = 0; i < app.args.size(); ++i) {
              const std::string& an = app.args[i].name;
              if (pending.count(an)) {
                set_value(vals, an, subtree(lt, i), pending);
                progress = true;
              }
            }
          }
          continue;
        }
        if (!pending.count(e.lhs.name)) continue;
        // Backward: a fully valued right-hand side forces the left.
        if (e.rhs_is_var()) {
          auto it = vals.find(e.rhs_var().name);
          if (it != vals.end()) {
            set_value(vals, e.lhs.name, it->second, pending);
            progress = true;
          }
        } else {
          const FlatApp& app = e.rhs_app();
          std::vector<RationalTree> args;
          bool all = true;
          for (const Var& a : app.args) {
            auto it = vals.find(a.name);
            if (it == vals.end()) {
              all = false;
              break;
            }
            args.push_back(it->second);
          }
          if (all) {
            set_value(vals, e.lhs.name, make_app(app.gen, args), pending);
            progress = true;
          }
        }
      }
    }
    if (!pending.empty())
      throw Error("bound variable '" + *pending.begin() +
                  "' is not determined by its equations");
    // Check every conjunct under the completed valuation.
    for (const Equation& e : nf.alpha.eqs) {
      const RationalTree& lt = vals.at(e.lhs.name);
      if (e.rhs_is_var()) {
        if (!rational_tree_equal(lt, vals.at(e.rhs_var().name))) return false;
      } else {
        const FlatApp& app = e.rhs_app();
        if (lt.nodes[lt.root].gen != app.gen) return false;
        for (size_t i = 0; i < app.args.size(); ++i)
          if (!rational_tree_equal(subtree(lt, i), vals.at(app.args[i].name)))
            return false;
      }
    }
    for (const Var& v : nf.alpha.fins)
      if (!is_finite_tree(vals.at(v.name))) return false;
    for (const NormalFormula& child : nf.children)
      if (exists_value(child, vals)) return false;
    return true;
  }
};

} // namespace

bool eval_closed_finite(const Formula& f, const Signature& sig,
                        const SortAnalysis& analysis,
                        const Valuation& valuation) {
  Evaluator ev{sig, analysis, {}};
  Valuation vals = valuation;
  return ev.eval(f, vals);
}

bool eval_solved(const Formula& f, const Signature& sig,
                 const SortAnalysis& analysis, const Valuation& valuation) {
  FreshSource fresh;
  NormalFormula nf = normalize(f, sig, fresh);
  ForcedEvaluator ev{sig, analysis};
  // nf denotes not(exists ...), and nf is equivalent to f.
  return !ev.exists_value(nf, valuation);
}

// ---------------------------------------------------------------------------
// Tree enumeration.

RationalTree default_tree(const Signature& sig, const SortAnalysis& analysis,
                          SortId sort) {
  std::vector<RationalTree> fins = finite_trees(sig, analysis, sort, 1);
  if (!fins.empty()) return fins.front();
  // No finite trees: loop every sort through its first generator.
  RationalTree out;
  for (uint32_t i = 0; i < sig.sort_count(); ++i) {
    GenId g = sig.generators_of(SortId{i}).front();
    RationalTree::Node n{g, {}};
    for (SortId a : sig.generator(g).arg_sorts) n.children.push_back(a.index);
    out.nodes.push_back(std::move(n));
  }
  out.root = sort.index;
  return out;
}

std::vector<RationalTree> finite_trees(const Signature& sig,
                                       const SortAnalysis& analysis,
                                       SortId sort, size_t limit) {
  std::vector<RationalTree> out;
  if (analysis.sff.contains(sort)) {
    for (const Term& t : analysis.fin_inhabitants[sort.index]) {
      if (out.size() >= limit) break;
      out.push_back(tree_from_term(t, sig));
    }
    return out;
  }
  // Infinitely many finite trees: enumerate by node count.
  size_t level_cap = std::max<size_t>(limit, 8);
  // by_size[s][k]: trees of sort s with exactly k+1 nodes.
  std::vector<std::vector<std::vector<RationalTree>>> by_size(
      sig.sort_count());
  for (size_t k = 1; out.size() < limit && k <= 16; ++k) {
    for (uint32_t s = 0; s < sig.sort_count(); ++s) {
      std::vector<RationalTree> level;
      for (GenId g : sig.generators_of(SortId{s})) {
        const Generator& gen = sig.generator(g);
        if (gen.arity() == 0) {
          if (k == 1) level.push_back(make_app(g, {}));
          continue;
        }
        // Distribute k-1 nodes over the arguments, each at least 1.
        std::vector<RationalTree> picked(gen.arity());
        std::function<void(size_t, size_t)> place = [&](size_t arg,
                                                        size_t left) {
          if (level.size() >= level_cap) return;
          if (arg == gen.arity()) {
            if (left == 0) level.push_back(make_app(g, picked));
            return;
          }
          size_t remaining_args = gen.arity() - arg - 1;
          for (size_t sz = 1; sz + remaining_args <= left; ++sz) {
            const auto& c = by_size[gen.arg_sorts[arg].index];
            if (sz - 1 >= c.size()) break;
            for (const RationalTree& t : c[sz - 1]) {
              picked[arg] = t;
              place(arg + 1, left - sz);
              if (level.size() >= level_cap) return;
            }
          }
        };
        place(0, k - 1);
      }
      if (level.size() > level_cap) level.resize(level_cap);
      by_size[s].push_back(std::move(level));
    }
    for (const RationalTree& t : by_size[sort.index][k - 1]) {
      if (out.size() >= limit) break;
      out.push_back(t);
    }
  }
  return out;
}

namespace {

void infinite_sample(const Signature& sig, const SortAnalysis& analysis,
                     SortId sort, size_t limit, int depth,
                     std::vector<RationalTree>& out);

void push_distinct(std::vector<RationalTree>& out, const RationalTree& t,
                   size_t limit) {
  if (out.size() >= limit) return;
  for (const RationalTree& s : out)
    if (rational_tree_equal(s, t)) return;
  out.push_back(t);
}

/// Trees whose root lies on a generator cycle back to `sort`.
void root_cycles(const Signature& sig, const SortAnalysis& analysis,
                 SortId sort, size_t limit, std::vector<RationalTree>& out) {
  struct Step {
    GenId gen;
    size_t arg;
  };
  std::vector<Step> path;
  std::function<void(SortId)> explore = [&](SortId cur) {
    if (out.size() >= limit) return;
    for (GenId g : sig.generators_of(cur)) {
      const Generator& gen = sig.generator(g);
      for (size_t i = 0; i < gen.arity(); ++i) {
        if (out.size() >= limit) return;
        path.push_back({g, i});
        if (gen.arg_sorts[i] == sort) {
          // Close the cycle: one node per step, other arguments default.
          RationalTree t;
          for (size_t k = 0; k < path.size(); ++k)
            t.nodes.push_back({path[k].gen, {}});
          for (size_t k = 0; k < path.size(); ++k) {
            const Generator& pg = sig.generator(path[k].gen);
            for (size_t a = 0; a < pg.arity(); ++a) {
              if (a == path[k].arg) {
                t.nodes[k].children.push_back(
                    static_cast<uint32_t>((k + 1) % path.size()));
              } else {
                RationalTree d = default_tree(sig, analysis, pg.arg_sorts[a]);
                uint32_t r = import_tree(t, d);  // may reallocate t.nodes
                t.nodes[k].children.push_back(r);
              }
            }
          }
          t.root = 0;
          push_distinct(out, t, limit);
        } else if (path.size() < 3) {
          explore(gen.arg_sorts[i]);
        }
        path.pop_back();
      }
    }
  };
  explore(sort);
}

void infinite_sample(const Signature& sig, const SortAnalysis& analysis,
                     SortId sort, size_t limit, int depth,
                     std::vector<RationalTree>& out) {
  if (analysis.s0i.contains(sort)) return;
  if (analysis.sfi.contains(sort)) {
    for (const Term& t : analysis.infin_inhabitants[sort.index])
      push_distinct(out, tree_from_term(t, sig, analysis), limit);
    return;
  }
  root_cycles(sig, analysis, sort, limit, out);
  if (depth == 0) return;
  // Wrap an infinite subtree under each generator, varying one finite
  // argument for extra variety.
  for (GenId g : sig.generators_of(sort)) {
    const Generator& gen = sig.generator(g);
    for (size_t i = 0; i < gen.arity() && out.size() < limit; ++i) {
      if (analysis.s0i.contains(gen.arg_sorts[i])) continue;
      std::vector<RationalTree> inner;
      infinite_sample(sig, analysis, gen.arg_sorts[i], 3, depth - 1, inner);
      for (const RationalTree& sub : inner) {
        std::vector<RationalTree> args;
        for (size_t a = 0; a < gen.arity(); ++a)
          args.push_back(a == i ? sub
                                : default_tree(sig, analysis,
                                               gen.arg_sorts[a]));
        push_distinct(out, make_app(g, args), limit);
        // Vary the first other argument over its small finite trees.
        for (size_t a = 0; a < gen.arity() && out.size() < limit; ++a) {
          if (a == i) continue;
          for (const RationalTree& alt :
               finite_trees(sig, analysis, gen.arg_sorts[a], 3)) {
            std::vector<RationalTree> varied = args;
            varied[a] = alt;
            push_distinct(out, make_app(g, varied), limit);
          }
          break;
        }
      }
    }
  }
}

} // namespace

std::vector<RationalTree> infinite_trees(const Signature& sig,
                                         const SortAnalysis& analysis,
                                         SortId sort, size_t limit) {
  std::vector<RationalTree> out;
  infinite_sample(sig, analysis, sort, limit, 2, out);
  return out;
}

// ---------------------------------------------------------------------------
// Model extraction.

namespace {

/// Extends vals with a tree for every equation-defined variable of alpha by
/// reading the equations as one rational-tree node table (their unique
/// solution). Every non-defined variable mentioned by the equations must
/// already be valued.
void solve_equations(const BasicFormula& alpha, Valuation& vals) {
  RationalTree graph;
  std::map<std::string, uint32_t> app_node;
  std::map<std::string, uint32_t> value_node;
  for (const Equation& e : alpha.eqs) {
    if (e.rhs_is_var() || app_node.count(e.lhs.name)) continue;
    app_node[e.lhs.name] = static_cast<uint32_t>(graph.nodes.size());
    graph.nodes.push_back({e.rhs_app().gen, {}});
  }
  std::function<uint32_t(const Var&)> resolve = [&](const Var& v) -> uint32_t {
    auto an = app_node.find(v.name);
    if (an != app_node.end()) return an->second;
    auto vn = value_node.find(v.name);
    if (vn != value_node.end()) return vn->second;
    auto val = vals.find(v.name);
    if (val != vals.end()) {
      uint32_t id = import_tree(graph, val->second);
      value_node[v.name] = id;
      return id;
    }
    if (const Equation* e = alpha.find_lhs(v)) {
      if (e->rhs_is_var()) return resolve(e->rhs_var());
    }
    throw Error("variable '" + v.name + "' has no value and no equation");
  };
  for (const Equation& e : alpha.eqs) {
    if (e.rhs_is_var()) continue;
    uint32_t id = app_node.at(e.lhs.name);
    for (const Var& a : e.rhs_app().args) {
      uint32_t child = resolve(a);
      graph.nodes[id].children.push_back(child);
    }
  }
  for (const Equation& e : alpha.eqs) {
    if (vals.count(e.lhs.name)) continue;
    RationalTree t = graph;
    t.root = e.rhs_is_var() ? resolve(e.rhs_var()) : app_node.at(e.lhs.name);
    vals[e.lhs.name] = std::move(t);
  }
}

struct BlockModel {
  const Signature& sig;
  const SortAnalysis& analysis;

  std::optional<Valuation> run(const Formula& block) {
    FreshSource fresh;
    NormalFormula nf = normalize(Formula::negation(block), sig, fresh);
    std::vector<BasicFormula> stars;
    stars.reserve(nf.children.size());
    for (const NormalFormula& child : nf.children)
      stars.push_back(strip_conjuncts(child.alpha, nf.alpha));

    std::vector<Var> free = free_variables(block);
    std::set<std::string> lhs_names;
    for (const Equation& e : nf.alpha.eqs) lhs_names.insert(e.lhs.name);

    std::vector<Var> choosable;
    for (const Var& v : free)
      if (!lhs_names.count(v.name)) choosable.push_back(v);
    for (const Var& v : nf.bound)
      if (!lhs_names.count(v.name)) choosable.push_back(v);

    // Variables linked by a variable equation in some negated block should
    // receive distinct values.
    std::map<std::string, std::set<std::string>> adjacent;
    for (const BasicFormula& b : stars)
      for (const Equation& e : b.eqs)
        if (e.rhs_is_var()) {
          adjacent[e.lhs.name].insert(e.rhs_var().name);
          adjacent[e.rhs_var().name].insert(e.lhs.name);
        }

    // Candidate pools. fin in alpha forces finite; fin in a negated block
    // is best violated by an infinite value, so those come first.
    std::map<std::string, std::vector<RationalTree>> pools;
    for (const Var& v : choosable) {
      bool must_finite = nf.alpha.has_fin(v);
      bool prefer_infinite = false;
      for (const BasicFormula& b : stars)
        if (b.has_fin(v)) prefer_infinite = true;
      std::vector<RationalTree> pool;
      const size_t kPool = 8;
      if (must_finite) {
        pool = finite_trees(sig, analysis, v.sort, kPool);
      } else if (prefer_infinite) {
        pool = infinite_trees(sig, analysis, v.sort, kPool);
        for (const RationalTree& t :
             finite_trees(sig, analysis, v.sort, kPool))
          push_distinct(pool, t, 2 * kPool);
      } else {
        pool = finite_trees(sig, analysis, v.sort, kPool);
        for (const RationalTree& t :
             infinite_trees(sig, analysis, v.sort, kPool))
          push_distinct(pool, t, 2 * kPool);
      }
      if (pool.empty()) return std::nullopt;
      pools[v.name] = std::move(pool);
    }

    std::map<std::string, std::vector<RationalTree>> avoid;
    for (int round = 0; round < 5; ++round) {
      Valuation vals;
      for (const Var& v : choosable) {
        std::vector<RationalTree> taboo = avoid[v.name];
        for (const std::string& w : adjacent[v.name]) {
          auto it = vals.find(w);
          if (it != vals.end()) taboo.push_back(it->second);
        }
        const std::vector<RationalTree>& pool = pools[v.name];
        const RationalTree* chosen = &pool.front();
        for (const RationalTree& cand : pool) {
          if (!tree_in(cand, taboo)) {
            chosen = &cand;
            break;
          }
        }
        vals[v.name] = *chosen;
      }
      solve_equations(nf.alpha, vals);
      Valuation result;
      for (const Var& v : free) result[v.name] = vals.at(v.name);
      if (eval_solved(block, sig, analysis, result)) return result;
      // Learn from the failure: separate adjacent pairs that collided.
      for (const auto& [name, others] : adjacent) {
        auto it = vals.find(name);
        if (it == vals.end()) continue;
        for (const std::string& w : others) {
          auto jt = vals.find(w);
          if (jt != vals.end() &&
              rational_tree_equal(it->second, jt->second))
            avoid[name].push_back(jt->second);
        }
      }
    }

    // Bounded exhaustive fallback over the candidate pools.
    std::vector<std::string> names;
    std::vector<size_t> sizes;
    size_t combos = 1;
    for (const Var& v : choosable) {
      names.push_back(v.name);
      size_t n = std::min<size_t>(pools[v.name].size(), 4);
      sizes.push_back(n);
      combos *= n;
      if (combos > 4096) return std::nullopt;
    }
    for (size_t idx = 0; idx < combos; ++idx) {
      Valuation vals;
      size_t rest = idx;
      for (size_t i = 0; i < names.size(); ++i) {
        vals[names[i]] = pools[names[i]][rest % sizes[i]];
        rest /= sizes[i];
      }
      solve_equations(nf.alpha, vals);
      Valuation result;
      for (const Var& v : free) result[v.name] = vals.at(v.name);
      if (eval_solved(block, sig, analysis, result)) return result;
    }
    return std::nullopt;
  }
};

} // namespace

std::optional<Valuation> extract_model(const Formula& f, const Signature& sig,
                                       const SortAnalysis& analysis) {
  if (f == Formula::falsity()) return std::nullopt;
  std::vector<Formula> blocks =
      f.kind() == FormulaKind::Or ? f.sub() : std::vector<Formula>{f};
  for (const Formula& block : blocks) {
    SimplifiedCheck check = check_fully_simplified(block, sig, analysis);
    if (!check.ok && check.violated != 4)
      throw NotSimplifiedError(check.detail);
  }
  std::vector<Var> free = free_variables(f);
  if (free.empty()) return Valuation{};

  BlockModel extractor{sig, analysis};
  for (const Formula& block : blocks) {
    std::optional<Valuation> model = extractor.run(block);
    if (!model) continue;
    for (const Var& v : free)
      if (!model->count(v.name))
        (*model)[v.name] = default_tree(sig, analysis, v.sort);
    if (eval_solved(f, sig, analysis, *model)) return model;
  }
  throw Error("no model found for a fully simplified formula");
}

// ---------------------------------------------------------------------------
// Random generation.

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed) {}
  size_t pick(size_t n) { return n == 0 ? 0 : gen() % n; }
  bool chance(unsigned percent) { return gen() % 100 < percent; }
};

struct FormulaGen {
  const Signature& sig;
  const SortAnalysis& analysis;
  const FormulaProfile& profile;
  Rng rng;
  int atoms_left;
  int quants_left;
  int binder_counter = 0;
  std::vector<Var> scope;
  std::vector<SortId> qsorts;
  // Smallest closed term per sort, where one exists.
  std::vector<std::optional<Term>> ground;

  FormulaGen(const Signature& s, const SortAnalysis& a,
             const FormulaProfile& p, uint64_t seed)
      : sig(s), analysis(a), profile(p), rng(seed),
        atoms_left(p.max_atoms), quants_left(p.max_quantifiers),
        scope(p.free_vars) {
    if (p.quantifier_sorts.empty()) {
      for (uint32_t i = 0; i < sig.sort_count(); ++i)
        qsorts.push_back(SortId{i});
    } else {
      qsorts = p.quantifier_sorts;
    }
    ground.resize(sig.sort_count());
    for (uint32_t i = 0; i < sig.sort_count(); ++i)
      ground[i] = smallest_ground(SortId{i});
  }

  std::optional<Term> smallest_ground(SortId s) {
    if (analysis.s0f.contains(s)) return std::nullopt;
    // Iterative deepening over generator choices.
    std::function<std::optional<Term>(SortId, int)> build =
        [&](SortId cur, int depth) -> std::optional<Term> {
      if (depth < 0) return std::nullopt;
      std::optional<Term> best;
      for (GenId g : sig.generators_of(cur)) {
        const Generator& gen = sig.generator(g);
        std::vector<Term> args;
        bool ok = true;
        for (SortId a : gen.arg_sorts) {
          std::optional<Term> t = build(a, depth - 1);
          if (!t) {
            ok = false;
            break;
          }
          args.push_back(*t);
        }
        if (ok) {
          Term t = Term::app(g, std::move(args));
          if (!best) best = t;
        }
      }
      return best;
    };
    for (int d = 0; d <= 8; ++d)
      if (auto t = build(s, d)) return t;
    return std::nullopt;
  }

  bool sort_usable(SortId s) {
    if (ground[s.index]) return true;
    for (const Var& v : scope)
      if (v.sort == s) return true;
    return false;
  }

  std::vector<Var> scope_of(SortId s) {
    std::vector<Var> out;
    for (const Var& v : scope)
      if (v.sort == s) out.push_back(v);
    return out;
  }

  Term term(SortId s, int depth) {
    std::vector<Var> vars = scope_of(s);
    if (!vars.empty() && (depth <= 0 || rng.chance(55)))
      return Term::variable(vars[rng.pick(vars.size())]);
    if (depth <= 0) {
      if (ground[s.index]) return *ground[s.index];
      return Term::variable(vars[rng.pick(vars.size())]);
    }
    // Pick a generator whose argument sorts are all realizable.
    std::vector<GenId> usable;
    for (GenId g : sig.generators_of(s)) {
      bool ok = true;
      for (SortId a : sig.generator(g).arg_sorts)
        if (!sort_usable(a)) ok = false;
      if (ok) usable.push_back(g);
    }
    if (usable.empty()) {
      if (!vars.empty()) return Term::variable(vars[rng.pick(vars.size())]);
      return *ground[s.index];
    }
    GenId g = usable[rng.pick(usable.size())];
    std::vector<Term> args;
    for (SortId a : sig.generator(g).arg_sorts) args.push_back(term(a, depth - 1));
    return Term::app(g, std::move(args));
  }

  SortId atom_sort() {
    // Prefer the sort of an in-scope variable.
    if (!scope.empty() && rng.chance(70))
      return scope[rng.pick(scope.size())].sort;
    std::vector<SortId> usable;
    for (uint32_t i = 0; i < sig.sort_count(); ++i)
      if (sort_usable(SortId{i})) usable.push_back(SortId{i});
    if (usable.empty() && !scope.empty())
      return scope[rng.pick(scope.size())].sort;
    return usable[rng.pick(usable.size())];
  }

  Formula atom() {
    if (atoms_left <= 0) return rng.chance(50) ? Formula::truth()
                                               : Formula::falsity();
    --atoms_left;
    SortId s = atom_sort();
    int d = profile.max_term_depth;
    if (profile.allow_fin && rng.chance(25)) return Formula::fin(term(s, d));
    return Formula::eq(term(s, d), term(s, d));
  }

  Formula gen(int depth) {
    if (depth <= 0 || atoms_left <= 0) return atom();
    switch (rng.pick(8)) {
      case 0:
      case 1:
        return atom();
      case 2:
        return Formula::negation(gen(depth - 1));
      case 3:
        return Formula::conjunction({gen(depth - 1), gen(depth - 1)});
      case 4:
        return Formula::disjunction({gen(depth - 1), gen(depth - 1)});
      case 5:
        return Formula::implies(gen(depth - 1), gen(depth - 1));
      case 6:
        return Formula::iff(gen(depth - 1), gen(depth - 1));
      default: {
        if (quants_left <= 0) return atom();
        --quants_left;
        SortId s = qsorts[rng.pick(qsorts.size())];
        Var v{"qv" + std::to_string(binder_counter++), s};
        scope.push_back(v);
        Formula body = gen(depth - 1);
        scope.pop_back();
        if (rng.chance(50)) return Formula::exists({v}, std::move(body));
        return Formula::forall({v}, std::move(body));
      }
    }
  }
};

} // namespace

Formula random_formula(uint64_t seed, const Signature& sig,
                       const SortAnalysis& analysis,
                       const FormulaProfile& profile) {
  FormulaGen g(sig, analysis, profile, seed);
  return g.gen(profile.max_connective_depth);
}

BasicFormula random_basic(uint64_t seed, const Signature& sig,
                          const std::vector<Var>& vars, int max_conjuncts) {
  BasicFormula out;
  if (vars.empty() || max_conjuncts <= 0) return out;
  Rng rng(seed);
  std::map<uint32_t, std::vector<Var>> by_sort;
  for (const Var& v : vars) by_sort[v.sort.index].push_back(v);
  size_t n = 1 + rng.pick(static_cast<size_t>(max_conjuncts));
  for (size_t i = 0; i < n; ++i) {
    const Var& lhs = vars[rng.pick(vars.size())];
    if (rng.chance(20)) {
      out.fins.push_back(lhs);
      continue;
    }
    const std::vector<Var>& same = by_sort[lhs.sort.index];
    if (rng.chance(40) && same.size() > 1) {
      Var rhs = same[rng.pick(same.size())];
      out.eqs.push_back({lhs, rhs});
      continue;
    }
    // Flat application whose argument sorts are all covered by vars.
    std::vector<GenId> usable;
    for (GenId g : sig.generators_of(lhs.sort)) {
      bool ok = true;
      for (SortId a : sig.generator(g).arg_sorts)
        if (by_sort[a.index].empty()) ok = false;
      if (ok) usable.push_back(g);
    }
    if (usable.empty()) {
      out.eqs.push_back({lhs, lhs});
      continue;
    }
    GenId g = usable[rng.pick(usable.size())];
    FlatApp app{g, {}};
    for (SortId a : sig.generator(g).arg_sorts) {
      const std::vector<Var>& pool = by_sort[a.index];
      app.args.push_back(pool[rng.pick(pool.size())]);
    }
    out.eqs.push_back({lhs, std::move(app)});
  }
  return out;
}

} // namespace treesolve
