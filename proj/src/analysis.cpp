#include "treesolve/analysis.hpp"

#include <algorithm>
#include <cassert>

namespace treesolve {

Var u_var(const Signature& sig, SortId s) {
  return Var{"$u_" + sig.sort_name(s), s};
}

void compute_zero_sets(const Signature& sig, SortSet& s0f, SortSet& s0i) {
  const size_t n = sig.sort_count();
  s0i = SortSet(n);
  s0f = SortSet(n);
  for (uint32_t i = 0; i < n; ++i) s0f.insert(SortId{i});

  bool changed = true;
  while (changed) {
    changed = false;
    for (uint32_t i = 0; i < n; ++i) {
      SortId s{i};
      if (!s0i.contains(s)) {
        bool all_gens = true;
        for (GenId g : sig.generators_of(s)) {
          for (SortId a : sig.generator(g).arg_sorts)
            if (!s0i.contains(a)) { all_gens = false; break; }
          if (!all_gens) break;
        }
        if (all_gens) { s0i.insert(s), changed = true; }
      }
      if (s0f.contains(s)) {
        for (GenId g : sig.generators_of(s)) {
          bool no_s0f_arg = true;
          for (SortId a : sig.generator(g).arg_sorts)
            if (s0f.contains(a)) { no_s0f_arg = false; break; }
          if (no_s0f_arg) { s0f.erase(s), changed = true; break; }
        }
      }
    }
  }
}

namespace {

/// Cartesian product of argument inhabitant lists, leftmost slowest.
/// keep(tuple) filters; build(tuple) constructs the result term.
void product_terms(const Generator& gen,
                   const std::vector<std::vector<Term>>& choices, GenId g,
                   const std::function<bool(const std::vector<size_t>&)>& keep,
                   std::vector<Term>& out) {
  const size_t n = choices.size();
  for (size_t i = 0; i < n; ++i)
    if (choices[i].empty()) return;
  std::vector<size_t> idx(n, 0);
  while (true) {
    if (keep(idx)) {
      std::vector<Term> args;
      args.reserve(n);
      for (size_t i = 0; i < n; ++i) args.push_back(choices[i][idx[i]]);
      out.push_back(Term::app(g, std::move(args)));
    }
    size_t k = n;
    while (k > 0) {
      if (++idx[k - 1] < choices[k - 1].size()) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  (void)gen;
}

} // namespace

SortAnalysis analyze_sorts(const Signature& sig) {
  const size_t n = sig.sort_count();
  SortAnalysis out;
  compute_zero_sets(sig, out.s0f, out.s0i);
  out.sff = out.s0f;
  out.s1i = SortSet(n);
  for (uint32_t i = 0; i < n; ++i)
    if (!out.s0i.contains(SortId{i})) out.s1i.insert(SortId{i});
  out.fin_inhabitants.assign(n, {});
  out.infin_inhabitants.assign(n, {});
  out.unique_tree_eqs.assign(n, {});

  // First fixed point: finitely many finite trees, and unique infinite trees.
  bool changed = true;
  while (changed) {
    changed = false;
    for (uint32_t i = 0; i < n; ++i) {
      SortId s{i};
      // Generators that can only build infinite trees (some argument sort
      // has no finite trees at all).
      auto only_infinite = [&](GenId g) {
        for (SortId a : sig.generator(g).arg_sorts)
          if (out.s0f.contains(a)) return true;
        return false;
      };
      bool finite_args_ok = true;
      for (GenId g : sig.generators_of(s)) {
        if (only_infinite(g)) continue;
        for (SortId a : sig.generator(g).arg_sorts)
          if (!out.sff.contains(a)) { finite_args_ok = false; break; }
        if (!finite_args_ok) break;
      }
      if (finite_args_ok) {
        if (!out.sff.contains(s)) { out.sff.insert(s), changed = true; }
        std::vector<Term> fin;
        for (GenId g : sig.generators_of(s)) {
          if (only_infinite(g)) continue;
          const Generator& gen = sig.generator(g);
          std::vector<std::vector<Term>> choices;
          for (SortId a : gen.arg_sorts)
            choices.push_back(out.fin_inhabitants[a.index]);
          product_terms(gen, choices, g,
                        [](const std::vector<size_t>&) { return true; }, fin);
        }
        if (fin.size() != out.fin_inhabitants[i].size()) changed = true;
        out.fin_inhabitants[i] = std::move(fin);
      }

      if (out.s1i.contains(s)) {
        GenId unique_gen{};
        for (GenId g : sig.generators_of(s)) {
          const Generator& gen = sig.generator(g);
          if (gen.arity() != 1 || !out.s1i.contains(gen.arg_sorts[0])) continue;
          bool others_finite = true;
          for (GenId g2 : sig.generators_of(s)) {
            if (g2 == g) continue;
            for (SortId a : sig.generator(g2).arg_sorts)
              if (!out.s0i.contains(a)) { others_finite = false; break; }
            if (!others_finite) break;
          }
          if (others_finite) { unique_gen = g; break; }
        }
        if (unique_gen.valid()) {
          SortId s1 = sig.generator(unique_gen).arg_sorts[0];
          std::vector<UniqueTreeEquation> eqs;
          eqs.push_back(
              UniqueTreeEquation{u_var(sig, s), unique_gen, u_var(sig, s1)});
          if (s1 != s)
            for (const auto& e : out.unique_tree_eqs[s1.index]) eqs.push_back(e);
          auto same = [](const std::vector<UniqueTreeEquation>& a,
                         const std::vector<UniqueTreeEquation>& b) {
            if (a.size() != b.size()) return false;
            for (size_t k = 0; k < a.size(); ++k)
              if (!(a[k].lhs == b[k].lhs && a[k].gen == b[k].gen &&
                    a[k].arg == b[k].arg))
                return false;
            return true;
          };
          if (!same(eqs, out.unique_tree_eqs[i])) {
            out.unique_tree_eqs[i] = std::move(eqs);
            changed = true;
          }
        } else {
          out.s1i.erase(s);
          out.unique_tree_eqs[i].clear();
          changed = true;
        }
      }
    }
  }

  // Sorts that fell out of s1i keep no equations.
  for (uint32_t i = 0; i < n; ++i)
    if (!out.s1i.contains(SortId{i})) out.unique_tree_eqs[i].clear();

  // Second fixed point: finitely many infinite trees.
  out.sfi = out.s0i;
  for (SortId s : out.s1i.members()) {
    out.sfi.insert(s);
    out.infin_inhabitants[s.index] = {Term::variable(u_var(sig, s))};
  }
  changed = true;
  while (changed) {
    changed = false;
    for (uint32_t i = 0; i < n; ++i) {
      SortId s{i};
      // The initialization is already exact for these; recomputing would
      // only re-express u_s as g(u_s').
      if (out.s0i.contains(s) || out.s1i.contains(s)) continue;
      bool cond = true;
      for (GenId g : sig.generators_of(s)) {
        const Generator& gen = sig.generator(g);
        bool can_be_infinite = false;
        for (SortId a : gen.arg_sorts)
          if (!out.s0i.contains(a)) { can_be_infinite = true; break; }
        if (!can_be_infinite) continue;
        for (size_t ai = 0; ai < gen.arg_sorts.size(); ++ai) {
          SortId a = gen.arg_sorts[ai];
          if (out.s0i.contains(a)) continue;
          bool ok = out.sfi.contains(a);
          if (ok)
            for (size_t aj = 0; aj < gen.arg_sorts.size(); ++aj) {
              if (aj == ai) continue;
              SortId b = gen.arg_sorts[aj];
              if (!(out.sff.contains(b) && out.sfi.contains(b))) {
                ok = false;
                break;
              }
            }
          if (!ok) { cond = false; break; }
        }
        if (!cond) break;
      }
      if (!cond) continue;
      if (!out.sfi.contains(s)) { out.sfi.insert(s), changed = true; }
      std::vector<Term> infin;
      for (GenId g : sig.generators_of(s)) {
        const Generator& gen = sig.generator(g);
        bool can_be_infinite = false;
        for (SortId a : gen.arg_sorts)
          if (!out.s0i.contains(a)) { can_be_infinite = true; break; }
        if (!can_be_infinite) continue;
        std::vector<std::vector<Term>> choices;
        std::vector<size_t> fin_counts;
        for (SortId a : gen.arg_sorts) {
          std::vector<Term> c = out.fin_inhabitants[a.index];
          fin_counts.push_back(c.size());
          for (const Term& t : out.infin_inhabitants[a.index]) c.push_back(t);
          choices.push_back(std::move(c));
        }
        product_terms(gen, choices, g,
                      [&](const std::vector<size_t>& idx) {
                        for (size_t k = 0; k < idx.size(); ++k)
                          if (idx[k] >= fin_counts[k]) return true;
                        return false;
                      },
                      infin);
      }
      if (infin.size() != out.infin_inhabitants[i].size()) changed = true;
      out.infin_inhabitants[i] = std::move(infin);
    }
  }

  return out;
}

} // namespace treesolve
