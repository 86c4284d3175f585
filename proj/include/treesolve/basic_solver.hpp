#pragma once

#include <optional>
#include <random>

#include "treesolve/analysis.hpp"
#include "treesolve/basic.hpp"
#include "treesolve/budget.hpp"

namespace treesolve {

/// Chooses which applicable rewrite fires next. Candidates are enumerated
/// in rule order, positions in list order; index 0 is the deterministic
/// default.
class RuleScheduler {
public:
  virtual ~RuleScheduler() = default;
  virtual size_t pick(size_t candidate_count) = 0;
};

/// Uniformly random schedule, for confluence testing.
class RandomScheduler : public RuleScheduler {
public:
  explicit RandomScheduler(uint64_t seed) : rng_(seed) {}
  size_t pick(size_t candidate_count) override {
    std::uniform_int_distribution<size_t> d(0, candidate_count - 1);
    return d(rng_);
  }

private:
  std::mt19937_64 rng_;
};

/// Rewrites a basic formula to solved form or detects inconsistency
/// (nullopt). Equation rules run to fixpoint first, then the finiteness
/// rules. Every variable of b must be in order. One budget unit is charged
/// per call plus one per applied rewrite.
std::optional<BasicFormula> solve_basic(const VarOrder& order, BasicFormula b,
                                        const SortAnalysis& analysis,
                                        Budget& budget,
                                        RuleScheduler* scheduler = nullptr);

} // namespace treesolve
