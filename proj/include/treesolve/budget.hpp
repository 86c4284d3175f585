#pragma once

#include <cstdint>

#include "treesolve/errors.hpp"

namespace treesolve {

/// Global work allowance: one unit per rewrite step or subroutine call.
/// Exhaustion aborts the solve with TimeoutError.
struct Budget {
  uint64_t remaining = 10'000'000;
  uint64_t used = 0;

  void tick(uint64_t n = 1) {
    used += n;
    if (n > remaining) throw TimeoutError(used);
    remaining -= n;
  }
};

} // namespace treesolve
