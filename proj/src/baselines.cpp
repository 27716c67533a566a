#include "oran/baselines.hpp"

#include <limits>

#include "oran/slicing.hpp"

namespace oran {

ActionVector step_toward(const PerSlice<int>& split, const PerSlice<int>& target) {
  if (split == target) return ActionVector{};
  ActionVector best{};
  long best_d2 = std::numeric_limits<long>::max();
  for (const ActionVector& a : enumerate_feasible_actions(split)) {
    long d2 = 0;
    for (std::size_t k = 0; k < kSliceCount; ++k) {
      const long diff = split[k] + a.deltas[k] - target[k];
      d2 += diff * diff;
    }
    if (d2 < best_d2) {
      best_d2 = d2;
      best = a;
    }
  }
  return best;
}

ActionVector balanced_policy(const CellState& cell) {
  return step_toward(cell.bandwidth_pct, kBalancedSplit);
}

ActionVector embb_focus_policy(const CellState& cell) {
  return step_toward(cell.bandwidth_pct, kEmbbFocusSplit);
}

ActionVector FixedSplitPolicy::select(const CellState& cell, const DiscretizedState&,
                                      std::span<const ActionVector>, Rng&) {
  return step_toward(cell.bandwidth_pct, target_);
}

}  // namespace oran
