#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "oran/domain.hpp"

namespace oran {

/// Per-slice deltas are multiples of kActionStepPct within ±kMaxActionPct.
inline constexpr int kDeltaLevels = 2 * kMaxActionPct / kActionStepPct + 1;  // 5
inline constexpr std::size_t kActionIndexCount = kDeltaLevels * kDeltaLevels;  // 25

/// Index of the (eMBB, URLLC) delta pair in [0, 25); ascending index order
/// equals ascending (a_eMBB, a_URLLC) order.
std::size_t action_index(const ActionVector& action);
ActionVector action_from_index(std::size_t index);

/// Every zero-sum action whose deltas stay within ±10 and whose result keeps
/// each slice inside [0, 100], sorted by (a_eMBB, a_URLLC). Never empty.
std::vector<ActionVector> enumerate_feasible_actions(const PerSlice<int>& split);
std::vector<ActionVector> enumerate_feasible_actions(const CellState& cell);

bool is_feasible(const PerSlice<int>& split, const ActionVector& action);

class InfeasibleActionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

PerSlice<int> apply_action(const PerSlice<int>& split, const ActionVector& action);

/// Throws InfeasibleActionError when the action is not in the feasible set.
void apply_action(CellState& cell, const ActionVector& action);

/// All splits on the 5-point lattice (231 of them).
std::vector<PerSlice<int>> split_lattice();

}  // namespace oran
