#include "oran/slicing.hpp"

#include <string>

namespace oran {

namespace {

int level_of(int delta) { return delta / kActionStepPct + kMaxActionPct / kActionStepPct; }
int delta_of(int level) { return (level - kMaxActionPct / kActionStepPct) * kActionStepPct; }

bool delta_in_range(int d) {
  return d >= -kMaxActionPct && d <= kMaxActionPct && d % kActionStepPct == 0;
}

std::string describe(const PerSlice<int>& split, const ActionVector& a) {
  auto join = [](const PerSlice<int>& v) {
    return std::to_string(v[0]) + "/" + std::to_string(v[1]) + "/" + std::to_string(v[2]);
  };
  return "action (" + join(a.deltas) + ") is infeasible at split " + join(split);
}

}  // namespace

std::size_t action_index(const ActionVector& action) {
  return static_cast<std::size_t>(level_of(action.deltas[0]) * kDeltaLevels +
                                  level_of(action.deltas[1]));
}

ActionVector action_from_index(std::size_t index) {
  const int i = static_cast<int>(index);
  return make_action(delta_of(i / kDeltaLevels), delta_of(i % kDeltaLevels));
}

bool is_feasible(const PerSlice<int>& split, const ActionVector& action) {
  if (action.sum() != 0) return false;
  for (std::size_t k = 0; k < kSliceCount; ++k) {
    if (!delta_in_range(action.deltas[k])) return false;
    const int next = split[k] + action.deltas[k];
    if (next < 0 || next > 100) return false;
  }
  return true;
}

std::vector<ActionVector> enumerate_feasible_actions(const PerSlice<int>& split) {
  std::vector<ActionVector> out;
  out.reserve(kActionIndexCount);
  for (int e = -kMaxActionPct; e <= kMaxActionPct; e += kActionStepPct) {
    for (int u = -kMaxActionPct; u <= kMaxActionPct; u += kActionStepPct) {
      const ActionVector a = make_action(e, u);
      if (is_feasible(split, a)) out.push_back(a);
    }
  }
  return out;
}

std::vector<ActionVector> enumerate_feasible_actions(const CellState& cell) {
  return enumerate_feasible_actions(cell.bandwidth_pct);
}

PerSlice<int> apply_action(const PerSlice<int>& split, const ActionVector& action) {
  if (!is_feasible(split, action)) throw InfeasibleActionError(describe(split, action));
  PerSlice<int> next = split;
  for (std::size_t k = 0; k < kSliceCount; ++k) next[k] += action.deltas[k];
  return next;
}

void apply_action(CellState& cell, const ActionVector& action) {
  cell.bandwidth_pct = apply_action(cell.bandwidth_pct, action);
}

std::vector<PerSlice<int>> split_lattice() {
  std::vector<PerSlice<int>> out;
  for (int e = 0; e <= 100; e += kActionStepPct) {
    for (int u = 0; e + u <= 100; u += kActionStepPct) out.push_back({e, u, 100 - e - u});
  }
  return out;
}

}  // namespace oran
