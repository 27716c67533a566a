#pragma once

#include "oran/domain.hpp"
#include "oran/policy.hpp"

namespace oran {

inline constexpr PerSlice<int> kBalancedSplit{40, 30, 30};
inline constexpr PerSlice<int> kEmbbFocusSplit{90, 5, 5};

/// Feasible action bringing `split` closest (squared distance) to `target`;
/// earliest in (a_eMBB, a_URLLC) order on ties. All-zero once at target.
ActionVector step_toward(const PerSlice<int>& split, const PerSlice<int>& target);

ActionVector balanced_policy(const CellState& cell);
ActionVector embb_focus_policy(const CellState& cell);

/// Fixed-allocation baseline: walks to its target split, then holds it.
class FixedSplitPolicy final : public Policy {
 public:
  FixedSplitPolicy(std::string_view name, PerSlice<int> target) : name_(name), target_(target) {}

  std::string_view name() const override { return name_; }
  ActionVector select(const CellState& cell, const DiscretizedState& state,
                      std::span<const ActionVector> feasible, Rng& rng) override;

  const PerSlice<int>& target() const { return target_; }

 private:
  std::string_view name_;
  PerSlice<int> target_;
};

}  // namespace oran
