#include "oran/policy.hpp"

namespace oran {

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::QLEARNING:
      return "qlearning";
    case PolicyKind::BALANCED:
      return "balanced";
    case PolicyKind::EMBB_FOCUS:
      return "embb_focus";
  }
  return "?";
}

std::optional<PolicyKind> policy_from_string(std::string_view name) {
  if (name == "qlearning" || name == "q-learning" || name == "q") return PolicyKind::QLEARNING;
  if (name == "balanced") return PolicyKind::BALANCED;
  if (name == "embb_focus" || name == "embb-focus" || name == "embbfocus") return PolicyKind::EMBB_FOCUS;
  return std::nullopt;
}

ActionVector QLearningPolicy::select(const CellState&, const DiscretizedState& state,
                                     std::span<const ActionVector> feasible, Rng& rng) {
  return select_action(state, feasible, table_, epsilon_, rng);
}

void QLearningPolicy::learn(const Transition& t) {
  if (!learning_) return;
  update(table_, t.state, t.action, t.reward, t.next_state, t.feasible_next, params_);
}

}  // namespace oran
