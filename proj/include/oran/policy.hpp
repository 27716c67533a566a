#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "oran/domain.hpp"
#include "oran/qlearning.hpp"

namespace oran {

class Rng;

enum class PolicyKind : std::uint8_t { QLEARNING = 0, BALANCED = 1, EMBB_FOCUS = 2 };

inline constexpr std::array<PolicyKind, 3> kAllPolicies{PolicyKind::BALANCED, PolicyKind::EMBB_FOCUS,
                                                        PolicyKind::QLEARNING};

std::string_view to_string(PolicyKind p);
std::optional<PolicyKind> policy_from_string(std::string_view name);

struct Transition {
  CellId cell = 0;
  DiscretizedState state;
  std::size_t action = 0;
  double reward = 0.0;
  DiscretizedState next_state;
  std::vector<ActionVector> feasible_next;
};

/// Per-cell bandwidth controller driven once per second by the engine.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;

  /// Must return a member of `feasible`.
  virtual ActionVector select(const CellState& cell, const DiscretizedState& state,
                              std::span<const ActionVector> feasible, Rng& rng) = 0;

  virtual bool learns() const { return false; }
  virtual void learn(const Transition&) {}
};

/// Epsilon-greedy controller over a Q table it does not own, so the table
/// can outlive individual episodes.
class QLearningPolicy final : public Policy {
 public:
  QLearningPolicy(QTable& table, LearningParams params, double epsilon, bool learning)
      : table_(table), params_(params), epsilon_(epsilon), learning_(learning) {}

  std::string_view name() const override { return "qlearning"; }
  ActionVector select(const CellState& cell, const DiscretizedState& state,
                      std::span<const ActionVector> feasible, Rng& rng) override;
  bool learns() const override { return learning_; }
  void learn(const Transition& t) override;

  double epsilon() const { return epsilon_; }

 private:
  QTable& table_;
  LearningParams params_;
  double epsilon_;
  bool learning_;
};

}  // namespace oran
