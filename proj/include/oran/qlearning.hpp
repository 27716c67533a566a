#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include "oran/domain.hpp"
#include "oran/slicing.hpp"

namespace oran {

class Rng;

/// Number of user-count bins; bin upper edges are inclusive.
inline constexpr int kCountBins = 6;
inline constexpr std::array<int, kCountBins - 1> kCountBinUpperEdges{0, 10, 50, 100, 200};

int count_bin(int users);

struct DiscretizedState {
  PerSlice<int> bw_bins{};     // lattice percentages, sum 100
  PerSlice<int> count_bins{};  // each in [0, kCountBins)

  /// Dense key: (eMBB pct, URLLC pct, three count bins). Voice pct is implied.
  std::uint32_t key() const;
  static DiscretizedState from_key(std::uint32_t key);

  friend bool operator==(const DiscretizedState&, const DiscretizedState&) = default;
};

/// Reads the split in force before this second's action and the current
/// per-slice attachment counts.
DiscretizedState encode_state(const CellState& cell);

class QTableFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Action values keyed by (state, action index). Absent entries read as 0.
/// One instance is shared by every cell.
class QTable {
 public:
  double get(const DiscretizedState& s, std::size_t action) const;
  void set(const DiscretizedState& s, std::size_t action, double value);

  /// Max over the feasible actions' values; 0 when none were ever written.
  double max_value(const DiscretizedState& s, std::span<const ActionVector> feasible) const;

  std::size_t state_count() const { return rows_.size(); }
  std::size_t entry_count() const;
  bool empty() const { return rows_.empty(); }

  /// Text snapshot; rows sorted by state key then action. See the header the
  /// writer emits for the column order.
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

  friend bool operator==(const QTable&, const QTable&);

 private:
  struct Row {
    std::array<double, kActionIndexCount> values{};
    std::uint32_t written = 0;  // bit per action index
  };
  std::unordered_map<std::uint32_t, Row> rows_;
};

struct LearningParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 1.0;
  double epsilon_min = 0.05;
  double epsilon_decay = 0.99;

  /// Exploration rate after `episodes` completed episodes.
  double epsilon_after(std::size_t episodes) const;
};

struct RewardWeights {
  PerSlice<double> s1{};  // free-bandwidth change
  PerSlice<double> s2{};  // slice throughput
  PerSlice<double> s3{};  // mean UE rate
  double w_p = 1.0;
  double w_n = 10.0;
};

RewardWeights default_reward_weights();

/// Number of slices strictly below their floor.
int compute_penalty(const PerSlice<int>& split, const PerSlice<int>& floors);
int compute_penalty(const CellState& cell, int floor_pct);

/// w_p * Σ_k (s1·ΔF + s2·B + s3·D) / capacity  −  w_n * penalty.
double compute_reward(const CellState& cell, const RewardWeights& weights,
                      const PerSlice<int>& floors);
double compute_reward(const CellState& cell, const RewardWeights& weights, int floor_pct);

/// Epsilon-greedy over `feasible` (non-empty, sorted). Greedy ties resolve
/// to the earliest feasible action. No draw is consumed when epsilon <= 0.
ActionVector select_action(const DiscretizedState& state, std::span<const ActionVector> feasible,
                           const QTable& q, double epsilon, Rng& rng);

/// Q(s,a) ← (1−α)Q(s,a) + α[r + γ·max_a' Q(s',a')].
void update(QTable& q, const DiscretizedState& s, std::size_t action, double reward,
            const DiscretizedState& s_next, std::span<const ActionVector> feasible_next,
            const LearningParams& params);

}  // namespace oran
