#include "oran/qlearning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "oran/format.hpp"
#include "oran/rng.hpp"

namespace oran {

namespace {

constexpr std::uint32_t kPctLevels = 100 / kActionStepPct + 1;  // 21

const char* const kSnapshotMagic = "# oran-slicing q-table v1";

}  // namespace

int count_bin(int users) {
  int bin = 0;
  for (int edge : kCountBinUpperEdges) {
    if (users <= edge) return bin;
    ++bin;
  }
  return bin;
}

std::uint32_t DiscretizedState::key() const {
  std::uint32_t k = static_cast<std::uint32_t>(bw_bins[0] / kActionStepPct) * kPctLevels +
                    static_cast<std::uint32_t>(bw_bins[1] / kActionStepPct);
  for (int b : count_bins) k = k * kCountBins + static_cast<std::uint32_t>(b);
  return k;
}

DiscretizedState DiscretizedState::from_key(std::uint32_t key) {
  DiscretizedState s;
  for (int i = static_cast<int>(kSliceCount) - 1; i >= 0; --i) {
    s.count_bins[static_cast<std::size_t>(i)] = static_cast<int>(key % kCountBins);
    key /= kCountBins;
  }
  s.bw_bins[1] = static_cast<int>(key % kPctLevels) * kActionStepPct;
  s.bw_bins[0] = static_cast<int>(key / kPctLevels) * kActionStepPct;
  s.bw_bins[2] = 100 - s.bw_bins[0] - s.bw_bins[1];
  return s;
}

DiscretizedState encode_state(const CellState& cell) {
  DiscretizedState s;
  s.bw_bins = cell.bandwidth_pct;
  for (std::size_t k = 0; k < kSliceCount; ++k) s.count_bins[k] = count_bin(cell.user_counts[k]);
  return s;
}

double QTable::get(const DiscretizedState& s, std::size_t action) const {
  auto it = rows_.find(s.key());
  return it == rows_.end() ? 0.0 : it->second.values[action];
}

void QTable::set(const DiscretizedState& s, std::size_t action, double value) {
  Row& row = rows_[s.key()];
  row.values[action] = value;
  row.written |= 1u << action;
}

double QTable::max_value(const DiscretizedState& s, std::span<const ActionVector> feasible) const {
  auto it = rows_.find(s.key());
  if (it == rows_.end() || feasible.empty()) return 0.0;
  double best = -INFINITY;
  for (const ActionVector& a : feasible) best = std::max(best, it->second.values[action_index(a)]);
  return best;
}

std::size_t QTable::entry_count() const {
  std::size_t n = 0;
  for (const auto& [key, row] : rows_) n += static_cast<std::size_t>(std::popcount(row.written));
  return n;
}

void QTable::save(std::ostream& out) const {
  std::vector<std::uint32_t> keys;
  keys.reserve(rows_.size());
  for (const auto& [key, row] : rows_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  out << kSnapshotMagic << '\n'
      << "# columns: embb_pct urllc_pct voice_pct embb_bin urllc_bin voice_bin "
         "embb_delta urllc_delta voice_delta value\n";
  for (std::uint32_t key : keys) {
    const Row& row = rows_.at(key);
    const DiscretizedState s = DiscretizedState::from_key(key);
    for (std::size_t a = 0; a < kActionIndexCount; ++a) {
      if (!(row.written & (1u << a))) continue;
      const ActionVector act = action_from_index(a);
      out << s.bw_bins[0] << ' ' << s.bw_bins[1] << ' ' << s.bw_bins[2] << ' '
          << s.count_bins[0] << ' ' << s.count_bins[1] << ' ' << s.count_bins[2] << ' '
          << act.deltas[0] << ' ' << act.deltas[1] << ' ' << act.deltas[2] << ' '
          << format_double(row.values[a]) << '\n';
    }
  }
}

QTable QTable::load(std::istream& in) {
  QTable q;
  std::string line;
  std::size_t line_no = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == kSnapshotMagic) saw_magic = true;
      continue;
    }
    std::istringstream fields(line);
    std::array<std::string, 10> tok;
    for (auto& t : tok) fields >> t;
    std::string extra;
    if (tok.back().empty() || (fields >> extra)) {
      throw QTableFormatError("q-table line " + std::to_string(line_no) + ": expected 10 fields");
    }
    std::array<int, 9> ints{};
    for (std::size_t i = 0; i < ints.size(); ++i) {
      auto v = parse_number<int>(tok[i]);
      if (!v) throw QTableFormatError("q-table line " + std::to_string(line_no) + ": bad integer '" + tok[i] + "'");
      ints[i] = *v;
    }
    auto value = parse_number<double>(tok[9]);
    if (!value) throw QTableFormatError("q-table line " + std::to_string(line_no) + ": bad value");

    DiscretizedState s;
    s.bw_bins = {ints[0], ints[1], ints[2]};
    s.count_bins = {ints[3], ints[4], ints[5]};
    const ActionVector a{{ints[6], ints[7], ints[8]}};
    const bool state_ok = s.bw_bins[0] + s.bw_bins[1] + s.bw_bins[2] == 100 &&
                          std::all_of(s.bw_bins.begin(), s.bw_bins.end(),
                                      [](int p) { return p >= 0 && p % kActionStepPct == 0; }) &&
                          std::all_of(s.count_bins.begin(), s.count_bins.end(),
                                      [](int b) { return b >= 0 && b < kCountBins; });
    const bool action_ok = a.sum() == 0 && std::all_of(a.deltas.begin(), a.deltas.end(), [](int d) {
      return d >= -kMaxActionPct && d <= kMaxActionPct && d % kActionStepPct == 0;
    });
    if (!state_ok || !action_ok) {
      throw QTableFormatError("q-table line " + std::to_string(line_no) + ": state or action out of range");
    }
    q.set(s, action_index(a), *value);
  }
  if (!saw_magic) throw QTableFormatError("not a q-table snapshot (missing header)");
  return q;
}

bool operator==(const QTable& a, const QTable& b) {
  if (a.rows_.size() != b.rows_.size()) return false;
  for (const auto& [key, row] : a.rows_) {
    auto it = b.rows_.find(key);
    if (it == b.rows_.end() || it->second.written != row.written) return false;
    for (std::size_t i = 0; i < kActionIndexCount; ++i) {
      if ((row.written & (1u << i)) && row.values[i] != it->second.values[i]) return false;
    }
  }
  return true;
}

double LearningParams::epsilon_after(std::size_t episodes) const {
  return std::max(epsilon_min, epsilon_start * std::pow(epsilon_decay, static_cast<double>(episodes)));
}

RewardWeights default_reward_weights() {
  RewardWeights w;
  w.s1 = {1.0, 0.25, 0.25};
  // URLLC and Voice throughput outweighs eMBB so their demand is served
  // before the uncapped eMBB slice absorbs the remainder.
  w.s2 = {1.0, 2.0, 2.0};
  w.s3 = {1.0, 0.25, 0.25};
  w.w_p = 1.0;
  w.w_n = 10.0;
  return w;
}

int compute_penalty(const PerSlice<int>& split, const PerSlice<int>& floors) {
  int n = 0;
  for (std::size_t k = 0; k < kSliceCount; ++k) n += split[k] < floors[k] ? 1 : 0;
  return n;
}

int compute_penalty(const CellState& cell, int floor_pct) {
  return compute_penalty(cell.bandwidth_pct, PerSlice<int>{floor_pct, floor_pct, floor_pct});
}

double compute_reward(const CellState& cell, const RewardWeights& weights,
                      const PerSlice<int>& floors) {
  const CellStats& st = cell.stats;
  double positive = 0.0;
  for (std::size_t k = 0; k < kSliceCount; ++k) {
    const double delta_free = st.free_bw[k] - st.prev_free_bw[k];
    positive += weights.s1[k] * delta_free + weights.s2[k] * st.throughput[k] +
                weights.s3[k] * st.mean_ue_rate[k];
  }
  positive /= cell.midhaul_capacity;
  return weights.w_p * positive -
         weights.w_n * static_cast<double>(compute_penalty(cell.bandwidth_pct, floors));
}

double compute_reward(const CellState& cell, const RewardWeights& weights, int floor_pct) {
  return compute_reward(cell, weights, PerSlice<int>{floor_pct, floor_pct, floor_pct});
}

ActionVector select_action(const DiscretizedState& state, std::span<const ActionVector> feasible,
                           const QTable& q, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && rng.uniform01() < epsilon) {
    return feasible[rng.uniform_index(feasible.size())];
  }
  std::size_t best = 0;
  double best_value = q.get(state, action_index(feasible[0]));
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    const double v = q.get(state, action_index(feasible[i]));
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return feasible[best];
}

void update(QTable& q, const DiscretizedState& s, std::size_t action, double reward,
            const DiscretizedState& s_next, std::span<const ActionVector> feasible_next,
            const LearningParams& params) {
  const double old = q.get(s, action);
  const double target = reward + params.gamma * q.max_value(s_next, feasible_next);
  q.set(s, action, (1.0 - params.alpha) * old + params.alpha * target);
}

}  // namespace oran
