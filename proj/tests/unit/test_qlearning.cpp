#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "oran/mobility.hpp"
#include "oran/qlearning.hpp"
#include "oran/rng.hpp"
#include "oran/slicing.hpp"

using namespace oran;

namespace {

DiscretizedState state_of(PerSlice<int> split, PerSlice<int> bins = {0, 0, 0}) {
  return DiscretizedState{split, bins};
}

}  // namespace

TEST_CASE("count bins use inclusive upper edges") {
  CHECK(count_bin(0) == 0);
  CHECK(count_bin(1) == 1);
  CHECK(count_bin(10) == 1);
  CHECK(count_bin(11) == 2);
  CHECK(count_bin(50) == 2);
  CHECK(count_bin(51) == 3);
  CHECK(count_bin(100) == 3);
  CHECK(count_bin(101) == 4);
  CHECK(count_bin(200) == 4);
  CHECK(count_bin(201) == 5);
  CHECK(count_bin(100000) == 5);
}

TEST_CASE("encode_state examples") {
  CellState cell;
  cell.bandwidth_pct = {40, 30, 30};
  cell.user_counts = {0, 0, 0};
  CHECK(encode_state(cell) == state_of({40, 30, 30}, {0, 0, 0}));
  cell.user_counts = {100, 500, 1000};
  CHECK(encode_state(cell).count_bins == PerSlice<int>{3, 5, 5});
  cell.user_counts = {10, 11, 200};
  CHECK(encode_state(cell).count_bins == PerSlice<int>{1, 2, 4});
}

TEST_CASE("state keys round-trip across the lattice") {
  std::map<std::uint32_t, int> seen;
  for (const PerSlice<int>& split : split_lattice()) {
    for (int b = 0; b < kCountBins; ++b) {
      const DiscretizedState s = state_of(split, {b, (b + 1) % kCountBins, (b + 3) % kCountBins});
      CHECK(DiscretizedState::from_key(s.key()) == s);
      ++seen[s.key()];
    }
  }
  CHECK(seen.size() == 231 * kCountBins);
}

TEST_CASE("penalty counts slices strictly below the floor") {
  CHECK(compute_penalty(PerSlice<int>{40, 30, 30}, PerSlice<int>{5, 5, 5}) == 0);
  CHECK(compute_penalty(PerSlice<int>{90, 5, 5}, PerSlice<int>{5, 5, 5}) == 0);
  CHECK(compute_penalty(PerSlice<int>{96, 4, 0}, PerSlice<int>{5, 5, 5}) == 2);
  CellState cell;
  cell.bandwidth_pct = {100, 0, 0};
  CHECK(compute_penalty(cell, 5) == 2);
}

TEST_CASE("reward examples") {
  RewardWeights none;
  none.w_p = 1.0;
  none.w_n = 10.0;

  SUBCASE("empty cell without change") {
    CellState cell;
    cell.midhaul_capacity = 50000.0;
    cell.bandwidth_pct = {40, 30, 30};
    CHECK(compute_reward(cell, default_reward_weights(), 5) == 0.0);
  }
  SUBCASE("two slices below the floor") {
    CellState cell;
    cell.midhaul_capacity = 50000.0;
    cell.bandwidth_pct = {96, 4, 0};
    CHECK(compute_reward(cell, none, 5) == -20.0);
  }
  SUBCASE("single eMBB UE, hand-evaluated") {
    CellState cell;
    cell.midhaul_capacity = 50000.0;
    cell.bandwidth_pct = {40, 30, 30};
    at(cell.stats.throughput, SliceKind::EMBB) = 1000.0;
    at(cell.stats.mean_ue_rate, SliceKind::EMBB) = 1000.0;
    at(cell.stats.prev_free_bw, SliceKind::EMBB) = 20000.0;
    at(cell.stats.free_bw, SliceKind::EMBB) = 19000.0;
    RewardWeights w = none;
    w.s1 = {1.0, 0.0, 0.0};
    w.s2 = {1.0, 0.0, 0.0};
    w.s3 = {1.0, 0.0, 0.0};
    // (-1000 + 1000 + 1000) / 50000
    CHECK(compute_reward(cell, w, 5) == doctest::Approx(0.02).epsilon(1e-15));
  }
}

TEST_CASE("each extra floor violation costs exactly w_n") {
  CellState cell;
  cell.midhaul_capacity = 1000.0;
  at(cell.stats.throughput, SliceKind::EMBB) = 300.0;
  const RewardWeights w = default_reward_weights();
  cell.bandwidth_pct = {100, 0, 0};
  const double two = compute_reward(cell, w, 5);
  cell.bandwidth_pct = {95, 5, 0};
  const double one = compute_reward(cell, w, 5);
  cell.bandwidth_pct = {90, 5, 5};
  const double zero = compute_reward(cell, w, 5);
  CHECK(zero - one == w.w_n);
  CHECK(one - two == w.w_n);
}

TEST_CASE("Q update examples") {
  const LearningParams p{};
  const DiscretizedState s = state_of({40, 30, 30});
  const DiscretizedState s2 = state_of({45, 30, 25});
  const auto feasible = enumerate_feasible_actions(s2.bw_bins);

  QTable q;
  update(q, s, 12, 1.0, s2, feasible, p);
  CHECK(q.get(s, 12) == doctest::Approx(0.1).epsilon(1e-15));

  QTable q2;
  q2.set(s, 12, 0.1);
  q2.set(s2, action_index(feasible.front()), 0.1);
  update(q2, s, 12, 1.0, s2, feasible, p);
  CHECK(q2.get(s, 12) == doctest::Approx(0.199).epsilon(1e-15));

  QTable q3;
  q3.set(s2, action_index(feasible.back()), 7.0);
  LearningParams greedy = p;
  greedy.alpha = 1.0;
  greedy.gamma = 0.0;
  update(q3, s, 3, -4.25, s2, feasible, greedy);
  CHECK(q3.get(s, 3) == -4.25);
}

TEST_CASE("max over an unwritten row is zero, even with negative entries elsewhere") {
  QTable q;
  const DiscretizedState s = state_of({40, 30, 30});
  const auto feasible = enumerate_feasible_actions(s.bw_bins);
  CHECK(q.max_value(s, feasible) == 0.0);
  q.set(s, action_index(feasible[0]), -3.0);
  // Absent entries read as 0, so the max over the feasible set is 0.
  CHECK(q.max_value(s, feasible) == 0.0);
  for (const ActionVector& a : feasible) q.set(s, action_index(a), -1.0 - static_cast<double>(action_index(a)));
  CHECK(q.max_value(s, feasible) == -1.0 - static_cast<double>(action_index(feasible.front())));
}

TEST_CASE("Q values stay within R_max / (1 - gamma)") {
  Rng rng(11);
  LearningParams p{};
  p.alpha = 0.5;
  QTable q;
  const auto lattice = split_lattice();
  for (int i = 0; i < 20000; ++i) {
    const DiscretizedState s = state_of(lattice[rng.uniform_index(20)]);
    const DiscretizedState s2 = state_of(lattice[rng.uniform_index(20)]);
    const auto feasible = enumerate_feasible_actions(s2.bw_bins);
    const auto mine = enumerate_feasible_actions(s.bw_bins);
    const std::size_t a = action_index(mine[rng.uniform_index(mine.size())]);
    update(q, s, a, rng.uniform(-1.0, 1.0), s2, feasible, p);
    REQUIRE(std::abs(q.get(s, a)) <= 1.0 / (1.0 - p.gamma) + 1e-12);
  }
}

TEST_CASE("greedy selection") {
  const DiscretizedState s = state_of({40, 30, 30});
  const auto feasible = enumerate_feasible_actions(s.bw_bins);
  Rng rng(1);
  QTable q;
  CHECK(select_action(s, feasible, q, 0.0, rng) == feasible.front());
  q.set(s, action_index(feasible[7]), 1.0);
  CHECK(select_action(s, feasible, q, 0.0, rng) == feasible[7]);
  // Unfeasible action indices never win, whatever their value.
  const DiscretizedState edge = state_of({0, 90, 10});
  const auto masked = enumerate_feasible_actions(edge.bw_bins);
  QTable q2;
  q2.set(edge, action_index(make_action(-10, 0)), 100.0);
  CHECK(select_action(edge, masked, q2, 0.0, rng) == masked.front());
}

TEST_CASE("epsilon one is uniform over the feasible set") {
  const DiscretizedState s = state_of({40, 30, 30});
  const auto feasible = enumerate_feasible_actions(s.bw_bins);
  QTable q;
  q.set(s, action_index(feasible[3]), 5.0);
  Rng rng(123);
  std::map<std::size_t, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[action_index(select_action(s, feasible, q, 1.0, rng))];
  CHECK(counts.size() == feasible.size());
  const double expected = static_cast<double>(draws) / static_cast<double>(feasible.size());
  double chi2 = 0.0;
  for (const auto& [a, n] : counts) chi2 += (n - expected) * (n - expected) / expected;
  // 18 degrees of freedom, 0.999 quantile.
  CHECK(chi2 < 42.31);
}

TEST_CASE("epsilon decays geometrically to its floor") {
  const LearningParams p{};
  CHECK(p.epsilon_after(0) == 1.0);
  CHECK(p.epsilon_after(2) == doctest::Approx(0.99 * 0.99).epsilon(1e-15));
  CHECK(p.epsilon_after(1000) == p.epsilon_min);
  for (std::size_t e = 0; e < 700; ++e) CHECK(p.epsilon_after(e + 1) <= p.epsilon_after(e));
}

TEST_CASE("single-step argmax matches exhaustive evaluation on a frozen world") {
  // Frozen cell: fixed UE population, no mobility between the candidate
  // evaluations. With alpha 1, gamma 0 one sweep stores each reward exactly.
  const SliceProfiles profiles = default_slice_profiles();
  for (const PerSlice<int>& start : {PerSlice<int>{40, 30, 30}, PerSlice<int>{90, 5, 5}, PerSlice<int>{10, 10, 80}}) {
    CellState cell;
    cell.midhaul_capacity = 50000.0;
    cell.bandwidth_pct = start;
    std::vector<UeState> ues;
    const PerSlice<int> counts{3, 8, 20};
    for (SliceKind k : kAllSlices) {
      for (int i = 0; i < at(counts, k); ++i) {
        UeState ue;
        ue.id = static_cast<UeId>(ues.size());
        ue.slice = k;
        at(cell.attached, k).push_back(ue.id);
        ues.push_back(ue);
      }
    }
    cell.user_counts = counts;
    allocate_rates(cell, profiles, ues);

    const DiscretizedState s = encode_state(cell);
    const auto feasible = enumerate_feasible_actions(cell);
    LearningParams p{};
    p.alpha = 1.0;
    p.gamma = 0.0;
    QTable q;
    std::size_t best = 0;
    double best_reward = -INFINITY;
    for (std::size_t i = 0; i < feasible.size(); ++i) {
      CellState trial = cell;
      std::vector<UeState> trial_ues = ues;
      apply_action(trial, feasible[i]);
      allocate_rates(trial, profiles, trial_ues);
      const double r = compute_reward(trial, default_reward_weights(), PerSlice<int>{5, 5, 5});
      if (r > best_reward) {
        best_reward = r;
        best = i;
      }
      update(q, s, action_index(feasible[i]), r, encode_state(trial), enumerate_feasible_actions(trial), p);
    }
    Rng rng(0);
    CHECK(select_action(s, feasible, q, 0.0, rng) == feasible[best]);
  }
}

TEST_CASE("Q table snapshot round-trips") {
  QTable q;
  Rng rng(5);
  const auto lattice = split_lattice();
  for (int i = 0; i < 500; ++i) {
    const DiscretizedState s = state_of(lattice[rng.uniform_index(lattice.size())],
                                        {static_cast<int>(rng.uniform_index(6)), 2, 5});
    const auto feasible = enumerate_feasible_actions(s.bw_bins);
    q.set(s, action_index(feasible[rng.uniform_index(feasible.size())]), rng.uniform(-30.0, 30.0));
  }
  q.set(state_of({40, 30, 30}), 12, 0.0);
  std::stringstream buf;
  q.save(buf);
  const std::string text = buf.str();
  CHECK(text.rfind("# oran-slicing q-table v1\n", 0) == 0);
  QTable back = QTable::load(buf);
  CHECK(back == q);
  CHECK(back.entry_count() == q.entry_count());
  std::stringstream again;
  back.save(again);
  CHECK(again.str() == text);
}

TEST_CASE("malformed snapshots are rejected") {
  std::stringstream no_magic("40 30 30 0 0 0 0 0 0 1\n");
  CHECK_THROWS_AS(QTable::load(no_magic), QTableFormatError);
  std::stringstream bad_row("# oran-slicing q-table v1\n40 30 30 0 0 0 0 0 0\n");
  CHECK_THROWS_AS(QTable::load(bad_row), QTableFormatError);
  std::stringstream bad_split("# oran-slicing q-table v1\n40 30 20 0 0 0 0 0 0 1\n");
  CHECK_THROWS_AS(QTable::load(bad_split), QTableFormatError);
  std::stringstream bad_action("# oran-slicing q-table v1\n40 30 30 0 0 0 5 5 5 1\n");
  CHECK_THROWS_AS(QTable::load(bad_action), QTableFormatError);
}
