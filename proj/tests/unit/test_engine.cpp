#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oran/baselines.hpp"
#include "oran/engine.hpp"
#include "oran/metrics.hpp"
#include "oran/scenario.hpp"
#include "oran/slicing.hpp"

using namespace oran;

namespace {

Scenario small_scenario() {
  Scenario s;
  s.traffic.profile = TrafficProfile::CUSTOM;
  s.traffic.embb_ues = 40;
  s.traffic.urllc_ues = 60;
  s.traffic.voice_ues = 90;
  s.run.train_seconds = 30;
  s.run.eval_seconds = 30;
  return s;
}

std::string cells_text(const EpisodeMetrics& m) {
  std::ostringstream out;
  write_cells_csv(out, m.cell_rows);
  return out.str();
}

}  // namespace

TEST_CASE("zero horizon runs no steps") {
  World w = make_world(small_scenario(), kBalancedSplit, 1);
  FixedSplitPolicy p("balanced", kBalancedSplit);
  SimClock clock{0, 0};
  const EpisodeMetrics m = run_episode(w, p, clock);
  CHECK(m.seconds == 0);
  CHECK(m.cell_rows.empty());
  CHECK(m.cumulative_reward == 0.0);
}

TEST_CASE("a world without cells is rejected") {
  World w = make_world(small_scenario(), kBalancedSplit, 1);
  w.deployment.cells.clear();
  FixedSplitPolicy p("balanced", kBalancedSplit);
  SimClock clock{0, 5};
  CHECK_THROWS_AS(run_episode(w, p, clock), EngineError);
}

TEST_CASE("baseline episode emits one row per second, cell and slice") {
  const Scenario s = small_scenario();
  World w = make_world(s, kBalancedSplit, 3);
  FixedSplitPolicy p("balanced", kBalancedSplit);
  SimClock clock{0, 120};
  const EpisodeMetrics m = run_episode(w, p, clock);
  CHECK(clock.now == 120);
  CHECK(m.seconds == 120);
  CHECK(m.cell_rows.size() == 120 * 7 * kSliceCount);
  for (const CellSecondRow& r : m.cell_rows) CHECK(r.allocated_pct == at(kBalancedSplit, r.slice));
}

TEST_CASE("identical seeds give identical episodes; different seeds differ") {
  const Scenario s = small_scenario();
  auto run = [&](std::uint64_t seed) {
    World w = make_world(s, kBalancedSplit, seed);
    QTable q;
    QLearningPolicy p(q, s.learning, 0.3, true);
    SimClock clock{0, 40};
    return cells_text(run_episode(w, p, clock));
  };
  CHECK(run(9) == run(9));
  CHECK(run(9) != run(10));
}

TEST_CASE("every UE is attached every second and capacity is respected exactly") {
  const Scenario s = small_scenario();
  World w = make_world(s, kBalancedSplit, 21);
  QTable q;
  QLearningPolicy p(q, s.learning, 1.0, true);
  for (int t = 0; t < 60; ++t) {
    SimClock clock{t, t + 1};
    run_episode(w, p, clock);
    for (const UeState& ue : w.ues) REQUIRE(ue.attached_cell.has_value());
    for (const CellState& cell : w.deployment.cells) {
      REQUIRE(cell.split_valid());
      for (SliceKind k : kAllSlices) {
        double sum = 0.0;
        for (UeId id : at(cell.attached, k)) {
          REQUIRE(*w.ues[id].attached_cell == cell.id);
          REQUIRE(w.ues[id].slice == k);
          sum += w.ues[id].current_rate;
        }
        REQUIRE(at(cell.user_counts, k) == static_cast<int>(at(cell.attached, k).size()));
        REQUIRE(sum <= cell.slice_capacity(k));
        REQUIRE(at(cell.stats.throughput, k) <= cell.slice_capacity(k));
        REQUIRE(at(cell.stats.throughput, k) + at(cell.stats.free_bw, k) ==
                doctest::Approx(cell.slice_capacity(k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("conservation audit: delivered plus remaining equals issued volume") {
  const Scenario s = small_scenario();
  World w = make_world(s, kEmbbFocusSplit, 4);
  FixedSplitPolicy p("embb_focus", kEmbbFocusSplit);
  SimClock clock{0, 120};
  run_episode(w, p, clock);
  std::size_t completions = 0;
  for (const UeState& ue : w.ues) {
    const double issued = static_cast<double>(ue.requests_issued) * ue.request_total;
    CHECK(ue.delivered_gb + ue.request_remaining == doctest::Approx(issued).epsilon(1e-9));
    CHECK(ue.request_remaining >= 0.0);
    CHECK(ue.request_remaining <= ue.request_total);
    CHECK(ue.completion_log.size() + 1 == ue.requests_issued);
    for (const CompletedRequest& c : ue.completion_log) CHECK(c.finish_s - c.start_s >= 1.0);
    completions += ue.completion_log.size();
  }
  CHECK(completions > 0);
}

TEST_CASE("excluded umbrella keeps its split and is never learned from") {
  Scenario s = small_scenario();
  s.deployment.control_umbrella = false;
  World w = make_world(s, kBalancedSplit, 2);
  QTable q;
  QLearningPolicy p(q, s.learning, 1.0, true);
  SimClock clock{0, 30};
  const EpisodeMetrics m = run_episode(w, p, clock);
  for (const CellSecondRow& r : m.cell_rows) {
    if (r.cell == kUmbrellaCellId) CHECK(r.allocated_pct == at(kBalancedSplit, r.slice));
  }
  for (const AppliedAction& a : m.actions) {
    if (a.cell == kUmbrellaCellId) CHECK(a.action.is_zero());
  }
}

TEST_CASE("applied actions are zero-sum and bounded") {
  const Scenario s = small_scenario();
  World w = make_world(s, kBalancedSplit, 8);
  QTable q;
  QLearningPolicy p(q, s.learning, 1.0, true);
  SimClock clock{0, 50};
  const EpisodeMetrics m = run_episode(w, p, clock);
  CHECK(m.actions.size() == 50 * 7);
  for (const AppliedAction& a : m.actions) {
    CHECK(a.action.sum() == 0);
    for (int d : a.action.deltas) CHECK(std::abs(d) <= 10);
    CHECK(is_feasible(a.before, a.action));
  }
}

TEST_CASE("training: one episode fills the table, epsilon decays per episode") {
  Scenario s = small_scenario();
  QTable q;
  const TrainingRecord one = run_training({1, 20, 5}, s, q);
  CHECK(one.episodes.size() == 1);
  CHECK_FALSE(q.empty());

  QTable q2;
  const TrainingRecord two = run_training({2, 20, 5}, s, q2);
  CHECK(two.episodes.size() == 2);
  CHECK(two.episodes[0].epsilon == 1.0);
  CHECK(two.episodes[1].epsilon == doctest::Approx(0.99));
  CHECK(two.final_epsilon == doctest::Approx(0.99 * 0.99).epsilon(1e-15));
  CHECK(two.last_episode.cell_rows.size() == 20 * 7 * kSliceCount);
}

TEST_CASE("training is reproducible down to the Q table snapshot") {
  const Scenario s = small_scenario();
  QTable a;
  QTable b;
  const TrainingRecord ra = run_training({3, 20, 11}, s, a);
  const TrainingRecord rb = run_training({3, 20, 11}, s, b);
  CHECK(ra.episodes == rb.episodes);
  std::ostringstream sa;
  std::ostringstream sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());
}
