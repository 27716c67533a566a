#include "oran/engine.hpp"

#include <algorithm>
#include <numbers>

#include "oran/scenario.hpp"
#include "oran/slicing.hpp"

namespace oran {

World make_world(const Scenario& scenario, PerSlice<int> starting_split, std::uint64_t seed) {
  World w;
  w.deployment = build_deployment(scenario.deployment.cells, scenario.deployment.cell_radius,
                                  scenario.deployment.umbrella_radius,
                                  scenario.deployment.midhaul_capacity);
  w.profiles = scenario.slices;
  w.floors = scenario.floors();
  w.reward = scenario.reward;
  w.turn_probability = scenario.traffic.turn_probability;
  w.control_umbrella = scenario.deployment.control_umbrella;
  w.rng = Rng(seed);

  for (CellState& c : w.deployment.cells) c.bandwidth_pct = starting_split;

  const PerSlice<int> counts{scenario.traffic.embb_ues, scenario.traffic.urllc_ues,
                             scenario.traffic.voice_ues};
  const Arena& arena = w.deployment.arena;
  w.ues.reserve(static_cast<std::size_t>(scenario.total_ues()));
  for (SliceKind k : kAllSlices) {
    for (int n = 0; n < at(counts, k); ++n) {
      UeState ue;
      ue.id = static_cast<UeId>(w.ues.size());
      ue.slice = k;
      ue.movement = static_cast<MovementKind>(w.rng.uniform_index(kMovementKindCount));
      ue.speed = movement_speed_sample(ue.movement, w.rng);
      ue.position = Vec2{w.rng.uniform(arena.min_x, arena.max_x), w.rng.uniform(arena.min_y, arena.max_y)};
      ue.heading = w.rng.uniform(0.0, 2.0 * std::numbers::pi);
      ue.request_total = at(w.profiles, k).request_gb;
      ue.request_remaining = ue.request_total;
      ue.requests_issued = 1;
      w.ues.push_back(std::move(ue));
    }
  }

  reattach_all(w);
  for (CellState& c : w.deployment.cells) {
    allocate_rates(c, w.profiles, w.ues);
    c.stats.prev_free_bw = c.stats.free_bw;
  }
  return w;
}

void reattach_all(World& world) {
  for (CellState& c : world.deployment.cells) {
    for (auto& members : c.attached) members.clear();
  }
  for (UeState& ue : world.ues) {
    const CellId id = attach(ue, world.deployment);
    ue.attached_cell = id;
    at(world.deployment.cell(id).attached, ue.slice).push_back(ue.id);
  }
  for (CellState& c : world.deployment.cells) {
    for (std::size_t k = 0; k < kSliceCount; ++k) c.user_counts[k] = static_cast<int>(c.attached[k].size());
  }
}

EpisodeMetrics run_episode(World& world, Policy& policy, SimClock& clock, const EpisodeOptions& options) {
  auto& cells = world.deployment.cells;
  if (cells.empty()) throw EngineError("world has no cells");

  EpisodeMetrics metrics;
  const std::size_t steps = clock.horizon > clock.now ? static_cast<std::size_t>(clock.horizon - clock.now) : 0;
  if (options.record_rows) {
    metrics.cell_rows.reserve(steps * cells.size() * kSliceCount);
    metrics.actions.reserve(steps * cells.size());
  }

  std::vector<DiscretizedState> states(cells.size());
  std::vector<std::vector<ActionVector>> feasible(cells.size());
  std::vector<ActionVector> chosen(cells.size());
  std::vector<double> rewards(cells.size());

  while (!clock.done()) {
    const int t = clock.now;

    for (UeState& ue : world.ues) move_ue(ue, 1.0, world.deployment.arena, world.turn_probability, world.rng);
    reattach_all(world);

    for (std::size_t c = 0; c < cells.size(); ++c) {
      states[c] = encode_state(cells[c]);
      feasible[c] = enumerate_feasible_actions(cells[c]);
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      const bool controlled = world.control_umbrella || cells[c].id != kUmbrellaCellId;
      if (!controlled) {
        chosen[c] = ActionVector{};
        continue;
      }
      chosen[c] = policy.select(cells[c], states[c], feasible[c], world.rng);
      if (std::find(feasible[c].begin(), feasible[c].end(), chosen[c]) == feasible[c].end()) {
        throw EngineError("policy '" + std::string(policy.name()) + "' chose an infeasible action for cell " +
                          std::to_string(cells[c].id));
      }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (options.record_rows) metrics.actions.push_back({t, cells[c].id, cells[c].bandwidth_pct, chosen[c]});
      apply_action(cells[c], chosen[c]);
    }

    for (CellState& cell : cells) allocate_rates(cell, world.profiles, world.ues);
    for (UeState& ue : world.ues) transfer(ue, 1.0, static_cast<double>(t + 1));

    for (std::size_t c = 0; c < cells.size(); ++c) {
      rewards[c] = compute_reward(cells[c], world.reward, world.floors);
      metrics.cumulative_reward += rewards[c];
    }

    if (policy.learns()) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const bool controlled = world.control_umbrella || cells[c].id != kUmbrellaCellId;
        if (!controlled) continue;
        Transition tr;
        tr.cell = cells[c].id;
        tr.state = states[c];
        tr.action = action_index(chosen[c]);
        tr.reward = rewards[c];
        tr.next_state = encode_state(cells[c]);
        tr.feasible_next = enumerate_feasible_actions(cells[c]);
        policy.learn(tr);
      }
    }

    if (options.record_rows) {
      for (const CellState& cell : cells) {
        for (SliceKind k : kAllSlices) {
          metrics.cell_rows.push_back({t, cell.id, k, at(cell.bandwidth_pct, k), at(cell.stats.throughput, k),
                                       at(cell.stats.free_bw, k), at(cell.user_counts, k),
                                       at(cell.stats.mean_ue_rate, k)});
        }
      }
    }

    ++clock.now;
    ++metrics.seconds;
  }
  return metrics;
}

TrainingRecord run_training(const EpisodeConfig& config, const Scenario& scenario, QTable& table,
                            const EpisodeCallback& on_episode) {
  TrainingRecord record;
  record.episodes.reserve(config.episode_count);
  const PerSlice<int> split = scenario.starting_split(PolicyKind::QLEARNING);

  for (std::size_t e = 0; e < config.episode_count; ++e) {
    const double epsilon = scenario.learning.epsilon_after(e);
    QLearningPolicy policy(table, scenario.learning, epsilon, /*learning=*/true);
    World world = make_world(scenario, split, config.seed + e);
    SimClock clock{0, config.seconds_per_episode};
    const bool last = e + 1 == config.episode_count;
    EpisodeMetrics m = run_episode(world, policy, clock, EpisodeOptions{.record_rows = last});
    record.episodes.push_back({e, m.cumulative_reward, epsilon});
    if (on_episode) on_episode(record.episodes.back());
    if (last) {
      record.last_episode = std::move(m);
      record.last_world = std::move(world);
    }
  }
  record.final_epsilon = scenario.learning.epsilon_after(config.episode_count);
  return record;
}

}  // namespace oran
