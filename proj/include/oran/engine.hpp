#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "oran/domain.hpp"
#include "oran/mobility.hpp"
#include "oran/policy.hpp"
#include "oran/qlearning.hpp"
#include "oran/rng.hpp"

namespace oran {

struct Scenario;

struct SimClock {
  int now = 0;
  int horizon = 0;

  bool done() const { return now >= horizon; }
};

struct EpisodeConfig {
  std::size_t episode_count = 1;
  int seconds_per_episode = 120;
  std::uint64_t seed = 1;
};

/// Everything one episode mutates. UEs are indexed by id.
struct World {
  Deployment deployment;
  std::vector<UeState> ues;
  SliceProfiles profiles = default_slice_profiles();
  PerSlice<int> floors{5, 5, 5};
  RewardWeights reward = default_reward_weights();
  double turn_probability = 0.1;
  bool control_umbrella = true;
  Rng rng{0};
};

/// Builds the deployment, spawns UEs in id order (eMBB, then URLLC, then
/// Voice), attaches them and runs an initial allocation so the first
/// second's free-bandwidth change has a reference. Draw order per UE:
/// movement kind, speed (none when stationary), x, y, heading.
World make_world(const Scenario& scenario, PerSlice<int> starting_split, std::uint64_t seed);

/// Re-attaches every UE and rebuilds the per-cell membership lists.
void reattach_all(World& world);

struct CellSecondRow {
  int t = 0;
  CellId cell = 0;
  SliceKind slice = SliceKind::EMBB;
  int allocated_pct = 0;
  double throughput = 0.0;
  double free_bw = 0.0;
  int users = 0;
  double mean_rate = 0.0;

  friend bool operator==(const CellSecondRow&, const CellSecondRow&) = default;
};

struct AppliedAction {
  int t = 0;
  CellId cell = 0;
  PerSlice<int> before{};
  ActionVector action;
};

struct EpisodeMetrics {
  std::vector<CellSecondRow> cell_rows;
  std::vector<AppliedAction> actions;
  double cumulative_reward = 0.0;
  int seconds = 0;
};

struct EpisodeOptions {
  bool record_rows = true;
};

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs clock.horizon - clock.now one-second steps. Each step: move UEs,
/// re-attach, observe per-cell states, select actions, apply them, allocate
/// and transfer, compute rewards, then let the policy learn in ascending
/// cell id. Throws EngineError for a world without cells or a policy that
/// returns an infeasible action.
EpisodeMetrics run_episode(World& world, Policy& policy, SimClock& clock,
                           const EpisodeOptions& options = {});

struct EpisodeRecord {
  std::size_t episode = 0;
  double cumulative_reward = 0.0;
  double epsilon = 0.0;

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct TrainingRecord {
  std::vector<EpisodeRecord> episodes;
  double final_epsilon = 0.0;
  EpisodeMetrics last_episode;
  World last_world;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

/// Trains `table` for config.episode_count episodes; episode e runs on a
/// fresh world seeded with seed + e and explores with epsilon_after(e).
TrainingRecord run_training(const EpisodeConfig& config, const Scenario& scenario, QTable& table,
                            const EpisodeCallback& on_episode = {});

}  // namespace oran
