#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oran/domain.hpp"
#include "oran/policy.hpp"
#include "oran/qlearning.hpp"

namespace oran {

enum class TrafficProfile : std::uint8_t { MID, HIGH, CUSTOM };

std::string_view to_string(TrafficProfile p);

/// Invalid or unknown configuration. Maps to exit status 1 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeploymentParams {
  int cells = 6;
  double cell_radius = 300.0;
  double umbrella_radius = 0.0;  // <= 0: smallest radius covering the arena
  double midhaul_capacity = 1'000'000.0;  // MB/s per cell
  bool control_umbrella = true;
};

struct TrafficParams {
  TrafficProfile profile = TrafficProfile::MID;
  int embb_ues = 100;
  int urllc_ues = 500;
  int voice_ues = 1000;
  double turn_probability = 0.1;
  std::vector<int> sweep_embb_ues{100, 200, 300, 400, 500};
};

struct RunParams {
  PolicyKind policy = PolicyKind::QLEARNING;
  std::size_t episodes = 600;
  int train_seconds = 120;
  int eval_seconds = 120;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // replication list; empty = {seed}
};

/// One simulated experiment: deployment, traffic mix, learning setup and
/// run control. Every field has a default; see README for the table.
struct Scenario {
  std::string name = "scenario";
  DeploymentParams deployment;
  SliceProfiles slices = default_slice_profiles();
  std::optional<PerSlice<int>> initial_split;  // unset: policy-dependent
  TrafficParams traffic;
  LearningParams learning;
  RewardWeights reward = default_reward_weights();
  RunParams run;

  /// Split every cell starts an episode with: the explicit setting, else the
  /// baseline's target, else the balanced split.
  PerSlice<int> starting_split(PolicyKind policy) const;
  PerSlice<int> floors() const;
  int total_ues() const { return traffic.embb_ues + traffic.urllc_ues + traffic.voice_ues; }
};

/// UE counts of a named profile: MID = 500 URLLC / 1000 Voice, HIGH = the reverse.
void apply_profile(TrafficParams& traffic, TrafficProfile profile);

Scenario named_scenario(TrafficProfile profile, int embb_ues, PolicyKind policy);

/// Throws ConfigError citing the first violated invariant.
void validate(const Scenario& s);

/// Sectioned key-value text: `[section]` headers, `key = value` lines, `#`
/// comments. Lists are whitespace- or comma-separated. Keys may appear
/// outside any section. Unknown keys and invalid values throw ConfigError.
Scenario parse_scenario_text(std::string_view text, std::string_view origin = "<text>");
Scenario parse_scenario(const std::filesystem::path& path);

/// Applies one `key = value` setting, as from a file or a CLI override.
void set_scenario_value(Scenario& s, std::string_view key, std::string_view value);

nlohmann::json to_json(const Scenario& s);

/// Documented keys, in section order, for help output and README.
struct ScenarioKey {
  std::string_view section;
  std::string_view key;
  std::string_view default_value;
  std::string_view meaning;
};
std::span<const ScenarioKey> scenario_keys();

}  // namespace oran
