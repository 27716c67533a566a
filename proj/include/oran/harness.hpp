#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oran/engine.hpp"
#include "oran/metrics.hpp"
#include "oran/policy.hpp"
#include "oran/qlearning.hpp"
#include "oran/scenario.hpp"

namespace oran {

/// Output location missing, not a directory, or not writable.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ProgressFn = std::function<void(std::string_view)>;

struct TrainOutcome {
  QTable table;
  TrainingRecord record;
};

/// Trains a fresh table with scenario.run.episodes episodes of
/// scenario.run.train_seconds, seeding episode e with seed + e. Zero
/// episodes leave the table empty.
TrainOutcome train_qtable(const Scenario& scenario, std::uint64_t seed, const ProgressFn& progress = {});

struct Evaluation {
  MetricsRecord metrics;
  EpisodeMetrics episode;
  World world;
};

/// One greedy episode of scenario.run.eval_seconds on a world seeded with
/// `seed`. `table` is required for QLEARNING and ignored otherwise.
/// `training` rows are copied ahead of the evaluation row in
/// metrics.episodes; the evaluation row has epsilon 0.
Evaluation evaluate_policy(const Scenario& scenario, PolicyKind policy, const QTable* table, std::uint64_t seed,
                           std::span<const EpisodeRecord> training = {});

/// Scenario echo for summary.json with the run's policy and seed filled in.
nlohmann::json run_config(Scenario scenario, PolicyKind policy, std::uint64_t seed);

/// Creates `dir` (and parents) and checks that a file can be written there.
void prepare_output_dir(const std::filesystem::path& dir);

/// Writes the three CSVs and summary.json into `dir`; returns the summary.
nlohmann::json write_run(const std::filesystem::path& dir, const MetricsRecord& metrics,
                         const nlohmann::json& config);

/// Re-reads a run directory and recomputes its summary from the CSVs and the
/// config echoed in the existing summary.json.
nlohmann::json resummarize(const std::filesystem::path& dir);

struct SweepRun {
  int embb_ues = 0;
  PolicyKind policy = PolicyKind::QLEARNING;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  nlohmann::json summary;
};

struct SweepReport {
  std::vector<SweepRun> runs;
  nlohmann::json report;
};

/// Directory name of one sweep run: `{profile}_{embb}_{policy}`, with
/// `_s{seed}` appended when `tag_seed`.
std::string sweep_run_name(TrafficProfile profile, int embb_ues, PolicyKind policy, std::uint64_t seed,
                           bool tag_seed);

/// For every seed and eMBB count: trains one table when QLEARNING is among
/// `policies`, then evaluates each policy and writes its run directory under
/// `out`. Also writes `out/sweep.json`. Throws ConfigError for empty
/// counts, seeds or policies and OutputError before any simulation if `out`
/// is unwritable.
SweepReport run_sweep(const Scenario& base, std::span<const int> embb_counts, const std::filesystem::path& out,
                      std::span<const std::uint64_t> seeds, std::span<const PolicyKind> policies = kAllPolicies,
                      const ProgressFn& progress = {});

}  // namespace oran
