#include "oran/harness.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <system_error>

#include "oran/baselines.hpp"
#include "oran/format.hpp"

namespace oran {

namespace fs = std::filesystem;

TrainOutcome train_qtable(const Scenario& scenario, std::uint64_t seed, const ProgressFn& progress) {
  TrainOutcome out;
  if (scenario.run.episodes == 0) return out;

  const EpisodeConfig config{scenario.run.episodes, scenario.run.train_seconds, seed};
  const std::size_t every = std::max<std::size_t>(1, scenario.run.episodes / 10);
  EpisodeCallback on_episode;
  if (progress) {
    on_episode = [&](const EpisodeRecord& e) {
      if ((e.episode + 1) % every != 0 && e.episode + 1 != scenario.run.episodes) return;
      progress("episode " + std::to_string(e.episode + 1) + "/" + std::to_string(scenario.run.episodes) +
               ", reward " + format_double(e.cumulative_reward) + ", epsilon " + format_double(e.epsilon));
    };
  }
  out.record = run_training(config, scenario, out.table, on_episode);
  return out;
}

Evaluation evaluate_policy(const Scenario& scenario, PolicyKind policy, const QTable* table, std::uint64_t seed,
                           std::span<const EpisodeRecord> training) {
  std::unique_ptr<Policy> controller;
  QTable greedy_table = table ? *table : QTable{};
  switch (policy) {
    case PolicyKind::QLEARNING:
      controller = std::make_unique<QLearningPolicy>(greedy_table, scenario.learning, 0.0, /*learning=*/false);
      break;
    case PolicyKind::BALANCED:
      controller = std::make_unique<FixedSplitPolicy>("balanced", kBalancedSplit);
      break;
    case PolicyKind::EMBB_FOCUS:
      controller = std::make_unique<FixedSplitPolicy>("embb_focus", kEmbbFocusSplit);
      break;
  }

  Evaluation ev;
  ev.world = make_world(scenario, scenario.starting_split(policy), seed);
  SimClock clock{0, scenario.run.eval_seconds};
  ev.episode = run_episode(ev.world, *controller, clock);

  ev.metrics.cells = ev.episode.cell_rows;
  ev.metrics.completions = completion_rows(ev.world.ues, static_cast<double>(scenario.run.eval_seconds));
  ev.metrics.episodes.assign(training.begin(), training.end());
  ev.metrics.episodes.push_back({training.size(), ev.episode.cumulative_reward, 0.0});
  return ev;
}

nlohmann::json run_config(Scenario scenario, PolicyKind policy, std::uint64_t seed) {
  scenario.run.policy = policy;
  scenario.run.seed = seed;
  return to_json(scenario);
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (!fs::is_directory(dir)) throw OutputError("output path is not a directory: " + dir.string());
  const fs::path probe = dir / ".write-probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << 'x') || !out.flush()) {
      throw OutputError("output directory is not writable: " + dir.string());
    }
  }
  fs::remove(probe, ec);
}

nlohmann::json write_run(const fs::path& dir, const MetricsRecord& metrics, const nlohmann::json& config) {
  prepare_output_dir(dir);
  write_metrics(dir, metrics);
  nlohmann::json summary = summarize(metrics, config);
  std::ofstream out(dir / "summary.json", std::ios::binary | std::ios::trunc);
  if (!(out << dump_summary(summary))) throw OutputError("cannot write " + (dir / "summary.json").string());
  return summary;
}

nlohmann::json resummarize(const fs::path& dir) {
  std::ifstream in(dir / "summary.json", std::ios::binary);
  if (!in) throw MetricsFormatError("cannot read " + (dir / "summary.json").string());
  nlohmann::json previous;
  try {
    previous = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw MetricsFormatError((dir / "summary.json").string() + ": " + e.what());
  }
  if (!previous.is_object() || !previous.contains("config")) {
    throw MetricsFormatError((dir / "summary.json").string() + ": missing config echo");
  }
  return summarize(read_metrics(dir), previous["config"]);
}

std::string sweep_run_name(TrafficProfile profile, int embb_ues, PolicyKind policy, std::uint64_t seed,
                           bool tag_seed) {
  std::string name = std::string(to_string(profile)) + "_" + std::to_string(embb_ues) + "_" +
                     std::string(to_string(policy));
  if (tag_seed) name += "_s" + std::to_string(seed);
  return name;
}

namespace {

nlohmann::json sweep_entry(const SweepRun& run) {
  const nlohmann::json& s = run.summary;
  nlohmann::json median_ttf = nlohmann::json::object();
  for (const auto& [slice, dist] : s["time_to_finish_s"].items()) {
    median_ttf[slice] = dist.contains("median") ? dist["median"] : nlohmann::json(nullptr);
  }
  return {
      {"dir", run.dir.filename().string()},
      {"embb_ues", run.embb_ues},
      {"policy", std::string(to_string(run.policy))},
      {"seed", run.seed},
      {"utilization_pct", s["utilization_pct"]},
      {"mean_allocated_pct", s["mean_allocated_pct"]},
      {"embb_rate_mbps", s["embb_rate_mbps"]},
      {"median_time_to_finish_s", median_ttf},
      {"below_floor_fraction", s["floor"]["below_floor_fraction"]},
      {"at_or_below_floor_fraction", s["floor"]["at_or_below_floor_fraction"]},
  };
}

}  // namespace

SweepReport run_sweep(const Scenario& base, std::span<const int> embb_counts, const fs::path& out,
                      std::span<const std::uint64_t> seeds, std::span<const PolicyKind> policies,
                      const ProgressFn& progress) {
  if (embb_counts.empty()) throw ConfigError("sweep needs at least one eMBB UE count");
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  for (int n : embb_counts) {
    Scenario probe = base;
    probe.traffic.embb_ues = n;
    validate(probe);
  }
  prepare_output_dir(out);

  const bool tag_seed = seeds.size() > 1;
  const bool trains = std::find(policies.begin(), policies.end(), PolicyKind::QLEARNING) != policies.end();
  SweepReport result;
  for (std::uint64_t seed : seeds) {
    for (int n : embb_counts) {
      Scenario s = base;
      s.traffic.embb_ues = n;
      s.name = std::string(to_string(s.traffic.profile)) + "_" + std::to_string(n);

      TrainOutcome trained;
      if (trains) {
        if (progress) progress("training " + s.name + " seed " + std::to_string(seed));
        trained = train_qtable(s, seed, progress);
      }
      for (PolicyKind p : policies) {
        SweepRun run{n, p, seed, out / sweep_run_name(s.traffic.profile, n, p, seed, tag_seed), {}};
        if (progress) progress("evaluating " + run.dir.filename().string());
        const bool q = p == PolicyKind::QLEARNING;
        Evaluation ev = evaluate_policy(s, p, q ? &trained.table : nullptr, seed,
                                        q ? std::span<const EpisodeRecord>(trained.record.episodes)
                                          : std::span<const EpisodeRecord>());
        run.summary = write_run(run.dir, ev.metrics, run_config(s, p, seed));
        result.runs.push_back(std::move(run));
      }
    }
  }

  nlohmann::json entries = nlohmann::json::array();
  for (const SweepRun& r : result.runs) entries.push_back(sweep_entry(r));
  result.report = {
      {"profile", std::string(to_string(base.traffic.profile))},
      {"embb_counts", std::vector<int>(embb_counts.begin(), embb_counts.end())},
      {"seeds", std::vector<std::uint64_t>(seeds.begin(), seeds.end())},
      {"runs", entries},
  };
  std::ofstream report(out / "sweep.json", std::ios::binary | std::ios::trunc);
  if (!(report << dump_summary(result.report))) throw OutputError("cannot write " + (out / "sweep.json").string());
  return result;
}

}  // namespace oran
