// Command-line driver: train, eval, sweep and replay.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oran/format.hpp"
#include "oran/harness.hpp"
#include "oran/scenario.hpp"

namespace fs = std::filesystem;
using namespace oran;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> episodes;
  std::string policy;
  std::string qtable;
  std::string seeds;
  std::vector<std::string> overrides;
};

/// Removes what a failed command created: the whole output directory if it
/// did not exist beforehand, else only the entries that appeared since.
class OutputGuard {
 public:
  explicit OutputGuard(fs::path dir) : dir_(std::move(dir)), existed_(fs::exists(dir_)) {
    if (existed_ && fs::is_directory(dir_)) {
      for (const auto& entry : fs::directory_iterator(dir_)) before_.insert(entry.path().filename().string());
    }
  }
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (committed_) return;
    std::error_code ec;
    if (!existed_) {
      fs::remove_all(dir_, ec);
      return;
    }
    if (!fs::is_directory(dir_, ec)) return;
    std::vector<fs::path> fresh;
    for (const auto& entry : fs::directory_iterator(dir_, ec)) {
      if (!before_.contains(entry.path().filename().string())) fresh.push_back(entry.path());
    }
    for (const fs::path& p : fresh) fs::remove_all(p, ec);
  }
  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  bool existed_;
  std::set<std::string> before_;
  bool committed_ = false;
};

std::string default_out(std::string_view command) {
  if (const char* env = std::getenv("SIM_OUT_DIR"); env && *env) return env;
  return "runs/" + std::string(command);
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    auto v = parse_number<std::uint64_t>(token);
    if (!v) throw ConfigError("invalid seed '" + token + "' in --seeds");
    seeds.push_back(*v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  if (seeds.empty()) throw ConfigError("--seeds needs at least one seed");
  return seeds;
}

/// Scenario file (or defaults) with flags applied on top, then validated.
Scenario load_scenario(const CommonFlags& f) {
  Scenario s = f.scenario.empty() ? Scenario{} : parse_scenario(f.scenario);
  for (const std::string& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_scenario_value(s, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) s.run.seed = *f.seed;
  if (f.episodes) s.run.episodes = *f.episodes;
  if (!f.policy.empty()) set_scenario_value(s, "policy", f.policy);
  if (!f.seeds.empty()) s.run.seeds = parse_seed_list(f.seeds);
  validate(s);
  return s;
}

void log_line(std::string_view msg) { std::cerr << msg << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!(out << text)) throw OutputError("cannot write " + path.string());
}

int cmd_train(const CommonFlags& f) {
  Scenario s = load_scenario(f);
  if (s.run.episodes == 0) throw ConfigError("train needs at least one episode");
  const fs::path out = f.out.empty() ? default_out("train") : f.out;
  OutputGuard guard(out);
  prepare_output_dir(out);

  TrainOutcome trained = train_qtable(s, s.run.seed, log_line);
  MetricsRecord m;
  m.cells = trained.record.last_episode.cell_rows;
  m.completions = completion_rows(trained.record.last_world.ues, static_cast<double>(s.run.train_seconds));
  m.episodes = trained.record.episodes;
  write_run(out, m, run_config(s, PolicyKind::QLEARNING, s.run.seed));

  std::ofstream table(out / "qtable.txt", std::ios::binary | std::ios::trunc);
  trained.table.save(table);
  if (!table.flush()) throw OutputError("cannot write " + (out / "qtable.txt").string());
  guard.commit();
  std::cout << out.string() << '\n';
  return kExitOk;
}

QTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read Q-table '" + path + "'");
  try {
    return QTable::load(in);
  } catch (const QTableFormatError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int cmd_eval(const CommonFlags& f) {
  Scenario s = load_scenario(f);
  const PolicyKind policy = s.run.policy;
  std::optional<QTable> table;
  if (policy == PolicyKind::QLEARNING) {
    if (f.qtable.empty()) throw ConfigError("eval --policy qlearning needs --qtable");
    table = load_table(f.qtable);
  }
  const std::vector<std::uint64_t> seeds = s.run.seeds.empty() ? std::vector{s.run.seed} : s.run.seeds;
  const fs::path out = f.out.empty() ? default_out("eval") : f.out;
  OutputGuard guard(out);
  prepare_output_dir(out);

  for (std::uint64_t seed : seeds) {
    const fs::path dir = seeds.size() > 1 ? out / ("s" + std::to_string(seed)) : out;
    Evaluation ev = evaluate_policy(s, policy, table ? &*table : nullptr, seed);
    write_run(dir, ev.metrics, run_config(s, policy, seed));
    std::cout << dir.string() << '\n';
  }
  guard.commit();
  return kExitOk;
}

int cmd_sweep(const CommonFlags& f) {
  Scenario s = load_scenario(f);
  const std::vector<std::uint64_t> seeds = s.run.seeds.empty() ? std::vector{s.run.seed} : s.run.seeds;
  const fs::path out = f.out.empty() ? default_out("sweep") : f.out;
  OutputGuard guard(out);
  SweepReport report = run_sweep(s, s.traffic.sweep_embb_ues, out, seeds, kAllPolicies, log_line);
  guard.commit();
  for (const SweepRun& r : report.runs) std::cout << r.dir.string() << '\n';
  return kExitOk;
}

int cmd_replay(const std::string& run_dir, const std::string& out) {
  nlohmann::json summary;
  try {
    summary = resummarize(run_dir);
  } catch (const MetricsFormatError& e) {
    throw ConfigError(e.what());
  }
  if (out.empty()) {
    std::cout << dump_summary(summary);
  } else {
    write_text(out, dump_summary(summary));
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_qtable, bool with_seeds) {
  cmd->add_option("--scenario", f.scenario, "scenario file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "base seed (run.seed)");
  cmd->add_option("--out", f.out, "output directory (default: $SIM_OUT_DIR or runs/<command>)");
  cmd->add_option("--episodes", f.episodes, "training episodes (run.episodes)");
  cmd->add_option("--policy", f.policy, "qlearning, balanced or embb_focus (run.policy)");
  if (with_qtable) cmd->add_option("--qtable", f.qtable, "Q-table snapshot written by train");
  if (with_seeds) cmd->add_option("--seeds", f.seeds, "comma-separated replication seeds (run.seeds)");
  cmd->add_option("--set", f.overrides, "override any scenario key, e.g. --set midhaul_capacity=500000");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-DU midhaul slicing simulator"};
  app.require_subcommand(1);

  CommonFlags train_flags;
  CommonFlags eval_flags;
  CommonFlags sweep_flags;
  std::string replay_dir;
  std::string replay_out;

  auto* train = app.add_subcommand("train", "train a Q-table and write its snapshot");
  add_common(train, train_flags, false, false);
  auto* eval = app.add_subcommand("eval", "evaluate a policy for one episode per seed");
  add_common(eval, eval_flags, true, true);
  auto* sweep = app.add_subcommand("sweep", "train and evaluate every policy over the eMBB UE counts");
  add_common(sweep, sweep_flags, false, true);
  auto* replay = app.add_subcommand("replay", "recompute summary.json from a run directory");
  replay->add_option("run_dir", replay_dir, "run directory")->required();
  replay->add_option("--out", replay_out, "write the summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_flags);
    if (*eval) return cmd_eval(eval_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*replay) return cmd_replay(replay_dir, replay_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
