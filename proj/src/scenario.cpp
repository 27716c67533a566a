#include "oran/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oran/baselines.hpp"
#include "oran/format.hpp"
#include "oran/mobility.hpp"

namespace oran {

namespace {

// clang-format off
constexpr auto kKeys = std::to_array<ScenarioKey>({
    {"deployment", "cells", "6", "edge cells (DUs) in the hexagonal ring"},
    {"deployment", "cell_radius", "300", "edge cell radius, m"},
    {"deployment", "umbrella_radius", "auto", "umbrella cell radius, m; auto covers the arena"},
    {"deployment", "midhaul_capacity", "1000000", "midhaul capacity per cell, MB/s"},
    {"deployment", "control_umbrella", "true", "whether the policy also drives the umbrella cell"},
    {"slices", "embb_initial_rate", "1000", "eMBB initial rate, MB/s"},
    {"slices", "urllc_initial_rate", "100", "URLLC initial rate, MB/s"},
    {"slices", "voice_initial_rate", "100", "Voice initial rate, MB/s"},
    {"slices", "embb_max_rate", "none", "eMBB max rate, MB/s (none = uncapped)"},
    {"slices", "urllc_max_rate", "5000", "URLLC max rate, MB/s"},
    {"slices", "voice_max_rate", "1000", "Voice max rate, MB/s"},
    {"slices", "floor_pct", "5", "bandwidth floor for every slice, %"},
    {"slices", "embb_floor_pct", "5", "eMBB bandwidth floor, %"},
    {"slices", "urllc_floor_pct", "5", "URLLC bandwidth floor, %"},
    {"slices", "voice_floor_pct", "5", "Voice bandwidth floor, %"},
    {"slices", "embb_request_gb", "100", "eMBB request size, GB"},
    {"slices", "urllc_request_gb", "2", "URLLC request size, GB"},
    {"slices", "voice_request_gb", "0.5", "Voice request size, GB"},
    {"slices", "initial_split", "policy", "starting eMBB/URLLC/Voice split, %; default is the baseline target or 40 30 30"},
    {"traffic", "profile", "mid", "mid (500 URLLC, 1000 Voice), high (1000, 500) or custom"},
    {"traffic", "embb_ues", "100", "eMBB UEs"},
    {"traffic", "urllc_ues", "profile", "URLLC UEs"},
    {"traffic", "voice_ues", "profile", "Voice UEs"},
    {"traffic", "turn_probability", "0.1", "per-second probability of a new heading"},
    {"traffic", "sweep_embb_ues", "100 200 300 400 500", "eMBB counts visited by sweep"},
    {"learning", "alpha", "0.1", "learning rate"},
    {"learning", "gamma", "0.9", "discount factor"},
    {"learning", "epsilon_start", "1.0", "initial exploration rate"},
    {"learning", "epsilon_min", "0.05", "exploration floor"},
    {"learning", "epsilon_decay", "0.99", "per-episode exploration decay"},
    {"learning", "w_p", "1", "positive reward weight"},
    {"learning", "w_n", "10", "floor-penalty weight"},
    {"learning", "s1", "1 0.25 0.25", "free-bandwidth-change scale per slice"},
    {"learning", "s2", "1 2 2", "throughput scale per slice"},
    {"learning", "s3", "1 0.25 0.25", "mean UE rate scale per slice"},
    {"run", "policy", "qlearning", "qlearning, balanced or embb_focus"},
    {"run", "episodes", "600", "training episodes"},
    {"run", "seed", "1", "base seed"},
    {"run", "seeds", "(seed)", "replication seeds for eval and sweep"},
    {"run", "train_seconds", "120", "seconds per training episode"},
    {"run", "eval_seconds", "120", "seconds per evaluation episode"},
    {"run", "name", "scenario", "scenario label"},
});
// clang-format on

std::span<const ScenarioKey> key_table() { return kKeys; }

const ScenarioKey* find_key(std::string_view key) {
  for (const ScenarioKey& k : key_table()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::vector<std::string> split_list(std::string_view v) {
  std::string cleaned(v);
  for (char& c : cleaned) {
    if (c == ',' || c == '[' || c == ']') c = ' ';
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) +
                    "': expected " + std::string(expected));
}

double as_double(std::string_view key, std::string_view value) {
  auto v = parse_number<double>(value);
  if (!v || !std::isfinite(*v)) bad_value(key, value, "a number");
  return *v;
}

template <class Int>
Int as_int(std::string_view key, std::string_view value) {
  auto v = parse_number<Int>(value);
  if (!v) bad_value(key, value, "an integer");
  return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  bad_value(key, value, "true or false");
}

PerSlice<double> as_triple(std::string_view key, std::string_view value) {
  const auto parts = split_list(value);
  if (parts.size() != kSliceCount) bad_value(key, value, "three numbers (eMBB URLLC Voice)");
  PerSlice<double> out{};
  for (std::size_t i = 0; i < kSliceCount; ++i) out[i] = as_double(key, parts[i]);
  return out;
}

SliceProfile& slice_for_prefix(Scenario& s, std::string_view key) {
  if (key.starts_with("embb_")) return at(s.slices, SliceKind::EMBB);
  if (key.starts_with("urllc_")) return at(s.slices, SliceKind::URLLC);
  return at(s.slices, SliceKind::VOICE);
}

std::string split_text(const PerSlice<int>& v) {
  return std::to_string(v[0]) + " " + std::to_string(v[1]) + " " + std::to_string(v[2]);
}

}  // namespace

std::string_view to_string(TrafficProfile p) {
  switch (p) {
    case TrafficProfile::MID:
      return "mid";
    case TrafficProfile::HIGH:
      return "high";
    case TrafficProfile::CUSTOM:
      return "custom";
  }
  return "?";
}

std::span<const ScenarioKey> scenario_keys() { return key_table(); }

PerSlice<int> Scenario::starting_split(PolicyKind policy) const {
  if (initial_split) return *initial_split;
  if (policy == PolicyKind::EMBB_FOCUS) return kEmbbFocusSplit;
  return kBalancedSplit;
}

PerSlice<int> Scenario::floors() const {
  PerSlice<int> f{};
  for (std::size_t k = 0; k < kSliceCount; ++k) f[k] = slices[k].bandwidth_floor_pct;
  return f;
}

void apply_profile(TrafficParams& traffic, TrafficProfile profile) {
  traffic.profile = profile;
  if (profile == TrafficProfile::MID) {
    traffic.urllc_ues = 500;
    traffic.voice_ues = 1000;
  } else if (profile == TrafficProfile::HIGH) {
    traffic.urllc_ues = 1000;
    traffic.voice_ues = 500;
  }
}

Scenario named_scenario(TrafficProfile profile, int embb_ues, PolicyKind policy) {
  Scenario s;
  apply_profile(s.traffic, profile);
  s.traffic.embb_ues = embb_ues;
  s.run.policy = policy;
  s.name = std::string(to_string(profile)) + "_" + std::to_string(embb_ues);
  return s;
}

void set_scenario_value(Scenario& s, std::string_view key, std::string_view raw) {
  const std::string value = unquote(trim(raw));
  if (!find_key(key)) throw ConfigError("unknown key '" + std::string(key) + "'");

  if (key == "cells") {
    s.deployment.cells = as_int<int>(key, value);
  } else if (key == "cell_radius") {
    s.deployment.cell_radius = as_double(key, value);
  } else if (key == "umbrella_radius") {
    s.deployment.umbrella_radius = value == "auto" ? 0.0 : as_double(key, value);
  } else if (key == "midhaul_capacity") {
    s.deployment.midhaul_capacity = as_double(key, value);
  } else if (key == "control_umbrella") {
    s.deployment.control_umbrella = as_bool(key, value);
  } else if (key.ends_with("_initial_rate")) {
    slice_for_prefix(s, key).initial_rate = as_double(key, value);
  } else if (key.ends_with("_max_rate")) {
    auto& p = slice_for_prefix(s, key);
    if (value == "none" || value == "n/a" || value == "inf") {
      p.max_rate.reset();
    } else {
      p.max_rate = as_double(key, value);
    }
  } else if (key == "floor_pct") {
    const int f = as_int<int>(key, value);
    for (auto& p : s.slices) p.bandwidth_floor_pct = f;
  } else if (key.ends_with("_floor_pct")) {
    slice_for_prefix(s, key).bandwidth_floor_pct = as_int<int>(key, value);
  } else if (key.ends_with("_request_gb")) {
    slice_for_prefix(s, key).request_gb = as_double(key, value);
  } else if (key == "initial_split") {
    const auto parts = split_list(value);
    if (parts.size() != kSliceCount) bad_value(key, value, "three percentages (eMBB URLLC Voice)");
    PerSlice<int> split{};
    for (std::size_t i = 0; i < kSliceCount; ++i) split[i] = as_int<int>(key, parts[i]);
    s.initial_split = split;
  } else if (key == "profile") {
    if (value == "mid") {
      apply_profile(s.traffic, TrafficProfile::MID);
    } else if (value == "high") {
      apply_profile(s.traffic, TrafficProfile::HIGH);
    } else if (value == "custom") {
      s.traffic.profile = TrafficProfile::CUSTOM;
    } else {
      bad_value(key, value, "mid, high or custom");
    }
  } else if (key == "embb_ues") {
    s.traffic.embb_ues = as_int<int>(key, value);
  } else if (key == "urllc_ues" || key == "voice_ues") {
    int& target = key == "urllc_ues" ? s.traffic.urllc_ues : s.traffic.voice_ues;
    const int v = as_int<int>(key, value);
    if (v != target) s.traffic.profile = TrafficProfile::CUSTOM;
    target = v;
  } else if (key == "turn_probability") {
    s.traffic.turn_probability = as_double(key, value);
  } else if (key == "sweep_embb_ues") {
    s.traffic.sweep_embb_ues.clear();
    for (const auto& part : split_list(value)) s.traffic.sweep_embb_ues.push_back(as_int<int>(key, part));
  } else if (key == "alpha") {
    s.learning.alpha = as_double(key, value);
  } else if (key == "gamma") {
    s.learning.gamma = as_double(key, value);
  } else if (key == "epsilon_start") {
    s.learning.epsilon_start = as_double(key, value);
  } else if (key == "epsilon_min") {
    s.learning.epsilon_min = as_double(key, value);
  } else if (key == "epsilon_decay") {
    s.learning.epsilon_decay = as_double(key, value);
  } else if (key == "w_p") {
    s.reward.w_p = as_double(key, value);
  } else if (key == "w_n") {
    s.reward.w_n = as_double(key, value);
  } else if (key == "s1") {
    s.reward.s1 = as_triple(key, value);
  } else if (key == "s2") {
    s.reward.s2 = as_triple(key, value);
  } else if (key == "s3") {
    s.reward.s3 = as_triple(key, value);
  } else if (key == "policy") {
    auto p = policy_from_string(value);
    if (!p) bad_value(key, value, "qlearning, balanced or embb_focus");
    s.run.policy = *p;
  } else if (key == "episodes") {
    s.run.episodes = as_int<std::size_t>(key, value);
  } else if (key == "train_seconds") {
    s.run.train_seconds = as_int<int>(key, value);
  } else if (key == "eval_seconds") {
    s.run.eval_seconds = as_int<int>(key, value);
  } else if (key == "seed") {
    s.run.seed = as_int<std::uint64_t>(key, value);
  } else if (key == "seeds") {
    s.run.seeds.clear();
    for (const auto& part : split_list(value)) s.run.seeds.push_back(as_int<std::uint64_t>(key, part));
  } else if (key == "name") {
    s.name = value;
  }
}

Scenario parse_scenario_text(std::string_view text, std::string_view origin) {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::string section;
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const bool known = std::any_of(key_table().begin(), key_table().end(),
                                     [&](const ScenarioKey& k) { return k.section == section; });
      if (!known) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const ScenarioKey* known = find_key(key);
    if (!known) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!section.empty() && known->section != section) {
      throw ConfigError(where + ": key '" + key + "' belongs in [" + std::string(known->section) +
                        "], not [" + section + "]");
    }
    entries.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
  }

  Scenario s;
  // The profile sets URLLC/Voice counts, so it is applied before explicit counts.
  std::optional<TrafficProfile> named;
  for (const Entry& e : entries) {
    if (e.key != "profile") continue;
    set_scenario_value(s, e.key, e.value);
    if (s.traffic.profile != TrafficProfile::CUSTOM) named = s.traffic.profile;
  }
  for (const Entry& e : entries) {
    if (e.key == "profile") continue;
    try {
      set_scenario_value(s, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  if (named && s.traffic.profile == TrafficProfile::CUSTOM) {
    throw ConfigError(std::string(origin) + ": explicit URLLC/Voice counts contradict profile '" +
                      std::string(to_string(*named)) +
                      "' (mid = 500/1000, high = 1000/500); use profile = custom");
  }
  validate(s);
  return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& msg) { throw ConfigError("invalid scenario: " + msg); };

  const DeploymentParams& d = s.deployment;
  if (d.cells < 1) fail("cells must be >= 1");
  if (!(d.cell_radius > 0.0)) fail("cell_radius must be > 0");
  if (!(d.midhaul_capacity > 0.0)) fail("midhaul_capacity must be > 0");
  if (d.umbrella_radius > 0.0 && d.umbrella_radius < hex_ring_distance(d.cell_radius) + d.cell_radius) {
    fail("umbrella_radius must be >= ring distance + cell_radius so the umbrella covers the ring");
  }

  for (const SliceProfile& p : s.slices) {
    if (auto v = p.violation()) fail(std::string(to_string(p.kind)) + ": " + std::string(*v));
  }

  if (s.initial_split) {
    const PerSlice<int>& split = *s.initial_split;
    int sum = 0;
    for (int pct : split) {
      if (pct < 0 || pct > 100 || pct % kActionStepPct != 0) {
        fail("initial_split entries must be multiples of 5 in [0, 100], got " + split_text(split));
      }
      sum += pct;
    }
    if (sum != 100) fail("initial_split must sum to 100, got " + split_text(split));
  }

  const TrafficParams& t = s.traffic;
  if (t.embb_ues < 0 || t.urllc_ues < 0 || t.voice_ues < 0) fail("UE counts must be >= 0");
  if (!(t.turn_probability >= 0.0 && t.turn_probability <= 1.0)) fail("turn_probability must lie in [0, 1]");
  if (t.sweep_embb_ues.empty()) fail("sweep_embb_ues must not be empty");
  for (int n : t.sweep_embb_ues) {
    if (n < 0) fail("sweep_embb_ues entries must be >= 0");
  }
  if (t.profile == TrafficProfile::MID && (t.urllc_ues != 500 || t.voice_ues != 1000)) {
    fail("profile mid requires 500 URLLC and 1000 Voice UEs");
  }
  if (t.profile == TrafficProfile::HIGH && (t.urllc_ues != 1000 || t.voice_ues != 500)) {
    fail("profile high requires 1000 URLLC and 500 Voice UEs");
  }

  const LearningParams& l = s.learning;
  if (!(l.alpha > 0.0 && l.alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (!(l.gamma >= 0.0 && l.gamma < 1.0)) fail("gamma must lie in [0, 1)");
  if (!(l.epsilon_start >= 0.0 && l.epsilon_start <= 1.0)) fail("epsilon_start must lie in [0, 1]");
  if (!(l.epsilon_min >= 0.0 && l.epsilon_min <= l.epsilon_start)) {
    fail("epsilon_min must lie in [0, epsilon_start]");
  }
  if (!(l.epsilon_decay > 0.0 && l.epsilon_decay <= 1.0)) fail("epsilon_decay must lie in (0, 1]");

  const RewardWeights& w = s.reward;
  for (const auto* scale : {&w.s1, &w.s2, &w.s3}) {
    for (double v : *scale) {
      if (!(v >= 0.0)) fail("reward scale factors must be >= 0");
    }
  }
  if (!(w.w_p >= 0.0) || !(w.w_n >= 0.0)) fail("reward weights must be >= 0");

  if (s.run.train_seconds < 1) fail("train_seconds must be >= 1");
  if (s.run.eval_seconds < 1) fail("eval_seconds must be >= 1");
}

nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  auto triple = [](const PerSlice<double>& v) { return json::array({v[0], v[1], v[2]}); };

  json slices = json::object();
  for (const SliceProfile& p : s.slices) {
    slices[std::string(to_string(p.kind))] = {
        {"initial_rate", p.initial_rate},
        {"max_rate", p.max_rate ? json(*p.max_rate) : json(nullptr)},
        {"floor_pct", p.bandwidth_floor_pct},
        {"request_gb", p.request_gb},
    };
  }
  const PerSlice<int> split = s.starting_split(s.run.policy);

  return json{
      {"name", s.name},
      {"deployment",
       {{"cells", s.deployment.cells},
        {"cell_radius", s.deployment.cell_radius},
        {"umbrella_radius", s.deployment.umbrella_radius > 0.0
                                ? s.deployment.umbrella_radius
                                : covering_umbrella_radius(s.deployment.cell_radius)},
        {"midhaul_capacity", s.deployment.midhaul_capacity},
        {"control_umbrella", s.deployment.control_umbrella}}},
      {"slices", slices},
      {"initial_split", json::array({split[0], split[1], split[2]})},
      {"traffic",
       {{"profile", std::string(to_string(s.traffic.profile))},
        {"embb_ues", s.traffic.embb_ues},
        {"urllc_ues", s.traffic.urllc_ues},
        {"voice_ues", s.traffic.voice_ues},
        {"turn_probability", s.traffic.turn_probability},
        {"sweep_embb_ues", s.traffic.sweep_embb_ues}}},
      {"learning",
       {{"alpha", s.learning.alpha},
        {"gamma", s.learning.gamma},
        {"epsilon_start", s.learning.epsilon_start},
        {"epsilon_min", s.learning.epsilon_min},
        {"epsilon_decay", s.learning.epsilon_decay},
        {"w_p", s.reward.w_p},
        {"w_n", s.reward.w_n},
        {"s1", triple(s.reward.s1)},
        {"s2", triple(s.reward.s2)},
        {"s3", triple(s.reward.s3)}}},
      {"run",
       {{"policy", std::string(to_string(s.run.policy))},
        {"episodes", s.run.episodes},
        {"train_seconds", s.run.train_seconds},
        {"eval_seconds", s.run.eval_seconds},
        {"seed", s.run.seed},
        {"seeds", s.run.seeds}}},
  };
}

}  // namespace oran
