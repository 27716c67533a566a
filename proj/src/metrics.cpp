#include "oran/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "oran/format.hpp"

namespace oran {

namespace {

constexpr const char* kCellsHeader =
    "t,cell_id,slice,allocated_pct,throughput_mbps,free_mbps,user_count,mean_ue_rate_mbps";
constexpr const char* kCompletionsHeader = "ue_id,slice,start_s,finish_s";
constexpr const char* kEpisodesHeader = "episode,cumulative_reward,epsilon";

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

template <class RowFn>
void read_csv(std::istream& in, const char* header, std::size_t columns, RowFn&& on_row) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw MetricsFormatError(std::string("expected CSV header '") + header + "'");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != columns) {
      throw MetricsFormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                               " fields, got " + std::to_string(fields.size()));
    }
    on_row(fields, line_no);
  }
}

template <class T>
T field_as(const std::string& text, std::size_t line_no) {
  auto v = parse_number<T>(text);
  if (!v) throw MetricsFormatError("line " + std::to_string(line_no) + ": bad number '" + text + "'");
  return *v;
}

SliceKind slice_field(const std::string& text, std::size_t line_no) {
  auto k = slice_from_string(text);
  if (!k) throw MetricsFormatError("line " + std::to_string(line_no) + ": unknown slice '" + text + "'");
  return *k;
}

nlohmann::json distribution(std::vector<double> values) {
  if (values.empty()) return {{"count", 0}};
  std::sort(values.begin(), values.end());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  return {
      {"count", values.size()},
      {"mean", mean},
      {"min", values.front()},
      {"p25", quantile(values, 0.25)},
      {"median", quantile(values, 0.5)},
      {"p75", quantile(values, 0.75)},
      {"p95", quantile(values, 0.95)},
      {"max", values.back()},
  };
}

PerSlice<int> floors_from_config(const nlohmann::json& config) {
  PerSlice<int> floors{5, 5, 5};
  if (!config.contains("slices")) return floors;
  for (SliceKind k : kAllSlices) {
    const auto& slices = config["slices"];
    const std::string name(to_string(k));
    if (slices.contains(name) && slices[name].contains("floor_pct")) {
      at(floors, k) = slices[name]["floor_pct"].get<int>();
    }
  }
  return floors;
}

}  // namespace

std::vector<CompletionRow> completion_rows(std::span<const UeState> ues, double horizon_s) {
  std::vector<CompletionRow> rows;
  for (const UeState& ue : ues) {
    for (const CompletedRequest& c : ue.completion_log) rows.push_back({ue.id, ue.slice, c.start_s, c.finish_s});
    if (ue.request_start_s < horizon_s) rows.push_back({ue.id, ue.slice, ue.request_start_s, std::nullopt});
  }
  return rows;
}

void write_cells_csv(std::ostream& out, std::span<const CellSecondRow> rows) {
  out << kCellsHeader << '\n';
  for (const CellSecondRow& r : rows) {
    out << r.t << ',' << r.cell << ',' << to_string(r.slice) << ',' << r.allocated_pct << ','
        << format_double(r.throughput) << ',' << format_double(r.free_bw) << ',' << r.users << ','
        << format_double(r.mean_rate) << '\n';
  }
}

void write_completions_csv(std::ostream& out, std::span<const CompletionRow> rows) {
  out << kCompletionsHeader << '\n';
  for (const CompletionRow& r : rows) {
    out << r.ue << ',' << to_string(r.slice) << ',' << format_double(r.start_s) << ','
        << (r.finish_s ? format_double(*r.finish_s) : std::string()) << '\n';
  }
}

void write_episodes_csv(std::ostream& out, std::span<const EpisodeRecord> rows) {
  out << kEpisodesHeader << '\n';
  for (const EpisodeRecord& r : rows) {
    out << r.episode << ',' << format_double(r.cumulative_reward) << ',' << format_double(r.epsilon) << '\n';
  }
}

std::vector<CellSecondRow> read_cells_csv(std::istream& in) {
  std::vector<CellSecondRow> rows;
  read_csv(in, kCellsHeader, 8, [&](const std::vector<std::string>& f, std::size_t n) {
    rows.push_back({field_as<int>(f[0], n), field_as<CellId>(f[1], n), slice_field(f[2], n),
                    field_as<int>(f[3], n), field_as<double>(f[4], n), field_as<double>(f[5], n),
                    field_as<int>(f[6], n), field_as<double>(f[7], n)});
  });
  return rows;
}

std::vector<CompletionRow> read_completions_csv(std::istream& in) {
  std::vector<CompletionRow> rows;
  read_csv(in, kCompletionsHeader, 4, [&](const std::vector<std::string>& f, std::size_t n) {
    CompletionRow r{field_as<UeId>(f[0], n), slice_field(f[1], n), field_as<double>(f[2], n), std::nullopt};
    if (!f[3].empty()) r.finish_s = field_as<double>(f[3], n);
    rows.push_back(r);
  });
  return rows;
}

std::vector<EpisodeRecord> read_episodes_csv(std::istream& in) {
  std::vector<EpisodeRecord> rows;
  read_csv(in, kEpisodesHeader, 3, [&](const std::vector<std::string>& f, std::size_t n) {
    rows.push_back({field_as<std::size_t>(f[0], n), field_as<double>(f[1], n), field_as<double>(f[2], n)});
  });
  return rows;
}

void write_metrics(const std::filesystem::path& dir, const MetricsRecord& m) {
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("cells.csv");
    write_cells_csv(out, m.cells);
  }
  {
    auto out = open("completions.csv");
    write_completions_csv(out, m.completions);
  }
  {
    auto out = open("episodes.csv");
    write_episodes_csv(out, m.episodes);
  }
}

MetricsRecord read_metrics(const std::filesystem::path& dir) {
  auto open = [&](const char* name) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw MetricsFormatError("cannot read " + (dir / name).string());
    return in;
  };
  MetricsRecord m;
  try {
    auto cells = open("cells.csv");
    m.cells = read_cells_csv(cells);
    auto completions = open("completions.csv");
    m.completions = read_completions_csv(completions);
    auto episodes = open("episodes.csv");
    m.episodes = read_episodes_csv(episodes);
  } catch (const MetricsFormatError& e) {
    throw MetricsFormatError(dir.string() + ": " + e.what());
  }
  return m;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return NAN;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

double weighted_quantile(std::vector<std::pair<double, std::size_t>> values, double q) {
  std::erase_if(values, [](const auto& v) { return v.second == 0; });
  if (values.empty()) return NAN;
  std::sort(values.begin(), values.end());
  std::size_t total = 0;
  for (const auto& v : values) total += v.second;

  // Element at rank r (0-based) of the expanded, sorted multiset.
  auto element = [&](std::size_t rank) {
    std::size_t seen = 0;
    for (const auto& [value, count] : values) {
      seen += count;
      if (rank < seen) return value;
    }
    return values.back().first;
  };
  const double pos = q * static_cast<double>(total - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, total - 1);
  const double a = element(lo);
  const double b = element(hi);
  return a + (b - a) * (pos - static_cast<double>(lo));
}

double summarize_utilization(const MetricsRecord& m) {
  std::map<int, std::pair<double, double>> per_second;  // t -> (used, capacity)
  for (const CellSecondRow& r : m.cells) {
    auto& [used, capacity] = per_second[r.t];
    used += r.throughput;
    capacity += r.throughput + r.free_bw;
  }
  if (per_second.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [t, uc] : per_second) sum += uc.second > 0.0 ? uc.first / uc.second : 0.0;
  return 100.0 * sum / static_cast<double>(per_second.size());
}

FloorFractions floor_fractions(const MetricsRecord& m, const PerSlice<int>& floors) {
  struct Flags {
    bool below = false;
    bool at_or_below = false;
  };
  std::map<std::pair<int, CellId>, Flags> cell_seconds;
  for (const CellSecondRow& r : m.cells) {
    Flags& f = cell_seconds[{r.t, r.cell}];
    f.below = f.below || r.allocated_pct < at(floors, r.slice);
    f.at_or_below = f.at_or_below || r.allocated_pct <= at(floors, r.slice);
  }
  FloorFractions out;
  if (cell_seconds.empty()) return out;
  for (const auto& [key, f] : cell_seconds) {
    out.below += f.below ? 1.0 : 0.0;
    out.at_or_below += f.at_or_below ? 1.0 : 0.0;
  }
  out.below /= static_cast<double>(cell_seconds.size());
  out.at_or_below /= static_cast<double>(cell_seconds.size());
  return out;
}

nlohmann::json summarize(const MetricsRecord& m, const nlohmann::json& config) {
  using nlohmann::json;

  std::map<int, int> seconds;
  std::map<CellId, int> cells;
  PerSlice<double> pct_sum{};
  PerSlice<double> throughput_sum{};
  PerSlice<std::size_t> pct_rows{};
  std::vector<std::pair<double, std::size_t>> embb_rates;
  for (const CellSecondRow& r : m.cells) {
    seconds[r.t] = 1;
    cells[r.cell] = 1;
    at(pct_sum, r.slice) += r.allocated_pct;
    at(throughput_sum, r.slice) += r.throughput;
    ++at(pct_rows, r.slice);
    if (r.slice == SliceKind::EMBB) embb_rates.emplace_back(r.mean_rate, static_cast<std::size_t>(r.users));
  }

  json allocated = json::object();
  json throughput = json::object();
  for (SliceKind k : kAllSlices) {
    const std::string name(to_string(k));
    allocated[name] = at(pct_rows, k) ? at(pct_sum, k) / static_cast<double>(at(pct_rows, k)) : 0.0;
    throughput[name] = seconds.empty() ? 0.0 : at(throughput_sum, k) / static_cast<double>(seconds.size());
  }

  json embb = {{"samples", 0}};
  if (!embb_rates.empty()) {
    std::size_t samples = 0;
    double total = 0.0;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& [rate, n] : embb_rates) {
      if (n == 0) continue;
      samples += n;
      total += rate * static_cast<double>(n);
      lo = std::min(lo, rate);
      hi = std::max(hi, rate);
    }
    if (samples > 0) {
      embb = {
          {"samples", samples},
          {"mean", total / static_cast<double>(samples)},
          {"min", lo},
          {"p25", weighted_quantile(embb_rates, 0.25)},
          {"median", weighted_quantile(embb_rates, 0.5)},
          {"p75", weighted_quantile(embb_rates, 0.75)},
          {"p95", weighted_quantile(embb_rates, 0.95)},
          {"max", hi},
      };
    }
  }

  json ttf = json::object();
  for (SliceKind k : kAllSlices) {
    std::vector<double> durations;
    std::size_t in_flight = 0;
    for (const CompletionRow& c : m.completions) {
      if (c.slice != k) continue;
      if (c.finish_s) {
        durations.push_back(*c.finish_s - c.start_s);
      } else {
        ++in_flight;
      }
    }
    json d = distribution(std::move(durations));
    d["in_flight"] = in_flight;
    ttf[std::string(to_string(k))] = d;
  }

  const PerSlice<int> floors = floors_from_config(config);
  const FloorFractions ff = floor_fractions(m, floors);

  json episodes = {{"count", m.episodes.size()}};
  if (!m.episodes.empty()) {
    double best = -INFINITY;
    for (const EpisodeRecord& e : m.episodes) best = std::max(best, e.cumulative_reward);
    episodes["last_cumulative_reward"] = m.episodes.back().cumulative_reward;
    episodes["max_cumulative_reward"] = best;
    episodes["last_epsilon"] = m.episodes.back().epsilon;
  }

  return json{
      {"config", config},
      {"seconds", seconds.size()},
      {"cells", cells.size()},
      {"utilization_pct", summarize_utilization(m)},
      {"mean_allocated_pct", allocated},
      {"mean_throughput_mbps", throughput},
      {"embb_rate_mbps", embb},
      {"time_to_finish_s", ttf},
      {"floor",
       {{"floor_pct", json::array({floors[0], floors[1], floors[2]})},
        {"below_floor_fraction", ff.below},
        {"at_or_below_floor_fraction", ff.at_or_below}}},
      {"episodes", episodes},
  };
}

std::string dump_summary(const nlohmann::json& summary) { return summary.dump(2) + "\n"; }

}  // namespace oran
