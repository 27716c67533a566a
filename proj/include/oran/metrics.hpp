#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "oran/domain.hpp"
#include "oran/engine.hpp"

namespace oran {

struct CompletionRow {
  UeId ue = 0;
  SliceKind slice = SliceKind::EMBB;
  double start_s = 0.0;
  std::optional<double> finish_s;  // empty: still in flight at episode end

  friend bool operator==(const CompletionRow&, const CompletionRow&) = default;
};

/// Everything a run persists; the summary is a pure function of it.
struct MetricsRecord {
  std::vector<CellSecondRow> cells;
  std::vector<CompletionRow> completions;
  std::vector<EpisodeRecord> episodes;

  friend bool operator==(const MetricsRecord&, const MetricsRecord&) = default;
};

/// Completed requests of every UE followed by its unfinished one, if that
/// request started before `horizon_s`. Ordered by UE id.
std::vector<CompletionRow> completion_rows(std::span<const UeState> ues, double horizon_s);

class MetricsFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV: header row, comma separated, LF line endings, shortest round-trip
// number formatting.
void write_cells_csv(std::ostream& out, std::span<const CellSecondRow> rows);
void write_completions_csv(std::ostream& out, std::span<const CompletionRow> rows);
void write_episodes_csv(std::ostream& out, std::span<const EpisodeRecord> rows);
std::vector<CellSecondRow> read_cells_csv(std::istream& in);
std::vector<CompletionRow> read_completions_csv(std::istream& in);
std::vector<EpisodeRecord> read_episodes_csv(std::istream& in);

void write_metrics(const std::filesystem::path& dir, const MetricsRecord& m);
MetricsRecord read_metrics(const std::filesystem::path& dir);

/// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Quantile of a multiset given as (value, multiplicity) pairs.
double weighted_quantile(std::vector<std::pair<double, std::size_t>> values, double q);

/// Time mean over seconds of Σ throughput / Σ capacity, in percent. Slice
/// capacity is recovered per row as throughput + free bandwidth.
double summarize_utilization(const MetricsRecord& m);

/// Share of cell-seconds in which some slice is below (strict) or at-or-below
/// its floor.
struct FloorFractions {
  double below = 0.0;
  double at_or_below = 0.0;
};
FloorFractions floor_fractions(const MetricsRecord& m, const PerSlice<int>& floors);

/// Aggregate report written to summary.json. `config` is echoed verbatim
/// and supplies the slice floors.
nlohmann::json summarize(const MetricsRecord& m, const nlohmann::json& config);

std::string dump_summary(const nlohmann::json& summary);

}  // namespace oran
