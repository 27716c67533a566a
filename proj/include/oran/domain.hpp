#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace oran {

class Rng;

inline constexpr std::size_t kSliceCount = 3;

/// Service classes sharing one midhaul link. Declaration order is the
/// canonical iteration order (EMBB < URLLC < VOICE).
enum class SliceKind : std::uint8_t { EMBB = 0, URLLC = 1, VOICE = 2 };

inline constexpr std::array<SliceKind, kSliceCount> kAllSlices{
    SliceKind::EMBB, SliceKind::URLLC, SliceKind::VOICE};

constexpr std::size_t index_of(SliceKind k) { return static_cast<std::size_t>(k); }

std::string_view to_string(SliceKind k);
std::optional<SliceKind> slice_from_string(std::string_view name);

template <class T>
using PerSlice = std::array<T, kSliceCount>;

template <class T>
constexpr T& at(PerSlice<T>& values, SliceKind k) {
  return values[index_of(k)];
}
template <class T>
constexpr const T& at(const PerSlice<T>& values, SliceKind k) {
  return values[index_of(k)];
}

using UeId = std::uint32_t;
using CellId = std::uint32_t;

/// Rates are MB/s and data volumes GB, decimal (1 GB = 1000 MB).
inline constexpr double kMbPerGb = 1000.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance_squared(Vec2 a, Vec2 b);
double distance(Vec2 a, Vec2 b);

struct SliceProfile {
  SliceKind kind = SliceKind::EMBB;
  double initial_rate = 0.0;          // MB/s
  std::optional<double> max_rate;     // MB/s, nullopt = uncapped
  int bandwidth_floor_pct = 5;
  double request_gb = 1.0;            // y_i for UEs of this slice

  /// Empty when valid, otherwise a message naming the violated invariant.
  std::optional<std::string_view> violation() const;
  double cap() const;
};

using SliceProfiles = PerSlice<SliceProfile>;

/// Defaults from the environment parameter table: eMBB 1 GB/s uncapped,
/// URLLC 100 MB/s up to 5 GB/s, Voice 100 MB/s up to 1 GB/s.
SliceProfiles default_slice_profiles();

enum class MovementKind : std::uint8_t { STATIONARY = 0, PEDESTRIAN = 1, VEHICULAR = 2 };

inline constexpr std::size_t kMovementKindCount = 3;

struct SpeedInterval {
  double min_mps;
  double max_mps;
};

constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

SpeedInterval speed_interval(MovementKind kind);
std::string_view to_string(MovementKind kind);

/// Maps u in [0, 1] linearly onto the kind's speed interval.
double speed_from_unit(MovementKind kind, double u);

/// Uniform draw from the kind's speed interval. STATIONARY consumes no draws.
double movement_speed_sample(MovementKind kind, Rng& rng);

struct CompletedRequest {
  double start_s = 0.0;
  double finish_s = 0.0;

  friend bool operator==(const CompletedRequest&, const CompletedRequest&) = default;
};

struct UeState {
  UeId id = 0;
  SliceKind slice = SliceKind::EMBB;
  MovementKind movement = MovementKind::STATIONARY;
  double speed = 0.0;    // m/s, fixed at creation
  double heading = 0.0;  // radians
  Vec2 position;
  std::optional<CellId> attached_cell;
  double request_total = 0.0;      // GB
  double request_remaining = 0.0;  // GB
  double request_start_s = 0.0;
  double current_rate = 0.0;  // MB/s
  double delivered_gb = 0.0;  // lifetime, used by the conservation audit
  std::uint32_t requests_issued = 0;
  std::vector<CompletedRequest> completion_log;
};

struct CellStats {
  PerSlice<double> throughput{};    // MB/s
  PerSlice<double> free_bw{};       // MB/s
  PerSlice<double> prev_free_bw{};  // MB/s, previous second
  PerSlice<double> mean_ue_rate{};  // MB/s, 0 when the slice is empty
};

struct CellState {
  CellId id = 0;
  Vec2 center;
  double radius = 0.0;
  double midhaul_capacity = 0.0;  // MB/s
  PerSlice<int> bandwidth_pct{};
  PerSlice<std::vector<UeId>> attached;
  PerSlice<int> user_counts{};
  CellStats stats;

  double slice_capacity(SliceKind k) const {
    return static_cast<double>(at(bandwidth_pct, k)) / 100.0 * midhaul_capacity;
  }
  bool split_valid() const;
};

inline constexpr int kActionStepPct = 5;
inline constexpr int kMaxActionPct = 10;

struct ActionVector {
  PerSlice<int> deltas{};

  int sum() const { return deltas[0] + deltas[1] + deltas[2]; }
  bool is_zero() const { return deltas[0] == 0 && deltas[1] == 0 && deltas[2] == 0; }

  friend bool operator==(const ActionVector&, const ActionVector&) = default;
};

/// Builds the action determined by the eMBB and URLLC deltas; voice takes
/// the balancing delta.
constexpr ActionVector make_action(int embb, int urllc) {
  return ActionVector{{embb, urllc, -(embb + urllc)}};
}

}  // namespace oran
