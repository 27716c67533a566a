#include "oran/domain.hpp"

#include <cmath>
#include <numeric>

#include "oran/rng.hpp"

namespace oran {

std::string_view to_string(SliceKind k) {
  switch (k) {
    case SliceKind::EMBB:
      return "embb";
    case SliceKind::URLLC:
      return "urllc";
    case SliceKind::VOICE:
      return "voice";
  }
  return "?";
}

std::optional<SliceKind> slice_from_string(std::string_view name) {
  for (SliceKind k : kAllSlices) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double distance_squared(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Vec2 a, Vec2 b) { return std::sqrt(distance_squared(a, b)); }

std::optional<std::string_view> SliceProfile::violation() const {
  if (!(initial_rate > 0.0)) return "initial_rate must be > 0";
  if (max_rate && !(*max_rate >= initial_rate)) return "max_rate must be >= initial_rate";
  if (bandwidth_floor_pct < 0 || bandwidth_floor_pct * static_cast<int>(kSliceCount) > 100) {
    return "bandwidth floor must lie in [0, 100/K]";
  }
  if (!(request_gb > 0.0)) return "request size must be > 0";
  return std::nullopt;
}

double SliceProfile::cap() const { return max_rate ? *max_rate : INFINITY; }

SliceProfiles default_slice_profiles() {
  SliceProfiles p;
  p[0] = SliceProfile{SliceKind::EMBB, 1000.0, std::nullopt, 5, 100.0};
  p[1] = SliceProfile{SliceKind::URLLC, 100.0, 5000.0, 5, 2.0};
  p[2] = SliceProfile{SliceKind::VOICE, 100.0, 1000.0, 5, 0.5};
  return p;
}

SpeedInterval speed_interval(MovementKind kind) {
  switch (kind) {
    case MovementKind::STATIONARY:
      return {0.0, 0.0};
    case MovementKind::PEDESTRIAN:
      return {0.0, kmh_to_mps(10.0)};
    case MovementKind::VEHICULAR:
      return {kmh_to_mps(10.0), kmh_to_mps(120.0)};
  }
  return {0.0, 0.0};
}

std::string_view to_string(MovementKind kind) {
  switch (kind) {
    case MovementKind::STATIONARY:
      return "stationary";
    case MovementKind::PEDESTRIAN:
      return "pedestrian";
    case MovementKind::VEHICULAR:
      return "vehicular";
  }
  return "?";
}

double speed_from_unit(MovementKind kind, double u) {
  const SpeedInterval iv = speed_interval(kind);
  return iv.min_mps + (iv.max_mps - iv.min_mps) * u;
}

double movement_speed_sample(MovementKind kind, Rng& rng) {
  if (kind == MovementKind::STATIONARY) return 0.0;
  return speed_from_unit(kind, rng.uniform01());
}

bool CellState::split_valid() const {
  for (int pct : bandwidth_pct) {
    if (pct < 0 || pct > 100) return false;
  }
  return std::accumulate(bandwidth_pct.begin(), bandwidth_pct.end(), 0) == 100;
}

}  // namespace oran
