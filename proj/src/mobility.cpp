#include "oran/mobility.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "oran/rng.hpp"

namespace oran {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

double ordered_sum(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

}  // namespace

double hex_ring_distance(double cell_radius) {
  return 2.0 * cell_radius * std::cos(std::numbers::pi / 6.0);
}

double covering_umbrella_radius(double cell_radius) {
  const double half_side = hex_ring_distance(cell_radius) + cell_radius;
  return half_side * std::numbers::sqrt2;
}

Deployment build_deployment(int j_count, double cell_radius, double umbrella_radius,
                            double midhaul_capacity) {
  if (j_count < 1) throw DeploymentError("deployment needs at least one edge cell");
  if (!(cell_radius > 0.0)) throw DeploymentError("cell radius must be > 0");
  if (!(midhaul_capacity > 0.0)) throw DeploymentError("midhaul capacity must be > 0");

  Deployment d;
  d.ring_distance = hex_ring_distance(cell_radius);
  const double half_side = d.ring_distance + cell_radius;
  if (umbrella_radius <= 0.0) umbrella_radius = covering_umbrella_radius(cell_radius);
  if (umbrella_radius < half_side) {
    throw DeploymentError("umbrella radius " + std::to_string(umbrella_radius) +
                          " is smaller than ring extent + cell radius " +
                          std::to_string(half_side));
  }
  d.arena = Arena{-half_side, half_side, -half_side, half_side};

  d.cells.reserve(static_cast<std::size_t>(j_count) + 1);
  CellState umbrella;
  umbrella.id = kUmbrellaCellId;
  umbrella.radius = umbrella_radius;
  umbrella.midhaul_capacity = midhaul_capacity;
  d.cells.push_back(std::move(umbrella));

  for (int n = 0; n < j_count; ++n) {
    const double angle = kTwoPi * n / j_count;
    CellState c;
    c.id = static_cast<CellId>(n + 1);
    c.center = Vec2{d.ring_distance * std::cos(angle), d.ring_distance * std::sin(angle)};
    c.radius = cell_radius;
    c.midhaul_capacity = midhaul_capacity;
    d.cells.push_back(std::move(c));
  }
  return d;
}

void move_ue(UeState& ue, double dt, const Arena& arena, double p_turn, Rng& rng) {
  if (ue.speed == 0.0) return;

  const double step = ue.speed * dt;
  Vec2 p{ue.position.x + step * std::cos(ue.heading), ue.position.y + step * std::sin(ue.heading)};
  double heading = ue.heading;

  // Mirror across each wall crossed; loops only when a step exceeds the arena.
  while (!arena.contains(p)) {
    if (p.x > arena.max_x) {
      p.x = 2.0 * arena.max_x - p.x;
      heading = std::numbers::pi - heading;
    } else if (p.x < arena.min_x) {
      p.x = 2.0 * arena.min_x - p.x;
      heading = std::numbers::pi - heading;
    }
    if (p.y > arena.max_y) {
      p.y = 2.0 * arena.max_y - p.y;
      heading = -heading;
    } else if (p.y < arena.min_y) {
      p.y = 2.0 * arena.min_y - p.y;
      heading = -heading;
    }
  }
  ue.position = p;
  ue.heading = wrap_angle(heading);

  if (rng.uniform01() < p_turn) ue.heading = rng.uniform(0.0, kTwoPi);
}

CellId attach(const UeState& ue, const Deployment& deployment) {
  CellId best = kUmbrellaCellId;
  double best_d2 = INFINITY;
  for (const CellState& c : deployment.edge_cells()) {
    const double d2 = distance_squared(ue.position, c.center);
    if (d2 <= c.radius * c.radius && d2 < best_d2) {
      best = c.id;
      best_d2 = d2;
    }
  }
  return best;
}

void max_min_fill(double capacity, double base, std::span<const double> caps,
                  std::span<double> rates) {
  const std::size_t n = caps.size();
  if (n == 0) return;
  if (!(capacity > 0.0)) {
    std::fill(rates.begin(), rates.end(), 0.0);
    return;
  }

  const bool uniform_caps = std::all_of(caps.begin(), caps.end(), [&](double c) { return c == caps[0]; });
  double level;
  if (uniform_caps) {
    level = capacity / static_cast<double>(n);
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return caps[a] < caps[b]; });
    double remaining = capacity;
    std::size_t left = n;
    level = INFINITY;
    for (std::size_t idx : order) {
      const double share = remaining / static_cast<double>(left);
      if (caps[idx] > share) {
        level = share;
        break;
      }
      remaining -= caps[idx];
      --left;
    }
  }

  for (std::size_t i = 0; i < n; ++i) rates[i] = std::min(caps[i], level);
  // Division rounding can push the total a few ulps over capacity.
  while (ordered_sum(rates) > capacity) {
    level = std::nextafter(level, 0.0);
    for (std::size_t i = 0; i < n; ++i) rates[i] = std::min(caps[i], level);
  }

  // The guaranteed share min(base, C/n, cap) never exceeds the water level,
  // so filling from zero already honours it.
  for (std::size_t i = 0; i < n; ++i) {
    assert(rates[i] >= std::min({base, capacity / static_cast<double>(n), caps[i]}) * (1.0 - 1e-12));
  }
  (void)base;
}

void allocate_rates(CellState& cell, const SliceProfiles& profiles, std::span<UeState> ues) {
  thread_local std::vector<double> caps;
  thread_local std::vector<double> rates;

  for (SliceKind k : kAllSlices) {
    const auto& members = at(cell.attached, k);
    const SliceProfile& profile = at(profiles, k);
    const double slice_cap = cell.slice_capacity(k);
    const std::size_t n = members.size();

    caps.assign(n, profile.cap());
    rates.assign(n, 0.0);
    max_min_fill(slice_cap, profile.initial_rate, caps, rates);

    for (std::size_t i = 0; i < n; ++i) ues[members[i]].current_rate = rates[i];
    const double used = ordered_sum(rates);

    at(cell.stats.prev_free_bw, k) = at(cell.stats.free_bw, k);
    at(cell.stats.throughput, k) = used;
    at(cell.stats.free_bw, k) = std::max(0.0, slice_cap - used);
    at(cell.stats.mean_ue_rate, k) = n == 0 ? 0.0 : used / static_cast<double>(n);
  }
}

bool transfer(UeState& ue, double dt, double now_end) {
  const double moved = ue.current_rate * dt / kMbPerGb;
  const double delivered = std::min(moved, ue.request_remaining);
  ue.delivered_gb += delivered;
  ue.request_remaining -= delivered;
  if (ue.request_remaining > kCompletionEpsilonGb) return false;

  ue.delivered_gb += ue.request_remaining;
  ue.completion_log.push_back({ue.request_start_s, now_end});
  ue.request_remaining = ue.request_total;
  ue.request_start_s = now_end;
  ++ue.requests_issued;
  return true;
}

}  // namespace oran
