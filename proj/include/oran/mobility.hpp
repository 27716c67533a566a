#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "oran/domain.hpp"

namespace oran {

class Rng;

/// Axis-aligned square region UEs roam in.
struct Arena {
  double min_x = 0.0;
  double max_x = 0.0;
  double min_y = 0.0;
  double max_y = 0.0;

  bool contains(Vec2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
};

inline constexpr CellId kUmbrellaCellId = 0;

/// Edge cells in a hexagonal ring around an umbrella cell at the origin.
/// cells[0] is the umbrella; edge cell n (1-based) sits at angle 2π(n-1)/J.
struct Deployment {
  std::vector<CellState> cells;
  Arena arena;
  double ring_distance = 0.0;

  CellState& umbrella() { return cells.front(); }
  const CellState& umbrella() const { return cells.front(); }
  std::span<CellState> edge_cells() { return std::span(cells).subspan(1); }
  std::span<const CellState> edge_cells() const { return std::span(cells).subspan(1); }
  CellState& cell(CellId id) { return cells.at(id); }
  const CellState& cell(CellId id) const { return cells.at(id); }
};

class DeploymentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Distance from the umbrella center to each edge cell center when
/// neighbouring hexagons of circumradius `cell_radius` touch.
double hex_ring_distance(double cell_radius);

/// Smallest umbrella radius covering every point of the square arena.
double covering_umbrella_radius(double cell_radius);

/// Throws DeploymentError on j_count < 1, a non-positive radius, or an
/// umbrella smaller than ring distance + cell radius. A non-positive
/// umbrella_radius selects covering_umbrella_radius().
Deployment build_deployment(int j_count, double cell_radius, double umbrella_radius,
                            double midhaul_capacity = 50'000.0);

/// Random-direction step: advance speed*dt along the heading, reflect off
/// the arena walls, then with probability p_turn draw a new heading.
/// Stationary UEs are returned untouched without consuming draws.
void move_ue(UeState& ue, double dt, const Arena& arena, double p_turn, Rng& rng);

/// Nearest edge cell whose radius covers the UE (lowest id on ties), else
/// the umbrella.
CellId attach(const UeState& ue, const Deployment& deployment);

/// Max-min fair split of `capacity` among users with per-user caps. Each
/// user first receives min(base, capacity/n, cap); the remainder raises the
/// common water level until capacity or every cap is exhausted. Rates are
/// written to `rates` (same length as caps).
void max_min_fill(double capacity, double base, std::span<const double> caps,
                  std::span<double> rates);

/// Allocates rates for every UE attached to `cell` and refreshes the cell's
/// throughput, free bandwidth and mean-rate stats. `ues` is indexed by UE id.
void allocate_rates(CellState& cell, const SliceProfiles& profiles, std::span<UeState> ues);

/// Moves current_rate*dt of data. When the request completes, logs
/// (start, now_end) and issues a fresh request of the same size starting at
/// now_end; any surplus transfer capacity of the finishing second is
/// dropped. Returns true when a request completed.
bool transfer(UeState& ue, double dt, double now_end);

/// Remaining volumes below this many GB count as delivered.
inline constexpr double kCompletionEpsilonGb = 1e-9;

}  // namespace oran
