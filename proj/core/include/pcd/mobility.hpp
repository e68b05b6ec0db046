#pragma once

#include <ostream>
#include <vector>

#include "pcd/config.hpp"
#include "pcd/rng.hpp"

namespace pcd {

/// Lateral spacing between the two lanes, used for V2V distances.
inline constexpr double kLaneWidth = 3.5;

struct Vehicle {
  int lane = 0;    // 0 or 1
  double x = 0.0;  // longitudinal position, increasing in the direction of travel
  double v = 0.0;
};

/// Two-lane one-way road. The RSU sits at `rsu_position` on the road axis.
struct FleetState {
  std::vector<Vehicle> vehicles;
  double rsu_position = 0.0;

  int size() const { return static_cast<int>(vehicles.size()); }
};

/// Random placement on both lanes inside [rsu - D - L, rsu - D] with speeds
/// uniform in [v_min, v_max]. Throws std::invalid_argument if n < 1.
FleetState init_fleet(const MobilityConfig& cfg, int n, Rng& rng);

/// One slot of length `slot_t`: random speed change, then the blocking rule
/// (lane switch or brake to v_min), then the free-road rule (jump to v_max),
/// then positions advance by v * slot_t.
FleetState step_fleet(const FleetState& state, const MobilityConfig& cfg, double slot_t, Rng& rng);

/// OBUs within `los_range` of OBU i along the road (lane ignored), ascending ids.
std::vector<int> neighbors(const FleetState& state, int i, double los_range);

/// Neighbor lists for every OBU.
std::vector<std::vector<int>> neighbor_lists(const FleetState& state, double los_range);

double v2v_distance(const Vehicle& a, const Vehicle& b);
double v2r_distance(const Vehicle& a, double rsu_position, double rsu_offset);

/// CSV rows `slot,obu,lane,x,v` for one slot (no header).
void write_fleet_trace(std::ostream& out, int slot, const FleetState& state);

}  // namespace pcd
