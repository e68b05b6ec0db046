#include "pcd/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcd {

namespace {

// Minimum same-lane spacing at placement time.
constexpr double kMinInitialSpacing = 1.0;

bool too_close(const std::vector<Vehicle>& placed, const Vehicle& v) {
  return std::any_of(placed.begin(), placed.end(), [&](const Vehicle& o) {
    return o.lane == v.lane && std::abs(o.x - v.x) < kMinInitialSpacing;
  });
}

}  // namespace

FleetState init_fleet(const MobilityConfig& cfg, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("init_fleet: n must be at least 1");

  // A lane holds at most L / spacing vehicles; widen the window when the
  // requested fleet cannot fit.
  const double length =
      std::max(cfg.effective_fleet_length(n), 2.0 * kMinInitialSpacing * n);
  const double front = cfg.rsu_position - cfg.rsu_distance;
  std::uniform_real_distribution<double> pos(front - length, front);
  std::uniform_real_distribution<double> speed(cfg.v_min, cfg.v_max);
  std::bernoulli_distribution lane(0.5);

  FleetState fleet;
  fleet.rsu_position = cfg.rsu_position;
  fleet.vehicles.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vehicle v;
    do {
      v.lane = lane(rng) ? 1 : 0;
      v.x = pos(rng);
    } while (too_close(fleet.vehicles, v));
    v.v = speed(rng);
    fleet.vehicles.push_back(v);
  }
  return fleet;
}

FleetState step_fleet(const FleetState& state, const MobilityConfig& cfg, double slot_t, Rng& rng) {
  const int n = state.size();
  FleetState next = state;

  // Leaders decide first so that followers see their updated lanes.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return state.vehicles[a].x > state.vehicles[b].x;
  });

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> lane(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) lane[i] = state.vehicles[i].lane;

  for (int i : order) {
    const Vehicle& me = state.vehicles[i];
    double v = me.v;

    const double u = unit(rng);
    if (u < cfg.p_speed_change) {
      v = std::min(v + cfg.accel, cfg.v_max);
    } else if (u < 2.0 * cfg.p_speed_change) {
      v = std::max(v - cfg.accel, cfg.v_min);
    }

    // Nearest vehicle ahead in each lane; the other-lane search includes a
    // vehicle exactly alongside.
    double gap_own = INFINITY;
    double gap_other = INFINITY;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = state.vehicles[j].x - me.x;
      if (lane[j] == lane[i]) {
        if (dx > 0.0) gap_own = std::min(gap_own, dx);
      } else if (dx >= 0.0) {
        gap_other = std::min(gap_other, dx);
      }
    }

    if (gap_own <= cfg.d_min) {
      if (gap_other > cfg.d_min) {
        lane[i] = 1 - lane[i];
      } else {
        v = cfg.v_min;
      }
    } else if (std::isfinite(gap_own) && gap_own >= cfg.d_max) {
      v = cfg.v_max;
    }

    Vehicle& out = next.vehicles[i];
    out.lane = lane[i];
    out.v = v;
    out.x = me.x + v * slot_t;
  }
  return next;
}

std::vector<int> neighbors(const FleetState& state, int i, double los_range) {
  std::vector<int> out;
  const double xi = state.vehicles.at(static_cast<std::size_t>(i)).x;
  for (int j = 0; j < state.size(); ++j) {
    if (j != i && std::abs(state.vehicles[j].x - xi) <= los_range) out.push_back(j);
  }
  return out;
}

std::vector<std::vector<int>> neighbor_lists(const FleetState& state, double los_range) {
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(state.size()));
  for (int i = 0; i < state.size(); ++i) lists[i] = neighbors(state, i, los_range);
  return lists;
}

double v2v_distance(const Vehicle& a, const Vehicle& b) {
  const double lateral = a.lane == b.lane ? 0.0 : kLaneWidth;
  return std::hypot(a.x - b.x, lateral);
}

double v2r_distance(const Vehicle& a, double rsu_position, double rsu_offset) {
  return std::hypot(a.x - rsu_position, rsu_offset);
}

void write_fleet_trace(std::ostream& out, int slot, const FleetState& state) {
  for (int i = 0; i < state.size(); ++i) {
    const auto& v = state.vehicles[i];
    out << slot << ',' << i << ',' << v.lane << ',' << v.x << ',' << v.v << '\n';
  }
}

}  // namespace pcd
