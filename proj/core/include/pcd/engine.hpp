#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "pcd/config.hpp"
#include "pcd/game.hpp"
#include "pcd/mobility.hpp"
#include "pcd/spectrum.hpp"

namespace pcd {

enum class Approach { kCooperative, kNonCooperative, kBroadcast, kOptimal };

std::string_view to_string(Approach a);
std::optional<Approach> parse_approach(std::string_view name);

using PacketSet = boost::dynamic_bitset<std::uint64_t>;

struct ObuState {
  PacketSet possessed;
  SensingReport sensing;
};

/// Per-pair, per-channel V2V gains |h|^2 for one slot. Links are reciprocal.
class V2vGains {
 public:
  V2vGains() = default;
  V2vGains(int n, int k) : n_(n), k_(k), g_(static_cast<std::size_t>(n * n * k), 0.0) {}

  double get(int i, int j, int channel) const { return g_[index(i, j, channel)]; }
  void set(int i, int j, int channel, double value) {
    g_[index(i, j, channel)] = value;
    g_[index(j, i, channel)] = value;
  }
  int channels() const { return k_; }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * k_ + k;
  }
  int n_ = 0;
  int k_ = 0;
  std::vector<double> g_;
};

/// Radio environment of one slot.
struct SlotChannels {
  ChannelSlotState truth;
  std::vector<double> v2r_capacity;
  V2vGains v2v;
};

struct ScenarioState {
  Config cfg;
  std::uint64_t seed = 0;
  int slot = 0;  // last completed slot
  FleetState fleet;
  std::vector<ObuState> obus;
  std::vector<std::vector<int>> neighbors;
  TransmissionGraph graph;

  long long total_possessed() const;
};

struct SlotMetrics {
  int slot = 0;
  long long total_possessed = 0;
  long long throughput = 0;
  long long formation_iters = 0;
  int formation_rounds = 0;
  bool pruned_improvement = false;
};

struct MetricsSeries {
  Approach approach = Approach::kCooperative;
  std::uint64_t seed = 0;
  std::vector<SlotMetrics> slots;

  long long final_possessed() const { return slots.empty() ? 0 : slots.back().total_possessed; }
};

/// Outcome of one V2V edge in the data transmission phase.
struct V2vTransmission {
  int tx = -1;
  int rx = -1;
  int channel = -1;  // -1: transmitter had no channel believed free
  double rate = 0.0;
  bool primary_clear = false;
  bool peer_clear = false;
  bool success = false;
  int packets = 0;
};

struct SlotReport {
  SlotMetrics metrics;
  std::vector<V2vTransmission> v2v;
  int rsu_packets = 0;
};

/// Optional hooks for traces and convergence series.
struct RunObservers {
  std::function<void(int slot, const FleetState&)> on_fleet;
  std::function<void(int slot, long long iteration, const TransmissionGraph&)> on_formation;
  std::function<void(const ScenarioState&, const SlotReport&)> on_slot_end;
};

/// Fleet placed, packet sets empty, empty graph. Validates cfg.
ScenarioState init_scenario(const Config& cfg, std::uint64_t seed);

/// Sample primary occupancy, V2R capacities and V2V gains for the current
/// geometry of `state`.
SlotChannels sample_slot_channels(const ScenarioState& state, int slot);

/// Per-OBU sensing for one slot.
std::vector<SensingReport> sense_all(const ScenarioState& state, const ChannelSlotState& truth,
                                     int slot);

/// Packets broadcast by the RSU in `slot` (cyclic schedule, floor(R0 T / s) per slot).
std::vector<int> rsu_window(int slot, const Config& cfg);

/// Best believed-free channel for tx -> rx; -1 when none is believed free.
int best_channel(const SensingReport& tx_report, const V2vGains& gains, int tx, int rx);

/// Effective rate tx -> rx on its best believed-free channel (0 if none).
double best_effective_rate(const SensingReport& tx_report, const V2vGains& gains, int tx, int rx,
                           const Config& cfg);

GameContext build_context(const ScenarioState& state, const SlotChannels& channels,
                          const std::vector<SensingReport>& reports, int slot);

/// Phase III for V2V edges: each transmitter uses its best believed-free
/// channel; reception succeeds iff that channel is truly free and no other
/// neighbour of the receiver transmits on it. Packet counts are computed from
/// `possessed` but not applied.
std::vector<V2vTransmission> resolve_v2v(const TransmissionGraph& g,
                                         const ChannelSlotState& truth,
                                         const std::vector<SensingReport>& reports,
                                         const V2vGains& gains,
                                         const std::vector<std::vector<int>>& neighbors,
                                         const std::vector<PacketSet>& possessed,
                                         const Config& cfg);

/// Advance one slot: mobility, sensing, graph selection, data transmission.
SlotReport run_slot(ScenarioState& state, Approach approach, const RunObservers* observers = nullptr);

/// Run cfg.slots slots. Deterministic for fixed (cfg, approach, seed).
MetricsSeries run_scenario(const Config& cfg, Approach approach, std::uint64_t seed,
                           const RunObservers* observers = nullptr);

}  // namespace pcd
