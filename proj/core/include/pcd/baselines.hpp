#pragma once

#include <stdexcept>

#include "pcd/config.hpp"
#include "pcd/game.hpp"

namespace pcd {

/// RSU -> i for every OBU whose V2R capacity exceeds the broadcast rate.
TransmissionGraph broadcast_only_graph(const GameContext& ctx);

/// Uncoordinated P2P: OBUs in useful RSU range listen to the RSU; every other
/// OBU still missing packets asks its neighbours, and one eligible responder
/// (holds a needed packet, not already transmitting) is drawn uniformly.
/// Requesters are served in random order.
TransmissionGraph noncoop_graph(const GameContext& ctx, Rng& rng);

class EnumerationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxEnumerationObus = 6;

/// Expected packets delivered by a graph: success-weighted V2V transfers plus
/// the RSU window for OBUs in useful range.
double expected_delivered_packets(const TransmissionGraph& g, const GameContext& ctx);

/// Exhaustive search over all valid graphs (V2V edges between neighbours
/// only) maximising the chosen objective. The first maximiser in enumeration
/// order wins. Throws EnumerationLimitError if n > kMaxEnumerationObus.
TransmissionGraph optimal_graph(const GameContext& ctx,
                                OptimalObjective objective = OptimalObjective::kTotalUtility);

}  // namespace pcd
