#pragma once

#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace pcd {

/// Node ids: OBUs are 0..N-1, the RSU is kRsu.
using NodeId = int;
inline constexpr NodeId kRsu = -1;

using Edge = std::pair<NodeId, NodeId>;  // (from, to)

/// Directed transmission graph over {RSU} U OBUs. Every OBU has in-degree and
/// out-degree at most one; the RSU only transmits. The representation stores
/// each OBU's inbound source and outbound target, so the degree caps hold by
/// construction and mutators reject anything else.
class TransmissionGraph {
 public:
  TransmissionGraph() = default;
  explicit TransmissionGraph(int n_obus);

  int size() const { return static_cast<int>(inbound_.size()); }

  std::optional<NodeId> inbound(NodeId obu) const;
  std::optional<NodeId> outbound(NodeId obu) const;

  bool has_edge(NodeId from, NodeId to) const;
  /// True if `from -> to` can be added without breaking a degree cap.
  bool can_add(NodeId from, NodeId to) const;
  /// Throws std::invalid_argument when the edge would violate an invariant.
  void add_edge(NodeId from, NodeId to);
  void remove_edge(NodeId from, NodeId to);
  void clear_obu(NodeId obu);

  /// Sorted edge list, RSU edges first.
  std::vector<Edge> edges() const;
  int edge_count() const;

  /// Full invariant check (mirror consistency, no self loops, caps).
  bool is_valid() const;

  bool operator==(const TransmissionGraph&) const = default;

 private:
  static constexpr NodeId kNone = -2;
  bool is_obu(NodeId id) const { return id >= 0 && id < size(); }

  std::vector<NodeId> inbound_;
  std::vector<NodeId> outbound_;
};

/// `iteration,from,to` rows; the RSU is written as "rsu".
void write_graph_trace(std::ostream& out, long long iteration, const TransmissionGraph& g);

}  // namespace pcd
