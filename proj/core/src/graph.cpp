#include "pcd/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace pcd {

TransmissionGraph::TransmissionGraph(int n_obus)
    : inbound_(static_cast<std::size_t>(n_obus), kNone),
      outbound_(static_cast<std::size_t>(n_obus), kNone) {}

std::optional<NodeId> TransmissionGraph::inbound(NodeId obu) const {
  const NodeId v = inbound_.at(static_cast<std::size_t>(obu));
  return v == kNone ? std::nullopt : std::optional<NodeId>(v);
}

std::optional<NodeId> TransmissionGraph::outbound(NodeId obu) const {
  const NodeId v = outbound_.at(static_cast<std::size_t>(obu));
  return v == kNone ? std::nullopt : std::optional<NodeId>(v);
}

bool TransmissionGraph::has_edge(NodeId from, NodeId to) const {
  return is_obu(to) && inbound_[to] == from;
}

bool TransmissionGraph::can_add(NodeId from, NodeId to) const {
  if (!is_obu(to) || from == to) return false;
  if (from != kRsu && !is_obu(from)) return false;
  if (inbound_[to] != kNone) return false;
  return from == kRsu || outbound_[from] == kNone;
}

void TransmissionGraph::add_edge(NodeId from, NodeId to) {
  if (!can_add(from, to)) {
    throw std::invalid_argument("add_edge: " + std::to_string(from) + "->" + std::to_string(to) +
                                " violates the transmission graph invariants");
  }
  inbound_[to] = from;
  if (from != kRsu) outbound_[from] = to;
}

void TransmissionGraph::remove_edge(NodeId from, NodeId to) {
  if (!has_edge(from, to)) return;
  inbound_[to] = kNone;
  if (from != kRsu) outbound_[from] = kNone;
}

void TransmissionGraph::clear_obu(NodeId obu) {
  if (auto a = inbound(obu)) remove_edge(*a, obu);
  if (auto b = outbound(obu)) remove_edge(obu, *b);
}

std::vector<Edge> TransmissionGraph::edges() const {
  std::vector<Edge> out;
  for (NodeId to = 0; to < size(); ++to) {
    if (inbound_[to] != kNone) out.emplace_back(inbound_[to], to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int TransmissionGraph::edge_count() const {
  return static_cast<int>(std::count_if(inbound_.begin(), inbound_.end(),
                                        [](NodeId v) { return v != kNone; }));
}

bool TransmissionGraph::is_valid() const {
  if (inbound_.size() != outbound_.size()) return false;
  for (NodeId i = 0; i < size(); ++i) {
    const NodeId a = inbound_[i];
    if (a != kNone) {
      if (a == i) return false;
      if (a != kRsu && (!is_obu(a) || outbound_[a] != i)) return false;
    }
    const NodeId b = outbound_[i];
    if (b != kNone) {
      if (b == i || !is_obu(b) || inbound_[b] != i) return false;
    }
  }
  return true;
}

void write_graph_trace(std::ostream& out, long long iteration, const TransmissionGraph& g) {
  for (const auto& [from, to] : g.edges()) {
    out << iteration << ',';
    if (from == kRsu) {
      out << "rsu";
    } else {
      out << from;
    }
    out << ',' << to << '\n';
  }
}

}  // namespace pcd
