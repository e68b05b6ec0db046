#include "pcd/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace pcd {

TransmissionGraph broadcast_only_graph(const GameContext& ctx) {
  TransmissionGraph g(ctx.n);
  for (int i = 0; i < ctx.n; ++i) {
    if (ctx.v2r_capacity[i] > ctx.r0) g.add_edge(kRsu, i);
  }
  return g;
}

TransmissionGraph noncoop_graph(const GameContext& ctx, Rng& rng) {
  TransmissionGraph g = broadcast_only_graph(ctx);

  std::vector<int> order(static_cast<std::size_t>(ctx.n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> eligible;
  for (int i : order) {
    if (g.inbound(i)) continue;
    eligible.clear();
    for (int j : ctx.neighbors[static_cast<std::size_t>(i)]) {
      if (ctx.useful(j, i) > 0 && g.can_add(j, i)) eligible.push_back(j);
    }
    if (eligible.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    g.add_edge(eligible[pick(rng)], i);
  }
  return g;
}

double expected_delivered_packets(const TransmissionGraph& g, const GameContext& ctx) {
  double total = 0.0;
  for (const auto& [from, to] : g.edges()) {
    if (from == kRsu) {
      if (ctx.v2r_capacity[to] > ctx.r0) total += ctx.rsu_useful[to];
    } else {
      const double budget = std::floor(ctx.rate(from, to) * ctx.slot_t / ctx.packet_size);
      total += ctx.success(from, to) * std::min(budget, double(ctx.useful(from, to)));
    }
  }
  return total;
}

namespace {

class Enumerator {
 public:
  Enumerator(const GameContext& ctx, OptimalObjective objective)
      : ctx_(ctx), objective_(objective), g_(ctx.n), best_(ctx.n) {}

  TransmissionGraph run() {
    visit(0);
    return best_;
  }

 private:
  double score(const TransmissionGraph& g) const {
    return objective_ == OptimalObjective::kTotalUtility ? total_utility(g, ctx_)
                                                         : expected_delivered_packets(g, ctx_);
  }

  // Assign the inbound source of OBU i, then recurse. Outbound edges follow
  // from the sources chosen by the other OBUs.
  void visit(int i) {
    if (i == ctx_.n) {
      const double s = score(g_);
      if (!have_best_ || s > best_score_) {
        best_score_ = s;
        best_ = g_;
        have_best_ = true;
      }
      return;
    }
    visit(i + 1);
    g_.add_edge(kRsu, i);
    visit(i + 1);
    g_.remove_edge(kRsu, i);
    for (int j : ctx_.neighbors[static_cast<std::size_t>(i)]) {
      if (!g_.can_add(j, i)) continue;
      g_.add_edge(j, i);
      visit(i + 1);
      g_.remove_edge(j, i);
    }
  }

  const GameContext& ctx_;
  OptimalObjective objective_;
  TransmissionGraph g_;
  TransmissionGraph best_;
  double best_score_ = 0.0;
  bool have_best_ = false;
};

}  // namespace

TransmissionGraph optimal_graph(const GameContext& ctx, OptimalObjective objective) {
  if (ctx.n > kMaxEnumerationObus) {
    throw EnumerationLimitError("optimal_graph: enumeration is limited to " +
                                std::to_string(kMaxEnumerationObus) + " OBUs (got " +
                                std::to_string(ctx.n) + ")");
  }
  return Enumerator(ctx, objective).run();
}

}  // namespace pcd
