#include "pcd/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pcd {

GameContext GameContext::empty(int n) {
  GameContext ctx;
  ctx.n = n;
  ctx.neighbors.assign(static_cast<std::size_t>(n), {});
  ctx.rate = SquareMatrix<double>(n, 0.0);
  ctx.success = SquareMatrix<double>(n, 0.0);
  ctx.useful = SquareMatrix<int>(n, 0);
  ctx.v2r_capacity.assign(static_cast<std::size_t>(n), 0.0);
  ctx.rsu_useful.assign(static_cast<std::size_t>(n), 0);
  return ctx;
}

bool GameContext::is_neighbor(int i, int j) const {
  const auto& ni = neighbors[static_cast<std::size_t>(i)];
  return std::binary_search(ni.begin(), ni.end(), j);
}

int HistoryTable::count(int obu, const Strategy& s) const {
  const auto& m = counts_[static_cast<std::size_t>(obu)];
  auto it = m.find(s);
  return it == m.end() ? 0 : it->second;
}

void HistoryTable::clear() {
  for (auto& m : counts_) m.clear();
}

Strategy current_strategy(int i, const TransmissionGraph& g) {
  return {g.inbound(i).value_or(i), g.outbound(i).value_or(i)};
}

std::optional<TransmissionGraph> apply_strategy(int i, const Strategy& s,
                                                const TransmissionGraph& g,
                                                const GameContext& ctx) {
  const Strategy cur = current_strategy(i, g);
  if (s.b == kRsu) return std::nullopt;
  // New V2V partners need line of sight; kept edges are grandfathered.
  if (s.a != i && s.a != kRsu && s.a != cur.a && !ctx.is_neighbor(i, s.a)) return std::nullopt;
  if (s.b != i && s.b != cur.b && !ctx.is_neighbor(i, s.b)) return std::nullopt;

  TransmissionGraph next = g;
  next.clear_obu(i);
  if (s.a != i) {
    if (!next.can_add(s.a, i)) return std::nullopt;
    next.add_edge(s.a, i);
  }
  if (s.b != i) {
    if (!next.can_add(i, s.b)) return std::nullopt;
    next.add_edge(i, s.b);
  }
  return next;
}

namespace {

double packets_per_slot(double rate, const GameContext& ctx) {
  return rate * ctx.slot_t / ctx.packet_size;
}

}  // namespace

double utility(int i, const TransmissionGraph& g, const GameContext& ctx) {
  double u = 0.0;
  if (auto a = g.inbound(i)) {
    const int j = *a;
    if (j == kRsu) {
      u += ctx.gamma_in * packets_per_slot(ctx.v2r_capacity[i], ctx);
    } else {
      u += ctx.gamma_in * ctx.success(j, i) *
           std::min(packets_per_slot(ctx.rate(j, i), ctx), double(ctx.useful(j, i)));
      u -= ctx.gamma_cost * ctx.neighbor_count(j);
    }
  }
  if (auto b = g.outbound(i)) {
    const int j = *b;
    u += ctx.gamma_out * ctx.success(i, j) *
         std::min(packets_per_slot(ctx.rate(i, j), ctx), double(ctx.useful(i, j)));
    u -= ctx.gamma_cost * ctx.neighbor_count(i);
  }
  return u;
}

double total_utility(const TransmissionGraph& g, const GameContext& ctx) {
  double sum = 0.0;
  for (int i = 0; i < g.size(); ++i) sum += utility(i, g, ctx);
  return sum;
}

namespace {

std::vector<Strategy> candidate_strategies(int i, const TransmissionGraph& g,
                                           const GameContext& ctx) {
  const Strategy cur = current_strategy(i, g);
  std::vector<NodeId> sources{i, kRsu, cur.a};
  std::vector<NodeId> targets{i, cur.b};
  for (int j : ctx.neighbors[static_cast<std::size_t>(i)]) {
    sources.push_back(j);
    targets.push_back(j);
  }
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  std::vector<Strategy> out;
  out.reserve(sources.size() * targets.size());
  for (NodeId a : sources) {
    for (NodeId b : targets) out.push_back({a, b});
  }
  return out;
}

struct Evaluated {
  Strategy s;
  double mover_utility;
};

// Feasible strategies with the mover's utility on the resulting graph.
std::vector<Evaluated> evaluate_feasible(int i, const TransmissionGraph& g,
                                         const GameContext& ctx) {
  const Strategy cur = current_strategy(i, g);
  const double base = utility(i, g, ctx);
  std::vector<Evaluated> out;
  for (const Strategy& s : candidate_strategies(i, g, ctx)) {
    auto next = apply_strategy(i, s, g, ctx);
    if (!next) continue;
    const double u = utility(i, *next, ctx);
    if (!(u >= base)) continue;
    if (s.a != i && s.a != cur.a && s.a != kRsu) {
      if (!(utility(s.a, *next, ctx) >= utility(s.a, g, ctx))) continue;
    }
    if (s.b != i && s.b != cur.b) {
      if (!(utility(s.b, *next, ctx) >= utility(s.b, g, ctx))) continue;
    }
    out.push_back({s, u});
  }
  return out;
}

// Index of the best entry: maximum utility, then current strategy, then lowest.
std::size_t best_index(const std::vector<Evaluated>& options, const Strategy& cur) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < options.size(); ++k) {
    const auto& o = options[k];
    const auto& b = options[best];
    if (o.mover_utility > b.mover_utility) {
      best = k;
    } else if (o.mover_utility == b.mover_utility) {
      if (b.s == cur) continue;
      if (o.s == cur || o.s < b.s) best = k;
    }
  }
  return best;
}

}  // namespace

std::vector<Strategy> feasible_strategies(int i, const TransmissionGraph& g,
                                          const HistoryTable* hist, int sigma,
                                          const GameContext& ctx) {
  std::vector<Strategy> out;
  for (const auto& e : evaluate_feasible(i, g, ctx)) {
    if (hist != nullptr && hist->count(i, e.s) >= sigma) continue;
    out.push_back(e.s);
  }
  return out;
}

Strategy local_best_response(int i, const std::vector<Strategy>& feasible,
                             const TransmissionGraph& g, const GameContext& ctx) {
  const Strategy cur = current_strategy(i, g);
  std::vector<Evaluated> options;
  for (const Strategy& s : feasible) {
    auto next = apply_strategy(i, s, g, ctx);
    if (next) options.push_back({s, utility(i, *next, ctx)});
  }
  if (options.empty()) return cur;
  return options[best_index(options, cur)].s;
}

FormationResult form_network(const TransmissionGraph& g0, const GameContext& ctx, int sigma,
                             Rng& rng, const FormationObserver& observer) {
  FormationResult result;
  result.graph = g0;
  const int n = g0.size();
  if (n == 0) return result;

  const long double ceiling = formation_ceiling(n, sigma);
  HistoryTable hist(n);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  TransmissionGraph& g = result.graph;
  for (;;) {
    ++result.rounds;
    bool changed = false;
    bool pruned_improvement = false;
    std::shuffle(order.begin(), order.end(), rng);

    for (int i : order) {
      const Strategy cur = current_strategy(i, g);
      auto all = evaluate_feasible(i, g, ctx);
      std::vector<Evaluated> allowed;
      for (const auto& e : all) {
        if (hist.count(i, e.s) < sigma) allowed.push_back(e);
      }

      double chosen_utility = utility(i, g, ctx);
      if (!allowed.empty()) {
        const auto& best = allowed[best_index(allowed, cur)];
        chosen_utility = best.mover_utility;
        hist.increment(i, best.s);
        if (best.s != cur) {
          g = *apply_strategy(i, best.s, g, ctx);
          changed = true;
        }
      }
      for (const auto& e : all) {
        if (e.mover_utility > chosen_utility) pruned_improvement = true;
      }

      ++result.iterations;
      if (observer) observer(result.iterations, g);
      if (static_cast<long double>(result.iterations) > ceiling) {
        throw std::logic_error("form_network: iteration count exceeded the convergence bound");
      }
    }
    if (!changed) {
      result.pruned_improvement = pruned_improvement;
      break;
    }
  }
  return result;
}

bool is_local_nash(const TransmissionGraph& g, const GameContext& ctx) {
  for (int i = 0; i < g.size(); ++i) {
    const double base = utility(i, g, ctx);
    for (const auto& e : evaluate_feasible(i, g, ctx)) {
      if (e.mover_utility > base) return false;
    }
  }
  return true;
}

long double valid_graph_count(int n) {
  // Each OBU picks an inbound source among {none, RSU, other OBU} with OBU
  // sources used at most once: sum over k OBU-sourced edges of the number of
  // k-rook placements off the diagonal, times 2^(n-k) for the rest.
  auto binom = [](int a, int b) -> long double {
    if (b < 0 || b > a) return 0.0L;
    long double r = 1.0L;
    for (int t = 1; t <= b; ++t) r = r * (a - b + t) / t;
    return r;
  };
  auto factorial = [](int a) {
    long double r = 1.0L;
    for (int t = 2; t <= a; ++t) r *= t;
    return r;
  };
  long double total = 0.0L;
  for (int k = 0; k <= n; ++k) {
    long double rooks = 0.0L;
    for (int j = 0; j <= k; ++j) {
      const long double c = binom(n - j, k - j);
      const long double term = binom(n, j) * c * c * factorial(k - j);
      rooks += (j % 2 == 0) ? term : -term;
    }
    total += rooks * std::pow(2.0L, n - k);
  }
  return total;
}

long double formation_ceiling(int n, int sigma) {
  return valid_graph_count(n) * n * (sigma + 1);
}

}  // namespace pcd
