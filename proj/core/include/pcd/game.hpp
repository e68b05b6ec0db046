#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pcd/graph.hpp"
#include "pcd/rng.hpp"

namespace pcd {

/// Dense n x n matrix indexed (from, to).
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int n, T init = T{})
      : n_(n), data_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), init) {}

  T& operator()(int from, int to) { return data_[index(from, to)]; }
  const T& operator()(int from, int to) const { return data_[index(from, to)]; }
  int size() const { return n_; }

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(to);
  }
  int n_ = 0;
  std::vector<T> data_;
};

/// Everything an OBU needs to evaluate utilities in one slot.
struct GameContext {
  int n = 0;
  std::vector<std::vector<int>> neighbors;  // line-of-sight neighbour lists
  SquareMatrix<double> rate;                // best effective V2V rate from -> to, bits/s
  SquareMatrix<double> success;             // success probability from -> to
  SquareMatrix<int> useful;                 // packets `from` holds that `to` lacks
  std::vector<double> v2r_capacity;         // c_i, bits/s
  std::vector<int> rsu_useful;              // new packets in this slot's broadcast window
  double gamma_in = 1.0;
  double gamma_out = 0.5;
  double gamma_cost = 0.1;
  double slot_t = 1.0;
  double packet_size = 1e6;
  double r0 = 5e6;

  /// Zero-filled context for n OBUs with the given pricing.
  static GameContext empty(int n);

  bool is_neighbor(int i, int j) const;
  int neighbor_count(int i) const { return static_cast<int>(neighbors[i].size()); }
};

/// OBU state (a, b): `a` transmits to the OBU, `b` receives from it. A field
/// equal to the OBU's own id means "no edge"; `a` may be kRsu.
struct Strategy {
  NodeId a;
  NodeId b;

  auto operator<=>(const Strategy&) const = default;
};

/// Per-OBU usage counts of strategies within one formation run.
class HistoryTable {
 public:
  explicit HistoryTable(int n) : counts_(static_cast<std::size_t>(n)) {}
  int count(int obu, const Strategy& s) const;
  void increment(int obu, const Strategy& s) { ++counts_[obu][s]; }
  void clear();

 private:
  std::vector<std::map<Strategy, int>> counts_;
};

Strategy current_strategy(int i, const TransmissionGraph& g);

/// Graph after OBU i replaces its edges with strategy s, or nullopt if the
/// result violates the degree caps or links to a non-neighbour.
std::optional<TransmissionGraph> apply_strategy(int i, const Strategy& s,
                                                const TransmissionGraph& g,
                                                const GameContext& ctx);

/// U_i(G) = U_in + U_out - C for OBU i.
double utility(int i, const TransmissionGraph& g, const GameContext& ctx);

double total_utility(const TransmissionGraph& g, const GameContext& ctx);

/// Feasible local strategies of OBU i: the mover and every newly linked
/// partner are not worse off. With a history table, strategies used at least
/// `sigma` times are removed.
std::vector<Strategy> feasible_strategies(int i, const TransmissionGraph& g,
                                          const HistoryTable* hist, int sigma,
                                          const GameContext& ctx);

/// Utility-maximising strategy in `feasible`; ties keep the current strategy,
/// otherwise the lowest (a, b). An empty set yields the current strategy.
Strategy local_best_response(int i, const std::vector<Strategy>& feasible,
                             const TransmissionGraph& g, const GameContext& ctx);

struct FormationResult {
  TransmissionGraph graph;
  long long iterations = 0;  // OBU updates performed
  int rounds = 0;
  /// A history-pruned strategy would have strictly beaten the chosen one
  /// during the final (quiescent) round.
  bool pruned_improvement = false;
};

/// Called after every OBU update with the running iteration count.
using FormationObserver = std::function<void(long long, const TransmissionGraph&)>;

/// Myopic best-response dynamics: rounds over all OBUs in a fresh random
/// order until a round changes no edge. Throws std::logic_error if the
/// iteration count ever exceeds formation_ceiling().
FormationResult form_network(const TransmissionGraph& g0, const GameContext& ctx, int sigma,
                             Rng& rng, const FormationObserver& observer = {});

/// True iff no OBU has a feasible strategy (ignoring history) that strictly
/// improves its own utility.
bool is_local_nash(const TransmissionGraph& g, const GameContext& ctx);

/// Number of valid transmission graphs on n OBUs (RSU included), as a real.
long double valid_graph_count(int n);

/// Convergence bound |G| * N * (sigma + 1) on OBU updates.
long double formation_ceiling(int n, int sigma);

}  // namespace pcd
