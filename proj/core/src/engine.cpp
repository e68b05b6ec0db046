#include "pcd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pcd/baselines.hpp"
#include "pcd/channel.hpp"

namespace pcd {

namespace {

// Vehicles sharing a position after an overtaking lane change are treated as
// this far apart for path loss.
constexpr double kMinLinkDistance = 1.0;

int packets_per_slot(double rate, const Config& cfg) {
  return static_cast<int>(std::floor(rate * cfg.slot_t / cfg.packet_size));
}

}  // namespace

std::string_view to_string(Approach a) {
  switch (a) {
    case Approach::kCooperative: return "cooperative";
    case Approach::kNonCooperative: return "noncoop";
    case Approach::kBroadcast: return "broadcast";
    case Approach::kOptimal: return "optimal";
  }
  return "unknown";
}

std::optional<Approach> parse_approach(std::string_view name) {
  for (auto a : {Approach::kCooperative, Approach::kNonCooperative, Approach::kBroadcast,
                 Approach::kOptimal}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

long long ScenarioState::total_possessed() const {
  long long total = 0;
  for (const auto& o : obus) total += static_cast<long long>(o.possessed.count());
  return total;
}

ScenarioState init_scenario(const Config& cfg, std::uint64_t seed) {
  validate(cfg);
  ScenarioState s;
  s.cfg = cfg;
  s.seed = seed;
  Rng rng = derive_stream(seed, 0, StreamLabel::kFleetInit);
  s.fleet = init_fleet(cfg.mobility, cfg.n_obus, rng);
  s.obus.resize(static_cast<std::size_t>(cfg.n_obus));
  for (auto& o : s.obus) o.possessed.resize(static_cast<std::size_t>(cfg.m_packets));
  s.neighbors = neighbor_lists(s.fleet, cfg.los_range);
  s.graph = TransmissionGraph(cfg.n_obus);
  return s;
}

SlotChannels sample_slot_channels(const ScenarioState& state, int slot) {
  const Config& cfg = state.cfg;
  const int n = cfg.n_obus;
  SlotChannels ch;

  Rng primary = derive_stream(state.seed, slot, StreamLabel::kPrimary);
  ch.truth = sample_primary(cfg.k_channels, cfg.lambda_primary, primary);

  Rng v2r = derive_stream(state.seed, slot, StreamLabel::kV2rGain);
  ch.v2r_capacity.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double d = std::max(
        v2r_distance(state.fleet.vehicles[i], cfg.mobility.rsu_position, cfg.rsu_offset),
        kMinLinkDistance);
    const auto gain = sample_gain(d, true, v2r, LinkKind::kV2R, 0, cfg.ref_distance);
    ch.v2r_capacity[i] = capacity(gain, cfg.w_v2r, cfg.beta_v2r_linear());
  }

  Rng v2v = derive_stream(state.seed, slot, StreamLabel::kV2vGain);
  ch.v2v = V2vGains(n, cfg.k_channels);
  for (int i = 0; i < n; ++i) {
    for (int j : state.neighbors[i]) {
      if (j <= i) continue;
      const double d =
          std::max(v2v_distance(state.fleet.vehicles[i], state.fleet.vehicles[j]), kMinLinkDistance);
      for (int k = 0; k < cfg.k_channels; ++k) {
        const auto gain = sample_gain(d, true, v2v, LinkKind::kV2V, k + 1, cfg.ref_distance);
        ch.v2v.set(i, j, k, gain.magnitude_sq);
      }
    }
  }
  return ch;
}

std::vector<SensingReport> sense_all(const ScenarioState& state, const ChannelSlotState& truth,
                                     int slot) {
  const Config& cfg = state.cfg;
  Rng rng = derive_stream(state.seed, slot, StreamLabel::kSensing);
  std::vector<SensingReport> reports;
  reports.reserve(state.obus.size());
  for (int i = 0; i < cfg.n_obus; ++i) {
    reports.push_back(sense_channels(truth, cfg.k_sensed, cfg.p_miss, cfg.p_false, rng, i));
  }
  return reports;
}

std::vector<int> rsu_window(int slot, const Config& cfg) {
  const int per_slot = std::min(packets_per_slot(cfg.r0, cfg), cfg.m_packets);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::max(per_slot, 0)));
  const long long start = static_cast<long long>(slot) * per_slot;
  for (int t = 0; t < per_slot; ++t) {
    out.push_back(static_cast<int>((start + t) % cfg.m_packets));
  }
  return out;
}

int best_channel(const SensingReport& tx_report, const V2vGains& gains, int tx, int rx) {
  int best = -1;
  double best_gain = -1.0;
  for (int k : tx_report.believed_free) {
    const double g = gains.get(tx, rx, k);
    if (g > best_gain) {
      best_gain = g;
      best = k;
    }
  }
  return best;
}

double best_effective_rate(const SensingReport& tx_report, const V2vGains& gains, int tx, int rx,
                           const Config& cfg) {
  const int k = best_channel(tx_report, gains, tx, rx);
  if (k < 0) return 0.0;
  const LinkGain gain{gains.get(tx, rx, k), LinkKind::kV2V, k + 1};
  return effective_rate(capacity(gain, cfg.w_v2v, cfg.beta_v2v_linear()), cfg.k_sensed, cfg.tau(),
                        cfg.slot_t);
}

GameContext build_context(const ScenarioState& state, const SlotChannels& channels,
                          const std::vector<SensingReport>& reports, int slot) {
  const Config& cfg = state.cfg;
  const int n = cfg.n_obus;
  GameContext ctx = GameContext::empty(n);
  ctx.neighbors = state.neighbors;
  ctx.v2r_capacity = channels.v2r_capacity;
  ctx.gamma_in = cfg.gamma_in;
  ctx.gamma_out = cfg.gamma_out;
  ctx.gamma_cost = cfg.gamma_cost;
  ctx.slot_t = cfg.slot_t;
  ctx.packet_size = cfg.packet_size;
  ctx.r0 = cfg.r0;

  const double p0 = cfg.p0();
  for (int i = 0; i < n; ++i) {
    // Potential interferers at receiver i: its neighbours other than the sender.
    const int interferers = std::max(0, static_cast<int>(state.neighbors[i].size()) - 1);
    const double p_rx = p_success(interferers, cfg.k_channels, p0, cfg.p_miss, cfg.p_false);
    for (int j : state.neighbors[i]) {
      ctx.rate(j, i) = best_effective_rate(reports[j], channels.v2v, j, i, cfg);
      ctx.success(j, i) = p_rx;
      ctx.useful(j, i) =
          static_cast<int>((state.obus[j].possessed - state.obus[i].possessed).count());
    }
  }

  const auto window = rsu_window(slot, cfg);
  for (int i = 0; i < n; ++i) {
    int fresh = 0;
    for (int p : window) fresh += state.obus[i].possessed.test(static_cast<std::size_t>(p)) ? 0 : 1;
    ctx.rsu_useful[i] = fresh;
  }
  return ctx;
}

std::vector<V2vTransmission> resolve_v2v(const TransmissionGraph& g,
                                         const ChannelSlotState& truth,
                                         const std::vector<SensingReport>& reports,
                                         const V2vGains& gains,
                                         const std::vector<std::vector<int>>& neighbors,
                                         const std::vector<PacketSet>& possessed,
                                         const Config& cfg) {
  const int n = g.size();
  std::vector<V2vTransmission> out;
  std::vector<int> channel_of(static_cast<std::size_t>(n), -1);

  for (int tx = 0; tx < n; ++tx) {
    auto rx = g.outbound(tx);
    if (!rx) continue;
    V2vTransmission t;
    t.tx = tx;
    t.rx = *rx;
    t.channel = best_channel(reports[tx], gains, tx, *rx);
    if (t.channel >= 0) {
      t.rate = best_effective_rate(reports[tx], gains, tx, *rx, cfg);
      channel_of[tx] = t.channel;
    }
    out.push_back(t);
  }

  for (auto& t : out) {
    if (t.channel < 0) continue;
    t.primary_clear = truth.is_free(t.channel);
    t.peer_clear = std::none_of(neighbors[t.rx].begin(), neighbors[t.rx].end(), [&](int other) {
      return other != t.tx && channel_of[other] == t.channel;
    });
    t.success = t.primary_clear && t.peer_clear;
    if (t.success) {
      const auto needed = static_cast<int>((possessed[t.tx] - possessed[t.rx]).count());
      t.packets = std::min(packets_per_slot(t.rate, cfg), needed);
    }
  }
  return out;
}

namespace {

// Keep inherited V2V edges only while both ends remain in line of sight.
TransmissionGraph prune_lost_links(const TransmissionGraph& prev, const GameContext& ctx) {
  TransmissionGraph g = prev;
  for (const auto& [from, to] : prev.edges()) {
    if (from != kRsu && !ctx.is_neighbor(from, to)) g.remove_edge(from, to);
  }
  return g;
}

void transfer_lowest_first(const PacketSet& from, PacketSet& to, int count) {
  const PacketSet missing = from - to;
  for (auto p = missing.find_first(); p != PacketSet::npos && count > 0; p = missing.find_next(p)) {
    to.set(p);
    --count;
  }
}

}  // namespace

SlotReport run_slot(ScenarioState& state, Approach approach, const RunObservers* observers) {
  const Config& cfg = state.cfg;
  const int slot = state.slot + 1;
  const long long before = state.total_possessed();

  // Phase 0: mobility.
  Rng mobility = derive_stream(state.seed, slot, StreamLabel::kMobility);
  state.fleet = step_fleet(state.fleet, cfg.mobility, cfg.slot_t, mobility);
  state.neighbors = neighbor_lists(state.fleet, cfg.los_range);
  if (observers && observers->on_fleet) observers->on_fleet(slot, state.fleet);

  // Phase I: spectrum sensing.
  const SlotChannels channels = sample_slot_channels(state, slot);
  const auto reports = sense_all(state, channels.truth, slot);
  for (int i = 0; i < cfg.n_obus; ++i) state.obus[i].sensing = reports[i];

  // Phase II: transmission graph.
  const GameContext ctx = build_context(state, channels, reports, slot);
  SlotReport report;
  report.metrics.slot = slot;
  switch (approach) {
    case Approach::kCooperative: {
      Rng rng = derive_stream(state.seed, slot, StreamLabel::kFormation);
      FormationObserver hook;
      if (observers && observers->on_formation) {
        hook = [&](long long it, const TransmissionGraph& g) { observers->on_formation(slot, it, g); };
      }
      auto formed = form_network(prune_lost_links(state.graph, ctx), ctx, cfg.sigma_history, rng, hook);
      state.graph = std::move(formed.graph);
      report.metrics.formation_iters = formed.iterations;
      report.metrics.formation_rounds = formed.rounds;
      report.metrics.pruned_improvement = formed.pruned_improvement;
      break;
    }
    case Approach::kNonCooperative: {
      Rng rng = derive_stream(state.seed, slot, StreamLabel::kNoncoop);
      state.graph = noncoop_graph(ctx, rng);
      break;
    }
    case Approach::kBroadcast:
      state.graph = broadcast_only_graph(ctx);
      break;
    case Approach::kOptimal:
      state.graph = optimal_graph(ctx, cfg.optimal_objective);
      break;
  }

  // Phase III: data transmission against a snapshot of the packet sets.
  std::vector<PacketSet> snapshot;
  snapshot.reserve(state.obus.size());
  for (const auto& o : state.obus) snapshot.push_back(o.possessed);

  report.v2v = resolve_v2v(state.graph, channels.truth, reports, channels.v2v, state.neighbors,
                           snapshot, cfg);
  for (const auto& t : report.v2v) {
    if (t.packets > 0) transfer_lowest_first(snapshot[t.tx], state.obus[t.rx].possessed, t.packets);
  }

  const auto window = rsu_window(slot, cfg);
  for (int i = 0; i < cfg.n_obus; ++i) {
    if (state.graph.inbound(i) != kRsu || !(channels.v2r_capacity[i] > cfg.r0)) continue;
    for (int p : window) {
      auto& have = state.obus[i].possessed;
      if (!have.test(static_cast<std::size_t>(p))) {
        have.set(static_cast<std::size_t>(p));
        ++report.rsu_packets;
      }
    }
  }

  state.slot = slot;
  report.metrics.total_possessed = state.total_possessed();
  report.metrics.throughput = report.metrics.total_possessed - before;
  if (observers && observers->on_slot_end) observers->on_slot_end(state, report);
  return report;
}

MetricsSeries run_scenario(const Config& cfg, Approach approach, std::uint64_t seed,
                           const RunObservers* observers) {
  if (approach == Approach::kOptimal && cfg.n_obus > kMaxEnumerationObus) {
    throw EnumerationLimitError("optimal approach requires n_obus <= " +
                                std::to_string(kMaxEnumerationObus));
  }
  ScenarioState state = init_scenario(cfg, seed);
  MetricsSeries series;
  series.approach = approach;
  series.seed = seed;
  series.slots.reserve(static_cast<std::size_t>(cfg.slots));
  for (int t = 0; t < cfg.slots; ++t) {
    series.slots.push_back(run_slot(state, approach, observers).metrics);
  }
  return series;
}

}  // namespace pcd
