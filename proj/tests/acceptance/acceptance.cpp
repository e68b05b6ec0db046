// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "instances.hpp"
#include "oracles.hpp"
#include "pcd/baselines.hpp"
#include "pcd/channel.hpp"
#include "pcd/engine.hpp"
#include "pcd/spectrum.hpp"

using namespace pcd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double mean_final(const Config& cfg, Approach a, std::uint64_t seed0, int seeds) {
  double sum = 0.0;
  for (int s = 0; s < seeds; ++s) sum += run_scenario(cfg, a, seed0 + s).final_possessed();
  return sum / seeds;
}

// Mean over seeds of the per-slot throughput, maximised over slots.
double peak_mean_throughput(const Config& cfg, Approach a, std::uint64_t seed0, int seeds) {
  std::vector<double> mean(static_cast<std::size_t>(cfg.slots), 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto series = run_scenario(cfg, a, seed0 + s);
    for (int t = 0; t < cfg.slots; ++t) mean[t] += series.slots[t].throughput / double(seeds);
  }
  return *std::max_element(mean.begin(), mean.end());
}

constexpr std::uint64_t kSeed0 = 1;

Outcome approach_ordering() {
  const Config cfg;  // N=10, K=10, K'=4, 100 slots
  const double coop = mean_final(cfg, Approach::kCooperative, kSeed0, 20);
  const double nonc = mean_final(cfg, Approach::kNonCooperative, kSeed0, 20);
  const double bcast = mean_final(cfg, Approach::kBroadcast, kSeed0, 20);
  const bool pass = coop > nonc && nonc > bcast && coop >= 1.10 * nonc && coop >= 2.0 * bcast;
  return {pass, fmt("mean P(100) coop=%.1f noncoop=%.1f broadcast=%.1f; coop/noncoop=%.3f "
                    "(>=1.10) coop/broadcast=%.3f (>=2)",
                    coop, nonc, bcast, coop / nonc, coop / bcast)};
}

Outcome peak_throughput() {
  const Config cfg;
  const double coop = peak_mean_throughput(cfg, Approach::kCooperative, kSeed0, 20);
  const double bcast = peak_mean_throughput(cfg, Approach::kBroadcast, kSeed0, 20);
  return {coop >= 1.5 * bcast,
          fmt("peak mean throughput coop=%.2f broadcast=%.2f ratio=%.3f (>=1.5)", coop, bcast,
              coop / bcast)};
}

Outcome sensing_tradeoff() {
  constexpr int kSeeds = 100;
  std::string detail;
  bool pass = true;
  for (Approach a : {Approach::kCooperative, Approach::kNonCooperative}) {
    std::vector<double> p;
    for (int k = 1; k <= 10; ++k) {
      Config cfg;
      cfg.k_sensed = k;
      p.push_back(mean_final(cfg, a, kSeed0, kSeeds));
    }
    const int argmax = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) + 1;
    const bool ok = argmax >= 3 && argmax <= 5 && p.back() > 0.0;
    pass = pass && ok;
    detail += fmt("%s argmax K'=%d P(K'=10)=%.1f [", std::string(to_string(a)).c_str(), argmax,
                  p.back());
    for (std::size_t k = 0; k < p.size(); ++k) detail += fmt(k ? " %.0f" : "%.0f", p[k]);
    detail += "]; ";
  }
  detail += fmt("%d seeds per point", kSeeds);
  return {pass, detail};
}

Outcome sensing_equation() {
  const double r10 = sensing_equation_root(10);
  const double r100 = sensing_equation_root(100);
  const double o10 = oracle::sensing_root_bisection(10);
  const double o100 = oracle::sensing_root_bisection(100);
  bool clamped = true;
  for (int k = 1; k <= 500; ++k) {
    const int c = reference_sensed_count(k);
    clamped = clamped && c >= 1 && c <= k;
  }
  const bool pass = std::abs(r10 - 3.43) <= 0.01 && std::abs(r100 - 23.1) <= 0.1 &&
                    std::abs(r10 - o10) < 1e-9 && std::abs(r100 - o100) < 1e-9 && clamped &&
                    reference_sensed_count(1) == 1;
  return {pass, fmt("root(10)=%.6f bisection=%.6f; root(100)=%.6f bisection=%.6f; "
                    "integer outputs within [1,K] for K=1..500",
                    r10, o10, r100, o100)};
}

struct CollisionTuple {
  int n;
  double lambda;
  double pm;
  double pf;
};

// Receiver 1 hears transmitter 0 and n interferers 2..n+1, each sending to
// its own receiver elsewhere. Geometry is fixed; fading, primary traffic and
// sensing are redrawn every slot and outcomes come from resolve_v2v.
struct CollisionEstimate {
  double freq;
  double se;
  double analytic;
  long long trials;
};

CollisionEstimate collision_mc(const CollisionTuple& t, int slots, std::uint64_t seed) {
  constexpr int kChannels = 10;
  Config cfg;
  cfg.k_channels = kChannels;
  cfg.k_sensed = kChannels;
  cfg.lambda_primary = t.lambda;
  cfg.p_miss = t.pm;
  cfg.p_false = t.pf;

  const int nodes = 2 + 2 * t.n;
  TransmissionGraph g(nodes);
  g.add_edge(0, 1);
  std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(nodes));
  for (int j = 0; j < t.n; ++j) {
    const int tx = 2 + j;
    const int rx = 2 + t.n + j;
    g.add_edge(tx, rx);
    nbrs[1].push_back(tx);
    nbrs[tx].push_back(1);
    nbrs[tx].push_back(rx);
    nbrs[rx].push_back(tx);
  }
  nbrs[1].push_back(0);
  nbrs[0].push_back(1);
  for (auto& l : nbrs) std::sort(l.begin(), l.end());

  const PacketSet none(static_cast<std::size_t>(cfg.m_packets));
  std::vector<PacketSet> held(static_cast<std::size_t>(nodes), none);
  for (int tx = 0; tx < nodes; ++tx) {
    if (g.outbound(tx)) held[tx].set(0);
  }

  Rng rng(seed);
  long long trials = 0;
  long long successes = 0;
  for (int s = 0; s < slots; ++s) {
    const auto truth = sample_primary(kChannels, t.lambda, rng);
    std::vector<SensingReport> reports;
    V2vGains gains(nodes, kChannels);
    for (int i = 0; i < nodes; ++i) {
      reports.push_back(sense_channels(truth, kChannels, t.pm, t.pf, rng, i));
      if (auto rx = g.outbound(i)) {
        for (int k = 0; k < kChannels; ++k) {
          gains.set(i, *rx, k, sample_gain(1.0, true, rng, LinkKind::kV2V, k + 1).magnitude_sq);
        }
      }
    }
    const auto out = resolve_v2v(g, truth, reports, gains, nbrs, held, cfg);
    const auto& link = out.front();
    if (link.tx != 0 || link.channel < 0) continue;  // condition on the sender having a channel
    ++trials;
    successes += link.success ? 1 : 0;
  }
  const double p = static_cast<double>(successes) / trials;
  const double analytic = p_success(t.n, kChannels, std::exp(-t.lambda), t.pm, t.pf);
  return {p, std::sqrt(analytic * (1.0 - analytic) / trials), analytic, trials};
}

Outcome collision_fidelity() {
  const std::vector<CollisionTuple> tuples = {
      {5, 0.2, 0.1, 0.1}, {0, 0.2, 0.1, 0.1},  {3, 0.2, 0.0, 0.0},
      {2, 0.1, 0.05, 0.1}, {4, 0.4, 0.1, 0.05}, {6, 0.2, 0.0, 0.0},
  };
  constexpr int kSlots = 10000;
  bool pass = true;
  bool anchor = false;
  std::string detail;
  std::uint64_t seed = 4242;
  for (const auto& t : tuples) {
    const auto e = collision_mc(t, kSlots, seed++);
    const double z = (e.freq - e.analytic) / e.se;
    const bool ok = std::abs(z) <= 3.0;
    pass = pass && ok;
    if (t.n == 5 && t.lambda == 0.2 && t.pm == 0.1 && t.pf == 0.1) {
      anchor = std::abs(e.analytic - 0.509) < 0.0005;
    }
    detail += fmt("(n=%d,l=%.2f,pm=%.2f,pf=%.2f) mc=%.4f eq=%.4f z=%+.2f%s; ", t.n, t.lambda, t.pm,
                  t.pf, e.freq, e.analytic, z, ok ? "" : " X");
  }
  detail += fmt("%d slots per tuple", kSlots);
  return {pass && anchor, detail};
}

Outcome convergence_stability() {
  Rng pick(2718);
  std::uniform_int_distribution<int> n_dist(2, 15);
  std::uniform_int_distribution<int> warm_dist(0, 40);
  std::vector<int> rounds;
  bool within = true;
  bool nash = true;
  int nash_checked = 0;
  long long max_iters = 0;
  for (int k = 0; k < 100; ++k) {
    Config cfg;
    cfg.n_obus = n_dist(pick);
    const auto inst = testing::engine_instance(cfg, 9000 + k, warm_dist(pick));
    Rng rng(derive_stream(9000 + k, 0, StreamLabel::kFormation));
    FormationResult r;
    try {
      r = form_network(inst.previous, inst.ctx, cfg.sigma_history, rng);
    } catch (const std::logic_error&) {
      within = false;
      continue;
    }
    rounds.push_back(r.rounds);
    max_iters = std::max(max_iters, r.iterations);
    within = within && static_cast<long double>(r.iterations) <=
                           formation_ceiling(cfg.n_obus, cfg.sigma_history);
    if (!r.pruned_improvement) {
      ++nash_checked;
      nash = nash && is_local_nash(r.graph, inst.ctx);
    }
  }
  std::sort(rounds.begin(), rounds.end());
  const double median =
      rounds.empty() ? 1e9 : 0.5 * (rounds[(rounds.size() - 1) / 2] + rounds[rounds.size() / 2]);
  const bool pass = rounds.size() == 100 && within && nash && median <= 10.0;
  return {pass, fmt("instances=%zu median rounds=%.1f max rounds=%d max updates=%lld; "
                    "ceiling respected=%s; local Nash on %d/%d unpruned runs=%s",
                    rounds.size(), median, rounds.empty() ? 0 : rounds.back(), max_iters,
                    within ? "yes" : "no", nash_checked, nash_checked, nash ? "yes" : "no")};
}

Outcome optimality_sandwich() {
  Rng pick(1618);
  std::uniform_int_distribution<int> n_dist(1, 5);
  std::uniform_int_distribution<int> warm_dist(5, 40);
  int ok = 0;
  double min_gap_top = INFINITY;
  double min_gap_bottom = INFINITY;
  for (int k = 0; k < 50; ++k) {
    Config cfg;
    cfg.n_obus = n_dist(pick);
    const auto inst = testing::engine_instance(cfg, 7000 + k, warm_dist(pick));
    Rng rng(7000 + k);
    const auto formed = form_network(TransmissionGraph(cfg.n_obus), inst.ctx, cfg.sigma_history, rng);
    const double u_opt = total_utility(optimal_graph(inst.ctx), inst.ctx);
    const double u_form = total_utility(formed.graph, inst.ctx);
    const double u_empty = total_utility(TransmissionGraph(cfg.n_obus), inst.ctx);
    const double eps = 1e-9;
    if (u_opt + eps >= u_form && u_form + eps >= u_empty) ++ok;
    min_gap_top = std::min(min_gap_top, u_opt - u_form);
    min_gap_bottom = std::min(min_gap_bottom, u_form - u_empty);
  }
  return {ok == 50, fmt("%d/50 instances satisfy optimal >= formed >= empty; "
                        "min(opt-formed)=%.4f min(formed-empty)=%.4f",
                        ok, min_gap_top, min_gap_bottom)};
}

Outcome scalability() {
  Config small;
  small.n_obus = 10;
  Config large;
  large.n_obus = 30;
  const double p10 = mean_final(small, Approach::kCooperative, kSeed0, 20) / 10.0;
  const double p30 = mean_final(large, Approach::kCooperative, kSeed0, 20) / 30.0;
  const double rel = std::abs(p10 - p30) / p10;
  return {rel < 0.20, fmt("per-OBU P(100) N=10: %.2f N=30: %.2f relative difference %.3f (<0.20)",
                          p10, p30, rel)};
}

Outcome invariant_fuzz() {
  Rng pick(31337);
  std::uniform_int_distribution<int> n_dist(2, 20);
  std::uniform_int_distribution<int> k_dist(1, 10);
  std::uniform_real_distribution<double> p_dist(0.0, 0.5);
  std::uniform_real_distribution<double> lambda_dist(0.0, 1.0);
  long long degree = 0;
  long long monotone = 0;
  long long speed = 0;
  long long csv = 0;
  long long slots = 0;
  const Approach approaches[] = {Approach::kCooperative, Approach::kNonCooperative,
                                 Approach::kBroadcast};
  for (int k = 0; k < 200; ++k) {
    Config cfg;
    cfg.n_obus = n_dist(pick);
    cfg.k_sensed = k_dist(pick);
    cfg.mobility.p_speed_change = p_dist(pick);
    cfg.lambda_primary = lambda_dist(pick);
    cfg.slots = 60;
    Approach a = approaches[k % 3];
    if (k % 10 == 9 && cfg.n_obus <= kMaxEnumerationObus) a = Approach::kOptimal;
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(k);

    std::vector<PacketSet> before;
    RunObservers obs;
    obs.on_fleet = [&](int, const FleetState& f) {
      for (const auto& v : f.vehicles) {
        if (v.v < cfg.mobility.v_min || v.v > cfg.mobility.v_max) ++speed;
      }
    };
    ScenarioState s = init_scenario(cfg, seed);
    for (int t = 0; t < cfg.slots; ++t) {
      before.clear();
      for (const auto& o : s.obus) before.push_back(o.possessed);
      run_slot(s, a, &obs);
      ++slots;
      if (!s.graph.is_valid()) ++degree;
      for (int i = 0; i < cfg.n_obus; ++i) {
        if (!(before[i] - s.obus[i].possessed).none()) ++monotone;
      }
    }

    std::ostringstream x;
    std::ostringstream y;
    cli::write(x, cli::run_rows(cfg, a, seed), cli::Format::kCsv);
    cli::write(y, cli::run_rows(cfg, a, seed), cli::Format::kCsv);
    if (x.str() != y.str()) ++csv;
  }
  const long long total = degree + monotone + speed + csv;
  return {total == 0, fmt("200 seeds, %lld slots: degree-cap=%lld packet-loss=%lld speed=%lld "
                          "csv-mismatch=%lld",
                          slots, degree, monotone, speed, csv)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 approach ordering", approach_ordering},
      {"2 peak throughput gap", peak_throughput},
      {"3 sensing-throughput tradeoff", sensing_tradeoff},
      {"4 sensing equation solver", sensing_equation},
      {"5 collision probability fidelity", collision_fidelity},
      {"6 convergence and stability", convergence_stability},
      {"7 optimality sandwich", optimality_sandwich},
      {"8 scalability trend", scalability},
      {"9 invariant fuzz", invariant_fuzz},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
