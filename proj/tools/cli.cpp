#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <locale>
#include <mutex>
#include <optional>
#include <tuple>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcd/baselines.hpp"
#include "pcd/spectrum.hpp"

namespace pcd::cli {

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Runs task(k) for k in [0, count) on up to hardware_concurrency threads.
template <typename Task>
void parallel_for(std::size_t count, Task task) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            task(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int approach_rank(Approach a) { return static_cast<int>(a); }

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSensed: return "k_sensed";
    case SweepAxis::kChannels: return "k_channels";
    case SweepAxis::kObus: return "n_obus";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (auto a : {SweepAxis::kSensed, SweepAxis::kChannels, SweepAxis::kObus}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("invalid sweep axis '" + std::string(name) +
                              "' (expected k_sensed, k_channels or n_obus)");
}

std::vector<int> parse_int_list(std::string_view text) {
  auto parse_one = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
      throw std::invalid_argument("invalid integer list '" + std::string(text) + "'");
    }
    return v;
  };
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const int lo = parse_one(text.substr(0, dots));
    const int hi = parse_one(text.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("invalid range '" + std::string(text) + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_one(text.substr(0, comma)));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::vector<Approach> parse_approach_list(std::string_view text) {
  std::vector<Approach> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto name = text.substr(0, comma);
    auto a = parse_approach(name);
    if (!a) throw std::invalid_argument("unknown approach '" + std::string(name) + "'");
    out.push_back(*a);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  std::sort(out.begin(), out.end(), [](Approach x, Approach y) { return approach_rank(x) < approach_rank(y); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RunRow> run_rows(const Config& cfg, Approach approach, std::uint64_t seed) {
  const auto series = run_scenario(cfg, approach, seed);
  std::vector<RunRow> rows;
  rows.reserve(series.slots.size());
  for (const auto& m : series.slots) {
    rows.push_back({m.slot, approach, seed, m.total_possessed, m.throughput, m.formation_iters});
  }
  return rows;
}

std::vector<SweepRow> sweep_rows(const Config& base, SweepAxis axis, const std::vector<int>& values,
                                 const std::vector<Approach>& approaches, int seeds,
                                 std::uint64_t seed0) {
  struct Job {
    Config cfg;
    SweepRow row;
  };
  std::vector<Job> jobs;
  for (int value : values) {
    Config cfg = base;
    switch (axis) {
      case SweepAxis::kSensed:
        cfg.k_sensed = value;
        break;
      case SweepAxis::kChannels:
        cfg.k_channels = value;
        if (value >= 1) cfg.k_sensed = reference_sensed_count(value);
        break;
      case SweepAxis::kObus:
        cfg.n_obus = value;
        break;
    }
    validate(cfg);
    for (Approach a : approaches) {
      if (a == Approach::kOptimal && cfg.n_obus > kMaxEnumerationObus) continue;
      for (int s = 0; s < seeds; ++s) {
        const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(s);
        jobs.push_back({cfg, {axis, value, a, seed, 0}});
      }
    }
  }
  parallel_for(jobs.size(), [&](std::size_t k) {
    auto& job = jobs[k];
    job.row.p_final = run_scenario(job.cfg, job.row.approach, job.row.seed).final_possessed();
  });

  std::vector<SweepRow> rows;
  rows.reserve(jobs.size());
  for (const auto& job : jobs) rows.push_back(job.row);
  std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::tuple(x.axis_value, approach_rank(x.approach), x.seed) <
           std::tuple(y.axis_value, approach_rank(y.approach), y.seed);
  });
  return rows;
}

std::vector<ConvergenceRow> convergence_rows(const Config& base, const std::vector<int>& n_list,
                                             int seeds, std::uint64_t seed0) {
  struct Job {
    int n;
    std::uint64_t seed;
    std::vector<ConvergenceRow> rows;
  };
  std::vector<Job> jobs;
  for (int n : n_list) {
    Config cfg = base;
    cfg.n_obus = n;
    validate(cfg);
    for (int s = 0; s < seeds; ++s) jobs.push_back({n, seed0 + static_cast<std::uint64_t>(s), {}});
  }

  parallel_for(jobs.size(), [&](std::size_t k) {
    auto& job = jobs[k];
    Config cfg = base;
    cfg.n_obus = job.n;
    std::vector<long long> iters;
    std::vector<long long> possessed{0};
    RunObservers obs;
    obs.on_slot_end = [&](const ScenarioState& st, const SlotReport& r) {
      iters.push_back(r.metrics.formation_iters);
      possessed.push_back(st.total_possessed());
    };
    run_scenario(cfg, Approach::kCooperative, job.seed, &obs);

    const double n = job.n;
    long long cumulative = 0;
    job.rows.push_back({job.n, 0, job.seed, possessed[0] / n});
    for (std::size_t t = 0; t < iters.size(); ++t) {
      for (long long it = 1; it <= iters[t]; ++it) {
        ++cumulative;
        const long long value = it == iters[t] ? possessed[t + 1] : possessed[t];
        job.rows.push_back({job.n, cumulative, job.seed, value / n});
      }
    }
  });

  std::vector<ConvergenceRow> rows;
  for (auto& job : jobs) rows.insert(rows.end(), job.rows.begin(), job.rows.end());
  std::stable_sort(rows.begin(), rows.end(), [](const ConvergenceRow& x, const ConvergenceRow& y) {
    return std::tuple(x.n, x.seed, x.iteration) < std::tuple(y.n, y.seed, y.iteration);
  });
  return rows;
}

namespace {

void render(std::ostream& out, const std::vector<RunRow>& rows, Format format) {
  if (format == Format::kJson) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"slot", r.slot},
                     {"approach", std::string(pcd::to_string(r.approach))},
                     {"seed", r.seed},
                     {"total_possessed", r.total_possessed},
                     {"throughput", r.throughput},
                     {"formation_iters", r.formation_iters}});
    }
    out << arr.dump(1) << '\n';
    return;
  }
  out << "slot,approach,seed,total_possessed,throughput,formation_iters\n";
  for (const auto& r : rows) {
    out << r.slot << ',' << pcd::to_string(r.approach) << ',' << r.seed << ',' << r.total_possessed
        << ',' << r.throughput << ',' << r.formation_iters << '\n';
  }
}

void render(std::ostream& out, const std::vector<SweepRow>& rows, Format format) {
  if (format == Format::kJson) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"axis", std::string(to_string(r.axis))},
                     {"axis_value", r.axis_value},
                     {"approach", std::string(pcd::to_string(r.approach))},
                     {"seed", r.seed},
                     {"p_final", r.p_final}});
    }
    out << arr.dump(1) << '\n';
    return;
  }
  out << "axis,axis_value,approach,seed,p_final\n";
  for (const auto& r : rows) {
    out << to_string(r.axis) << ',' << r.axis_value << ',' << pcd::to_string(r.approach) << ','
        << r.seed << ',' << r.p_final << '\n';
  }
}

void render(std::ostream& out, const std::vector<ConvergenceRow>& rows, Format format) {
  if (format == Format::kJson) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"n", r.n},
                     {"iteration", r.iteration},
                     {"seed", r.seed},
                     {"avg_possessed", r.avg_possessed}});
    }
    out << arr.dump(1) << '\n';
    return;
  }
  out << "n,iteration,seed,avg_possessed\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.iteration << ',' << r.seed << ',' << format_double(r.avg_possessed)
        << '\n';
  }
}

// Numbers are rendered under the classic locale whatever the caller's stream uses.
template <typename Rows>
void write_classic(std::ostream& out, const Rows& rows, Format format) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  render(buf, rows, format);
  out << buf.str();
}

}  // namespace

void write(std::ostream& out, const std::vector<RunRow>& rows, Format format) {
  write_classic(out, rows, format);
}

void write(std::ostream& out, const std::vector<SweepRow>& rows, Format format) {
  write_classic(out, rows, format);
}

void write(std::ostream& out, const std::vector<ConvergenceRow>& rows, Format format) {
  write_classic(out, rows, format);
}

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string format = "csv";
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("config,--config", opts.config_path, "key=value configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "override a configuration key (key=value)")
      ->allow_extra_args(false);
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opts.out_path, "write output to this file instead of stdout");
}

Config resolve_config(const CommonOptions& opts, std::ostream& err) {
  std::string text;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  // Overrides are appended as extra lines so that validation sees the final values.
  for (const auto& kv : opts.overrides) {
    if (kv.find('=') == std::string::npos || kv.find('\n') != std::string::npos) {
      throw ConfigError(ConfigErrorKind::kParse, "--set expects key=value, got '" + kv + "'");
    }
    text += '\n';
    text += kv;
  }
  std::vector<std::string> warnings;
  Config cfg = load_config(text, &warnings);
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  return cfg;
}

template <typename Rows>
void emit(const CommonOptions& opts, const Rows& rows, std::ostream& out) {
  const Format format = opts.format == "json" ? Format::kJson : Format::kCsv;
  if (opts.out_path.empty()) {
    write(out, rows, format);
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw std::runtime_error("cannot open output file '" + opts.out_path + "'");
  write(file, rows, format);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Popular content distribution simulator for cognitive-radio VANETs", "pcdsim"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string run_approach = "cooperative";
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_slots;
  std::string trace_fleet;
  std::string trace_graph;
  auto* run = app.add_subcommand("run", "run one scenario and print per-slot metrics");
  add_common(run, run_opts);
  run->add_option("--approach", run_approach, "cooperative | noncoop | broadcast | optimal");
  run->add_option("--seed", run_seed, "master seed (default: config seed)");
  run->add_option("--slots", run_slots, "number of slots (default: config slots)");
  run->add_option("--trace-fleet", trace_fleet, "write per-slot fleet CSV (slot,obu,lane,x,v)");
  run->add_option("--trace-graph", trace_graph,
                  "write formation graph trace CSV (slot,iteration,from,to)");

  CommonOptions sweep_opts;
  std::string axis_name;
  std::string range_text;
  std::string approaches_text = "cooperative,noncoop,broadcast";
  int sweep_seeds = 20;
  std::optional<std::uint64_t> sweep_seed;
  auto* sweep = app.add_subcommand("sweep", "final possessed packets across a parameter axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis_name, "k_sensed | k_channels | n_obus")->required();
  sweep->add_option("--range", range_text, "values as a..b or a,b,c")->required();
  sweep->add_option("--approaches", approaches_text, "comma-separated approaches");
  sweep->add_option("--seeds", sweep_seeds, "seeds per point")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "first seed; others are seed+index");

  CommonOptions conv_opts;
  std::string n_list_text = "5,10,15";
  int conv_seeds = 5;
  std::optional<std::uint64_t> conv_seed;
  auto* conv = app.add_subcommand("convergence",
                                  "average possessed packets against formation iterations");
  add_common(conv, conv_opts);
  conv->add_option("--n-list", n_list_text, "fleet sizes, e.g. 5,10,15");
  conv->add_option("--seeds", conv_seeds, "seeds per fleet size")->check(CLI::PositiveNumber);
  conv->add_option("--seed", conv_seed, "first seed; others are seed+index");

  CommonOptions show_opts;
  auto* show = app.add_subcommand("show-config", "print the resolved configuration");
  add_common(show, show_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) {
      Config cfg = resolve_config(run_opts, err);
      if (run_slots) cfg.slots = *run_slots;
      validate(cfg);
      auto approach = parse_approach(run_approach);
      if (!approach) throw std::invalid_argument("unknown approach '" + run_approach + "'");
      const std::uint64_t seed = run_seed.value_or(cfg.seed);

      std::ofstream fleet_out;
      std::ofstream graph_out;
      RunObservers obs;
      if (!trace_fleet.empty()) {
        fleet_out.imbue(std::locale::classic());
        fleet_out.open(trace_fleet);
        fleet_out << "slot,obu,lane,x,v\n";
        obs.on_fleet = [&](int slot, const FleetState& f) { write_fleet_trace(fleet_out, slot, f); };
      }
      if (!trace_graph.empty()) {
        graph_out.imbue(std::locale::classic());
        graph_out.open(trace_graph);
        graph_out << "slot,iteration,from,to\n";
        obs.on_formation = [&](int slot, long long it, const TransmissionGraph& g) {
          std::ostringstream rows;
          rows.imbue(std::locale::classic());
          write_graph_trace(rows, it, g);
          std::istringstream lines(rows.str());
          for (std::string line; std::getline(lines, line);) graph_out << slot << ',' << line << '\n';
        };
      }
      const auto series = run_scenario(cfg, *approach, seed, &obs);
      std::vector<RunRow> rows;
      for (const auto& m : series.slots) {
        rows.push_back({m.slot, *approach, seed, m.total_possessed, m.throughput, m.formation_iters});
      }
      emit(run_opts, rows, out);
    } else if (*sweep) {
      Config cfg = resolve_config(sweep_opts, err);
      const auto rows = sweep_rows(cfg, parse_axis(axis_name), parse_int_list(range_text),
                                   parse_approach_list(approaches_text), sweep_seeds,
                                   sweep_seed.value_or(cfg.seed));
      emit(sweep_opts, rows, out);
    } else if (*conv) {
      Config cfg = resolve_config(conv_opts, err);
      const auto rows = convergence_rows(cfg, parse_int_list(n_list_text), conv_seeds,
                                         conv_seed.value_or(cfg.seed));
      emit(conv_opts, rows, out);
    } else if (*show) {
      out << serialize(resolve_config(show_opts, err));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace pcd::cli
