#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcd/config.hpp"
#include "pcd/engine.hpp"

namespace pcd::cli {

enum class Format { kCsv, kJson };

struct RunRow {
  int slot;
  Approach approach;
  std::uint64_t seed;
  long long total_possessed;
  long long throughput;
  long long formation_iters;
};

enum class SweepAxis { kSensed, kChannels, kObus };

struct SweepRow {
  SweepAxis axis;
  int axis_value;
  Approach approach;
  std::uint64_t seed;
  long long p_final;
};

struct ConvergenceRow {
  int n;
  long long iteration;
  std::uint64_t seed;
  double avg_possessed;
};

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view name);

/// Inclusive integer range "a..b" or comma list "a,b,c".
std::vector<int> parse_int_list(std::string_view text);
std::vector<Approach> parse_approach_list(std::string_view text);

std::vector<RunRow> run_rows(const Config& cfg, Approach approach, std::uint64_t seed);

/// One row per (value, approach, seed), sorted in that order. Optimal rows
/// are emitted only where n_obus fits the enumeration limit. A k_channels
/// sweep also sets k_sensed to the reference sensed count for each K.
/// Throws ConfigError if any sweep point is invalid.
std::vector<SweepRow> sweep_rows(const Config& base, SweepAxis axis, const std::vector<int>& values,
                                 const std::vector<Approach>& approaches, int seeds,
                                 std::uint64_t seed0);

/// Average possessed packets per OBU against cumulative formation iterations
/// (OBU updates) for cooperative runs. Iteration 0 is the initial state; the
/// value at the last iteration of slot t is the state after slot t's data
/// transmission.
std::vector<ConvergenceRow> convergence_rows(const Config& base, const std::vector<int>& n_list,
                                             int seeds, std::uint64_t seed0);

void write(std::ostream& out, const std::vector<RunRow>& rows, Format format);
void write(std::ostream& out, const std::vector<SweepRow>& rows, Format format);
void write(std::ostream& out, const std::vector<ConvergenceRow>& rows, Format format);

/// Entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcd::cli
