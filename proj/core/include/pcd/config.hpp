#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pcd {

/// Freeway mobility parameters. Lengths in meters, speeds in m/s.
struct MobilityConfig {
  double v_min = 10.0;
  double v_max = 30.0;
  double d_min = 50.0;
  double d_max = 100.0;
  double accel = 3.0;
  double p_speed_change = 0.1;
  /// Initial fleet window length. 0 selects 50 m per OBU.
  double fleet_length = 0.0;
  double rsu_distance = 350.0;
  double rsu_position = 0.0;

  double effective_fleet_length(int n_obus) const {
    return fleet_length > 0.0 ? fleet_length : 50.0 * n_obus;
  }

  bool operator==(const MobilityConfig&) const = default;
};

enum class OptimalObjective { kTotalUtility, kDeliveredPackets };

/// All simulation parameters. Power ratios (beta_*) are held in dB as they
/// appear in the config file; use the linear accessors for computation.
struct Config {
  int n_obus = 10;
  int m_packets = 100;
  double packet_size = 1e6;  // bits
  int k_channels = 10;
  int k_sensed = 4;
  double w_v2r = 75e6;  // Hz
  double w_v2v = 10e6;  // Hz
  double beta_v2r = 15.0;  // dB
  double beta_v2v = 10.0;  // dB
  double r0 = 5e6;  // bits/s
  double gamma_in = 1.0;
  double gamma_out = 0.5;
  double gamma_cost = 0.1;
  double p_miss = 0.1;
  double p_false = 0.1;
  double lambda_primary = 0.2;
  double slot_t = 1.0;
  /// Per-channel sensing time; unset means slot_t / k_channels.
  std::optional<double> tau_sense;
  int sigma_history = 3;
  double los_range = 150.0;
  std::uint64_t seed = 1;
  int slots = 100;
  /// Path-loss reference distance: gains scale as (distance / ref_distance)^-4.
  double ref_distance = 12.0;
  /// Lateral offset of the RSU from the road axis.
  double rsu_offset = 10.0;
  OptimalObjective optimal_objective = OptimalObjective::kTotalUtility;
  MobilityConfig mobility;

  double tau() const { return tau_sense ? *tau_sense : slot_t / k_channels; }
  double beta_v2r_linear() const;
  double beta_v2v_linear() const;
  /// Probability that a channel carries no primary traffic in a slot.
  double p0() const;

  bool operator==(const Config&) const = default;
};

enum class ConfigErrorKind {
  kParse,
  kUnknownKey,
  kBadValue,
  kNonPositive,
  kProbabilityRange,
  kSensedRange,
  kSensingTime,
  kPrimaryLoad,
  kSpeedRange,
  kDistanceRange,
  kSpeedChangeMass,
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ConfigErrorKind kind() const { return kind_; }

 private:
  ConfigErrorKind kind_;
};

/// Parse a flat `key=value` document. `#` starts a comment; blank lines are
/// ignored. Omitted keys keep their defaults. Throws ConfigError.
Config load_config(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Apply one `key=value` override to an existing config (no validation).
void apply_setting(Config& cfg, std::string_view key, std::string_view value);

/// Throws ConfigError on the first violated invariant; returns warnings.
std::vector<std::string> validate(const Config& cfg);

/// Serialize every field as `key=value` lines, round-trippable through load_config.
std::string serialize(const Config& cfg);

std::vector<std::string> config_keys();

}  // namespace pcd
