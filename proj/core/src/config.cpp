#include "pcd/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace pcd {

double Config::beta_v2r_linear() const { return std::pow(10.0, beta_v2r / 10.0); }
double Config::beta_v2v_linear() const { return std::pow(10.0, beta_v2v / 10.0); }
double Config::p0() const { return std::exp(-lambda_primary); }

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError(ConfigErrorKind::kBadValue,
                      "invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct Field {
  std::function<void(Config&, std::string_view, std::string_view)> set;
  std::function<std::optional<std::string>(const Config&)> get;
};

template <typename T>
Field number_field(T Config::*member) {
  return {[member](Config& c, std::string_view k, std::string_view v) {
            c.*member = parse_number<T>(k, v);
          },
          [member](const Config& c) -> std::optional<std::string> {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

Field mobility_field(double MobilityConfig::*member) {
  return {[member](Config& c, std::string_view k, std::string_view v) {
            c.mobility.*member = parse_number<double>(k, v);
          },
          [member](const Config& c) -> std::optional<std::string> {
            return format_double(c.mobility.*member);
          }};
}

// Ordered so that serialize() output is stable.
const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("n_obus", number_field(&Config::n_obus));
    t.emplace_back("m_packets", number_field(&Config::m_packets));
    t.emplace_back("packet_size", number_field(&Config::packet_size));
    t.emplace_back("k_channels", number_field(&Config::k_channels));
    t.emplace_back("k_sensed", number_field(&Config::k_sensed));
    t.emplace_back("w_v2r", number_field(&Config::w_v2r));
    t.emplace_back("w_v2v", number_field(&Config::w_v2v));
    t.emplace_back("beta_v2r", number_field(&Config::beta_v2r));
    t.emplace_back("beta_v2v", number_field(&Config::beta_v2v));
    t.emplace_back("r0", number_field(&Config::r0));
    t.emplace_back("gamma_in", number_field(&Config::gamma_in));
    t.emplace_back("gamma_out", number_field(&Config::gamma_out));
    t.emplace_back("gamma_cost", number_field(&Config::gamma_cost));
    t.emplace_back("p_miss", number_field(&Config::p_miss));
    t.emplace_back("p_false", number_field(&Config::p_false));
    t.emplace_back("lambda_primary", number_field(&Config::lambda_primary));
    t.emplace_back("slot_t", number_field(&Config::slot_t));
    t.emplace_back("tau_sense",
                   Field{[](Config& c, std::string_view k, std::string_view v) {
                           c.tau_sense = parse_number<double>(k, v);
                         },
                         [](const Config& c) -> std::optional<std::string> {
                           if (!c.tau_sense) return std::nullopt;
                           return format_double(*c.tau_sense);
                         }});
    t.emplace_back("sigma_history", number_field(&Config::sigma_history));
    t.emplace_back("los_range", number_field(&Config::los_range));
    t.emplace_back("seed", number_field(&Config::seed));
    t.emplace_back("slots", number_field(&Config::slots));
    t.emplace_back("ref_distance", number_field(&Config::ref_distance));
    t.emplace_back("rsu_offset", number_field(&Config::rsu_offset));
    t.emplace_back("optimal_objective",
                   Field{[](Config& c, std::string_view k, std::string_view v) {
                           if (v == "utility") {
                             c.optimal_objective = OptimalObjective::kTotalUtility;
                           } else if (v == "packets") {
                             c.optimal_objective = OptimalObjective::kDeliveredPackets;
                           } else {
                             throw ConfigError(ConfigErrorKind::kBadValue,
                                               "invalid value '" + std::string(v) + "' for key '" +
                                                   std::string(k) + "' (expected utility|packets)");
                           }
                         },
                         [](const Config& c) -> std::optional<std::string> {
                           return c.optimal_objective == OptimalObjective::kTotalUtility ? "utility"
                                                                                         : "packets";
                         }});
    t.emplace_back("v_min", mobility_field(&MobilityConfig::v_min));
    t.emplace_back("v_max", mobility_field(&MobilityConfig::v_max));
    t.emplace_back("d_min", mobility_field(&MobilityConfig::d_min));
    t.emplace_back("d_max", mobility_field(&MobilityConfig::d_max));
    t.emplace_back("accel", mobility_field(&MobilityConfig::accel));
    t.emplace_back("p_speed_change", mobility_field(&MobilityConfig::p_speed_change));
    t.emplace_back("fleet_length", mobility_field(&MobilityConfig::fleet_length));
    t.emplace_back("rsu_distance", mobility_field(&MobilityConfig::rsu_distance));
    t.emplace_back("rsu_position", mobility_field(&MobilityConfig::rsu_position));
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, field] : field_table()) {
    if (name == key) return &field;
  }
  return nullptr;
}

[[noreturn]] void fail(ConfigErrorKind kind, const std::string& msg) {
  throw ConfigError(kind, "invariant violation: " + msg);
}

}  // namespace

void apply_setting(Config& cfg, std::string_view key, std::string_view value) {
  const Field* field = find_field(key);
  if (field == nullptr) {
    throw ConfigError(ConfigErrorKind::kUnknownKey, "unknown key '" + std::string(key) + "'");
  }
  field->set(cfg, key, value);
}

std::vector<std::string> validate(const Config& c) {
  if (c.n_obus <= 0) fail(ConfigErrorKind::kNonPositive, "n_obus must be positive");
  if (c.m_packets <= 0) fail(ConfigErrorKind::kNonPositive, "m_packets must be positive");
  if (c.k_channels <= 0) fail(ConfigErrorKind::kNonPositive, "k_channels must be positive");
  if (c.sigma_history <= 0) fail(ConfigErrorKind::kNonPositive, "sigma_history must be positive");
  if (c.slots <= 0) fail(ConfigErrorKind::kNonPositive, "slots must be positive");
  for (auto [name, v] : {std::pair{"packet_size", c.packet_size}, {"w_v2r", c.w_v2r},
                         {"w_v2v", c.w_v2v}, {"r0", c.r0}, {"gamma_in", c.gamma_in},
                         {"gamma_out", c.gamma_out}, {"gamma_cost", c.gamma_cost},
                         {"slot_t", c.slot_t}, {"los_range", c.los_range},
                         {"ref_distance", c.ref_distance}, {"rsu_offset", c.rsu_offset},
                         {"accel", c.mobility.accel}}) {
    if (!(v > 0.0)) fail(ConfigErrorKind::kNonPositive, std::string(name) + " must be positive");
  }
  if (c.tau_sense && !(*c.tau_sense > 0.0)) {
    fail(ConfigErrorKind::kNonPositive, "tau_sense must be positive");
  }
  if (!(c.lambda_primary >= 0.0)) {
    fail(ConfigErrorKind::kNonPositive, "lambda_primary must be nonnegative");
  }
  for (auto [name, v] : {std::pair{"p_miss", c.p_miss}, {"p_false", c.p_false}}) {
    if (!(v >= 0.0 && v <= 1.0)) {
      fail(ConfigErrorKind::kProbabilityRange, std::string(name) + " must lie in [0, 1]");
    }
  }
  if (c.k_sensed < 1 || c.k_sensed > c.k_channels) {
    fail(ConfigErrorKind::kSensedRange, "k_sensed must lie in [1, k_channels]");
  }
  // Small relative slack so that the default tau = T/K with K' = K is accepted.
  if (c.slot_t < c.k_sensed * c.tau() * (1.0 - 1e-12)) {
    fail(ConfigErrorKind::kSensingTime, "slot_t must be at least k_sensed * tau_sense");
  }
  if (!(c.k_channels * c.p0() > 1.0)) {
    fail(ConfigErrorKind::kPrimaryLoad, "k_channels * exp(-lambda_primary) must exceed 1");
  }
  const auto& m = c.mobility;
  if (!(m.v_min > 0.0 && m.v_min < m.v_max)) {
    fail(ConfigErrorKind::kSpeedRange, "require 0 < v_min < v_max");
  }
  if (!(m.d_min > 0.0 && m.d_min < m.d_max)) {
    fail(ConfigErrorKind::kDistanceRange, "require 0 < d_min < d_max");
  }
  if (!(m.p_speed_change >= 0.0 && m.p_speed_change <= 0.5)) {
    fail(ConfigErrorKind::kSpeedChangeMass,
         "p_speed_change must lie in [0, 0.5] so that the hold probability 1-2p is nonnegative");
  }
  if (!(m.fleet_length >= 0.0) || !(m.rsu_distance >= 0.0)) {
    fail(ConfigErrorKind::kDistanceRange, "fleet_length and rsu_distance must be nonnegative");
  }

  std::vector<std::string> warnings;
  if (!(c.gamma_out > c.gamma_in)) {
    warnings.emplace_back("gamma_out <= gamma_in: transmitting is priced below receiving");
  }
  return warnings;
}

Config load_config(std::string_view text, std::vector<std::string>* warnings) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(ConfigErrorKind::kParse,
                        "parse error at line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(ConfigErrorKind::kParse, "parse error at line " + std::to_string(line_no) +
                                                     ": empty key or value");
    }
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  auto w = validate(cfg);
  if (warnings != nullptr) *warnings = std::move(w);
  return cfg;
}

std::string serialize(const Config& cfg) {
  std::ostringstream out;
  for (const auto& [name, field] : field_table()) {
    if (auto v = field.get(cfg)) out << name << '=' << *v << '\n';
  }
  return out.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [name, field] : field_table()) keys.push_back(name);
  return keys;
}

}  // namespace pcd
