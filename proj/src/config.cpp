#include "biphoton/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace biphoton::cli {

namespace {

namespace pt = boost::property_tree;

using Setter = std::function<void(RunConfig&, const std::string&)>;

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": expected a number, got '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

template <typename Field>
std::pair<std::string, Setter> real(std::string key, Field field) {
  return {key, [key, field](RunConfig& c, const std::string& v) { std::invoke(field, c) = to_double(key, v); }};
}

// Ordered key table; doubles as the documented key list.
const std::vector<std::pair<std::string, Setter>>& key_table() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      real("source.lambda_p_nm", [](RunConfig& c) -> double& { return c.source.lambda_p_nm; }),
      real("source.lambda_s_nm", [](RunConfig& c) -> double& { return c.source.lambda_s_nm; }),
      real("source.lambda_i_nm", [](RunConfig& c) -> double& { return c.source.lambda_i_nm; }),
      real("source.delta_L_s_nm", [](RunConfig& c) -> double& { return c.source.delta_l_s_nm; }),
      real("source.delta_L_i_nm", [](RunConfig& c) -> double& { return c.source.delta_l_i_nm; }),
      real("source.pump_power_mw", [](RunConfig& c) -> double& { return c.source.pump_power_mw; }),
      real("source.pump_hwp_angle_rad", [](RunConfig& c) -> double& { return c.source.pump_hwp_angle_rad; }),
      real("source.bandwidth_i_nm", [](RunConfig& c) -> double& { return c.source.bandwidth_i_nm; }),
      real("source.crystal_length_mm", [](RunConfig& c) -> double& { return c.source.crystal_length_mm; }),
      real("source.waist_radius_um", [](RunConfig& c) -> double& { return c.source.waist_radius_um; }),
      real("source.pair_rate_coeff", [](RunConfig& c) -> double& { return c.source.pair_rate_coeff; }),
      {"source.strict_energy",
       [](RunConfig& c, const std::string& v) { c.source.strict_energy = to_bool("source.strict_energy", v); }},
      real("source.energy_tolerance_per_nm", [](RunConfig& c) -> double& { return c.source.energy_tolerance_per_nm; }),

      real("detector.eta_s", [](RunConfig& c) -> double& { return c.detector.eta_s; }),
      real("detector.eta_i", [](RunConfig& c) -> double& { return c.detector.eta_i; }),
      real("detector.gate_ns", [](RunConfig& c) -> double& { return c.detector.gate_ns; }),
      real("detector.uncorrelated_idler_rate_hz",
           [](RunConfig& c) -> double& { return c.detector.uncorrelated_idler_rate_hz; }),
      real("detector.idler_transmission", [](RunConfig& c) -> double& { return c.detector.idler_transmission; }),
      real("detector.thz_per_nm", [](RunConfig& c) -> double& { return c.detector.thz_per_nm; }),

      real("lock.kp", [](RunConfig& c) -> double& { return c.lock.gains.kp; }),
      real("lock.ki", [](RunConfig& c) -> double& { return c.lock.gains.ki; }),
      real("lock.integrator_limit", [](RunConfig& c) -> double& { return c.lock.gains.integrator_limit; }),
      real("lock.random_walk_nm_per_sqrt_s",
           [](RunConfig& c) -> double& { return c.lock.drift.random_walk_nm_per_sqrt_s; }),
      real("lock.sine_amplitude_nm", [](RunConfig& c) -> double& { return c.lock.drift.sine_amplitude_nm; }),
      real("lock.sine_period_s", [](RunConfig& c) -> double& { return c.lock.drift.sine_period_s; }),
      real("lock.target_phi_rad", [](RunConfig& c) -> double& { return c.lock.options.target_phi_rad; }),
      real("lock.initial_offset_nm", [](RunConfig& c) -> double& { return c.lock.options.initial_offset_nm; }),
      real("lock.initial_piezo_nm", [](RunConfig& c) -> double& { return c.lock.options.initial_piezo_nm; }),
      real("lock.piezo_range_nm", [](RunConfig& c) -> double& { return c.lock.options.piezo_range_nm; }),
      real("lock.duration_s", [](RunConfig& c) -> double& { return c.lock.duration_s; }),
      real("lock.settle_s", [](RunConfig& c) -> double& { return c.lock.settle_s; }),
      real("lock.band_rad", [](RunConfig& c) -> double& { return c.lock.band_rad; }),

      real("scan.start_deg", [](RunConfig& c) -> double& { return c.scan.start_deg; }),
      real("scan.stop_deg", [](RunConfig& c) -> double& { return c.scan.stop_deg; }),
      {"scan.count",
       [](RunConfig& c, const std::string& v) { c.scan.count = static_cast<std::size_t>(to_u64("scan.count", v)); }},

      real("run.duration_s", [](RunConfig& c) -> double& { return c.run.duration_s; }),
      real("run.dt_s", [](RunConfig& c) -> double& { return c.run.dt_s; }),
      {"run.seed", [](RunConfig& c, const std::string& v) { c.run.seed = to_u64("run.seed", v); }},

      {"output.directory", [](RunConfig& c, const std::string& v) { c.output.directory = v; }},
      {"output.emit_svg",
       [](RunConfig& c, const std::string& v) { c.output.emit_svg = to_bool("output.emit_svg", v); }},
  };
  return table;
}

const Setter* find_setter(const std::string& key) {
  for (const auto& [name, setter] : key_table()) {
    if (name == key) return &setter;
  }
  return nullptr;
}

// Rewraps library validation errors so the CLI reports them as config errors.
template <typename F>
void checked(F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

std::vector<double> ScanSpec::angles_rad() const {
  constexpr double deg = std::numbers::pi / 180.0;
  return detection::scan_angles(start_deg * deg, stop_deg * deg, count);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& entry : key_table()) out.push_back(entry.first);
  return out;
}

void validate(const RunConfig& cfg) {
  checked([&] { source::validate(cfg.source); });
  checked([&] { detection::validate(cfg.detector); });
  checked([&] { lock::validate(cfg.lock.gains); });
  checked([&] { lock::validate(cfg.lock.drift); });
  if (cfg.scan.count < 2) throw ConfigError("scan.count must be at least 2");
  if (!(cfg.run.duration_s > 0.0)) throw ConfigError("run.duration_s must be positive");
  if (!(cfg.run.dt_s > 0.0)) throw ConfigError("run.dt_s must be positive");
  if (!(cfg.lock.duration_s >= cfg.run.dt_s)) throw ConfigError("lock.duration_s must be at least run.dt_s");
  if (!(cfg.lock.settle_s >= 0.0)) throw ConfigError("lock.settle_s must be non-negative");
  if (!(cfg.lock.band_rad > 0.0)) throw ConfigError("lock.band_rad must be positive");
  if (!(cfg.lock.options.piezo_range_nm > 0.0)) throw ConfigError("lock.piezo_range_nm must be positive");
  if (!(std::abs(cfg.lock.options.target_phi_rad) <= std::numbers::pi)) {
    throw ConfigError("lock.target_phi_rad must lie in [-pi, pi]");
  }
  if (cfg.output.directory.empty()) throw ConfigError("output.directory must not be empty");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  // '#' comments are accepted alongside the ';' ones the INI reader knows.
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line.clear();
    cleaned += line;
    cleaned += '\n';
  }
  pt::ptree tree;
  std::istringstream in(cleaned);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": malformed config at line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(origin + ": key '" + section + "' must belong to a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const Setter* setter = find_setter(full);
      if (setter == nullptr) throw ConfigError(origin + ": unknown key '" + full + "'");
      (*setter)(cfg, value.get_value<std::string>());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

}  // namespace biphoton::cli
