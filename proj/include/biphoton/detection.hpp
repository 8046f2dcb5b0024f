#pragma once

// Click probabilities at the four 810 nm ports and the 1550 nm analyzer,
// rate accounting with efficiencies, gating and accidentals, Poisson counting,
// and the figures of merit derived from coincidence data.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "biphoton/optics.hpp"
#include "biphoton/source.hpp"
#include "biphoton/state.hpp"

namespace biphoton::detection {

struct DetectorConfig {
  double eta_s = 0.6;
  double eta_i = 0.18;
  double gate_ns = 2.5;
  /// Uncorrelated photon flux reaching the idler APD (background, stray
  /// light, dark-count equivalent). Clicks scale with eta_i like signal
  /// photons do. The default yields 500 accidentals/s per port at the
  /// default source settings.
  double uncorrelated_idler_rate_hz = 500.0 / (7.5e4 * 0.18 * 2.5e-9);
  /// Fraction of heralded idler photons that reach the APD: fiber coupling,
  /// isolator, 100 m of fiber and the analyzer. Excludes eta_i.
  double idler_transmission = 1.05e4 / (7.5e4 * 0.18);
  double thz_per_nm = 0.125;
};

void validate(const DetectorConfig& det);

enum class Port { H = 0, V = 1, D = 2, A = 3 };
inline constexpr std::array<Port, 4> kPorts{Port::H, Port::V, Port::D, Port::A};
inline constexpr std::size_t kPortCount = kPorts.size();

std::string_view to_string(Port port);
Port parse_port(std::string_view text);
Mode port_mode(Port port);

/// Analyzer HWP angle at which the transmitted port of the analyzer PBS
/// selects the idler polarization correlated with `port` (H: 0, V: pi/4,
/// D: pi/8, A: 3pi/8).
double peak_angle(Port port);

/// Rows: signal ports H, V, D, A. Columns: analyzer PBS transmitted,
/// reflected.
using ProbabilityTable = Eigen::Matrix<double, 4, 2>;

/// Idler vectors (in H/V coordinates) selected by the transmitted and
/// reflected analyzer ports after a HWP at `hwp_angle_rad`. The measured
/// direction turns by twice the plate angle.
std::array<optics::JonesVector, 2> analyzer_projectors(double hwp_angle_rad);

/// The source state fanned out onto the four signal ports.
MixedState detector_state(const source::SourceConfig& cfg);

/// Joint probabilities for a state over the signal ports {H, V, D, A} and a
/// two-mode idler polarization basis.
ProbabilityTable coincidence_probabilities(const MixedState& state, double hwp_angle_rad);

struct PortRates {
  double singles = 0.0;       ///< 810 nm counts per second
  double coincidences = 0.0;  ///< gated idler clicks per second, accidentals included
  double accidentals = 0.0;   ///< rate measured by random triggering

  friend bool operator==(const PortRates&, const PortRates&) = default;
};

/// Rates per port. Analytic records carry duration_s = 0.
struct CountRecord {
  std::array<PortRates, kPortCount> ports{};
  double duration_s = 0.0;
  double pump_power_mw = 0.0;
  double analyzer_angle_rad = 0.0;

  const PortRates& operator[](Port p) const { return ports[static_cast<std::size_t>(p)]; }
  PortRates& operator[](Port p) { return ports[static_cast<std::size_t>(p)]; }

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// Per-port probability that a gate opened by that port catches an
/// uncorrelated idler click.
double accidental_probability(const DetectorConfig& det);

CountRecord expected_rates(const source::SourceConfig& cfg, const DetectorConfig& det,
                           double hwp_angle_rad);

/// Poisson singles per port, binomially thinned into coincidences and
/// random-trigger accidentals. Deterministic for a given seed.
CountRecord simulate_counts(const source::SourceConfig& cfg, const DetectorConfig& det,
                            double hwp_angle_rad, double duration_s, std::uint64_t seed);

/// Seed for the index-th point of a run driven by `master`; independent of
/// evaluation order.
std::uint64_t point_seed(std::uint64_t master, std::uint64_t index);

double visibility(double r_c, double r_a);
/// Mean of accidentals / coincidences over the ports.
double qber(std::span<const PortRates> ports);
double qber(const CountRecord& record);

/// 4 R_c / (eta_s eta_i) / P / (k dlambda), in s^-1 THz^-1 mW^-1.
double spectral_brightness(double r_c_per_port, double eta_s, double eta_i, double p_mw,
                           double bandwidth_nm, double thz_per_nm);

struct ConditionalDetection {
  std::array<double, kPortCount> per_port{};  ///< R_c / R_s(port)
  double aggregate = 0.0;                     ///< mean R_c over total R_s
};
ConditionalDetection conditional_detection(const CountRecord& record);

/// `count` evenly spaced angles from start to stop inclusive.
std::vector<double> scan_angles(double start_rad, double stop_rad, std::size_t count);

std::vector<CountRecord> fringe_scan(const source::SourceConfig& cfg, const DetectorConfig& det,
                                     std::span<const double> angles, double duration_per_point_s,
                                     std::uint64_t seed);

/// Least-squares fit of mean + amplitude cos(2 pi (angle - peak) / period).
struct FringeFit {
  double mean = 0.0;
  double amplitude = 0.0;
  double peak_angle_rad = 0.0;  ///< in [0, period)
  double period_rad = 0.0;
  double rms_residual = 0.0;

  double maximum() const { return mean + amplitude; }
  double minimum() const { return mean - amplitude; }
  /// (max - min) / (max + min).
  double visibility() const { return mean > 0.0 ? amplitude / mean : 0.0; }
};

/// Malus-law fringes behind a rotating HWP repeat every pi/2 of plate angle.
inline constexpr double kFringePeriod = std::numbers::pi / 2.0;

FringeFit fit_fringe(std::span<const double> angles, std::span<const double> values,
                     double period_rad = kFringePeriod);

/// Scans candidate periods and returns the best-fitting sinusoid.
FringeFit fit_fringe_free_period(std::span<const double> angles, std::span<const double> values,
                                 double min_period_rad, double max_period_rad,
                                 std::size_t candidates = 2001);

/// Column of a scan for one port.
std::vector<double> coincidence_series(std::span<const CountRecord> scan, Port port);

}  // namespace biphoton::detection
