#pragma once

// Active stabilization of the output phase: the pump travels a Mach-Zehnder
// interferometer whose path mismatch equals the one that sets the two-photon
// phase, so holding the pump fringe at a fixed intensity holds the phase.
// A piezo on the interfering beam splitter closes the loop.

#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "biphoton/source.hpp"

namespace biphoton::lock {

struct Intensities {
  double i1 = 1.0;  ///< Det 1, normalized
  double i2 = 0.0;  ///< Det 2, normalized
};

/// Complementary lossless fringes: I1 = cos^2(pi m / lambda_p), I2 = 1 - I1.
Intensities mzi_intensities(double mismatch_nm, double lambda_p_nm);

struct Setpoint {
  double target_phi_rad = 0.0;
  double mismatch_nm = 0.0;
  Intensities intensities;
  /// dI1/dm at the setpoint, nm^-1.
  double slope_per_nm = 0.0;
  double lambda_p_nm = 0.0;
};

/// Mismatch target_phi lambda_s / (2 pi) and the pump fringe reading there.
Setpoint setpoint_for_phi(double target_phi_rad, double lambda_s_nm, double lambda_p_nm);

/// Range of net mismatch from which the loop pulls in to this setpoint
/// (bounded by the neighbouring points with equal intensity and opposite
/// slope). Multi-fringe ambiguity is not resolved.
std::pair<double, double> capture_range(const Setpoint& sp);

struct LockState {
  double piezo_position_nm = 0.0;
  double environmental_offset_nm = 0.0;
  double intensity_1 = 1.0;
  double intensity_2 = 0.0;
  double integrator = 0.0;  ///< nm s
  double time_s = 0.0;
};

/// Fringe-side discriminant in intensity units: half the change of the
/// normalized photodiode difference (I1 - I2)/(I1 + I2) from its setpoint
/// value, signed by the fringe slope at the setpoint so it is positive when
/// the mismatch sits above the setpoint. Throws "unlockable setpoint" at a
/// fringe extremum.
double error_signal(const LockState& state, const Setpoint& setpoint);

struct PiGains {
  /// Piezo step per control cycle per nm of discriminant error.
  double kp = 0.5;
  /// Extra piezo step per cycle per nm s of integrated error.
  double ki = 5.0;
  double integrator_limit = 1.0e3;
};

struct DriftModel {
  double random_walk_nm_per_sqrt_s = 50.0;
  double sine_amplitude_nm = 0.0;
  double sine_period_s = 1.0;
};

void validate(const PiGains& gains);
void validate(const DriftModel& drift);

/// Seeded environmental disturbance: random walk plus a slow sinusoid on top
/// of a fixed initial offset.
class DriftProcess {
 public:
  DriftProcess(DriftModel model, std::uint64_t seed, double initial_offset_nm = 0.0);
  /// Offset at time t, after advancing the walk by dt.
  double advance(double t_s, double dt_s);
  const DriftModel& model() const { return model_; }

 private:
  DriftModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double initial_;
  double walk_ = 0.0;
};

/// Fixed parts of the loop: the nominal source mismatch the piezo and the
/// environment add to, and the actuator travel.
struct LockPlant {
  double base_mismatch_nm = 0.0;
  double lambda_s_nm = 810.0;
  double piezo_range_nm = 1.0e4;  ///< |piezo| limit

  double net_mismatch(const LockState& s) const {
    return base_mismatch_nm + s.environmental_offset_nm + s.piezo_position_nm;
  }
};

/// One control cycle: advance the drift, read the photodiodes, update the
/// clamped integrator and move the piezo, then refresh the readings.
LockState controller_step(const LockState& state, const LockPlant& plant, const Setpoint& setpoint,
                          const PiGains& gains, double dt_s, DriftProcess& drift);

struct LockOptions {
  double target_phi_rad = -std::numbers::pi / 2.0;
  double initial_offset_nm = 0.0;
  double initial_piezo_nm = 0.0;
  double piezo_range_nm = 1.0e4;
};

struct LockSample {
  double time_s;
  double mismatch_nm;
  double phi_rad;
  double i1;
  double i2;
};

struct LockTrace {
  Setpoint setpoint;
  std::vector<LockSample> samples;  ///< t = 0 then one entry per cycle
  LockState final_state;
};

LockTrace run_lock(const source::SourceConfig& cfg, const PiGains& gains, const DriftModel& drift,
                   double duration_s, double dt_s, std::uint64_t seed, const LockOptions& options = {});

struct LockSummary {
  double mean_phi_rad = 0.0;
  double stddev_phi_rad = 0.0;
  double in_band_fraction = 0.0;
  std::size_t samples = 0;
};

/// Statistics of phi over samples with t >= settle_s. Deviations from the
/// target are wrapped before averaging.
LockSummary summarize(const LockTrace& trace, double settle_s, double band_rad);

}  // namespace biphoton::lock
