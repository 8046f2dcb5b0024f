#include "biphoton/lock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace biphoton::lock {

namespace {

constexpr double kPi = std::numbers::pi;

// Relative to the largest possible fringe slope pi / lambda_p.
constexpr double kMinRelativeSlope = 1e-9;

}  // namespace

Intensities mzi_intensities(double mismatch_nm, double lambda_p_nm) {
  if (!(lambda_p_nm > 0.0)) throw Error("pump wavelength must be positive");
  const double c = std::cos(kPi * mismatch_nm / lambda_p_nm);
  const double i1 = c * c;
  return {i1, 1.0 - i1};
}

Setpoint setpoint_for_phi(double target_phi_rad, double lambda_s_nm, double lambda_p_nm) {
  if (!(std::abs(target_phi_rad) <= kPi)) throw Error("target phase must lie in [-pi, pi]");
  if (!(lambda_s_nm > 0.0)) throw Error("signal wavelength must be positive");
  Setpoint sp;
  sp.target_phi_rad = target_phi_rad;
  sp.mismatch_nm = target_phi_rad * lambda_s_nm / (2.0 * kPi);
  sp.intensities = mzi_intensities(sp.mismatch_nm, lambda_p_nm);
  sp.slope_per_nm = -(kPi / lambda_p_nm) * std::sin(2.0 * kPi * sp.mismatch_nm / lambda_p_nm);
  sp.lambda_p_nm = lambda_p_nm;
  return sp;
}

std::pair<double, double> capture_range(const Setpoint& sp) {
  // Equal-intensity points sit at +-m* + n lambda_p; the mirrored family is
  // unstable for a loop signed by the slope at m*.
  const double lp = sp.lambda_p_nm;
  const double mirror = -sp.mismatch_nm;
  const double n = std::floor((sp.mismatch_nm - mirror) / lp);
  double lower = mirror + n * lp;
  if (lower >= sp.mismatch_nm) lower -= lp;
  return {lower, lower + lp};
}

double error_signal(const LockState& state, const Setpoint& setpoint) {
  if (std::abs(setpoint.slope_per_nm) < kMinRelativeSlope * kPi / setpoint.lambda_p_nm) {
    throw Error("unlockable setpoint");
  }
  const double sum = state.intensity_1 + state.intensity_2;
  if (!(sum > 0.0)) throw Error("no pump light on the lock photodiodes");
  const double diff = (state.intensity_1 - state.intensity_2) / sum;
  const double diff_set = setpoint.intensities.i1 - setpoint.intensities.i2;
  const double sign = setpoint.slope_per_nm > 0.0 ? 1.0 : -1.0;
  return sign * 0.5 * (diff - diff_set);
}

void validate(const PiGains& gains) {
  if (!(gains.kp >= 0.0) || !(gains.ki >= 0.0)) throw Error("lock gains must be non-negative");
  if (!(gains.integrator_limit > 0.0)) throw Error("lock.integrator_limit must be positive");
}

void validate(const DriftModel& drift) {
  if (!(drift.random_walk_nm_per_sqrt_s >= 0.0)) throw Error("lock.random_walk_nm_per_sqrt_s must be non-negative");
  if (!(drift.sine_amplitude_nm >= 0.0)) throw Error("lock.sine_amplitude_nm must be non-negative");
  if (!(drift.sine_period_s > 0.0)) throw Error("lock.sine_period_s must be positive");
}

DriftProcess::DriftProcess(DriftModel model, std::uint64_t seed, double initial_offset_nm)
    : model_(model), rng_(seed), initial_(initial_offset_nm) {
  validate(model_);
}

double DriftProcess::advance(double t_s, double dt_s) {
  if (model_.random_walk_nm_per_sqrt_s > 0.0) {
    walk_ += model_.random_walk_nm_per_sqrt_s * std::sqrt(dt_s) * normal_(rng_);
  }
  return initial_ + walk_ + model_.sine_amplitude_nm * std::sin(2.0 * kPi * t_s / model_.sine_period_s);
}

LockState controller_step(const LockState& state, const LockPlant& plant, const Setpoint& setpoint,
                          const PiGains& gains, double dt_s, DriftProcess& drift) {
  if (!(dt_s > 0.0)) throw Error("control period must be positive");
  LockState next = state;
  next.time_s = state.time_s + dt_s;
  next.environmental_offset_nm = drift.advance(next.time_s, dt_s);

  // Photodiodes see the disturbed interferometer before the piezo reacts.
  const Intensities seen = mzi_intensities(plant.net_mismatch(next), setpoint.lambda_p_nm);
  next.intensity_1 = seen.i1;
  next.intensity_2 = seen.i2;
  const double error_nm = error_signal(next, setpoint) / std::abs(setpoint.slope_per_nm);

  const double integrator = std::clamp(state.integrator + error_nm * dt_s, -gains.integrator_limit,
                                       gains.integrator_limit);
  const double requested = state.piezo_position_nm - (gains.kp * error_nm + gains.ki * integrator);
  next.piezo_position_nm = std::clamp(requested, -plant.piezo_range_nm, plant.piezo_range_nm);
  // Freeze the integrator while the actuator is saturated.
  next.integrator = next.piezo_position_nm == requested ? integrator : state.integrator;

  const Intensities after = mzi_intensities(plant.net_mismatch(next), setpoint.lambda_p_nm);
  next.intensity_1 = after.i1;
  next.intensity_2 = after.i2;
  return next;
}

LockTrace run_lock(const source::SourceConfig& cfg, const PiGains& gains, const DriftModel& drift,
                   double duration_s, double dt_s, std::uint64_t seed, const LockOptions& options) {
  if (!(dt_s > 0.0) || !(duration_s >= dt_s)) throw Error("lock run needs duration >= dt > 0");
  validate(gains);
  const LockPlant plant{source::path_mismatch_nm(cfg), cfg.lambda_s_nm, options.piezo_range_nm};
  LockTrace trace;
  trace.setpoint = setpoint_for_phi(options.target_phi_rad, cfg.lambda_s_nm, cfg.lambda_p_nm);
  // Fails early for extremum setpoints.
  (void)error_signal(LockState{}, trace.setpoint);

  DriftProcess process(drift, seed, options.initial_offset_nm);
  LockState state;
  state.piezo_position_nm = options.initial_piezo_nm;
  state.environmental_offset_nm = options.initial_offset_nm;
  const Intensities start = mzi_intensities(plant.net_mismatch(state), cfg.lambda_p_nm);
  state.intensity_1 = start.i1;
  state.intensity_2 = start.i2;

  const auto steps = static_cast<std::size_t>(std::llround(duration_s / dt_s));
  trace.samples.reserve(steps + 1);
  auto record = [&](const LockState& s) {
    const double m = plant.net_mismatch(s);
    trace.samples.push_back({s.time_s, m, source::output_phase(m, cfg.lambda_s_nm), s.intensity_1, s.intensity_2});
  };
  record(state);
  for (std::size_t k = 0; k < steps; ++k) {
    state = controller_step(state, plant, trace.setpoint, gains, dt_s, process);
    // Accumulated float time would drift off the grid.
    state.time_s = static_cast<double>(k + 1) * dt_s;
    record(state);
  }
  trace.final_state = state;
  return trace;
}

LockSummary summarize(const LockTrace& trace, double settle_s, double band_rad) {
  LockSummary out;
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t in_band = 0;
  const double target = trace.setpoint.target_phi_rad;
  for (const auto& s : trace.samples) {
    if (s.time_s + 1e-12 < settle_s) continue;
    const double dev = source::wrap_phase(s.phi_rad - target);
    sum += dev;
    sum_sq += dev * dev;
    if (std::abs(dev) < band_rad) ++in_band;
    ++out.samples;
  }
  if (out.samples == 0) return out;
  const double n = static_cast<double>(out.samples);
  const double mean_dev = sum / n;
  out.mean_phi_rad = source::wrap_phase(target + mean_dev);
  out.stddev_phi_rad = std::sqrt(std::max(0.0, sum_sq / n - mean_dev * mean_dev));
  out.in_band_fraction = static_cast<double>(in_band) / n;
  return out;
}

}  // namespace biphoton::lock
