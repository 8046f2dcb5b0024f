#pragma once

// Emitted two-photon state from the physical source configuration.

#include <numbers>

#include "biphoton/state.hpp"

namespace biphoton::source {

struct SourceConfig {
  double lambda_p_nm = 532.0;
  double lambda_s_nm = 810.0;
  double lambda_i_nm = 1550.0;
  /// Signal / idler interferometer arm-length differences. The output phase
  /// depends only on delta_l_s - delta_l_i.
  double delta_l_s_nm = -202.5;
  double delta_l_i_nm = 0.0;
  double pump_power_mw = 1.2;
  /// Half-wave plate ahead of the pump PBS. The arm amplitudes are
  /// cos(2a), sin(2a); pi/8 balances them.
  double pump_hwp_angle_rad = std::numbers::pi / 8.0;
  double bandwidth_i_nm = 0.8;
  double crystal_length_mm = 50.0;
  double waist_radius_um = 125.0;
  /// Signal photons delivered to the port splitters per second and per mW.
  /// The default puts the detected 810 nm single-count rate, summed over the
  /// four ports at eta_s = 0.6, at 3e5 / s for 1.2 mW.
  double pair_rate_coeff = 3.0e5 / (0.6 * 1.2);
  bool strict_energy = true;
  double energy_tolerance_per_nm = 1e-7;
};

/// Throws Error naming the offending field.
void validate(const SourceConfig& cfg);

/// Path mismatch -dL_i + dL_s seen by the signal, in nm.
inline double path_mismatch_nm(const SourceConfig& cfg) { return cfg.delta_l_s_nm - cfg.delta_l_i_nm; }

/// Wraps to (-pi, pi].
double wrap_phase(double phi);

/// k_s (-dL_i + dL_s), wrapped.
double output_phase(const SourceConfig& cfg);
double output_phase(double mismatch_nm, double lambda_s_nm);

/// Pump arm amplitude angle beta: amplitudes are (cos beta, sin beta).
inline double arm_angle(const SourceConfig& cfg) { return 2.0 * cfg.pump_hwp_angle_rad; }

/// cos(beta)|H_s H_i> + e^{i phi} sin(beta)|V_s V_i>, signal ports {H, V},
/// idler {H, V}. beta = pi/4 is the balanced state.
PureState ideal_state(double phi, double beta = std::numbers::pi / 4.0);

/// lambda^2 / dlambda, in the units of the inputs.
double coherence_length_nm(double lambda_nm, double bandwidth_nm);

/// Gaussian overlap whose FWHM equals the coherence length:
/// exp(-4 ln2 (mismatch / l_c)^2).
double coherence_weight(double mismatch_nm, double coherence_length_nm);

/// mu |Phi_phi> + (1 - mu) {cos^2 beta |HH>, sin^2 beta |VV>}; the weight of
/// the coherent part comes from the signal/idler path mismatch measured
/// against the idler coherence length.
MixedState effective_state(const SourceConfig& cfg);
double effective_coherence(const SourceConfig& cfg);

/// 1/lambda_p - 1/lambda_s - 1/lambda_i in nm^-1.
double energy_conservation_residual(double lambda_p_nm, double lambda_s_nm, double lambda_i_nm);

/// pi w0^2 / lambda (vacuum wavelength), in mm.
double rayleigh_range_mm(double waist_radius_um, double lambda_nm);

/// Signal photons per second reaching the four-port splitter. Splitting the
/// pump between the arms redistributes pairs but does not change the total.
double singles_rate(const SourceConfig& cfg);

}  // namespace biphoton::source
