#include "biphoton/source.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace biphoton::source {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(std::string("source.") + name + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace

void validate(const SourceConfig& cfg) {
  require_positive(cfg.lambda_p_nm, "lambda_p_nm");
  require_positive(cfg.lambda_s_nm, "lambda_s_nm");
  require_positive(cfg.lambda_i_nm, "lambda_i_nm");
  require_positive(cfg.bandwidth_i_nm, "bandwidth_i_nm");
  require_positive(cfg.crystal_length_mm, "crystal_length_mm");
  require_positive(cfg.waist_radius_um, "waist_radius_um");
  if (!(cfg.pump_power_mw >= 0.0)) throw Error("source.pump_power_mw must be non-negative");
  if (!(cfg.pair_rate_coeff >= 0.0)) throw Error("source.pair_rate_coeff must be non-negative");
  if (!std::isfinite(cfg.delta_l_s_nm) || !std::isfinite(cfg.delta_l_i_nm)) {
    throw Error("source path mismatches must be finite");
  }
  if (cfg.strict_energy) {
    const double r = energy_conservation_residual(cfg.lambda_p_nm, cfg.lambda_s_nm, cfg.lambda_i_nm);
    if (std::abs(r) > cfg.energy_tolerance_per_nm) {
      throw Error("source wavelengths violate energy conservation: residual " + std::to_string(r) +
                  " nm^-1 exceeds " + std::to_string(cfg.energy_tolerance_per_nm));
    }
  }
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(phi, two_pi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

double output_phase(double mismatch_nm, double lambda_s_nm) {
  return wrap_phase(2.0 * std::numbers::pi / lambda_s_nm * mismatch_nm);
}

double output_phase(const SourceConfig& cfg) { return output_phase(path_mismatch_nm(cfg), cfg.lambda_s_nm); }

PureState ideal_state(double phi, double beta) {
  AmplitudeMatrix a = AmplitudeMatrix::Zero(2, 2);
  a(0, 0) = std::cos(beta);
  a(1, 1) = std::polar(std::sin(beta), phi);
  return pure_from_amplitudes(signal_basis({Mode::H, Mode::V}), idler_basis({Mode::H, Mode::V}), a);
}

double coherence_length_nm(double lambda_nm, double bandwidth_nm) {
  if (!(lambda_nm > 0.0) || !(bandwidth_nm > 0.0)) throw Error("coherence length needs positive inputs");
  return lambda_nm * lambda_nm / bandwidth_nm;
}

double coherence_weight(double mismatch_nm, double coherence_length_nm) {
  if (!(coherence_length_nm > 0.0)) throw Error("coherence length must be positive");
  const double x = mismatch_nm / coherence_length_nm;
  return std::exp(-4.0 * std::numbers::ln2 * x * x);
}

double effective_coherence(const SourceConfig& cfg) {
  return coherence_weight(path_mismatch_nm(cfg), coherence_length_nm(cfg.lambda_i_nm, cfg.bandwidth_i_nm));
}

MixedState effective_state(const SourceConfig& cfg) {
  const double mu = effective_coherence(cfg);
  const double beta = arm_angle(cfg);
  const double c = std::cos(beta);
  const double s = std::sin(beta);

  const Basis sig = signal_basis({Mode::H, Mode::V});
  const Basis idl = idler_basis({Mode::H, Mode::V});
  AmplitudeMatrix hh = AmplitudeMatrix::Zero(2, 2);
  hh(0, 0) = 1.0;
  AmplitudeMatrix vv = AmplitudeMatrix::Zero(2, 2);
  vv(1, 1) = 1.0;

  return mixture({{mu, ideal_state(output_phase(cfg), beta)},
                  {(1.0 - mu) * c * c, pure_from_amplitudes(sig, idl, hh)},
                  {(1.0 - mu) * s * s, pure_from_amplitudes(sig, idl, vv)}});
}

double energy_conservation_residual(double lambda_p_nm, double lambda_s_nm, double lambda_i_nm) {
  if (!(lambda_p_nm > 0.0 && lambda_s_nm > 0.0 && lambda_i_nm > 0.0)) {
    throw Error("wavelengths must be positive");
  }
  return 1.0 / lambda_p_nm - 1.0 / lambda_s_nm - 1.0 / lambda_i_nm;
}

double rayleigh_range_mm(double waist_radius_um, double lambda_nm) {
  if (!(waist_radius_um > 0.0) || !(lambda_nm > 0.0)) throw Error("Rayleigh range needs positive inputs");
  const double w0_mm = waist_radius_um * 1e-3;
  const double lambda_mm = lambda_nm * 1e-6;
  return std::numbers::pi * w0_mm * w0_mm / lambda_mm;
}

double singles_rate(const SourceConfig& cfg) {
  if (!(cfg.pump_power_mw >= 0.0)) throw Error("pump power must be non-negative");
  return cfg.pair_rate_coeff * cfg.pump_power_mw;
}

}  // namespace biphoton::source
