#include "biphoton/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace biphoton::detection {

namespace {

constexpr double kPi = std::numbers::pi;

void require_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw Error(std::string("detector.") + name + " must lie in (0, 1], got " + std::to_string(v));
  }
}

std::uint64_t poisson_sample(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

std::uint64_t binomial_sample(std::mt19937_64& rng, std::uint64_t trials, double p) {
  if (trials == 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return trials;
  return std::binomial_distribution<std::uint64_t>(trials, p)(rng);
}

}  // namespace

void validate(const DetectorConfig& det) {
  require_unit_interval(det.eta_s, "eta_s");
  require_unit_interval(det.eta_i, "eta_i");
  require_unit_interval(det.idler_transmission, "idler_transmission");
  if (!(det.gate_ns > 0.0)) throw Error("detector.gate_ns must be positive");
  if (!(det.uncorrelated_idler_rate_hz >= 0.0)) {
    throw Error("detector.uncorrelated_idler_rate_hz must be non-negative");
  }
  if (!(det.thz_per_nm > 0.0)) throw Error("detector.thz_per_nm must be positive");
  if (accidental_probability(det) > 1.0) throw Error("detector gate admits more than one accidental per gate");
}

std::string_view to_string(Port port) {
  switch (port) {
    case Port::H: return "H";
    case Port::V: return "V";
    case Port::D: return "D";
    case Port::A: return "A";
  }
  return "?";
}

Port parse_port(std::string_view text) {
  for (Port p : kPorts) {
    if (to_string(p) == text) return p;
  }
  throw Error("unknown port '" + std::string(text) + "'");
}

Mode port_mode(Port port) {
  constexpr std::array<Mode, 4> modes{Mode::H, Mode::V, Mode::D, Mode::A};
  return modes[static_cast<std::size_t>(port)];
}

double peak_angle(Port port) {
  switch (port) {
    case Port::H: return 0.0;
    case Port::V: return kPi / 4.0;
    case Port::D: return kPi / 8.0;
    case Port::A: return 3.0 * kPi / 8.0;
  }
  return 0.0;
}

std::array<optics::JonesVector, 2> analyzer_projectors(double hwp_angle_rad) {
  // Outcome k is <e_k| W |psi>, i.e. projection onto W^dagger e_k.
  const optics::Jones w_dag = optics::hwp(hwp_angle_rad).matrix.adjoint();
  return {w_dag.col(0), w_dag.col(1)};
}

MixedState detector_state(const source::SourceConfig& cfg) {
  return apply_signal_isometry(source::effective_state(cfg), optics::four_port_splitter(),
                               signal_basis({Mode::H, Mode::V, Mode::D, Mode::A}));
}

ProbabilityTable coincidence_probabilities(const MixedState& state, double hwp_angle_rad) {
  const Basis& sig = state.signal_basis();
  if (sig.size() != kPortCount) throw Error("coincidence table needs the four signal ports H, V, D, A");
  std::array<Eigen::Index, kPortCount> row{};
  for (Port p : kPorts) {
    auto it = std::find(sig.begin(), sig.end(), ModeLabel{Side::signal, port_mode(p)});
    if (it == sig.end()) throw Error("coincidence table needs the four signal ports H, V, D, A");
    row[static_cast<std::size_t>(p)] = it - sig.begin();
  }
  const Basis& idl = state.idler_basis();
  if (idl.size() != 2) throw Error("coincidence table needs a two-mode idler polarization basis");
  // Idler basis vectors in H/V coordinates.
  Eigen::Matrix2cd to_hv;
  to_hv.col(0) = optics::polarization(idl[0].mode);
  to_hv.col(1) = optics::polarization(idl[1].mode);
  if (std::abs((to_hv.adjoint() * to_hv - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff()) > 1e-12) {
    throw Error("idler basis is not orthonormal");
  }

  const auto proj = analyzer_projectors(hwp_angle_rad);
  ProbabilityTable table = ProbabilityTable::Zero();
  for (const auto& c : state.components()) {
    const AmplitudeMatrix& a = c.state.amplitudes();
    for (Port p : kPorts) {
      const std::size_t r = static_cast<std::size_t>(p);
      const optics::JonesVector psi = to_hv * a.row(row[r]).transpose();
      for (int k = 0; k < 2; ++k) {
        table(static_cast<Eigen::Index>(r), k) += c.weight * std::norm(proj[static_cast<std::size_t>(k)].dot(psi));
      }
    }
  }
  return table;
}

double accidental_probability(const DetectorConfig& det) {
  return det.eta_i * det.uncorrelated_idler_rate_hz * det.gate_ns * 1e-9;
}

namespace {

struct PortModel {
  double singles = 0.0;      // expected 810 nm counts / s
  double p_coinc = 0.0;      // gate click probability (true + accidental)
  double p_accidental = 0.0;
};

std::array<PortModel, kPortCount> port_models(const source::SourceConfig& cfg, const DetectorConfig& det,
                                              double hwp_angle_rad) {
  const double generated = source::singles_rate(cfg);
  const ProbabilityTable table = coincidence_probabilities(detector_state(cfg), hwp_angle_rad);
  const double p_acc = accidental_probability(det);
  std::array<PortModel, kPortCount> out{};
  for (std::size_t r = 0; r < kPortCount; ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const double marginal = table.row(ri).sum();
    const double conditional = marginal > 0.0 ? table(ri, 0) / marginal : 0.0;
    const double p_true = det.eta_i * det.idler_transmission * conditional;
    out[r] = {generated * det.eta_s * marginal, std::min(1.0, p_true + p_acc), p_acc};
  }
  return out;
}

}  // namespace

CountRecord expected_rates(const source::SourceConfig& cfg, const DetectorConfig& det, double hwp_angle_rad) {
  CountRecord rec;
  rec.pump_power_mw = cfg.pump_power_mw;
  rec.analyzer_angle_rad = hwp_angle_rad;
  const auto models = port_models(cfg, det, hwp_angle_rad);
  for (std::size_t r = 0; r < kPortCount; ++r) {
    rec.ports[r] = {models[r].singles, models[r].singles * models[r].p_coinc,
                    models[r].singles * models[r].p_accidental};
  }
  return rec;
}

std::uint64_t point_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

CountRecord simulate_counts(const source::SourceConfig& cfg, const DetectorConfig& det, double hwp_angle_rad,
                            double duration_s, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw Error("duration must be positive");
  std::mt19937_64 rng(seed);
  CountRecord rec;
  rec.duration_s = duration_s;
  rec.pump_power_mw = cfg.pump_power_mw;
  rec.analyzer_angle_rad = hwp_angle_rad;
  const auto models = port_models(cfg, det, hwp_angle_rad);
  for (std::size_t r = 0; r < kPortCount; ++r) {
    const std::uint64_t n_s = poisson_sample(rng, models[r].singles * duration_s);
    const std::uint64_t n_c = binomial_sample(rng, n_s, models[r].p_coinc);
    const std::uint64_t n_a = binomial_sample(rng, n_s, models[r].p_accidental);
    rec.ports[r] = {static_cast<double>(n_s) / duration_s, static_cast<double>(n_c) / duration_s,
                    static_cast<double>(n_a) / duration_s};
  }
  return rec;
}

double visibility(double r_c, double r_a) {
  if (!(r_c + r_a > 0.0)) throw Error("visibility undefined when both rates are zero");
  return (r_c - r_a) / (r_c + r_a);
}

double qber(std::span<const PortRates> ports) {
  if (ports.empty()) throw Error("QBER needs at least one port");
  double sum = 0.0;
  for (std::size_t k = 0; k < ports.size(); ++k) {
    if (!(ports[k].coincidences > 0.0)) {
      throw Error("QBER undefined: zero coincidence rate on port " + std::to_string(k));
    }
    sum += ports[k].accidentals / ports[k].coincidences;
  }
  return sum / static_cast<double>(ports.size());
}

double qber(const CountRecord& record) { return qber(std::span<const PortRates>(record.ports)); }

double spectral_brightness(double r_c_per_port, double eta_s, double eta_i, double p_mw, double bandwidth_nm,
                           double thz_per_nm) {
  if (!(eta_s > 0.0 && eta_i > 0.0 && p_mw > 0.0 && bandwidth_nm > 0.0 && thz_per_nm > 0.0)) {
    throw Error("spectral brightness needs positive efficiencies, power and bandwidth");
  }
  return 4.0 * r_c_per_port / (eta_s * eta_i) / p_mw / (thz_per_nm * bandwidth_nm);
}

ConditionalDetection conditional_detection(const CountRecord& record) {
  ConditionalDetection out;
  double total_s = 0.0;
  double total_c = 0.0;
  for (std::size_t r = 0; r < kPortCount; ++r) {
    const auto& p = record.ports[r];
    out.per_port[r] = p.singles > 0.0 ? p.coincidences / p.singles : 0.0;
    total_s += p.singles;
    total_c += p.coincidences;
  }
  out.aggregate = total_s > 0.0 ? (total_c / kPortCount) / total_s : 0.0;
  return out;
}

std::vector<double> scan_angles(double start_rad, double stop_rad, std::size_t count) {
  if (count < 2) throw Error("an angle scan needs at least two points");
  std::vector<double> out(count);
  const double step = (stop_rad - start_rad) / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) out[k] = start_rad + step * static_cast<double>(k);
  out.back() = stop_rad;
  return out;
}

std::vector<CountRecord> fringe_scan(const source::SourceConfig& cfg, const DetectorConfig& det,
                                     std::span<const double> angles, double duration_per_point_s,
                                     std::uint64_t seed) {
  if (angles.empty()) throw Error("fringe scan needs at least one angle");
  std::vector<CountRecord> out;
  out.reserve(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) {
    out.push_back(simulate_counts(cfg, det, angles[k], duration_per_point_s, point_seed(seed, k)));
  }
  return out;
}

FringeFit fit_fringe(std::span<const double> angles, std::span<const double> values, double period_rad) {
  if (angles.size() != values.size() || angles.size() < 3) {
    throw Error("fringe fit needs at least three (angle, value) pairs");
  }
  const auto n = static_cast<Eigen::Index>(angles.size());
  const double w = 2.0 * kPi / period_rad;
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = angles[static_cast<std::size_t>(k)];
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(w * a);
    design(k, 2) = std::sin(w * a);
    y(k) = values[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
  FringeFit fit;
  fit.mean = coef(0);
  fit.amplitude = std::hypot(coef(1), coef(2));
  fit.period_rad = period_rad;
  double peak = std::atan2(coef(2), coef(1)) / w;
  peak = std::fmod(peak, period_rad);
  if (peak < 0.0) peak += period_rad;
  fit.peak_angle_rad = peak;
  fit.rms_residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

FringeFit fit_fringe_free_period(std::span<const double> angles, std::span<const double> values,
                                 double min_period_rad, double max_period_rad, std::size_t candidates) {
  if (!(min_period_rad > 0.0 && max_period_rad > min_period_rad) || candidates < 2) {
    throw Error("invalid period search range");
  }
  FringeFit best;
  bool have = false;
  for (std::size_t k = 0; k < candidates; ++k) {
    const double period =
        min_period_rad + (max_period_rad - min_period_rad) * static_cast<double>(k) / static_cast<double>(candidates - 1);
    const FringeFit fit = fit_fringe(angles, values, period);
    if (!have || fit.rms_residual < best.rms_residual) {
      best = fit;
      have = true;
    }
  }
  return best;
}

std::vector<double> coincidence_series(std::span<const CountRecord> scan, Port port) {
  std::vector<double> out;
  out.reserve(scan.size());
  for (const auto& rec : scan) out.push_back(rec[port].coincidences);
  return out;
}

}  // namespace biphoton::detection
