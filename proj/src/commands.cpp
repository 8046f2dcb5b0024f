#include "biphoton/commands.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

#include "biphoton/io.hpp"

namespace biphoton::cli {

namespace {

using detection::kPortCount;
using detection::kPorts;
using detection::Port;

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string sci(double v, int digits = 3) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(digits) << v;
  return s.str();
}

std::string complex_text(Complex z) {
  std::ostringstream s;
  s << std::showpos << std::fixed << std::setprecision(6) << z.real() << z.imag() << 'i';
  return s.str();
}

void print_probabilities(std::ostream& out, const std::string& title, const Eigen::MatrixXd& table,
                         const Basis& signal, const Basis& idler) {
  out << title << '\n' << std::setw(10) << "";
  for (const auto& m : idler) out << std::setw(12) << to_string(m);
  out << '\n';
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    out << std::setw(10) << to_string(signal[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < table.cols(); ++c) out << std::setw(12) << fixed(table(r, c));
    out << '\n';
  }
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output.directory, ec);
  const auto path = cfg.output.directory / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& file, const std::filesystem::path& path) {
  file.flush();
  if (!file) throw Error("write failed for '" + path.string() + "'");
}

struct PeakCounts {
  std::array<detection::PortRates, kPortCount> ports{};
  bool singles_measured = true;
};

void print_metrics(const RunConfig& cfg, const PeakCounts& counts, std::ostream& out) {
  out << "visibility V = (R_c - R_a) / (R_c + R_a)\n";
  double v_sum = 0.0;
  double rc_sum = 0.0;
  for (Port p : kPorts) {
    const auto& r = counts.ports[static_cast<std::size_t>(p)];
    const double v = detection::visibility(r.coincidences, r.accidentals);
    v_sum += v;
    rc_sum += r.coincidences;
    out << "  port " << detection::to_string(p) << ": R_c = " << io::format_number(r.coincidences)
        << " /s, R_a = " << io::format_number(r.accidentals) << " /s, V = " << fixed(v, 4) << '\n';
  }
  out << "  mean visibility = " << fixed(v_sum / kPortCount, 4) << '\n';

  const double q = detection::qber(std::span<const detection::PortRates>(counts.ports));
  out << "QBER = mean(R_a / R_c) over ports = " << fixed(q, 4) << '\n';

  detection::CountRecord rec;
  rec.ports = counts.ports;
  const auto cond = detection::conditional_detection(rec);
  out << "conditional detection R_c / R_s" << (counts.singles_measured ? "" : " (R_s from model)") << '\n';
  for (Port p : kPorts) {
    out << "  port " << detection::to_string(p) << ": R_s = "
        << io::format_number(counts.ports[static_cast<std::size_t>(p)].singles)
        << " /s, R_c / R_s(port) = " << fixed(cond.per_port[static_cast<std::size_t>(p)], 4) << '\n';
  }
  out << "  mean R_c / total R_s = " << fixed(cond.aggregate, 4) << '\n';

  const double rc = rc_sum / kPortCount;
  const auto& det = cfg.detector;
  const double b = detection::spectral_brightness(rc, det.eta_s, det.eta_i, cfg.source.pump_power_mw,
                                                  cfg.source.bandwidth_i_nm, det.thz_per_nm);
  out << "spectral brightness = 4 R_c / (eta_s eta_i) / P / (k dlambda)\n"
      << "  R_c = " << io::format_number(rc) << " /s, eta_s = " << io::format_number(det.eta_s)
      << ", eta_i = " << io::format_number(det.eta_i) << ", P = " << io::format_number(cfg.source.pump_power_mw)
      << " mW, k = " << io::format_number(det.thz_per_nm) << " THz/nm, dlambda = "
      << io::format_number(cfg.source.bandwidth_i_nm) << " nm\n"
      << "  brightness = " << sci(b) << " /s/THz/mW\n";
}

}  // namespace

void cmd_state(const RunConfig& cfg, std::ostream& out) {
  const auto& src = cfg.source;
  const double phi = source::output_phase(src);
  const double lc = source::coherence_length_nm(src.lambda_i_nm, src.bandwidth_i_nm);
  const double mu = source::effective_coherence(src);
  out << "output phase phi = " << fixed(phi) << " rad\n"
      << "path mismatch (-dL_i + dL_s) = " << io::format_number(source::path_mismatch_nm(src)) << " nm\n"
      << "coherence length = " << fixed(lc * 1e-6, 4) << " mm\n"
      << "coherence weight mu = " << sci(mu, 6) << '\n'
      << "pump arm angle beta = " << fixed(source::arm_angle(src)) << " rad\n\n";

  const PureState coherent = source::ideal_state(phi, source::arm_angle(src));
  out << "coherent amplitudes (rows signal ports, columns idler)\n" << std::setw(10) << "";
  for (const auto& m : coherent.idler_basis()) out << std::setw(24) << to_string(m);
  out << '\n';
  for (Eigen::Index r = 0; r < coherent.amplitudes().rows(); ++r) {
    out << std::setw(10) << to_string(coherent.signal_basis()[static_cast<std::size_t>(r)]);
    for (Eigen::Index c = 0; c < coherent.amplitudes().cols(); ++c) {
      out << std::setw(24) << complex_text(coherent.amplitudes()(r, c));
    }
    out << '\n';
  }
  out << '\n';

  const MixedState emitted = source::effective_state(src);
  print_probabilities(out, "joint probabilities, idler H/V basis", probability_table(emitted),
                      emitted.signal_basis(), emitted.idler_basis());
  out << '\n';
  const Basis sig_da = signal_basis({Mode::D, Mode::A});
  const Basis idl_da = idler_basis({Mode::D, Mode::A});
  const MixedState da = apply_idler_transform(apply_signal_transform(emitted, optics::arms_to_da(), sig_da),
                                              optics::hv_to_da(), idl_da);
  print_probabilities(out, "joint probabilities, D/A basis (signal after the final splitter)",
                      probability_table(da), sig_da, idl_da);
}

void cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const auto angles = cfg.scan.angles_rad();
  const auto measured = detection::fringe_scan(cfg.source, cfg.detector, angles, cfg.run.duration_s, cfg.run.seed);
  std::vector<detection::CountRecord> analytic;
  analytic.reserve(angles.size());
  for (double a : angles) analytic.push_back(detection::expected_rates(cfg.source, cfg.detector, a));

  const auto csv_path = cfg.output.directory / "scan.csv";
  auto csv = open_output(cfg, "scan.csv");
  io::write_scan_csv(csv, angles, measured, analytic);
  finish(csv, csv_path);
  out << "wrote " << csv_path.string() << '\n';
  if (cfg.output.emit_svg) {
    const auto svg_path = cfg.output.directory / "scan.svg";
    auto svg = open_output(cfg, "scan.svg");
    io::write_scan_svg(svg, angles, measured, analytic);
    finish(svg, svg_path);
    out << "wrote " << svg_path.string() << '\n';
  }

  out << "port  peak_hz  peak_deg  fitted_visibility  analytic_visibility\n";
  for (Port p : kPorts) {
    const auto mc = detection::coincidence_series(measured, p);
    const auto an = detection::coincidence_series(analytic, p);
    const auto fit = detection::fit_fringe(angles, mc);
    const auto fit_an = detection::fit_fringe(angles, an);
    out << "   " << detection::to_string(p) << "  " << io::format_number(*std::max_element(mc.begin(), mc.end()))
        << "  " << fixed(fit.peak_angle_rad * kDeg, 2) << "  " << fixed(fit.visibility(), 4) << "  "
        << fixed(fit_an.visibility(), 4) << '\n';
  }
}

void cmd_lock(const RunConfig& cfg, std::ostream& out) {
  const auto trace = lock::run_lock(cfg.source, cfg.lock.gains, cfg.lock.drift, cfg.lock.duration_s, cfg.run.dt_s,
                                    cfg.run.seed, cfg.lock.options);
  const auto csv_path = cfg.output.directory / "lock.csv";
  auto csv = open_output(cfg, "lock.csv");
  io::write_lock_csv(csv, trace);
  finish(csv, csv_path);
  out << "wrote " << csv_path.string() << '\n';
  if (cfg.output.emit_svg) {
    const auto svg_path = cfg.output.directory / "lock.svg";
    auto svg = open_output(cfg, "lock.svg");
    io::write_lock_svg(svg, trace, cfg.lock.band_rad);
    finish(svg, svg_path);
    out << "wrote " << svg_path.string() << '\n';
  }
  const auto s = lock::summarize(trace, cfg.lock.settle_s, cfg.lock.band_rad);
  out << "setpoint: mismatch " << io::format_number(trace.setpoint.mismatch_nm) << " nm, I1 = "
      << fixed(trace.setpoint.intensities.i1, 4) << ", I2 = " << fixed(trace.setpoint.intensities.i2, 4) << '\n'
      << "settled phase (t >= " << io::format_number(cfg.lock.settle_s) << " s): mean " << fixed(s.mean_phi_rad)
      << " rad, stddev " << sci(s.stddev_phi_rad) << " rad\n"
      << "in-band fraction (|phi - target| < " << io::format_number(cfg.lock.band_rad)
      << " rad): " << fixed(s.in_band_fraction, 4) << '\n';
}

void cmd_metrics(const RunConfig& cfg, const std::optional<std::filesystem::path>& counts_csv, std::ostream& out) {
  PeakCounts counts;
  if (counts_csv) {
    std::ifstream in(*counts_csv);
    if (!in) throw ConfigError("cannot open counts file '" + counts_csv->string() + "'");
    const auto rows = io::read_count_csv(in);
    // Several rows per port (a scan): keep the fringe maximum.
    std::array<const io::CountRow*, kPortCount> best{};
    for (const auto& row : rows) {
      auto& slot = best[static_cast<std::size_t>(row.port)];
      if (slot == nullptr || row.coincidences_hz > slot->coincidences_hz) slot = &row;
    }
    for (Port p : kPorts) {
      const io::CountRow* row = best[static_cast<std::size_t>(p)];
      if (row == nullptr) {
        throw io::CsvError(rows.back().line, "no rows for port " + std::string(detection::to_string(p)));
      }
      auto& dst = counts.ports[static_cast<std::size_t>(p)];
      dst.coincidences = row->coincidences_hz;
      dst.accidentals = row->accidentals_hz;
      if (row->singles_hz) {
        dst.singles = *row->singles_hz;
      } else {
        counts.singles_measured = false;
        const double angle = row->angle_deg ? *row->angle_deg / kDeg : detection::peak_angle(p);
        dst.singles = detection::expected_rates(cfg.source, cfg.detector, angle)[p].singles;
      }
    }
    out << "counts from " << counts_csv->string() << '\n';
  } else {
    for (Port p : kPorts) {
      const auto rec = detection::simulate_counts(cfg.source, cfg.detector, detection::peak_angle(p),
                                                  cfg.run.duration_s,
                                                  detection::point_seed(cfg.run.seed, static_cast<std::uint64_t>(p)));
      counts.ports[static_cast<std::size_t>(p)] = rec[p];
    }
    out << "counts simulated at each port's peak analyzer angle, " << io::format_number(cfg.run.duration_s)
        << " s per port\n";
  }
  print_metrics(cfg, counts, out);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bidirectionally pumped single-crystal entangled photon source simulator", "biphoton-sim"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool svg = false;
  std::string counts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file (INI)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "master random seed");
    sub->add_flag("--svg", svg, "also write SVG plots");
  };
  auto* state = app.add_subcommand("state", "print the emitted two-photon state");
  auto* scan = app.add_subcommand("scan", "coincidence fringes versus analyzer angle");
  auto* lock_cmd = app.add_subcommand("lock", "closed-loop phase stabilization");
  auto* metrics = app.add_subcommand("metrics", "visibility, QBER and brightness");
  for (auto* sub : {state, scan, lock_cmd, metrics}) add_common(sub);
  metrics->add_option("--counts", counts, "CSV of measured counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig cfg = parse_config(config_path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (app.get_subcommands().front()->count("--seed") > 0) cfg.run.seed = seed;
    if (svg) cfg.output.emit_svg = true;

    if (state->parsed()) cmd_state(cfg, out);
    if (scan->parsed()) cmd_scan(cfg, out);
    if (lock_cmd->parsed()) cmd_lock(cfg, out);
    if (metrics->parsed()) {
      cmd_metrics(cfg, counts.empty() ? std::nullopt : std::optional<std::filesystem::path>(counts), out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const io::CsvError& e) {
    err << "counts error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace biphoton::cli
