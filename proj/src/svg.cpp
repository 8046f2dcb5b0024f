#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "biphoton/io.hpp"

namespace biphoton::io {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

constexpr std::array<const char*, 4> kPortColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

void open_svg(std::ostream& out, const Frame& f, const std::string& title, const std::string& xlabel,
              const std::string& ylabel) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
      << xlabel << "</text>\n"
      << "<text x=\"15\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
      << kHeight / 2 << ")\">" << ylabel << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    out << "<text x=\"" << format_number(f.px(x)) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_number(x) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << format_number(f.py(y) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_number(y) << "</text>\n";
  }
}

}  // namespace

void write_scan_svg(std::ostream& out, std::span<const double> angles_rad,
                    std::span<const detection::CountRecord> measured,
                    std::span<const detection::CountRecord> analytic) {
  if (angles_rad.empty() || angles_rad.size() != measured.size() || angles_rad.size() != analytic.size()) {
    throw Error("scan SVG: angle, measured and analytic lengths differ");
  }
  constexpr double deg = 180.0 / std::numbers::pi;
  double ymax = 0.0;
  for (std::size_t k = 0; k < angles_rad.size(); ++k) {
    for (auto p : detection::kPorts) ymax = std::max({ymax, measured[k][p].coincidences, analytic[k][p].coincidences});
  }
  Frame f{angles_rad.front() * deg, angles_rad.back() * deg, 0.0, ymax > 0.0 ? 1.1 * ymax : 1.0};
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  open_svg(out, f, "Coincidence rate per 810 nm port", "analyzer HWP angle (deg)", "coincidences (1/s)");
  for (auto p : detection::kPorts) {
    const char* colour = kPortColours[static_cast<std::size_t>(p)];
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < angles_rad.size(); ++k) {
      out << format_number(f.px(angles_rad[k] * deg)) << ',' << format_number(f.py(analytic[k][p].coincidences))
          << ' ';
    }
    out << "\"/>\n";
    for (std::size_t k = 0; k < angles_rad.size(); ++k) {
      out << "<circle cx=\"" << format_number(f.px(angles_rad[k] * deg)) << "\" cy=\""
          << format_number(f.py(measured[k][p].coincidences)) << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
    }
    const double ly = kTop + 15.0 + 15.0 * static_cast<double>(p);
    out << "<text x=\"" << kWidth - kRight - 40 << "\" y=\"" << ly << "\" font-size=\"12\" fill=\"" << colour
        << "\">" << detection::to_string(p) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_lock_svg(std::ostream& out, const lock::LockTrace& trace, double band_rad) {
  if (trace.samples.empty()) throw Error("lock SVG: empty trace");
  const double target = trace.setpoint.target_phi_rad;
  double lo = target - 2.0 * band_rad;
  double hi = target + 2.0 * band_rad;
  for (const auto& s : trace.samples) {
    lo = std::min(lo, s.phi_rad);
    hi = std::max(hi, s.phi_rad);
  }
  Frame f{trace.samples.front().time_s, trace.samples.back().time_s, lo, hi};
  if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
  open_svg(out, f, "Locked output phase", "time (s)", "phase (rad)");
  for (double edge : {target - band_rad, target + band_rad}) {
    out << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << format_number(f.py(edge))
        << "\" y2=\"" << format_number(f.py(edge)) << "\" stroke=\"grey\" stroke-dasharray=\"4 3\"/>\n";
  }
  // Thin the polyline to about 2000 vertices.
  const std::size_t stride = std::max<std::size_t>(1, trace.samples.size() / 2000);
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
  for (std::size_t k = 0; k < trace.samples.size(); k += stride) {
    out << format_number(f.px(trace.samples[k].time_s)) << ',' << format_number(f.py(trace.samples[k].phi_rad)) << ' ';
  }
  out << "\"/>\n</svg>\n";
}

}  // namespace biphoton::io
