#pragma once

// CSV and SVG emission for scans and lock traces, and the count-CSV reader
// used by the metrics command.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biphoton/detection.hpp"
#include "biphoton/lock.hpp"

namespace biphoton::io {

/// Shortest round-trippable-enough text for a rate or angle: "%.10g" with a
/// '.' decimal point regardless of locale.
std::string format_number(double value);

inline constexpr const char* kScanHeader = "angle_deg,port,coincidences_hz,accidentals_hz,analytic_hz";
inline constexpr const char* kLockHeader = "time_s,mismatch_nm,phi_rad,i1,i2";

/// One row per (angle, port).
void write_scan_csv(std::ostream& out, std::span<const double> angles_rad,
                    std::span<const detection::CountRecord> measured,
                    std::span<const detection::CountRecord> analytic);

void write_lock_csv(std::ostream& out, const lock::LockTrace& trace);

/// Raised for unreadable count CSV; the message carries the line number.
class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CountRow {
  std::size_t line = 0;
  std::optional<double> angle_deg;
  detection::Port port = detection::Port::H;
  std::optional<double> singles_hz;
  double coincidences_hz = 0.0;
  double accidentals_hz = 0.0;
};

/// Header-driven: requires port, coincidences_hz, accidentals_hz; angle_deg
/// and singles_hz are optional. Extra columns are ignored, so scan output
/// reads back directly.
std::vector<CountRow> read_count_csv(std::istream& in);

/// Coincidence fringes: Monte Carlo points over analytic curves, one colour
/// per port.
void write_scan_svg(std::ostream& out, std::span<const double> angles_rad,
                    std::span<const detection::CountRecord> measured,
                    std::span<const detection::CountRecord> analytic);

/// Output phase against time with the +-band around the target.
void write_lock_svg(std::ostream& out, const lock::LockTrace& trace, double band_rad);

}  // namespace biphoton::io
