#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "biphoton/io.hpp"

namespace biphoton::io {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& text, std::size_t line, const std::string& column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw CsvError(line, "column '" + column + "': expected a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  std::string s(buf);
  // snprintf follows LC_NUMERIC; the file format does not.
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

void write_scan_csv(std::ostream& out, std::span<const double> angles_rad,
                    std::span<const detection::CountRecord> measured,
                    std::span<const detection::CountRecord> analytic) {
  if (angles_rad.size() != measured.size() || angles_rad.size() != analytic.size()) {
    throw Error("scan CSV: angle, measured and analytic lengths differ");
  }
  out << kScanHeader << '\n';
  for (std::size_t k = 0; k < angles_rad.size(); ++k) {
    for (auto port : detection::kPorts) {
      out << format_number(angles_rad[k] * kDeg) << ',' << detection::to_string(port) << ','
          << format_number(measured[k][port].coincidences) << ',' << format_number(measured[k][port].accidentals)
          << ',' << format_number(analytic[k][port].coincidences) << '\n';
    }
  }
}

void write_lock_csv(std::ostream& out, const lock::LockTrace& trace) {
  out << kLockHeader << '\n';
  for (const auto& s : trace.samples) {
    out << format_number(s.time_s) << ',' << format_number(s.mismatch_nm) << ',' << format_number(s.phi_rad) << ','
        << format_number(s.i1) << ',' << format_number(s.i2) << '\n';
  }
}

CsvError::CsvError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<CountRow> read_count_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      header = split_fields(line);
      break;
    }
  }
  if (header.empty()) throw CsvError(line_no == 0 ? 1 : line_no, "missing header row");

  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto port_col = column("port");
  const auto coinc_col = column("coincidences_hz");
  const auto acc_col = column("accidentals_hz");
  if (!port_col || !coinc_col || !acc_col) {
    throw CsvError(line_no, "header must name port, coincidences_hz and accidentals_hz");
  }
  const auto angle_col = column("angle_deg");
  const auto singles_col = column("singles_hz");

  std::vector<CountRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                  std::to_string(fields.size()));
    }
    CountRow row;
    row.line = line_no;
    try {
      row.port = detection::parse_port(fields[*port_col]);
    } catch (const Error&) {
      throw CsvError(line_no, "unknown port '" + fields[*port_col] + "'");
    }
    row.coincidences_hz = parse_number(fields[*coinc_col], line_no, "coincidences_hz");
    row.accidentals_hz = parse_number(fields[*acc_col], line_no, "accidentals_hz");
    if (angle_col) row.angle_deg = parse_number(fields[*angle_col], line_no, "angle_deg");
    if (singles_col) row.singles_hz = parse_number(fields[*singles_col], line_no, "singles_hz");
    if (row.coincidences_hz < 0.0 || row.accidentals_hz < 0.0 || row.singles_hz.value_or(0.0) < 0.0) {
      throw CsvError(line_no, "rates must be non-negative");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw CsvError(line_no, "no data rows");
  return rows;
}

}  // namespace biphoton::io
