#pragma once

// Test-only reference computations. Nothing here calls into the library's
// transform path: states are expanded term by term from hand-written
// substitution rules.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Ket = std::map<std::pair<std::string, std::string>, C>;  // (signal, idler) -> amplitude
using Rule = std::map<std::string, std::vector<std::pair<std::string, C>>>;

inline const double kHalfRoot = 1.0 / std::sqrt(2.0);
inline const C kI{0.0, 1.0};

/// 1/sqrt2 (|H H> + e^{i phi} |V V>)
inline Ket phi_ket(double phi) {
  return {{{"H", "H"}, kHalfRoot}, {{"V", "V"}, kHalfRoot * std::polar(1.0, phi)}};
}

/// Signal: H -> 1/sqrt2 (D + iA), V -> 1/sqrt2 (iD + A).
inline Rule signal_substitution() {
  return {{"H", {{"D", kHalfRoot}, {"A", kI * kHalfRoot}}}, {"V", {{"D", kI * kHalfRoot}, {"A", kHalfRoot}}}};
}

/// Idler: H -> 1/sqrt2 (D - A), V -> 1/sqrt2 (D + A).
inline Rule idler_substitution() {
  return {{"H", {{"D", kHalfRoot}, {"A", -kHalfRoot}}}, {"V", {{"D", kHalfRoot}, {"A", kHalfRoot}}}};
}

inline Ket expand(const Ket& in, const Rule& sig, const Rule& idl) {
  Ket out;
  for (const auto& [labels, amp] : in) {
    for (const auto& [s, cs] : sig.at(labels.first)) {
      for (const auto& [i, ci] : idl.at(labels.second)) out[{s, i}] += amp * cs * ci;
    }
  }
  return out;
}

inline C amp(const Ket& k, const std::string& s, const std::string& i) {
  auto it = k.find({s, i});
  return it == k.end() ? C{} : it->second;
}

/// Haar-ish random unitary from QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = C(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return q;
}

inline Eigen::MatrixXcd random_amplitudes(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = C(g(rng), g(rng));
  return a / a.norm();
}

/// Central finite difference.
template <typename F>
double derivative(F&& f, double x, double h = 1e-4) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
