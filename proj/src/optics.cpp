#include "biphoton/optics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace biphoton::optics {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

ElementSpec symmetric_bs(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw Error("beam splitter reflection amplitude must lie in (0, 1), got " + std::to_string(r));
  }
  const double t = std::sqrt(1.0 - r * r);
  Jones u;
  u << r, kI * t,
       kI * t, r;
  return {ElementKind::symmetric_bs, {r}, u};
}

ElementSpec hwp(double theta_rad) {
  const double c = std::cos(2.0 * theta_rad);
  const double s = std::sin(2.0 * theta_rad);
  Jones u;
  u << c, s,
       s, -c;
  return {ElementKind::hwp, {theta_rad}, u};
}

ElementSpec qwp(double theta_rad) {
  const double c = std::cos(theta_rad);
  const double s = std::sin(theta_rad);
  // R(-theta) diag(1, i) R(theta)
  Jones u;
  u << c * c + kI * s * s, (1.0 - kI) * s * c,
       (1.0 - kI) * s * c, s * s + kI * c * c;
  return {ElementKind::qwp, {theta_rad}, u};
}

std::array<double, 2> Pbs::split(const JonesVector& input) const {
  const auto out = route(input);
  return {std::norm(out.transmitted), std::norm(out.reflected)};
}

Pbs pbs() { return {}; }

Complex phase_shift(double lambda_nm, double delta_l_nm) {
  if (!(lambda_nm > 0.0)) throw Error("wavelength must be positive");
  return std::polar(1.0, 2.0 * std::numbers::pi * delta_l_nm / lambda_nm);
}

JonesVector polarization(Mode mode) {
  const double h = 1.0 / std::numbers::sqrt2;
  switch (mode) {
    case Mode::H: return {1.0, 0.0};
    case Mode::V: return {0.0, 1.0};
    case Mode::D: return {h, h};
    case Mode::A: return {-h, h};
    default: throw Error("no polarization vector for mode " + std::string(to_string(mode)));
  }
}

AmplitudeMatrix hv_to_da() {
  const double h = 1.0 / std::numbers::sqrt2;
  AmplitudeMatrix u(2, 2);
  // columns: H, V; rows: D, A
  u << h, h,
       -h, h;
  return u;
}

AmplitudeMatrix arms_to_da() { return symmetric_bs(1.0 / std::numbers::sqrt2).matrix; }

AmplitudeMatrix four_port_splitter(double r_first) {
  const Jones first = symmetric_bs(r_first).matrix;
  const Jones last = symmetric_bs(1.0 / std::numbers::sqrt2).matrix;

  // Stage 1 acts on inputs (arm1, arm2, vac1, vac2) giving (H, V, l1, l2).
  AmplitudeMatrix stage1 = AmplitudeMatrix::Zero(4, 4);
  for (int arm = 0; arm < 2; ++arm) {
    const int port = arm;      // H or V
    const int inner = 2 + arm; // l1 or l2 / vac1 or vac2
    stage1(port, arm) = first(0, 0);
    stage1(port, inner) = first(0, 1);
    stage1(inner, arm) = first(1, 0);
    stage1(inner, inner) = first(1, 1);
  }
  // Stage 2 recombines (l1, l2) into (D, A).
  AmplitudeMatrix stage2 = AmplitudeMatrix::Identity(4, 4);
  stage2.block(2, 2, 2, 2) = last;

  const AmplitudeMatrix total = stage2 * stage1;
  return total.leftCols(2);
}

}  // namespace biphoton::optics
