#include "biphoton/state.hpp"

#include <algorithm>
#include <cmath>

namespace biphoton {

namespace {

bool is_path(Mode m) { return m == Mode::path1 || m == Mode::path2; }

void check_shape(const Basis& s, const Basis& i, const AmplitudeMatrix& a) {
  if (a.rows() != static_cast<Eigen::Index>(s.size()) ||
      a.cols() != static_cast<Eigen::Index>(i.size())) {
    throw Error("amplitude matrix shape " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " does not match bases " + std::to_string(s.size()) +
                "x" + std::to_string(i.size()));
  }
}

std::size_t index_of(const Basis& basis, Mode mode, Side side) {
  auto it = std::find(basis.begin(), basis.end(), ModeLabel{side, mode});
  if (it == basis.end()) {
    throw Error("unknown mode label " + to_string(ModeLabel{side, mode}));
  }
  return static_cast<std::size_t>(it - basis.begin());
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::path1: return "path1";
    case Mode::path2: return "path2";
    case Mode::H: return "H";
    case Mode::V: return "V";
    case Mode::D: return "D";
    case Mode::A: return "A";
  }
  return "?";
}

std::string to_string(const ModeLabel& label) {
  return std::string(to_string(label.mode)) + (label.side == Side::signal ? "_s" : "_i");
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::path1, Mode::path2, Mode::H, Mode::V, Mode::D, Mode::A}) {
    if (to_string(m) == text) return m;
  }
  throw Error("unknown mode name '" + std::string(text) + "'");
}

Basis signal_basis(std::initializer_list<Mode> modes) {
  Basis b;
  for (Mode m : modes) b.push_back({Side::signal, m});
  return b;
}

Basis idler_basis(std::initializer_list<Mode> modes) {
  Basis b;
  for (Mode m : modes) b.push_back({Side::idler, m});
  return b;
}

void validate_basis(const Basis& basis, Side side) {
  if (basis.empty()) throw Error("empty basis");
  bool any_path = false;
  bool any_port = false;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (basis[k].side != side) throw Error("basis mixes signal and idler labels");
    if (std::find(basis.begin() + static_cast<long>(k) + 1, basis.end(), basis[k]) != basis.end()) {
      throw Error("duplicate mode label " + to_string(basis[k]));
    }
    (is_path(basis[k].mode) ? any_path : any_port) = true;
  }
  if (side == Side::idler && any_path) throw Error("idler basis must hold polarization modes");
  if (any_path && any_port) throw Error("signal basis mixes path and port modes");
}

std::size_t PureState::signal_index(Mode mode) const { return index_of(signal_, mode, Side::signal); }
std::size_t PureState::idler_index(Mode mode) const { return index_of(idler_, mode, Side::idler); }

Complex PureState::amplitude(Mode signal, Mode idler) const {
  return amps_(static_cast<Eigen::Index>(signal_index(signal)),
               static_cast<Eigen::Index>(idler_index(idler)));
}

PureState pure_from_amplitudes(Basis signal, Basis idler, AmplitudeMatrix amplitudes) {
  validate_basis(signal, Side::signal);
  validate_basis(idler, Side::idler);
  check_shape(signal, idler, amplitudes);
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("degenerate state");
  double correction = 1.0;
  if (std::abs(norm - 1.0) > kRescaleTrigger) {
    correction = norm;
    amplitudes /= norm;
  }
  return PureState(std::move(signal), std::move(idler), std::move(amplitudes), correction);
}

MixedState mixture(std::vector<MixedState::Component> components) {
  if (components.empty()) throw Error("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight >= 0.0)) throw Error("mixture weights must be non-negative");
    if (c.state.signal_basis() != components.front().state.signal_basis() ||
        c.state.idler_basis() != components.front().state.idler_basis()) {
      throw Error("mixture components must share bases");
    }
    total += c.weight;
  }
  if (!(total > 0.0)) throw Error("mixture weights sum to zero");
  for (auto& c : components) c.weight /= total;
  return MixedState(std::move(components));
}

MixedState as_mixed(const PureState& state) { return mixture({{1.0, state}}); }

double unitarity_defect(const AmplitudeMatrix& u) {
  const AmplitudeMatrix g = u.adjoint() * u - AmplitudeMatrix::Identity(u.cols(), u.cols());
  return g.cwiseAbs().maxCoeff();
}

PureState apply_signal_isometry(const PureState& state, const AmplitudeMatrix& isometry,
                                Basis new_signal_basis) {
  if (isometry.cols() != state.amplitudes().rows()) {
    throw Error("transform dimension does not match the signal basis");
  }
  if (unitarity_defect(isometry) > kUnitaryTolerance) throw Error("non-unitary element");
  return pure_from_amplitudes(std::move(new_signal_basis), state.idler_basis(),
                              isometry * state.amplitudes());
}

PureState apply_signal_transform(const PureState& state, const AmplitudeMatrix& unitary,
                                 Basis new_signal_basis) {
  if (unitary.rows() != unitary.cols()) throw Error("signal transform must be square");
  return apply_signal_isometry(state, unitary, std::move(new_signal_basis));
}

PureState apply_idler_transform(const PureState& state, const AmplitudeMatrix& unitary,
                                Basis new_idler_basis) {
  if (unitary.rows() != unitary.cols()) throw Error("idler transform must be square");
  if (unitary.cols() != state.amplitudes().cols()) {
    throw Error("transform dimension does not match the idler basis");
  }
  if (unitarity_defect(unitary) > kUnitaryTolerance) throw Error("non-unitary element");
  return pure_from_amplitudes(state.signal_basis(), std::move(new_idler_basis),
                              state.amplitudes() * unitary.transpose());
}

namespace {

template <typename F>
MixedState map_components(const MixedState& state, F&& f) {
  std::vector<MixedState::Component> out;
  out.reserve(state.components().size());
  for (const auto& c : state.components()) out.push_back({c.weight, f(c.state)});
  return mixture(std::move(out));
}

}  // namespace

MixedState apply_signal_transform(const MixedState& state, const AmplitudeMatrix& unitary,
                                  const Basis& new_signal_basis) {
  return map_components(state, [&](const PureState& s) {
    return apply_signal_transform(s, unitary, new_signal_basis);
  });
}

MixedState apply_idler_transform(const MixedState& state, const AmplitudeMatrix& unitary,
                                 const Basis& new_idler_basis) {
  return map_components(state, [&](const PureState& s) {
    return apply_idler_transform(s, unitary, new_idler_basis);
  });
}

MixedState apply_signal_isometry(const MixedState& state, const AmplitudeMatrix& isometry,
                                 const Basis& new_signal_basis) {
  return map_components(state, [&](const PureState& s) {
    return apply_signal_isometry(s, isometry, new_signal_basis);
  });
}

double joint_probability(const PureState& state, Mode signal, Mode idler) {
  return std::norm(state.amplitude(signal, idler));
}

double joint_probability(const MixedState& state, Mode signal, Mode idler) {
  double p = 0.0;
  for (const auto& c : state.components()) p += c.weight * joint_probability(c.state, signal, idler);
  return p;
}

Eigen::MatrixXd probability_table(const PureState& state) {
  return state.amplitudes().cwiseAbs2();
}

Eigen::MatrixXd probability_table(const MixedState& state) {
  const auto& first = state.components().front().state.amplitudes();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(first.rows(), first.cols());
  for (const auto& c : state.components()) table += c.weight * probability_table(c.state);
  return table;
}

double overlap_magnitude(const PureState& a, const PureState& b) {
  if (a.signal_basis() != b.signal_basis() || a.idler_basis() != b.idler_basis()) {
    throw Error("overlap requires identical bases");
  }
  return std::abs((a.amplitudes().conjugate().cwiseProduct(b.amplitudes())).sum());
}

bool equal_up_to_phase(const PureState& a, const PureState& b, double tol) {
  return std::abs(overlap_magnitude(a, b) - 1.0) < tol;
}

}  // namespace biphoton
