#pragma once

// Two-photon states on a small labeled mode space: signal path/port modes
// tensored with idler polarization modes.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace biphoton {

using Complex = std::complex<double>;
using AmplitudeMatrix = Eigen::MatrixXcd;

/// Base class for every error raised by the simulator library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { signal, idler };

enum class Mode { path1, path2, H, V, D, A };

struct ModeLabel {
  Side side;
  Mode mode;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

std::string_view to_string(Mode mode);
std::string to_string(const ModeLabel& label);

/// Parses "H", "V", "D", "A", "path1", "path2".
Mode parse_mode(std::string_view text);

using Basis = std::vector<ModeLabel>;

Basis signal_basis(std::initializer_list<Mode> modes);
Basis idler_basis(std::initializer_list<Mode> modes);

/// Throws unless the basis is non-empty, single-sided, duplicate-free, and
/// (for the signal side) does not mix path modes with port modes. Idler
/// bases may only hold polarization modes.
void validate_basis(const Basis& basis, Side side);

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kRescaleTrigger = 1e-6;
inline constexpr double kUnitaryTolerance = 1e-10;

/// Normalized pure two-photon state. Rows index the signal basis, columns the
/// idler basis. Immutable once built.
class PureState {
 public:
  const Basis& signal_basis() const { return signal_; }
  const Basis& idler_basis() const { return idler_; }
  const AmplitudeMatrix& amplitudes() const { return amps_; }

  /// Factor the raw input was divided by when it had to be renormalized;
  /// 1 when no rescale was needed.
  double correction_factor() const { return correction_; }

  std::size_t signal_index(Mode mode) const;
  std::size_t idler_index(Mode mode) const;
  Complex amplitude(Mode signal, Mode idler) const;

  double norm_squared() const { return amps_.squaredNorm(); }

 private:
  friend PureState pure_from_amplitudes(Basis, Basis, AmplitudeMatrix);
  PureState(Basis s, Basis i, AmplitudeMatrix a, double c)
      : signal_(std::move(s)), idler_(std::move(i)), amps_(std::move(a)), correction_(c) {}

  Basis signal_;
  Basis idler_;
  AmplitudeMatrix amps_;
  double correction_ = 1.0;
};

/// Builds a normalized state. Inputs whose norm is off by more than 1e-6 are
/// rescaled and the factor recorded; a zero matrix throws "degenerate state".
PureState pure_from_amplitudes(Basis signal, Basis idler, AmplitudeMatrix amplitudes);

/// Convex combination of pure states sharing one pair of bases.
class MixedState {
 public:
  struct Component {
    double weight;
    PureState state;
  };

  const std::vector<Component>& components() const { return components_; }
  const Basis& signal_basis() const { return components_.front().state.signal_basis(); }
  const Basis& idler_basis() const { return components_.front().state.idler_basis(); }

 private:
  friend MixedState mixture(std::vector<Component>);
  explicit MixedState(std::vector<Component> c) : components_(std::move(c)) {}
  std::vector<Component> components_;
};

/// Renormalizes the weights to unit sum, keeping component order.
MixedState mixture(std::vector<MixedState::Component> components);
MixedState as_mixed(const PureState& state);

/// Left-multiplies the amplitudes by a unitary U (|signal| x |signal|).
PureState apply_signal_transform(const PureState& state, const AmplitudeMatrix& unitary,
                                 Basis new_signal_basis);
/// Right-multiplies the amplitudes by U^T.
PureState apply_idler_transform(const PureState& state, const AmplitudeMatrix& unitary,
                                Basis new_idler_basis);

/// Like apply_signal_transform but accepts a rectangular isometry
/// (V^dagger V = I), used to fan two paths out onto more detector ports.
PureState apply_signal_isometry(const PureState& state, const AmplitudeMatrix& isometry,
                                Basis new_signal_basis);

MixedState apply_signal_transform(const MixedState& state, const AmplitudeMatrix& unitary,
                                  const Basis& new_signal_basis);
MixedState apply_idler_transform(const MixedState& state, const AmplitudeMatrix& unitary,
                                 const Basis& new_idler_basis);
MixedState apply_signal_isometry(const MixedState& state, const AmplitudeMatrix& isometry,
                                 const Basis& new_signal_basis);

double joint_probability(const PureState& state, Mode signal, Mode idler);
double joint_probability(const MixedState& state, Mode signal, Mode idler);

/// Full |signal| x |idler| probability table.
Eigen::MatrixXd probability_table(const PureState& state);
Eigen::MatrixXd probability_table(const MixedState& state);

/// |<a|b>|, used for equality up to a global phase.
double overlap_magnitude(const PureState& a, const PureState& b);
bool equal_up_to_phase(const PureState& a, const PureState& b, double tol = kNormTolerance);

/// max |U^dagger U - I| entry.
double unitarity_defect(const AmplitudeMatrix& u);

}  // namespace biphoton
