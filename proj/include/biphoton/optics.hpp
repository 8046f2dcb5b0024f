#pragma once

// Jones matrices and mode maps for the optical elements of the source.
//
// Conventions (frozen, tests depend on them):
//   * polarization vectors are (H, V) column vectors, D = (H + V)/sqrt2;
//   * symmetric beam splitter U = [[r, i t], [i t, r]] with real r, t, so the
//     transmitted amplitude leads the reflected one by pi/2;
//   * HWP is the reflection matrix [[cos 2a, sin 2a], [sin 2a, -cos 2a]];
//   * QWP is diag(1, i) with its fast axis rotated to the given angle.

#include <array>
#include <numbers>
#include <vector>

#include "biphoton/state.hpp"

namespace biphoton::optics {

using Jones = Eigen::Matrix2cd;
using JonesVector = Eigen::Vector2cd;

enum class ElementKind { symmetric_bs, hwp, qwp, pbs, phase_shift };

struct ElementSpec {
  ElementKind kind;
  std::vector<double> parameters;
  Jones matrix;
};

/// Lossless beam splitter with reflection amplitude r in (0, 1).
ElementSpec symmetric_bs(double r);
ElementSpec hwp(double theta_rad);
ElementSpec qwp(double theta_rad);

/// Polarizing beam splitter routing: H is transmitted, V reflected.
struct PbsOutput {
  Complex transmitted;
  Complex reflected;
};

struct Pbs {
  PbsOutput route(const JonesVector& input) const { return {input(0), input(1)}; }
  /// Power in each output port.
  std::array<double, 2> split(const JonesVector& input) const;
};

Pbs pbs();

/// exp(i 2 pi dL / lambda).
Complex phase_shift(double lambda_nm, double delta_l_nm);

/// Jones vectors for the named polarization modes (H, V, D, A).
JonesVector polarization(Mode mode);

/// The idler H/V -> D/A change of basis in the D = (V+H)/sqrt2,
/// A = (V-H)/sqrt2 convention: H -> (D - A)/sqrt2, V -> (D + A)/sqrt2.
AmplitudeMatrix hv_to_da();

/// Signal substitution at the final 50-50 splitter: arm 1 -> (D + iA)/sqrt2,
/// arm 2 -> (iD + A)/sqrt2.
AmplitudeMatrix arms_to_da();

/// 4x2 isometry fanning the two signal arms onto the detector ports
/// (H, V, D, A) through three symmetric splitters. Arm 1 reflects into H at
/// the first splitter and its transmitted part reaches the final splitter;
/// arm 2 likewise via V. `r_first` sets the first-stage reflection amplitude.
AmplitudeMatrix four_port_splitter(double r_first = 1.0 / std::numbers::sqrt2);

}  // namespace biphoton::optics
