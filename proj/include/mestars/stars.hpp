// SPDX-License-Identifier: Apache-2.0
//
// mestars — movable-element STARS near-field wideband downlink simulator
// Copyright (C) 2025-2026 mestars contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mestars/common.hpp"

namespace mestars {

struct SystemConfig;

/// Element movement modes. RB moves freely in the plane, HB along
/// horizontal tracks, VB along vertical tracks, DB along diagonal tracks,
/// FP keeps all elements fixed (benchmark configuration).
enum class MoveMode { RB, HB, VB, DB, FP };

const char* mode_name(MoveMode m);
MoveMode mode_from_name(const std::string& name);

/// Per-element local offsets (x_m, z_m) on the surface plane plus the
/// track bookkeeping of the active movement mode. Offsets are local to
/// the surface centre; the plane normal is the global y-axis.
struct ElementLayout {
    struct HorizontalTracks {
        int track_count = 0;             // number of slides
        std::vector<int> track_index;    // 1-based slide per element
        double spacing_m = 0.0;          // distance between slides
    };
    struct VerticalTracks {
        int track_count = 0;
        std::vector<int> track_index;
        double spacing_m = 0.0;
    };
    struct DiagonalTracks {
        std::vector<double> z_intercept_m; // z = x + intercept per element
    };

    MoveMode mode = MoveMode::FP;
    double aperture_m = 0.0;              // square side A of the movable area
    std::vector<Eigen::Vector2d> offsets; // (x_m, z_m), meters
    std::optional<HorizontalTracks> horizontal;
    std::optional<VerticalTracks> vertical;
    std::optional<DiagonalTracks> diagonal;

    int size() const { return static_cast<int>(offsets.size()); }
    double half_side() const { return 0.5 * aperture_m; }

    /// Free coordinates per element under this mode (2 RB, 1 HB/VB/DB, 0 FP).
    int free_dims_per_element() const;

    /// PSO-facing flattening of the free coordinates:
    /// RB [x1,z1,...,xM,zM]; HB x per element; VB z; DB x.
    std::vector<double> encode() const;

    /// Checks offsets against the box [-A/2, A/2]^2 and the exact track
    /// identities of the mode. Throws ValidationError with a field path.
    void validate() const;
};

/// Canonical layout for a mode: RB/FP get a centred uniform grid at
/// half-wavelength pitch, HB/VB one element per track at the track centre,
/// DB one element per evenly spaced diagonal at the chord midpoint.
ElementLayout default_layout(MoveMode mode, const SystemConfig& cfg);

/// Applies proposed free coordinates to a layout, clipping every free
/// coordinate into the movable range and recomputing track-dependent
/// coordinates. DB clips along the track so both coordinates stay inside
/// the square. Throws for FP layouts. Idempotent.
ElementLayout clamp_to_mode(const ElementLayout& layout, std::span<const double> proposed);

/// Number of unordered element pairs closer than d_min (strict).
int min_distance_violations(std::span<const Eigen::Vector2d> offsets, double d_min);

/// Energy-splitting surface coefficients: amplitudes are sqrt(beta) with
/// beta_t + beta_r = 1 per element, phases independent in [0, 2pi).
struct StarsCoefficients {
    Eigen::VectorXd amp_t, amp_r;
    Eigen::VectorXd phase_t, phase_r;

    int size() const { return static_cast<int>(amp_t.size()); }
    Eigen::VectorXcd tuning_vector_t() const;
    Eigen::VectorXcd tuning_vector_r() const;

    /// ES invariant (|amp_t|^2 + |amp_r|^2 = 1 to 1e-9) and range checks.
    void validate() const;
};

/// Diagonal transmission/reflection coefficient matrices (Theta_t, Theta_r).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
coefficient_matrices(const StarsCoefficients& coeffs);

} // namespace mestars
