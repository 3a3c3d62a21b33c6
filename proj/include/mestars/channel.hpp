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
#include <span>
#include <string>
#include <vector>

#include "mestars/scenario.hpp"

namespace mestars {

/// Per-subcarrier channels for one set of element positions:
/// F_l (surface x BS), h_{l,k} (surface -> user) and the cascaded
/// H_{l,k} = diag(h_{l,k}) F_l actually used by the rate expressions.
struct ChannelSet {
    std::vector<double> frequencies;                           // f_l
    std::vector<Eigen::MatrixXcd> bs_to_stars;                 // [l] MxN
    std::vector<std::vector<Eigen::VectorXcd>> stars_to_user;  // [l][k] M
    std::vector<std::vector<Eigen::MatrixXcd>> cascaded;       // [l][k] MxN
    std::vector<Region> user_regions;                          // [k]

    int n_subcarriers() const { return static_cast<int>(frequencies.size()); }
    int n_users() const { return static_cast<int>(user_regions.size()); }

    /// diag-product identity and finiteness; throws on violation.
    void check_invariants(double rel_tol = 1e-12) const;
};

/// Free-space gain with medium absorption:
/// (c / (4 pi f dist)) * exp(-K_abs(f) dist / 2). Throws for dist <= 0.
double path_gain(double freq_hz, double dist_m, const AbsorptionTable& absorption);

/// ULA response, entry i = exp(-j 2 pi f d / c * i * sin(phi_D)) / sqrt(N).
Eigen::VectorXcd bs_steering(double departure_rad, double freq_hz, int n_antennas,
                             double spacing_m);

/// Plane-wave surface response over local offsets, unit norm.
Eigen::VectorXcd stars_steering(std::span<const Eigen::Vector2d> offsets,
                                const IncidenceAngles& angles, double freq_hz);

/// Rank-one far-field BS->surface channel sqrt(MN) alpha_0 a_S a_B^H.
Eigen::MatrixXcd bs_to_stars_channel(const Geometry& geometry,
                                     std::span<const Eigen::Vector2d> offsets, double freq_hz,
                                     const SystemConfig& cfg);

/// Spherical-wavefront surface->user channel: the gain uses the
/// centre distance, the per-element phases use exact element distances.
Eigen::VectorXcd stars_to_user_channel(std::span<const Eigen::Vector2d> offsets,
                                       const UserSpec& user, const Eigen::Vector3d& center,
                                       double freq_hz, const SystemConfig& cfg);

/// All channels of a scenario at the given element offsets.
ChannelSet assemble_channels(const Scenario& scenario,
                             std::span<const Eigen::Vector2d> offsets);
ChannelSet assemble_channels(const Scenario& scenario);

/// Text-only JSON debug dump (interleaved re/im arrays per matrix).
std::string channel_set_to_json_string(const ChannelSet& set);

} // namespace mestars
