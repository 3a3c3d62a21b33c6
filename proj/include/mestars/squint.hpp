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
#include <vector>

#include "mestars/scenario.hpp"

namespace mestars {

/// Normalized array gain of one user over a frequency grid.
struct GainCurve {
    std::vector<double> frequencies;
    std::vector<double> gains; // in [0, 1]
    int user_index = 0;
    MoveMode mode = MoveMode::FP;
    double bandwidth_hz = 0.0;
};

/// Frequency-independent residual of element m for a user:
/// |p_k - s_m| + x_m sin(az)sin(el) + z_m cos(el), in meters. A zero
/// residual makes the element's gain contribution flat across frequency.
double residual_phase(const Eigen::Vector2d& offset, const Eigen::Vector3d& user_position,
                      const Eigen::Vector3d& center, const IncidenceAngles& angles);

/// Residuals for all elements at once.
std::vector<double> residual_phases(std::span<const Eigen::Vector2d> offsets,
                                    const Eigen::Vector3d& user_position,
                                    const Eigen::Vector3d& center,
                                    const IncidenceAngles& angles);

/// Phase profile matched to the centre frequency:
/// theta_m = +2 pi f_c / c * residual_m, reduced mod 2 pi.
std::vector<double> center_frequency_phase_design(std::span<const Eigen::Vector2d> offsets,
                                                  const Eigen::Vector3d& user_position,
                                                  const Eigen::Vector3d& center,
                                                  const IncidenceAngles& angles,
                                                  double center_freq_hz);

/// (1/M) |sum_m exp(-j 2 pi f / c * residual_m) exp(j theta_m)|, in [0, 1].
double normalized_array_gain(std::span<const Eigen::Vector2d> offsets,
                             std::span<const double> phases,
                             const Eigen::Vector3d& user_position,
                             const Eigen::Vector3d& center, const IncidenceAngles& angles,
                             double freq_hz);

/// Gain curve over a dense grid of one bandwidth with phases designed at
/// f_c. Shared by the sweep and by the gain-fitness position search.
GainCurve gain_curve(const Scenario& scenario, const ElementLayout& layout, int user_index,
                     double bandwidth_hz, int n_points);

/// One curve per requested bandwidth, phases re-designed at f_c each time.
std::vector<GainCurve> squint_sweep(const Scenario& scenario, const ElementLayout& layout,
                                    int user_index, std::span<const double> bandwidths_hz,
                                    int n_points);

/// Smallest gain across the curve; the beam-squint severity scalar.
double min_gain(const GainCurve& curve);

} // namespace mestars
