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

#include "mestars/squint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mestars/kernels.hpp"

namespace mestars {

double residual_phase(const Eigen::Vector2d& offset, const Eigen::Vector3d& user_position,
                      const Eigen::Vector3d& center, const IncidenceAngles& angles)
{
    const Eigen::Vector3d element(center.x() + offset.x(), center.y(),
                                  center.z() + offset.y());
    return (user_position - element).norm() + offset.x() * angles.x_coefficient() +
           offset.y() * angles.z_coefficient();
}

std::vector<double> residual_phases(std::span<const Eigen::Vector2d> offsets,
                                    const Eigen::Vector3d& user_position,
                                    const Eigen::Vector3d& center,
                                    const IncidenceAngles& angles)
{
    const std::size_t m_count = offsets.size();
    std::vector<double> xs(m_count), zs(m_count), r(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        xs[m] = center.x() + offsets[m].x();
        zs[m] = center.z() + offsets[m].y();
    }
    kernels::point_distances(xs.data(), zs.data(), m_count, user_position.x(),
                             user_position.y() - center.y(), user_position.z(), r.data());
    const double cx = angles.x_coefficient();
    const double cz = angles.z_coefficient();
    for (std::size_t m = 0; m < m_count; ++m)
        r[m] += offsets[m].x() * cx + offsets[m].y() * cz;
    return r;
}

std::vector<double> center_frequency_phase_design(std::span<const Eigen::Vector2d> offsets,
                                                  const Eigen::Vector3d& user_position,
                                                  const Eigen::Vector3d& center,
                                                  const IncidenceAngles& angles,
                                                  double center_freq_hz)
{
    std::vector<double> phases =
        residual_phases(offsets, user_position, center, angles);
    const double omega = kTwoPi * center_freq_hz / kSpeedOfLight;
    for (double& p : phases) {
        p = std::fmod(omega * p, kTwoPi);
        if (p < 0.0) p += kTwoPi;
    }
    return phases;
}

double normalized_array_gain(std::span<const Eigen::Vector2d> offsets,
                             std::span<const double> phases,
                             const Eigen::Vector3d& user_position,
                             const Eigen::Vector3d& center, const IncidenceAngles& angles,
                             double freq_hz)
{
    const std::size_t m_count = offsets.size();
    if (phases.size() != m_count)
        throw std::invalid_argument("normalized_array_gain: phase count mismatch");
    std::vector<double> total = residual_phases(offsets, user_position, center, angles);
    const double omega = kTwoPi * freq_hz / kSpeedOfLight;
    for (std::size_t m = 0; m < m_count; ++m) total[m] = phases[m] - omega * total[m];
    const double gain = std::abs(kernels::phasor_sum(total.data(), m_count)) / m_count;
    return std::min(gain, 1.0);
}

GainCurve gain_curve(const Scenario& scenario, const ElementLayout& layout, int user_index,
                     double bandwidth_hz, int n_points)
{
    if (n_points < 2) throw std::invalid_argument("gain_curve: need at least 2 grid points");
    const auto& user = scenario.geometry.users.at(user_index);
    const IncidenceAngles angles = incidence_angles(scenario.geometry);
    const Eigen::Vector3d& center = scenario.geometry.stars_center;
    const double f_c = scenario.system.center_freq_hz;

    const std::vector<double> phases = center_frequency_phase_design(
        layout.offsets, user.position, center, angles, f_c);

    SystemConfig grid_cfg = scenario.system;
    grid_cfg.bandwidth_hz = bandwidth_hz;
    grid_cfg.n_subcarriers = n_points;

    GainCurve curve;
    curve.frequencies = subcarrier_frequencies(grid_cfg);
    curve.user_index = user_index;
    curve.mode = layout.mode;
    curve.bandwidth_hz = bandwidth_hz;
    curve.gains.reserve(n_points);
    for (double f : curve.frequencies)
        curve.gains.push_back(
            normalized_array_gain(layout.offsets, phases, user.position, center, angles, f));
    return curve;
}

std::vector<GainCurve> squint_sweep(const Scenario& scenario, const ElementLayout& layout,
                                    int user_index, std::span<const double> bandwidths_hz,
                                    int n_points)
{
    std::vector<GainCurve> curves;
    curves.reserve(bandwidths_hz.size());
    for (double b : bandwidths_hz)
        curves.push_back(gain_curve(scenario, layout, user_index, b, n_points));
    return curves;
}

double min_gain(const GainCurve& curve)
{
    return *std::min_element(curve.gains.begin(), curve.gains.end());
}

} // namespace mestars
