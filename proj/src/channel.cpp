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

#include "mestars/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

#include "mestars/kernels.hpp"

namespace mestars {

void ChannelSet::check_invariants(double rel_tol) const
{
    for (int l = 0; l < n_subcarriers(); ++l) {
        if (!bs_to_stars[l].allFinite())
            throw std::runtime_error("channel: non-finite bs_to_stars entry");
        for (int k = 0; k < n_users(); ++k) {
            const Eigen::MatrixXcd expected =
                stars_to_user[l][k].asDiagonal() * bs_to_stars[l];
            const double scale = expected.norm();
            if (!cascaded[l][k].allFinite() || !stars_to_user[l][k].allFinite())
                throw std::runtime_error("channel: non-finite entry");
            if ((cascaded[l][k] - expected).norm() > rel_tol * (scale > 0 ? scale : 1.0))
                throw std::runtime_error("channel: cascaded != diag(h) * F");
        }
    }
}

double path_gain(double freq_hz, double dist_m, const AbsorptionTable& absorption)
{
    if (!(dist_m > 0.0)) throw std::invalid_argument("path_gain: distance must be positive");
    if (!(freq_hz > 0.0)) throw std::invalid_argument("path_gain: frequency must be positive");
    const double free_space = kSpeedOfLight / (4.0 * kPi * freq_hz * dist_m);
    return free_space * std::exp(-0.5 * absorption.at(freq_hz) * dist_m);
}

Eigen::VectorXcd bs_steering(double departure_rad, double freq_hz, int n_antennas,
                             double spacing_m)
{
    const double step = -kTwoPi * freq_hz * spacing_m / kSpeedOfLight * std::sin(departure_rad);
    Eigen::VectorXcd a(n_antennas);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_antennas));
    for (int i = 0; i < n_antennas; ++i) a[i] = std::polar(scale, step * i);
    return a;
}

Eigen::VectorXcd stars_steering(std::span<const Eigen::Vector2d> offsets,
                                const IncidenceAngles& angles, double freq_hz)
{
    const std::size_t m_count = offsets.size();
    const double cx = angles.x_coefficient();
    const double cz = angles.z_coefficient();
    std::vector<double> ramp(m_count);
    for (std::size_t m = 0; m < m_count; ++m)
        ramp[m] = offsets[m].x() * cx + offsets[m].y() * cz;

    Eigen::VectorXcd a(m_count);
    kernels::unit_phasors(ramp.data(), m_count, -kTwoPi * freq_hz / kSpeedOfLight, a.data());
    a *= 1.0 / std::sqrt(static_cast<double>(m_count));
    return a;
}

Eigen::MatrixXcd bs_to_stars_channel(const Geometry& geometry,
                                     std::span<const Eigen::Vector2d> offsets, double freq_hz,
                                     const SystemConfig& cfg)
{
    const double dist = (geometry.bs_position - geometry.stars_center).norm();
    const double alpha0 = path_gain(freq_hz, dist, cfg.absorption);
    const IncidenceAngles angles = incidence_angles(geometry);
    const Eigen::VectorXcd a_s = stars_steering(offsets, angles, freq_hz);
    const Eigen::VectorXcd a_b =
        bs_steering(angles.departure_rad, freq_hz, cfg.n_antennas, cfg.bs_spacing_or_default());
    const double scale =
        std::sqrt(static_cast<double>(offsets.size()) * cfg.n_antennas) * alpha0;
    return scale * (a_s * a_b.adjoint());
}

Eigen::VectorXcd stars_to_user_channel(std::span<const Eigen::Vector2d> offsets,
                                       const UserSpec& user, const Eigen::Vector3d& center,
                                       double freq_hz, const SystemConfig& cfg)
{
    const std::size_t m_count = offsets.size();
    const double center_dist = (user.position - center).norm();
    const double alpha = path_gain(freq_hz, center_dist, cfg.absorption);

    // exact per-element distances (elements live in the plane y = center.y)
    std::vector<double> xs(m_count), zs(m_count), dist(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        xs[m] = center.x() + offsets[m].x();
        zs[m] = center.z() + offsets[m].y();
    }
    kernels::point_distances(xs.data(), zs.data(), m_count, user.position.x(),
                             user.position.y() - center.y(), user.position.z(), dist.data());
    for (std::size_t m = 0; m < m_count; ++m)
        if (!(dist[m] > 0.0))
            throw std::invalid_argument("stars_to_user_channel: user coincides with an element");

    Eigen::VectorXcd h(m_count);
    kernels::unit_phasors(dist.data(), m_count, -kTwoPi * freq_hz / kSpeedOfLight, h.data());
    h *= alpha;
    return h;
}

ChannelSet assemble_channels(const Scenario& scenario,
                             std::span<const Eigen::Vector2d> offsets)
{
    ChannelSet set;
    set.frequencies = subcarrier_frequencies(scenario.system);
    const int l_count = scenario.system.n_subcarriers;
    const int k_count = scenario.system.n_users;
    set.bs_to_stars.resize(l_count);
    set.stars_to_user.assign(l_count, {});
    set.cascaded.assign(l_count, {});
    set.user_regions.resize(k_count);
    for (int k = 0; k < k_count; ++k) set.user_regions[k] = scenario.geometry.users[k].region;

    for (int l = 0; l < l_count; ++l) {
        const double f = set.frequencies[l];
        set.bs_to_stars[l] = bs_to_stars_channel(scenario.geometry, offsets, f, scenario.system);
        set.stars_to_user[l].resize(k_count);
        set.cascaded[l].resize(k_count);
        for (int k = 0; k < k_count; ++k) {
            set.stars_to_user[l][k] =
                stars_to_user_channel(offsets, scenario.geometry.users[k],
                                      scenario.geometry.stars_center, f, scenario.system);
            set.cascaded[l][k] =
                set.stars_to_user[l][k].asDiagonal() * set.bs_to_stars[l];
        }
    }
    return set;
}

ChannelSet assemble_channels(const Scenario& scenario)
{
    return assemble_channels(scenario, scenario.layout.offsets);
}

std::string channel_set_to_json_string(const ChannelSet& set)
{
    using nlohmann::json;
    const auto matrix_to_json = [](const Eigen::MatrixXcd& m) {
        json out = json::array(); // row-major re, im
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                out.push_back(m(r, c).real());
                out.push_back(m(r, c).imag());
            }
        return out;
    };
    json j;
    j["frequencies"] = set.frequencies;
    json regions = json::array();
    for (Region r : set.user_regions) regions.push_back(region_name(r));
    j["user_regions"] = std::move(regions);
    json f = json::array(), h = json::array(), casc = json::array();
    for (int l = 0; l < set.n_subcarriers(); ++l) {
        f.push_back(matrix_to_json(set.bs_to_stars[l]));
        json hl = json::array(), cl = json::array();
        for (int k = 0; k < set.n_users(); ++k) {
            hl.push_back(matrix_to_json(set.stars_to_user[l][k]));
            cl.push_back(matrix_to_json(set.cascaded[l][k]));
        }
        h.push_back(std::move(hl));
        casc.push_back(std::move(cl));
    }
    j["bs_to_stars"] = std::move(f);
    j["stars_to_user"] = std::move(h);
    j["cascaded"] = std::move(casc);
    return j.dump(2) + "\n";
}

} // namespace mestars
