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

#include "mestars/stars.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mestars/scenario.hpp"

namespace mestars {

namespace {

constexpr double kTrackTol = 1e-12; // slack for exact track identities

std::string idx(const char* base, int m) { return std::string(base) + "[" + std::to_string(m) + "]"; }

// z = x + intercept clipped so both coordinates stay in [-half, half]
std::pair<double, double> diagonal_range(double intercept, double half)
{
    const double lo = std::max(-half, -half - intercept);
    const double hi = std::min(half, half - intercept);
    return {lo, hi};
}

} // namespace

const char* mode_name(MoveMode m)
{
    switch (m) {
        case MoveMode::RB: return "RB";
        case MoveMode::HB: return "HB";
        case MoveMode::VB: return "VB";
        case MoveMode::DB: return "DB";
        case MoveMode::FP: return "FP";
    }
    return "?";
}

MoveMode mode_from_name(const std::string& name)
{
    std::string u = name;
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
    if (u == "RB") return MoveMode::RB;
    if (u == "HB") return MoveMode::HB;
    if (u == "VB") return MoveMode::VB;
    if (u == "DB") return MoveMode::DB;
    if (u == "FP") return MoveMode::FP;
    throw ValidationError("layout.mode: unknown mode '" + name + "'");
}

int ElementLayout::free_dims_per_element() const
{
    switch (mode) {
        case MoveMode::RB: return 2;
        case MoveMode::HB:
        case MoveMode::VB:
        case MoveMode::DB: return 1;
        case MoveMode::FP: return 0;
    }
    return 0;
}

std::vector<double> ElementLayout::encode() const
{
    std::vector<double> enc;
    switch (mode) {
        case MoveMode::RB:
            enc.reserve(2 * offsets.size());
            for (const auto& o : offsets) {
                enc.push_back(o.x());
                enc.push_back(o.y());
            }
            break;
        case MoveMode::HB:
        case MoveMode::DB:
            enc.reserve(offsets.size());
            for (const auto& o : offsets) enc.push_back(o.x());
            break;
        case MoveMode::VB:
            enc.reserve(offsets.size());
            for (const auto& o : offsets) enc.push_back(o.y());
            break;
        case MoveMode::FP:
            break;
    }
    return enc;
}

void ElementLayout::validate() const
{
    if (!(aperture_m > 0.0)) throw ValidationError("layout.aperture_m: must be positive");
    const double half = half_side();
    const int m_count = size();
    for (int m = 0; m < m_count; ++m) {
        const auto& o = offsets[m];
        if (!(std::abs(o.x()) <= half + kTrackTol) || !(std::abs(o.y()) <= half + kTrackTol))
            throw ValidationError(idx("layout.offsets", m) + ": outside the movable square");
    }
    switch (mode) {
        case MoveMode::HB: {
            if (!horizontal) throw ValidationError("layout: HB mode requires horizontal track data");
            const auto& t = *horizontal;
            if (static_cast<int>(t.track_index.size()) != m_count)
                throw ValidationError("layout.track_index: size mismatch");
            for (int m = 0; m < m_count; ++m) {
                const double z = (t.track_index[m] - 0.5 * (t.track_count + 1)) * t.spacing_m;
                if (std::abs(offsets[m].y() - z) > kTrackTol)
                    throw ValidationError(idx("layout.offsets", m) + ": z off its horizontal track");
            }
            break;
        }
        case MoveMode::VB: {
            if (!vertical) throw ValidationError("layout: VB mode requires vertical track data");
            const auto& t = *vertical;
            if (static_cast<int>(t.track_index.size()) != m_count)
                throw ValidationError("layout.track_index: size mismatch");
            for (int m = 0; m < m_count; ++m) {
                const double x = (t.track_index[m] - 0.5 * (t.track_count + 1)) * t.spacing_m;
                if (std::abs(offsets[m].x() - x) > kTrackTol)
                    throw ValidationError(idx("layout.offsets", m) + ": x off its vertical track");
            }
            break;
        }
        case MoveMode::DB: {
            if (!diagonal) throw ValidationError("layout: DB mode requires diagonal track data");
            if (static_cast<int>(diagonal->z_intercept_m.size()) != m_count)
                throw ValidationError("layout.z_intercepts: size mismatch");
            for (int m = 0; m < m_count; ++m) {
                const double z = offsets[m].x() + diagonal->z_intercept_m[m];
                if (std::abs(offsets[m].y() - z) > kTrackTol)
                    throw ValidationError(idx("layout.offsets", m) + ": z off its diagonal track");
            }
            break;
        }
        case MoveMode::RB:
        case MoveMode::FP:
            break;
    }
}

ElementLayout default_layout(MoveMode mode, const SystemConfig& cfg)
{
    const int m_count = cfg.n_elements;
    const double a = cfg.aperture_m;
    const double half = 0.5 * a;
    ElementLayout layout;
    layout.mode = mode;
    layout.aperture_m = a;
    layout.offsets.resize(m_count, Eigen::Vector2d::Zero());

    switch (mode) {
        case MoveMode::RB:
        case MoveMode::FP: {
            // centred uniform grid spanning the square; most-square exact
            // factorization of M
            int rows = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m_count))));
            while (rows > 1 && m_count % rows != 0) --rows;
            const int cols = m_count / rows;
            const double pitch_x = cols > 1 ? a / (cols - 1) : 0.0;
            const double pitch_z = rows > 1 ? a / (rows - 1) : 0.0;
            if ((cols > 1 && pitch_x < cfg.min_spacing_m) ||
                (rows > 1 && pitch_z < cfg.min_spacing_m))
                throw ValidationError("layout: " + std::to_string(m_count) +
                                      " elements cannot satisfy min_spacing_m inside the square");
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    layout.offsets[i * cols + j] = {(j - 0.5 * (cols - 1)) * pitch_x,
                                                    (i - 0.5 * (rows - 1)) * pitch_z};
            break;
        }
        case MoveMode::HB: {
            const double spacing = a / m_count;
            if (spacing < cfg.min_spacing_m)
                throw ValidationError("layout: horizontal track spacing below min_spacing_m");
            ElementLayout::HorizontalTracks t;
            t.track_count = m_count;
            t.spacing_m = spacing;
            t.track_index.resize(m_count);
            for (int m = 0; m < m_count; ++m) {
                t.track_index[m] = m + 1;
                layout.offsets[m] = {0.0, (m + 1 - 0.5 * (m_count + 1)) * spacing};
            }
            layout.horizontal = std::move(t);
            break;
        }
        case MoveMode::VB: {
            const double spacing = a / m_count;
            if (spacing < cfg.min_spacing_m)
                throw ValidationError("layout: vertical track spacing below min_spacing_m");
            ElementLayout::VerticalTracks t;
            t.track_count = m_count;
            t.spacing_m = spacing;
            t.track_index.resize(m_count);
            for (int m = 0; m < m_count; ++m) {
                t.track_index[m] = m + 1;
                layout.offsets[m] = {(m + 1 - 0.5 * (m_count + 1)) * spacing, 0.0};
            }
            layout.vertical = std::move(t);
            break;
        }
        case MoveMode::DB: {
            // one element per diagonal, intercepts centred like the
            // horizontal/vertical track grids so every chord keeps usable
            // length
            ElementLayout::DiagonalTracks t;
            t.z_intercept_m.resize(m_count);
            for (int m = 0; m < m_count; ++m)
                t.z_intercept_m[m] = (m + 1 - 0.5 * (m_count + 1)) * a / m_count;
            if (m_count > 1) {
                const double step = (a / m_count) * std::sqrt(0.5);
                if (step < cfg.min_spacing_m)
                    throw ValidationError("layout: diagonal track spacing below min_spacing_m");
            }
            for (int m = 0; m < m_count; ++m) {
                const double d = t.z_intercept_m[m];
                layout.offsets[m] = {-0.5 * d, 0.5 * d}; // chord midpoint
            }
            layout.diagonal = std::move(t);
            break;
        }
    }
    layout.validate();
    if (min_distance_violations(layout.offsets, cfg.min_spacing_m) > 0)
        throw ValidationError("layout: default layout violates min_spacing_m, grid infeasible");
    return layout;
}

ElementLayout clamp_to_mode(const ElementLayout& layout, std::span<const double> proposed)
{
    if (layout.mode == MoveMode::FP)
        throw std::invalid_argument("clamp_to_mode: FP layouts are immovable");
    const int m_count = layout.size();
    const int arity = layout.free_dims_per_element();
    if (static_cast<int>(proposed.size()) != arity * m_count)
        throw std::invalid_argument("clamp_to_mode: proposed coordinate arity mismatch");

    // bounds are recovered from the track geometry itself; the box half-side
    // is the max reach of any coordinate in the layout's own frame
    ElementLayout out = layout;
    switch (layout.mode) {
        case MoveMode::RB: {
            const double half = layout.half_side();
            for (int m = 0; m < m_count; ++m)
                out.offsets[m] = {std::clamp(proposed[2 * m], -half, half),
                                  std::clamp(proposed[2 * m + 1], -half, half)};
            break;
        }
        case MoveMode::HB: {
            const double half = layout.half_side();
            for (int m = 0; m < m_count; ++m)
                out.offsets[m].x() = std::clamp(proposed[m], -half, half);
            break;
        }
        case MoveMode::VB: {
            const double half = layout.half_side();
            for (int m = 0; m < m_count; ++m)
                out.offsets[m].y() = std::clamp(proposed[m], -half, half);
            break;
        }
        case MoveMode::DB: {
            const double half = layout.half_side();
            for (int m = 0; m < m_count; ++m) {
                const double d = layout.diagonal->z_intercept_m[m];
                const auto [lo, hi] = diagonal_range(d, half);
                const double x = std::clamp(proposed[m], lo, hi);
                out.offsets[m] = {x, x + d};
            }
            break;
        }
        case MoveMode::FP:
            break;
    }
    return out;
}

int min_distance_violations(std::span<const Eigen::Vector2d> offsets, double d_min)
{
    const double d2 = d_min * d_min;
    int count = 0;
    for (std::size_t m = 0; m + 1 < offsets.size(); ++m)
        for (std::size_t o = m + 1; o < offsets.size(); ++o)
            if ((offsets[m] - offsets[o]).squaredNorm() < d2) ++count;
    return count;
}

Eigen::VectorXcd StarsCoefficients::tuning_vector_t() const
{
    Eigen::VectorXcd u(amp_t.size());
    for (Eigen::Index m = 0; m < amp_t.size(); ++m)
        u[m] = std::polar(amp_t[m], phase_t[m]);
    return u;
}

Eigen::VectorXcd StarsCoefficients::tuning_vector_r() const
{
    Eigen::VectorXcd u(amp_r.size());
    for (Eigen::Index m = 0; m < amp_r.size(); ++m)
        u[m] = std::polar(amp_r[m], phase_r[m]);
    return u;
}

void StarsCoefficients::validate() const
{
    const Eigen::Index m_count = amp_t.size();
    if (amp_r.size() != m_count || phase_t.size() != m_count || phase_r.size() != m_count)
        throw ValidationError("coefficients: array sizes disagree");
    for (Eigen::Index m = 0; m < m_count; ++m) {
        if (amp_t[m] < -1e-12 || amp_t[m] > 1.0 + 1e-12 || amp_r[m] < -1e-12 ||
            amp_r[m] > 1.0 + 1e-12)
            throw ValidationError(idx("coefficients.amp", static_cast<int>(m)) +
                                  ": amplitude outside [0, 1]");
        const double energy = amp_t[m] * amp_t[m] + amp_r[m] * amp_r[m];
        if (std::abs(energy - 1.0) > 1e-9)
            throw ValidationError(idx("coefficients.amp", static_cast<int>(m)) +
                                  ": energy split violates amp_t^2 + amp_r^2 = 1");
    }
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
coefficient_matrices(const StarsCoefficients& coeffs)
{
    const Eigen::Index m_count = coeffs.amp_t.size();
    Eigen::MatrixXcd theta_t = Eigen::MatrixXcd::Zero(m_count, m_count);
    Eigen::MatrixXcd theta_r = Eigen::MatrixXcd::Zero(m_count, m_count);
    theta_t.diagonal() = coeffs.tuning_vector_t();
    theta_r.diagonal() = coeffs.tuning_vector_r();
    return {std::move(theta_t), std::move(theta_r)};
}

} // namespace mestars
