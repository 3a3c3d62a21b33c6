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
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mestars/common.hpp"
#include "mestars/stars.hpp"

namespace mestars {

/// Piecewise-constant medium absorption factor K_abs(f). An empty table
/// means no absorption at any frequency.
struct AbsorptionTable {
    // (frequency breakpoint Hz, absorption 1/m); breakpoints strictly increasing
    std::vector<std::pair<double, double>> breakpoints;

    /// Value of the last breakpoint at or below f; 0 below the first one.
    double at(double freq_hz) const;
};

struct SystemConfig {
    int n_antennas = 4;       // N
    int n_elements = 8;       // M
    int n_users = 2;          // K
    int n_subcarriers = 5;    // L
    double center_freq_hz = 40e9;
    double bandwidth_hz = 10e9;
    double max_power_w = 15.0;
    double noise_power_w = 1e-14;      // stored linear; files may use dBm
    double aperture_m = 0.5;           // square side A
    double min_spacing_m = 0.0;        // d_min
    double bs_antenna_spacing_m = 0.0; // d; 0 means half the centre wavelength
    AbsorptionTable absorption;

    double center_wavelength_m() const { return kSpeedOfLight / center_freq_hz; }
    double bs_spacing_or_default() const
    {
        return bs_antenna_spacing_m > 0.0 ? bs_antenna_spacing_m : 0.5 * center_wavelength_m();
    }
    void validate() const;
};

enum class Region { Transmission, Reflection };

const char* region_name(Region r);
Region region_from_name(const std::string& name);

struct UserSpec {
    Eigen::Vector3d position = Eigen::Vector3d::Zero(); // p_k, meters
    Region region = Region::Reflection;                 // s_k
};

struct Geometry {
    Eigen::Vector3d bs_position = Eigen::Vector3d::Zero();  // b
    Eigen::Vector3d stars_center = Eigen::Vector3d::Zero(); // s_c
    std::vector<UserSpec> users;

    void validate(const SystemConfig& cfg) const;
};

/// Plane-wave arrival/departure angles in the surface-plane convention:
/// the incident phase ramp over a local offset (x, z) is
/// (2 pi f / c) * (x * sin(az) * sin(el) + z * cos(el)).
struct IncidenceAngles {
    double azimuth_arrival_rad = 0.0;   // phi_A in [0, 2pi)
    double elevation_arrival_rad = 0.0; // psi_A
    double departure_rad = 0.0;         // phi_D in [-pi/2, pi/2]

    double x_coefficient() const
    {
        return std::sin(azimuth_arrival_rad) * std::sin(elevation_arrival_rad);
    }
    double z_coefficient() const { return std::cos(elevation_arrival_rad); }
};

/// Swarm parameters for the outer position search.
struct SwarmConfig {
    int n_particles = 10;      // I
    int max_iters = 30;        // T
    double c1 = 2.0, c2 = 2.0; // learning factors
    double omega_max = 1.0, omega_min = 0.2;
    double penalty_weight = 0.0; // eta; 0 selects the automatic pilot rule
    std::uint64_t seed = 1;

    void validate() const;
};

/// Inner-layer convergence parameters.
struct BcdConfig {
    double convergence_eps = 1e-3; // epsilon_0
    int n_randomizations = 200;    // G
    int max_outer_bcd_iters = 50;

    void validate() const;
};

struct Scenario {
    SystemConfig system;
    Geometry geometry;
    ElementLayout layout;
    SwarmConfig swarm;
    BcdConfig bcd;
    std::vector<std::string> warnings; // advisories collected at validation

    /// Runs every type invariant; fills `warnings`. Throws ValidationError.
    void validate();
};

/// Subcarrier grid f_l = f_c + (B/L)(l - (L+1)/2), l = 1..L.
std::vector<double> subcarrier_frequencies(const SystemConfig& cfg);

/// Arrival angles of the BS plane wave at the surface plus the BS
/// departure angle toward the surface centre. Elevation is measured from
/// the x-y plane (sin(el) = k_z), azimuth from the surface normal +y
/// toward +x; the BS array axis is the global x-axis. Falls back to
/// azimuth 0 when the arrival direction is parallel to the z-axis.
IncidenceAngles incidence_angles(const Geometry& geometry);

/// 2 D^2 / lambda_c with D the aperture diagonal A*sqrt(2).
double rayleigh_distance(const SystemConfig& cfg);

/// Parses, validates and canonicalizes a scenario JSON file.
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_from_string(const std::string& text);

/// Canonical serialization; save(load(x)) is byte-identical for files in
/// canonical form. Powers are written in watts (loaders also accept the
/// *_dbm spelling).
std::string scenario_to_canonical_string(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// FNV-1a over the canonical serialization, as a 16-digit hex string.
std::string scenario_fingerprint(const Scenario& s);

} // namespace mestars
