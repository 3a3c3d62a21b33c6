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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "mestars/experiments.hpp"
#include "mestars/scenario.hpp"

using namespace mestars;

namespace {

Scenario small_valid_scenario()
{
    Scenario s = make_desk_scenario(7);
    return s;
}

} // namespace

TEST_CASE("subcarrier grid hits the frozen reference values")
{
    SystemConfig cfg;
    cfg.center_freq_hz = 40e9;
    cfg.bandwidth_hz = 10e9;
    cfg.n_subcarriers = 11;
    const auto f = subcarrier_frequencies(cfg);
    REQUIRE(f.size() == 11);
    CHECK(f[5] == doctest::Approx(40e9).epsilon(1e-14));          // centre index
    CHECK(f[0] == doctest::Approx(35454545454.545456).epsilon(1e-12));
    CHECK(f[10] == doctest::Approx(44545454545.454544).epsilon(1e-12));
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] > f[i - 1]);
}

TEST_CASE("odd grids are symmetric about the centre frequency")
{
    SystemConfig cfg;
    cfg.center_freq_hz = 28e9;
    cfg.bandwidth_hz = 3.7e9;
    for (int l_count : {1, 3, 7, 11, 101}) {
        cfg.n_subcarriers = l_count;
        const auto f = subcarrier_frequencies(cfg);
        for (int l = 0; l < l_count; ++l)
            CHECK(f[l] + f[l_count - 1 - l] == doctest::Approx(2.0 * 28e9).epsilon(1e-15));
    }
}

TEST_CASE("rayleigh distance uses the aperture diagonal")
{
    SystemConfig cfg;
    cfg.aperture_m = 0.5;
    cfg.center_freq_hz = 40e9;
    CHECK(rayleigh_distance(cfg) == doctest::Approx(133.42563807926086).epsilon(1e-12));
    cfg.aperture_m = 1.0; // doubling A quadruples 2 D^2 / lambda
    CHECK(rayleigh_distance(cfg) == doctest::Approx(4.0 * 133.42563807926086).epsilon(1e-12));
    cfg.aperture_m = 1e-9;
    CHECK(rayleigh_distance(cfg) < 1e-15);
}

TEST_CASE("incidence angles reproduce the plane-wave phase coefficients")
{
    Geometry g;
    g.stars_center = {0.0, 0.0, 1.0};

    SUBCASE("broadside arrival has no azimuth component")
    {
        g.bs_position = {0.0, 50.0, 1.0};
        const IncidenceAngles a = incidence_angles(g);
        CHECK(a.x_coefficient() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(a.z_coefficient() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(a.azimuth_arrival_rad == doctest::Approx(0.0));
        CHECK(a.elevation_arrival_rad == doctest::Approx(0.0));
    }

    SUBCASE("projection oracle at the reference geometry")
    {
        g.bs_position = {100.0, 25.0, 5.0};
        const IncidenceAngles a = incidence_angles(g);
        // oracle: elevation from sin(el) = k_z, azimuth from the in-plane
        // projection, then the two phase coefficients
        const Eigen::Vector3d k = (g.bs_position - g.stars_center).normalized();
        const double rho = std::hypot(k.x(), k.y());
        CHECK(std::sin(a.elevation_arrival_rad) == doctest::Approx(k.z()).epsilon(1e-12));
        CHECK(std::sin(a.azimuth_arrival_rad) == doctest::Approx(k.x() / rho).epsilon(1e-12));
        CHECK(a.x_coefficient() ==
              doctest::Approx(0.037618744776975514).epsilon(1e-12));
        CHECK(a.z_coefficient() ==
              doctest::Approx(0.9992479081384121).epsilon(1e-12));
        CHECK(a.azimuth_arrival_rad >= 0.0);
        CHECK(a.azimuth_arrival_rad < kTwoPi);
    }

    SUBCASE("arrival along the z-axis is the degenerate elevation")
    {
        g.bs_position = {0.0, 0.0, 9.0};
        const IncidenceAngles a = incidence_angles(g);
        CHECK(a.z_coefficient() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(a.azimuth_arrival_rad == 0.0); // degenerate fallback
    }

    SUBCASE("departure angle tracks the x-component toward the surface")
    {
        g.bs_position = {100.0, 25.0, 5.0};
        const IncidenceAngles a = incidence_angles(g);
        const Eigen::Vector3d u = (g.stars_center - g.bs_position).normalized();
        CHECK(std::sin(a.departure_rad) == doctest::Approx(u.x()).epsilon(1e-12));
    }
}

TEST_CASE("scenario canonical form round-trips byte-identically")
{
    const Scenario s = small_valid_scenario();
    const std::string canonical = scenario_to_canonical_string(s);
    const Scenario reloaded = load_scenario_from_string(canonical);
    CHECK(scenario_to_canonical_string(reloaded) == canonical);
    CHECK(scenario_fingerprint(reloaded) == scenario_fingerprint(s));
}

TEST_CASE("noise power accepted in dBm")
{
    Scenario s = small_valid_scenario();
    std::string text = scenario_to_canonical_string(s);
    const auto pos = text.find("\"noise_power_w\": 1e-14");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, std::string("\"noise_power_w\": 1e-14").size(),
                 "\"noise_power_dbm\": -110.0");
    const Scenario parsed = load_scenario_from_string(text);
    CHECK(parsed.system.noise_power_w == doctest::Approx(1e-14).epsilon(1e-12));
}

TEST_CASE("validation errors carry the field path")
{
    Scenario s = small_valid_scenario();

    SUBCASE("region tag contradicting the y-side names the user")
    {
        std::string text = scenario_to_canonical_string(s);
        // first desk user is in the transmission half-space (y < 0)
        const auto pos = text.find("\"region\": \"transmission\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, std::string("\"region\": \"transmission\"").size(),
                     "\"region\": \"reflection\"");
        try {
            load_scenario_from_string(text);
            FAIL("expected a validation error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("users[0]") != std::string::npos);
        }
    }

    SUBCASE("empty user list is rejected")
    {
        s.geometry.users.clear();
        s.system.n_users = 0;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }

    SUBCASE("user count must match n_users")
    {
        s.system.n_users = 5;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }

    SUBCASE("unknown keys are schema violations")
    {
        std::string text = scenario_to_canonical_string(s);
        text.replace(text.find("\"n_antennas\""), 12, "\"n_antennae\"");
        CHECK_THROWS_AS(load_scenario_from_string(text), ValidationError);
    }

    SUBCASE("parse errors are reported")
    {
        CHECK_THROWS_AS(load_scenario_from_string("{ not json"), ValidationError);
    }
}

TEST_CASE("users beyond the Rayleigh distance warn but validate")
{
    Scenario s = small_valid_scenario();
    s.geometry.users[1].position = {0.0, 500.0, 1.0}; // far outside 133 m
    s.validate();
    REQUIRE(!s.warnings.empty());
    CHECK(s.warnings[0].find("Rayleigh") != std::string::npos);
}

TEST_CASE("save and load through a file")
{
    namespace fs = std::filesystem;
    const Scenario s = small_valid_scenario();
    const fs::path path = fs::temp_directory_path() / "mestars_scenario_roundtrip.json";
    save_scenario(s, path);
    const Scenario loaded = load_scenario(path);
    CHECK(scenario_to_canonical_string(loaded) == scenario_to_canonical_string(s));
    fs::remove(path);
}

TEST_CASE("absorption table is piecewise constant")
{
    AbsorptionTable t;
    CHECK(t.at(40e9) == 0.0);
    t.breakpoints = {{10e9, 0.001}, {50e9, 0.004}};
    CHECK(t.at(5e9) == 0.0);
    CHECK(t.at(10e9) == doctest::Approx(0.001));
    CHECK(t.at(49e9) == doctest::Approx(0.001));
    CHECK(t.at(80e9) == doctest::Approx(0.004));
}
