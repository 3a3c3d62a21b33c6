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

#include <random>

#include "mestars/scenario.hpp"
#include "mestars/stars.hpp"

using namespace mestars;

namespace {

SystemConfig desk_cfg()
{
    SystemConfig cfg;
    cfg.n_elements = 8;
    cfg.aperture_m = 0.5;
    cfg.center_freq_hz = 40e9;
    cfg.min_spacing_m = 0.5 * cfg.center_wavelength_m();
    return cfg;
}

} // namespace

TEST_CASE("horizontal default layout follows the track formula")
{
    const ElementLayout l = default_layout(MoveMode::HB, desk_cfg());
    REQUIRE(l.size() == 8);
    const double expected[8] = {-0.21875, -0.15625, -0.09375, -0.03125,
                                0.03125,  0.09375,  0.15625,  0.21875};
    for (int m = 0; m < 8; ++m) {
        CHECK(l.offsets[m].x() == 0.0);
        CHECK(l.offsets[m].y() == doctest::Approx(expected[m]).epsilon(1e-15));
    }
    CHECK(l.horizontal->spacing_m == doctest::Approx(0.0625));
}

TEST_CASE("default layouts are pairwise feasible and FP equals RB")
{
    const SystemConfig cfg = desk_cfg();
    for (MoveMode mode : {MoveMode::RB, MoveMode::HB, MoveMode::VB, MoveMode::DB, MoveMode::FP}) {
        const ElementLayout l = default_layout(mode, cfg);
        CHECK(min_distance_violations(l.offsets, cfg.min_spacing_m) == 0);
        l.validate();
    }
    const ElementLayout rb = default_layout(MoveMode::RB, cfg);
    const ElementLayout fp = default_layout(MoveMode::FP, cfg);
    REQUIRE(rb.size() == fp.size());
    for (int m = 0; m < rb.size(); ++m) CHECK(rb.offsets[m] == fp.offsets[m]);
}

TEST_CASE("infeasible grids are rejected")
{
    SystemConfig cfg = desk_cfg();
    cfg.n_elements = 64;
    cfg.aperture_m = 0.02; // 8x8 grid pitch ~2.9 mm < d_min 3.75 mm
    CHECK_THROWS_AS(default_layout(MoveMode::RB, cfg), ValidationError);
}

TEST_CASE("clamp_to_mode clips into the movable ranges")
{
    const SystemConfig cfg = desk_cfg();

    SUBCASE("RB boundary clip")
    {
        const ElementLayout base = default_layout(MoveMode::RB, cfg);
        std::vector<double> proposal = base.encode();
        proposal[0] = 0.3; // past +A/2 = 0.25
        proposal[1] = -0.9;
        const ElementLayout c = clamp_to_mode(base, proposal);
        CHECK(c.offsets[0].x() == doctest::Approx(0.25));
        CHECK(c.offsets[0].y() == doctest::Approx(-0.25));
    }

    SUBCASE("in-range proposals pass through unchanged")
    {
        const ElementLayout base = default_layout(MoveMode::RB, cfg);
        const std::vector<double> proposal = base.encode();
        const ElementLayout c = clamp_to_mode(base, proposal);
        for (int m = 0; m < base.size(); ++m) CHECK(c.offsets[m] == base.offsets[m]);
    }

    SUBCASE("DB clips along the track")
    {
        SystemConfig one = cfg;
        one.n_elements = 1;
        ElementLayout base = default_layout(MoveMode::DB, one);
        base.diagonal->z_intercept_m[0] = 0.1;
        const std::vector<double> proposal = {0.22};
        const ElementLayout c = clamp_to_mode(base, proposal);
        CHECK(c.offsets[0].x() == doctest::Approx(0.15)); // so z = x + 0.1 <= 0.25
        CHECK(c.offsets[0].y() == doctest::Approx(0.25));
        c.validate();
    }

    SUBCASE("FP refuses to move")
    {
        const ElementLayout base = default_layout(MoveMode::FP, cfg);
        CHECK_THROWS_AS(clamp_to_mode(base, std::vector<double>{}), std::invalid_argument);
    }
}

TEST_CASE("clamp_to_mode is idempotent and closes the mode constraints")
{
    const SystemConfig cfg = desk_cfg();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> wild(-1.0, 1.0);
    for (MoveMode mode : {MoveMode::RB, MoveMode::HB, MoveMode::VB, MoveMode::DB}) {
        const ElementLayout base = default_layout(mode, cfg);
        const int dims = base.free_dims_per_element() * base.size();
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> proposal(dims);
            for (double& p : proposal) p = wild(rng);
            const ElementLayout once = clamp_to_mode(base, proposal);
            once.validate(); // track identities hold exactly
            const ElementLayout twice = clamp_to_mode(base, once.encode());
            for (int m = 0; m < base.size(); ++m) {
                CHECK(once.offsets[m].x() == twice.offsets[m].x());
                CHECK(once.offsets[m].y() == twice.offsets[m].y());
            }
        }
    }
}

TEST_CASE("violation counting enumerates offending pairs")
{
    std::vector<Eigen::Vector2d> pts = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    CHECK(min_distance_violations(pts, 0.5) == 0);

    pts = {{0.0, 0.0}, {0.0, 0.0}, {1.0, 1.0}};
    CHECK(min_distance_violations(pts, 0.1) == 1);

    pts = {{0.2, 0.2}, {0.2, 0.2}, {0.2, 0.2}}; // C(3,2) pairs
    CHECK(min_distance_violations(pts, 0.1) == 3);

    // ties at exactly d_min stay feasible
    pts = {{0.0, 0.0}, {0.5, 0.0}};
    CHECK(min_distance_violations(pts, 0.5) == 0);
}

TEST_CASE("energy-splitting coefficients")
{
    StarsCoefficients c;
    c.amp_t = Eigen::VectorXd::Constant(4, std::sqrt(0.5));
    c.amp_r = Eigen::VectorXd::Constant(4, std::sqrt(0.5));
    c.phase_t = Eigen::VectorXd::Zero(4);
    c.phase_r = Eigen::VectorXd::Zero(4);
    c.validate();

    SUBCASE("equal split produces 1/sqrt(2) diagonals")
    {
        const auto [theta_t, theta_r] = coefficient_matrices(c);
        for (int m = 0; m < 4; ++m) {
            CHECK(theta_t(m, m).real() == doctest::Approx(std::sqrt(0.5)));
            CHECK(theta_r(m, m).real() == doctest::Approx(std::sqrt(0.5)));
            CHECK(std::norm(theta_t(m, m)) + std::norm(theta_r(m, m)) ==
                  doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    SUBCASE("full transmission zeroes the reflection matrix")
    {
        c.amp_t.setOnes();
        c.amp_r.setZero();
        const auto [theta_t, theta_r] = coefficient_matrices(c);
        CHECK(theta_r.norm() == 0.0);
        CHECK(theta_t.diagonal().cwiseAbs().minCoeff() == doctest::Approx(1.0));
    }

    SUBCASE("random phases keep per-element energy")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int m = 0; m < 4; ++m) {
            const double beta = uni(rng);
            c.amp_t[m] = std::sqrt(beta);
            c.amp_r[m] = std::sqrt(1.0 - beta);
            c.phase_t[m] = kTwoPi * uni(rng);
            c.phase_r[m] = kTwoPi * uni(rng);
        }
        c.validate();
        const auto [theta_t, theta_r] = coefficient_matrices(c);
        for (int m = 0; m < 4; ++m)
            CHECK(std::norm(theta_t(m, m)) + std::norm(theta_r(m, m)) ==
                  doctest::Approx(1.0).epsilon(1e-9));
    }

    SUBCASE("violating the split is rejected")
    {
        c.amp_t[2] = 0.9;
        c.amp_r[2] = 0.9;
        CHECK_THROWS_AS(c.validate(), ValidationError);
    }
}
