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

#include "mestars/experiments.hpp"
#include "mestars/outer_pso.hpp"
#include "mestars/report.hpp"

using namespace mestars;

namespace {

// cheap deterministic objective used where the inner solver is overkill:
// negative spread of the residual-like coordinates, maximal when the
// encoding equalizes at zero
PositionObjective toy_objective()
{
    return [](const ElementLayout& layout, std::uint64_t) {
        double v = 0.0;
        for (const auto& o : layout.offsets) v -= o.squaredNorm();
        return v;
    };
}

} // namespace

TEST_CASE("inertia decays linearly between the configured bounds")
{
    SwarmConfig cfg;
    cfg.omega_max = 1.0;
    cfg.omega_min = 0.2;
    cfg.max_iters = 100;
    CHECK(inertia(0, cfg) == doctest::Approx(1.0));
    CHECK(inertia(100, cfg) == doctest::Approx(0.2));
    CHECK(inertia(50, cfg) == doctest::Approx(0.6));
}

TEST_CASE("velocity update")
{
    SwarmConfig cfg;
    cfg.c1 = 2.0;
    cfg.c2 = 2.0;

    Particle p;
    p.encoding = {0.1, -0.2, 0.05};
    p.velocity = {0.0, 0.0, 0.0};
    p.best_encoding = p.encoding;

    SUBCASE("a particle at both bests with zero velocity stays put")
    {
        std::mt19937_64 rng(1);
        const auto v = update_velocity(p, p.encoding, 0.9, cfg, rng);
        for (double x : v) CHECK(x == 0.0);
    }

    SUBCASE("without inertia and global pull it points at the personal best")
    {
        cfg.c2 = 0.0;
        p.best_encoding = {0.3, -0.2, 0.05};
        std::mt19937_64 rng(2);
        const auto v = update_velocity(p, p.encoding, 0.0, cfg, rng);
        CHECK(v[0] > 0.0);
        CHECK(v[1] == 0.0);
        CHECK(v[2] == 0.0);
        // scalar draw applied to the whole vector: proportionality holds
        p.best_encoding = {0.3, -0.1, 0.05};
        std::mt19937_64 rng2(2);
        const auto v2 = update_velocity(p, p.encoding, 0.0, cfg, rng2);
        CHECK(v2[0] / 0.2 == doctest::Approx(v2[1] / 0.1).epsilon(1e-12));
    }

    SUBCASE("a fixed seed reproduces the draws")
    {
        p.best_encoding = {0.4, 0.0, 0.0};
        const std::vector<double> gbest = {0.0, 0.3, 0.0};
        std::mt19937_64 a(7), b(7);
        const auto va = update_velocity(p, gbest, 0.5, cfg, a);
        const auto vb = update_velocity(p, gbest, 0.5, cfg, b);
        CHECK(va == vb);
    }
}

TEST_CASE("position update adds then clamps")
{
    const Scenario s = make_desk_scenario(61);

    SUBCASE("in-range move is exact addition")
    {
        const ElementLayout base = default_layout(MoveMode::HB, s.system);
        std::vector<double> enc = base.encode();
        std::vector<double> vel(enc.size(), 0.01);
        const auto moved = update_position(base, enc, vel);
        for (std::size_t d = 0; d < enc.size(); ++d)
            CHECK(moved[d] == doctest::Approx(enc[d] + 0.01).epsilon(1e-15));
    }

    SUBCASE("moves past the wall stick to the wall")
    {
        const ElementLayout base = default_layout(MoveMode::VB, s.system);
        std::vector<double> enc = base.encode();
        std::vector<double> vel(enc.size(), 10.0);
        const auto moved = update_position(base, enc, vel);
        for (double x : moved) CHECK(x == doctest::Approx(0.25));
    }

    SUBCASE("DB moves stay on their diagonals")
    {
        const ElementLayout base = default_layout(MoveMode::DB, s.system);
        std::vector<double> enc = base.encode();
        std::vector<double> vel(enc.size());
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(-0.4, 0.4);
        for (double& v : vel) v = uni(rng);
        const auto moved = update_position(base, enc, vel);
        const ElementLayout decoded = clamp_to_mode(base, moved);
        decoded.validate();
        for (int m = 0; m < decoded.size(); ++m)
            CHECK(decoded.offsets[m].y() ==
                  doctest::Approx(decoded.offsets[m].x() +
                                  base.diagonal->z_intercept_m[m]).epsilon(1e-12));
    }
}

TEST_CASE("swarm initialization")
{
    const Scenario s = make_desk_scenario(67);
    const ElementLayout base = default_layout(MoveMode::RB, s.system);
    SwarmConfig cfg = s.swarm;
    cfg.n_particles = 6;
    const auto objective = toy_objective();

    std::mt19937_64 rng(cfg.seed);
    const SwarmState swarm = init_swarm(s, base, cfg, objective, 10.0, rng);

    REQUIRE(static_cast<int>(swarm.particles.size()) == 6);
    double best = -1e300;
    for (const Particle& p : swarm.particles) {
        for (double x : p.encoding) {
            CHECK(x >= -0.25);
            CHECK(x <= 0.25);
        }
        for (double v : p.velocity) {
            CHECK(v >= -0.05);
            CHECK(v <= 0.05);
        }
        CHECK(p.best_encoding == p.encoding);
        best = std::max(best, p.best_fitness);
    }
    CHECK(swarm.global_best_fitness == best);

    std::mt19937_64 rng2(cfg.seed);
    const SwarmState again = init_swarm(s, base, cfg, objective, 10.0, rng2);
    for (int i = 0; i < 6; ++i)
        CHECK(again.particles[i].encoding == swarm.particles[i].encoding);
}

TEST_CASE("fitness drops by exactly the penalty per violating pair")
{
    const Scenario s = make_desk_scenario(71);
    const auto objective = toy_objective();
    const double eta = 50.0;

    ElementLayout clean = default_layout(MoveMode::RB, s.system);
    const double f_clean =
        objective(clean, 0) -
        eta * min_distance_violations(clean.offsets, s.system.min_spacing_m);
    CHECK(min_distance_violations(clean.offsets, s.system.min_spacing_m) == 0);

    ElementLayout pair = clean;
    pair.offsets[1] = pair.offsets[0]; // one coincident pair
    const int v = min_distance_violations(pair.offsets, s.system.min_spacing_m);
    CHECK(v == 1);
    const double f_pair = objective(pair, 0) - eta * v;
    CHECK(f_clean - f_pair ==
          doctest::Approx(eta + objective(clean, 0) - objective(pair, 0)).epsilon(1e-12));
}

TEST_CASE("eta rescaling cannot reorder violation-free layouts")
{
    const Scenario s = make_desk_scenario(73);
    const auto objective = toy_objective();
    ElementLayout a = default_layout(MoveMode::RB, s.system);
    ElementLayout b = a;
    for (auto& o : b.offsets) o *= 0.5;
    for (double eta : {0.1, 10.0, 1e4}) {
        const double fa = objective(a, 0) - eta * 0;
        const double fb = objective(b, 0) - eta * 0;
        CHECK((fb > fa) == (objective(b, 0) > objective(a, 0)));
    }
}

TEST_CASE("swarm search contract")
{
    Scenario s = make_desk_scenario(79);
    s.swarm.n_particles = 8;
    s.swarm.max_iters = 25;
    const auto objective = toy_objective();

    SUBCASE("global best trace is exactly non-decreasing")
    {
        for (MoveMode mode : {MoveMode::RB, MoveMode::DB}) {
            const PsoResult r = pso_loop_custom(s, mode, s.swarm, objective, 100.0);
            REQUIRE(r.global_best_trace.size() == 26u);
            for (std::size_t t = 1; t < r.global_best_trace.size(); ++t)
                CHECK(r.global_best_trace[t] >= r.global_best_trace[t - 1]);
            CHECK(r.best_violations == 0);
        }
    }

    SUBCASE("reruns with one seed are byte-identical, different seeds differ")
    {
        const PsoResult r1 = pso_loop_custom(s, MoveMode::RB, s.swarm, objective, 100.0);
        const PsoResult r2 = pso_loop_custom(s, MoveMode::RB, s.swarm, objective, 100.0);
        const OptimizationReport a = make_report(s, r1, s.swarm.seed, "toy");
        const OptimizationReport b = make_report(s, r2, s.swarm.seed, "toy");
        CHECK(report_to_canonical_string(a) == report_to_canonical_string(b));

        SwarmConfig other = s.swarm;
        other.seed = 555;
        const PsoResult r3 = pso_loop_custom(s, MoveMode::RB, other, objective, 100.0);
        CHECK(r3.global_best_trace != r1.global_best_trace);
    }

    SUBCASE("synchronous schedule obeys the same contract")
    {
        const PsoResult r =
            pso_loop_custom(s, MoveMode::VB, s.swarm, objective, 100.0,
                            UpdateSchedule::Synchronous, 2);
        for (std::size_t t = 1; t < r.global_best_trace.size(); ++t)
            CHECK(r.global_best_trace[t] >= r.global_best_trace[t - 1]);
        const PsoResult again =
            pso_loop_custom(s, MoveMode::VB, s.swarm, objective, 100.0,
                            UpdateSchedule::Synchronous, 2);
        CHECK(r.global_best_trace == again.global_best_trace);
    }

    SUBCASE("FP bypasses the swarm")
    {
        const PsoResult r = pso_loop_custom(s, MoveMode::FP, s.swarm, objective, 100.0);
        CHECK(r.global_best_trace.size() == 1u);
        CHECK(r.best_layout.mode == MoveMode::FP);
    }
}

TEST_CASE("rate-backed search on a tiny instance keeps feasibility")
{
    Scenario s = make_desk_scenario(83);
    s.system.n_elements = 4;
    s.system.n_subcarriers = 2;
    redraw_users(s, 83);
    s.layout = default_layout(MoveMode::RB, s.system);
    s.swarm.n_particles = 3;
    s.swarm.max_iters = 3;
    s.bcd.n_randomizations = 20;
    s.validate();

    const PsoResult r = pso_loop(s, MoveMode::VB, s.swarm, s.bcd);
    CHECK(r.has_inner);
    CHECK(r.best_violations == 0);
    CHECK(r.best_inner.failure.empty());
    CHECK(r.best_objective > 0.0);
    for (std::size_t t = 1; t < r.global_best_trace.size(); ++t)
        CHECK(r.global_best_trace[t] >= r.global_best_trace[t - 1]);
    r.best_layout.validate();
}
