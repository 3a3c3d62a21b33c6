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
//
// Penalty-method particle swarm over element positions. The default
// schedule matches the per-particle loop of the outer algorithm: personal
// and global bests update immediately after each evaluation. The
// synchronous schedule evaluates a whole generation against frozen bests
// (optionally on several threads) and applies the same comparison rules
// at the iteration boundary, in particle order.

#include "mestars/outer_pso.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>

#include "mestars/squint.hpp"

namespace mestars {

namespace {

constexpr std::uint64_t kPilotSalt = 0x70696c6f74ULL;

// per-element clamp ranges of the free coordinates, in encoding order
std::vector<std::pair<double, double>> encoding_ranges(const ElementLayout& base)
{
    const double half = base.half_side();
    std::vector<std::pair<double, double>> ranges;
    switch (base.mode) {
        case MoveMode::RB:
            ranges.assign(2 * base.size(), {-half, half});
            break;
        case MoveMode::HB:
        case MoveMode::VB:
            ranges.assign(base.size(), {-half, half});
            break;
        case MoveMode::DB:
            for (int m = 0; m < base.size(); ++m) {
                const double d = base.diagonal->z_intercept_m[m];
                ranges.emplace_back(std::max(-half, -half - d), std::min(half, half - d));
            }
            break;
        case MoveMode::FP:
            break;
    }
    return ranges;
}

struct Evaluation {
    double fitness = -std::numeric_limits<double>::infinity();
    int violations = 0;
};

Evaluation evaluate(const Scenario& scenario, const ElementLayout& base,
                    std::span<const double> encoding, const PositionObjective& objective,
                    double penalty_weight, std::uint64_t seed)
{
    const ElementLayout layout =
        base.mode == MoveMode::FP ? base : clamp_to_mode(base, encoding);
    const int violations =
        min_distance_violations(layout.offsets, scenario.system.min_spacing_m);
    Evaluation ev;
    ev.violations = violations;
    const double value = objective(layout, seed);
    if (std::isfinite(value)) ev.fitness = value - penalty_weight * violations;
    return ev;
}

// one inner seed per swarm run: the inner solve keeps its seeded draws,
// but every fitness call sees the same initialization, so the fitness is
// a deterministic function of the layout and best-position bookkeeping
// compares layouts instead of lucky draws
std::uint64_t eval_seed(std::uint64_t base_seed)
{
    return mix_seed(base_seed, 0x66697478ULL);
}

} // namespace

PositionObjective rate_objective(const Scenario& scenario, const BcdConfig& bcd_cfg,
                                 int pso_iter_cap)
{
    BcdConfig capped = bcd_cfg;
    capped.max_outer_bcd_iters = std::min(bcd_cfg.max_outer_bcd_iters, pso_iter_cap);
    return [&scenario, capped](const ElementLayout& layout, std::uint64_t seed) {
        const BcdResult r = bcd_loop(scenario, layout.offsets, capped, seed);
        if (!r.failure.empty()) return -std::numeric_limits<double>::infinity();
        return r.final_sum_rate;
    };
}

PositionObjective gain_objective(const Scenario& scenario, int user_index, int n_grid_points)
{
    return [&scenario, user_index, n_grid_points](const ElementLayout& layout,
                                                  std::uint64_t) {
        return min_gain(gain_curve(scenario, layout, user_index,
                                   scenario.system.bandwidth_hz, n_grid_points));
    };
}

double resolve_penalty_weight(const Scenario& scenario, const SwarmConfig& cfg,
                              const PositionObjective& objective)
{
    if (cfg.penalty_weight > 0.0) return cfg.penalty_weight;
    const ElementLayout pilot = default_layout(MoveMode::FP, scenario.system);
    const double value = objective(pilot, mix_seed(cfg.seed, kPilotSalt));
    return 100.0 * std::max(std::isfinite(value) ? value : 0.0, 0.1);
}

double inertia(int t, const SwarmConfig& cfg)
{
    return cfg.omega_max -
           (cfg.omega_max - cfg.omega_min) * static_cast<double>(t) / cfg.max_iters;
}

std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> global_best, double omega,
                                    const SwarmConfig& cfg, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double a1 = uni(rng);
    const double a2 = uni(rng);
    std::vector<double> v(particle.velocity.size());
    for (std::size_t d = 0; d < v.size(); ++d)
        v[d] = omega * particle.velocity[d] +
               cfg.c1 * a1 * (particle.best_encoding[d] - particle.encoding[d]) +
               cfg.c2 * a2 * (global_best[d] - particle.encoding[d]);
    return v;
}

std::vector<double> update_position(const ElementLayout& base, std::span<const double> encoding,
                                    std::span<const double> velocity)
{
    std::vector<double> moved(encoding.size());
    for (std::size_t d = 0; d < moved.size(); ++d) moved[d] = encoding[d] + velocity[d];
    return clamp_to_mode(base, moved).encode();
}

SwarmState init_swarm(const Scenario& scenario, const ElementLayout& base,
                      const SwarmConfig& cfg, const PositionObjective& objective,
                      double penalty_weight, std::mt19937_64& rng)
{
    const auto ranges = encoding_ranges(base);
    const double v_half = scenario.system.aperture_m / 10.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    SwarmState swarm;
    swarm.particles.resize(cfg.n_particles);
    for (int i = 0; i < cfg.n_particles; ++i) {
        Particle& p = swarm.particles[i];
        p.encoding.resize(ranges.size());
        p.velocity.resize(ranges.size());
        for (std::size_t d = 0; d < ranges.size(); ++d)
            p.encoding[d] = ranges[d].first + uni(rng) * (ranges[d].second - ranges[d].first);
        for (std::size_t d = 0; d < ranges.size(); ++d)
            p.velocity[d] = -v_half + uni(rng) * 2.0 * v_half;
        const Evaluation ev = evaluate(scenario, base, p.encoding, objective,
                                       penalty_weight, eval_seed(cfg.seed));
        p.best_encoding = p.encoding;
        p.best_fitness = ev.fitness;
        p.best_violations = ev.violations;
    }
    int best = 0;
    for (int i = 1; i < cfg.n_particles; ++i)
        if (swarm.particles[i].best_fitness > swarm.particles[best].best_fitness) best = i;
    swarm.global_best = swarm.particles[best].best_encoding;
    swarm.global_best_fitness = swarm.particles[best].best_fitness;
    swarm.global_best_violations = swarm.particles[best].best_violations;
    swarm.iteration = 0;
    swarm.fitness_history.push_back(swarm.global_best_fitness);
    swarm.violations_history.push_back(swarm.global_best_violations);
    return swarm;
}

double fitness(const Scenario& scenario, const ElementLayout& layout, const SwarmConfig& cfg,
               const BcdConfig& bcd_cfg, std::uint64_t seed)
{
    const PositionObjective objective = rate_objective(scenario, bcd_cfg);
    const double eta = resolve_penalty_weight(scenario, cfg, objective);
    return evaluate(scenario, layout, layout.encode(), objective, eta,
                    seed != 0 ? seed : eval_seed(cfg.seed))
        .fitness;
}

PsoResult pso_loop_custom(const Scenario& scenario, MoveMode mode, const SwarmConfig& cfg,
                          const PositionObjective& objective, double penalty_weight,
                          UpdateSchedule schedule, int n_threads)
{
    const ElementLayout base =
        scenario.layout.mode == mode ? scenario.layout : default_layout(mode, scenario.system);

    PsoResult result;
    result.mode = mode;
    result.penalty_weight = penalty_weight;

    if (mode == MoveMode::FP) {
        // nothing to search: a single evaluation of the fixed layout
        const Evaluation ev = evaluate(scenario, base, {}, objective, penalty_weight,
                                       eval_seed(cfg.seed));
        result.best_layout = base;
        result.best_fitness = ev.fitness;
        result.best_violations = ev.violations;
        result.global_best_trace.assign(1, ev.fitness);
        result.violations_trace.assign(1, ev.violations);
        return result;
    }

    std::mt19937_64 rng(cfg.seed);
    SwarmState swarm = init_swarm(scenario, base, cfg, objective, penalty_weight, rng);

    for (int t = 1; t <= cfg.max_iters; ++t) {
        const double omega = inertia(t, cfg);
        if (schedule == UpdateSchedule::Asynchronous || n_threads <= 1) {
            const bool frozen = schedule == UpdateSchedule::Synchronous;
            std::vector<double> frozen_best = swarm.global_best;
            for (int i = 0; i < cfg.n_particles; ++i) {
                Particle& p = swarm.particles[i];
                const auto& attractor = frozen ? frozen_best : swarm.global_best;
                p.velocity = update_velocity(p, attractor, omega, cfg, rng);
                p.encoding = update_position(base, p.encoding, p.velocity);
                const Evaluation ev = evaluate(scenario, base, p.encoding, objective,
                                               penalty_weight, eval_seed(cfg.seed));
                if (ev.fitness > p.best_fitness) {
                    p.best_fitness = ev.fitness;
                    p.best_encoding = p.encoding;
                    p.best_violations = ev.violations;
                }
                if (ev.fitness > swarm.global_best_fitness) {
                    swarm.global_best_fitness = ev.fitness;
                    swarm.global_best = p.encoding;
                    swarm.global_best_violations = ev.violations;
                }
            }
        } else {
            // synchronous: draw all velocities against frozen bests first,
            // evaluate the generation concurrently, then apply the
            // comparison rules in particle order
            const std::vector<double> frozen_best = swarm.global_best;
            for (int i = 0; i < cfg.n_particles; ++i) {
                Particle& p = swarm.particles[i];
                p.velocity = update_velocity(p, frozen_best, omega, cfg, rng);
                p.encoding = update_position(base, p.encoding, p.velocity);
            }
            std::vector<Evaluation> evals(cfg.n_particles);
            std::atomic<int> next{0};
            auto worker = [&]() {
                for (int i = next.fetch_add(1); i < cfg.n_particles; i = next.fetch_add(1))
                    evals[i] = evaluate(scenario, base, swarm.particles[i].encoding, objective,
                                        penalty_weight, eval_seed(cfg.seed));
            };
            std::vector<std::future<void>> pool;
            const int workers = std::min(n_threads, cfg.n_particles);
            pool.reserve(workers);
            for (int w = 0; w < workers; ++w)
                pool.push_back(std::async(std::launch::async, worker));
            for (auto& f : pool) f.get();
            for (int i = 0; i < cfg.n_particles; ++i) {
                Particle& p = swarm.particles[i];
                if (evals[i].fitness > p.best_fitness) {
                    p.best_fitness = evals[i].fitness;
                    p.best_encoding = p.encoding;
                    p.best_violations = evals[i].violations;
                }
                if (evals[i].fitness > swarm.global_best_fitness) {
                    swarm.global_best_fitness = evals[i].fitness;
                    swarm.global_best = p.encoding;
                    swarm.global_best_violations = evals[i].violations;
                }
            }
        }
        swarm.iteration = t;
        swarm.fitness_history.push_back(swarm.global_best_fitness);
        swarm.violations_history.push_back(swarm.global_best_violations);
    }

    result.best_layout = clamp_to_mode(base, swarm.global_best);
    result.best_fitness = swarm.global_best_fitness;
    result.best_violations = swarm.global_best_violations;
    result.global_best_trace = swarm.fitness_history;
    result.violations_trace = swarm.violations_history;
    return result;
}

PsoResult pso_loop(const Scenario& scenario, MoveMode mode, const SwarmConfig& cfg,
                   const BcdConfig& bcd_cfg, UpdateSchedule schedule, int n_threads)
{
    const PositionObjective objective = rate_objective(scenario, bcd_cfg);
    const double eta = resolve_penalty_weight(scenario, cfg, objective);
    PsoResult result = pso_loop_custom(scenario, mode, cfg, objective, eta, schedule, n_threads);

    // full-precision re-solve on the winning layout
    result.best_inner = bcd_loop(scenario, result.best_layout.offsets, bcd_cfg,
                                 mix_seed(cfg.seed, 2));
    result.has_inner = true;
    result.best_objective = result.best_inner.final_sum_rate;
    return result;
}

} // namespace mestars
