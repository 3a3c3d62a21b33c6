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

#include <functional>
#include <random>
#include <span>
#include <vector>

#include "mestars/inner_bcd.hpp"
#include "mestars/scenario.hpp"
#include "mestars/stars.hpp"

namespace mestars {

struct Particle {
    std::vector<double> encoding; // free coordinates, see ElementLayout::encode
    std::vector<double> velocity;
    std::vector<double> best_encoding;
    double best_fitness = 0.0;
    int best_violations = 0;
};

struct SwarmState {
    std::vector<Particle> particles;
    std::vector<double> global_best;
    double global_best_fitness = 0.0;
    int global_best_violations = 0;
    int iteration = 0;
    std::vector<double> fitness_history; // global best after init and each iteration
    std::vector<int> violations_history;
};

/// Optimization target R evaluated on a decoded layout. The seed feeds
/// stochastic inner solvers so swarm runs stay reproducible.
using PositionObjective = std::function<double(const ElementLayout&, std::uint64_t seed)>;

/// Target used by the sum-rate search: the inner alternating solve with
/// its iteration budget capped for tractability inside the swarm.
PositionObjective rate_objective(const Scenario& scenario, const BcdConfig& bcd_cfg,
                                 int pso_iter_cap = 20);

/// Fig-6-style target: worst normalized array gain over a dense grid of
/// the scenario bandwidth for one user.
PositionObjective gain_objective(const Scenario& scenario, int user_index,
                                 int n_grid_points = 101);

/// eta > 0: explicit; eta == 0: 100x the objective value of one
/// fixed-element pilot evaluation (floored at 0.1).
double resolve_penalty_weight(const Scenario& scenario, const SwarmConfig& cfg,
                              const PositionObjective& objective);

/// Linearly decaying inertia omega_max - (omega_max - omega_min) t / T.
double inertia(int t, const SwarmConfig& cfg);

/// omega V + c1 a1 (best_i - S) + c2 a2 (best_g - S); a1, a2 fresh scalar
/// uniform draws applied to the whole vector.
std::vector<double> update_velocity(const Particle& particle,
                                    std::span<const double> global_best, double omega,
                                    const SwarmConfig& cfg, std::mt19937_64& rng);

/// S + V followed by the mode clamp; returns the clamped encoding.
std::vector<double> update_position(const ElementLayout& base, std::span<const double> encoding,
                                    std::span<const double> velocity);

/// I particles uniform over the free coordinates (DB: uniform along each
/// track), velocities uniform in [-A/10, A/10], bests initialized per the
/// swarm rules. Evaluates every particle once.
SwarmState init_swarm(const Scenario& scenario, const ElementLayout& base,
                      const SwarmConfig& cfg, const PositionObjective& objective,
                      double penalty_weight, std::mt19937_64& rng);

/// R(layout) - eta * violations for one layout, using the inner solve as R.
double fitness(const Scenario& scenario, const ElementLayout& layout, const SwarmConfig& cfg,
               const BcdConfig& bcd_cfg, std::uint64_t seed = 0);

enum class UpdateSchedule { Asynchronous, Synchronous };

struct PsoResult {
    MoveMode mode = MoveMode::FP;
    ElementLayout best_layout;
    double best_fitness = 0.0;
    int best_violations = 0;
    std::vector<double> global_best_trace;
    std::vector<int> violations_trace;
    double penalty_weight = 0.0;
    double best_objective = 0.0; // R at the best layout (re-evaluated)
    BcdResult best_inner;        // full-precision re-solve (rate searches only)
    bool has_inner = false;
};

/// Position search with a caller-supplied objective.
PsoResult pso_loop_custom(const Scenario& scenario, MoveMode mode, const SwarmConfig& cfg,
                          const PositionObjective& objective, double penalty_weight,
                          UpdateSchedule schedule = UpdateSchedule::Asynchronous,
                          int n_threads = 1);

/// Sum-rate position search; FP requests bypass the swarm and return a
/// single full-precision inner solve.
PsoResult pso_loop(const Scenario& scenario, MoveMode mode, const SwarmConfig& cfg,
                   const BcdConfig& bcd_cfg,
                   UpdateSchedule schedule = UpdateSchedule::Asynchronous, int n_threads = 1);

} // namespace mestars
