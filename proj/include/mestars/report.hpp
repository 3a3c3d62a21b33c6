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

#include <filesystem>
#include <string>

#include "mestars/outer_pso.hpp"
#include "mestars/scenario.hpp"

namespace mestars {

struct StageTimings {
    double swarm_s = 0.0;
    double resolve_s = 0.0;
    double total_s = 0.0;
};

/// Everything one optimization run produced. The canonical serialization
/// excludes the timing block, so equal seeds give byte-identical canonical
/// reports; save() appends timings as observational metadata.
struct OptimizationReport {
    std::string fingerprint; // of the scenario the run used
    MoveMode mode = MoveMode::FP;
    std::uint64_t seed = 0;
    std::string objective_kind; // "sum_rate" or "min_gain"
    ElementLayout best_layout;
    double best_fitness = 0.0;
    double objective_value = 0.0; // sum rate or worst-band gain at the best layout
    int violations = 0;
    double penalty_weight = 0.0;
    std::vector<double> pso_trace;
    std::vector<int> pso_violations_trace;
    bool has_inner = false;
    PrecoderSet precoders;
    StarsCoefficients coefficients;
    std::vector<double> bcd_surrogate_trace;
    std::vector<double> bcd_sum_rate_trace;
    StageTimings timings;
};

OptimizationReport make_report(const Scenario& scenario, const PsoResult& pso,
                               std::uint64_t seed, const std::string& objective_kind);

std::string report_to_canonical_string(const OptimizationReport& report);
void save_report(const OptimizationReport& report, const std::filesystem::path& path);
OptimizationReport load_report(const std::filesystem::path& path);

/// Cross-checks a reloaded report against the scenario it claims to come
/// from: fingerprint, energy-split invariant, per-subcarrier power budget,
/// spacing-violation count. Throws ValidationError on mismatch.
void verify_report(const OptimizationReport& report, const Scenario& scenario);

} // namespace mestars
