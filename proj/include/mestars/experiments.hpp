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
#include <optional>
#include <string>
#include <vector>

#include "mestars/report.hpp"
#include "mestars/scenario.hpp"

namespace mestars {

enum class ExperimentKind {
    SquintVsBandwidth, // gain curves of the fixed layout across bandwidths
    Convergence,       // swarm best-fitness traces per mode
    GainVsMode,        // position search with the worst-band-gain target
    RateVsElements,    // final sum rate across element counts
    RateVsSubcarriers, // final sum rate across subcarrier counts
};

const char* experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::SquintVsBandwidth;
    Scenario base;
    bool regenerate_users = false; // redraw user positions per seed
    std::vector<double> sweep;     // bandwidth Hz / element count / subcarrier count
    std::vector<MoveMode> modes;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out_dir = "results";
    int n_threads = 1;

    /// Fills sweep/modes/seeds left empty with the experiment's defaults.
    void apply_defaults();
};

struct CellOutcome {
    MoveMode mode = MoveMode::FP;
    double sweep_value = 0.0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::filesystem::path dir;
};

struct ExperimentSummary {
    std::vector<CellOutcome> cells;
    int n_failed = 0;
};

/// Runs every (mode, sweep value, seed) cell through a bounded work queue;
/// each cell writes its own directory under
/// out_dir/<experiment>/<mode>/<sweep>=<value>/seed=<s>/. Failures are
/// recorded and do not stop the sweep.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// Merges the per-cell outputs under a results directory into tidy
/// per-experiment CSV files in <dir>/plotdata/. Missing cells appear as
/// NA rows. Deterministic and idempotent.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& result_dir);

/// Compact benchmark setup: shrunk counts keep the full two-layer stack
/// runnable on a desk machine.
Scenario make_desk_scenario(std::uint64_t placement_seed = 1);

/// Full-size setup: N=4, M=16, K=4, L=11, B=10 GHz around 40 GHz, 15 W
/// budget, -110 dBm noise, half-wavelength spacing floor, I=20, T=100.
Scenario make_paper_scenario(std::uint64_t placement_seed = 1);

/// Uniform redraw of the user ring (radius <= 2 m, both regions) used when
/// an experiment asks for fresh placements per seed.
void redraw_users(Scenario& scenario, std::uint64_t placement_seed);

/// Thread budget: explicit argument, else STARS_THREADS, else hardware.
int resolve_thread_count(int requested = 0);

} // namespace mestars
