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

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "mestars/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<std::string> split_csv(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

int cmd_run(const std::string& experiment, const std::string& scenario_path,
            const std::string& modes_csv, const std::string& seeds_csv,
            const std::string& sweep_csv, bool paper_scale, const std::string& out_dir,
            int threads)
{
    mestars::ExperimentSpec spec;
    spec.kind = mestars::experiment_from_name(experiment);
    if (!scenario_path.empty()) {
        spec.base = mestars::load_scenario(scenario_path);
        spec.regenerate_users = false;
    } else {
        spec.base = paper_scale ? mestars::make_paper_scenario() : mestars::make_desk_scenario();
        spec.regenerate_users = true;
    }
    for (const std::string& m : split_csv(modes_csv))
        spec.modes.push_back(mestars::mode_from_name(m));
    for (const std::string& s : split_csv(seeds_csv)) spec.seeds.push_back(std::stoull(s));
    for (const std::string& v : split_csv(sweep_csv)) spec.sweep.push_back(std::stod(v));
    spec.out_dir = out_dir;
    spec.n_threads = mestars::resolve_thread_count(threads);

    for (const std::string& w : spec.base.warnings) std::cerr << "warning: " << w << "\n";

    const mestars::ExperimentSummary summary = mestars::run_experiment(spec);
    for (const auto& cell : summary.cells) {
        std::cout << (cell.ok ? "done " : "FAIL ") << cell.dir.string();
        if (!cell.ok) std::cout << "  (" << cell.error << ")";
        std::cout << "\n";
    }
    std::cout << summary.cells.size() - summary.n_failed << "/" << summary.cells.size()
              << " cells completed\n";
    return summary.n_failed == 0 ? kExitOk : kExitRuntime;
}

int cmd_validate(const std::string& path)
{
    const mestars::Scenario s = mestars::load_scenario(path);
    for (const std::string& w : s.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "ok: " << path << " (fingerprint " << mestars::scenario_fingerprint(s)
              << ")\n";
    return kExitOk;
}

int cmd_plotdata(const std::string& dir)
{
    const auto written = mestars::emit_plot_data(dir);
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"movable-element STARS near-field wideband experiments"};
    app.require_subcommand(1);

    std::string experiment, scenario_path, modes_csv, seeds_csv, sweep_csv;
    std::string out_dir = "results";
    bool paper_scale = false;
    int threads = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment sweep");
    run->add_option("experiment", experiment,
                    "squint_vs_bandwidth | convergence | gain_vs_mode | rate_vs_elements | "
                    "rate_vs_subcarriers")
        ->required();
    run->add_option("--scenario", scenario_path, "scenario JSON (default: generated setup)");
    run->add_option("--modes", modes_csv, "comma list rb,hb,vb,db,fp");
    run->add_option("--seeds", seeds_csv, "comma list of integer seeds");
    run->add_option("--sweep", sweep_csv, "comma list of sweep values");
    run->add_flag("--paper-scale", paper_scale, "full-size setup instead of the desk default");
    run->add_option("--out", out_dir, "results directory");
    run->add_option("--threads", threads, "parallel cells (default STARS_THREADS or hardware)");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "validate a scenario file");
    validate->add_option("scenario", validate_path, "scenario JSON path")->required();

    std::string plot_dir;
    CLI::App* plotdata = app.add_subcommand("plotdata", "merge results into tidy CSVs");
    plotdata->add_option("dir", plot_dir, "results directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(experiment, scenario_path, modes_csv, seeds_csv, sweep_csv,
                           paper_scale, out_dir, threads);
        if (validate->parsed()) return cmd_validate(validate_path);
        if (plotdata->parsed()) return cmd_plotdata(plot_dir);
    } catch (const mestars::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
