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

#include "mestars/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mestars/squint.hpp"

namespace mestars {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt_value(double v)
{
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* sweep_key(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::SquintVsBandwidth:
        case ExperimentKind::GainVsMode: return "bandwidth_hz";
        case ExperimentKind::Convergence:
        case ExperimentKind::RateVsElements: return "elements";
        case ExperimentKind::RateVsSubcarriers: return "subcarriers";
    }
    return "sweep";
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_gain_curve_csv(const fs::path& path, const GainCurve& curve)
{
    std::ostringstream os;
    os << "freq_hz,gain\n";
    for (std::size_t i = 0; i < curve.frequencies.size(); ++i)
        os << fmt_double(curve.frequencies[i]) << "," << fmt_double(curve.gains[i]) << "\n";
    write_text(path, os.str());
}

void write_swarm_trace_csv(const fs::path& path, const OptimizationReport& r)
{
    std::ostringstream os;
    os << "iter,global_best_fitness,violations_at_best\n";
    for (std::size_t i = 0; i < r.pso_trace.size(); ++i)
        os << i << "," << fmt_double(r.pso_trace[i]) << "," << r.pso_violations_trace[i]
           << "\n";
    write_text(path, os.str());
}

void write_bcd_trace_csv(const fs::path& path, const OptimizationReport& r)
{
    std::ostringstream os;
    os << "iter,surrogate,sum_rate\n";
    for (std::size_t i = 0; i < r.bcd_surrogate_trace.size(); ++i)
        os << i + 1 << "," << fmt_double(r.bcd_surrogate_trace[i]) << ","
           << fmt_double(r.bcd_sum_rate_trace[i]) << "\n";
    write_text(path, os.str());
}

int first_user_in(const Scenario& s, Region r)
{
    for (std::size_t k = 0; k < s.geometry.users.size(); ++k)
        if (s.geometry.users[k].region == r) return static_cast<int>(k);
    return 0;
}

// scenario specialized to one sweep point
Scenario cell_scenario(const ExperimentSpec& spec, double sweep_value, std::uint64_t seed)
{
    Scenario s = spec.base;
    switch (spec.kind) {
        case ExperimentKind::SquintVsBandwidth:
        case ExperimentKind::GainVsMode:
            s.system.bandwidth_hz = sweep_value;
            break;
        case ExperimentKind::Convergence:
        case ExperimentKind::RateVsElements:
            s.system.n_elements = static_cast<int>(sweep_value);
            break;
        case ExperimentKind::RateVsSubcarriers:
            s.system.n_subcarriers = static_cast<int>(sweep_value);
            break;
    }
    if (spec.regenerate_users) redraw_users(s, mix_seed(seed, 0x75736572ULL));
    s.swarm.seed = seed;
    // keep a file-provided layout unless the sweep changed the element count
    if (s.layout.size() != s.system.n_elements)
        s.layout = default_layout(s.layout.mode, s.system);
    s.validate();
    return s;
}

void run_cell(const ExperimentSpec& spec, CellOutcome& cell)
{
    const Scenario s = cell_scenario(spec, cell.sweep_value, cell.seed);
    fs::create_directories(cell.dir);

    const auto t0 = std::chrono::steady_clock::now();
    switch (spec.kind) {
        case ExperimentKind::SquintVsBandwidth: {
            const ElementLayout layout =
                s.layout.mode == cell.mode ? s.layout : default_layout(cell.mode, s.system);
            const int user = first_user_in(s, Region::Reflection);
            const GainCurve curve = gain_curve(s, layout, user, s.system.bandwidth_hz, 101);
            write_gain_curve_csv(cell.dir / "gain_curve.csv", curve);

            PsoResult fixed;
            fixed.mode = cell.mode;
            fixed.best_layout = layout;
            fixed.best_fitness = min_gain(curve);
            fixed.best_violations =
                min_distance_violations(layout.offsets, s.system.min_spacing_m);
            fixed.global_best_trace = {fixed.best_fitness};
            fixed.violations_trace = {fixed.best_violations};
            OptimizationReport rep = make_report(s, fixed, cell.seed, "min_gain");
            rep.timings.total_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            save_report(rep, cell.dir / "report.json");
            break;
        }
        case ExperimentKind::GainVsMode: {
            const int user = first_user_in(s, Region::Reflection);
            const PositionObjective objective = gain_objective(s, user, 101);
            const double eta = resolve_penalty_weight(s, s.swarm, objective);
            const PsoResult pso = pso_loop_custom(s, cell.mode, s.swarm, objective, eta);
            OptimizationReport rep = make_report(s, pso, cell.seed, "min_gain");
            rep.timings.swarm_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            rep.timings.total_s = rep.timings.swarm_s;
            save_report(rep, cell.dir / "report.json");
            write_swarm_trace_csv(cell.dir / "swarm_trace.csv", rep);
            write_gain_curve_csv(cell.dir / "gain_curve.csv",
                                 gain_curve(s, pso.best_layout, user,
                                            s.system.bandwidth_hz, 101));
            break;
        }
        case ExperimentKind::Convergence:
        case ExperimentKind::RateVsElements:
        case ExperimentKind::RateVsSubcarriers: {
            const auto t_swarm = std::chrono::steady_clock::now();
            const PsoResult pso = pso_loop(s, cell.mode, s.swarm, s.bcd);
            OptimizationReport rep = make_report(s, pso, cell.seed, "sum_rate");
            const auto t_end = std::chrono::steady_clock::now();
            rep.timings.swarm_s = std::chrono::duration<double>(t_end - t_swarm).count();
            rep.timings.total_s = std::chrono::duration<double>(t_end - t0).count();
            save_report(rep, cell.dir / "report.json");
            write_swarm_trace_csv(cell.dir / "swarm_trace.csv", rep);
            if (rep.has_inner) write_bcd_trace_csv(cell.dir / "bcd_trace.csv", rep);
            break;
        }
    }
}

struct Manifest {
    ExperimentKind kind;
    std::vector<double> sweep;
    std::vector<MoveMode> modes;
    std::vector<std::uint64_t> seeds;
};

void write_manifest(const fs::path& dir, const ExperimentSpec& spec)
{
    json j;
    j["experiment"] = experiment_name(spec.kind);
    j["sweep"] = spec.sweep;
    json modes = json::array();
    for (MoveMode m : spec.modes) modes.push_back(mode_name(m));
    j["modes"] = std::move(modes);
    j["seeds"] = spec.seeds;
    j["sweep_key"] = sweep_key(spec.kind);
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

Manifest read_manifest(const fs::path& path)
{
    std::ifstream in(path);
    json j;
    in >> j;
    Manifest m;
    m.kind = experiment_from_name(j.at("experiment").get<std::string>());
    m.sweep = j.at("sweep").get<std::vector<double>>();
    for (const auto& name : j.at("modes")) m.modes.push_back(mode_from_name(name));
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    return m;
}

fs::path cell_dir(const fs::path& root, ExperimentKind kind, MoveMode mode, double value,
                  std::uint64_t seed)
{
    return root / experiment_name(kind) / mode_name(mode) /
           (std::string(sweep_key(kind)) + "=" + fmt_value(value)) /
           ("seed=" + std::to_string(seed));
}

} // namespace

const char* experiment_name(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::SquintVsBandwidth: return "squint_vs_bandwidth";
        case ExperimentKind::Convergence: return "convergence";
        case ExperimentKind::GainVsMode: return "gain_vs_mode";
        case ExperimentKind::RateVsElements: return "rate_vs_elements";
        case ExperimentKind::RateVsSubcarriers: return "rate_vs_subcarriers";
    }
    return "?";
}

ExperimentKind experiment_from_name(const std::string& name)
{
    if (name == "squint_vs_bandwidth") return ExperimentKind::SquintVsBandwidth;
    if (name == "convergence") return ExperimentKind::Convergence;
    if (name == "gain_vs_mode") return ExperimentKind::GainVsMode;
    if (name == "rate_vs_elements") return ExperimentKind::RateVsElements;
    if (name == "rate_vs_subcarriers") return ExperimentKind::RateVsSubcarriers;
    throw ValidationError("experiment: unknown name '" + name + "'");
}

void ExperimentSpec::apply_defaults()
{
    if (modes.empty()) {
        switch (kind) {
            case ExperimentKind::SquintVsBandwidth: modes = {MoveMode::FP}; break;
            default:
                modes = {MoveMode::RB, MoveMode::HB, MoveMode::VB, MoveMode::DB, MoveMode::FP};
        }
    }
    if (sweep.empty()) {
        switch (kind) {
            case ExperimentKind::SquintVsBandwidth:
                sweep = {1e9, 2e9, 4e9, 8e9, 10e9};
                break;
            case ExperimentKind::GainVsMode:
                sweep = {4e9, 10e9};
                break;
            case ExperimentKind::Convergence:
                sweep = {static_cast<double>(base.system.n_elements)};
                break;
            case ExperimentKind::RateVsElements:
                sweep = {4, 8};
                break;
            case ExperimentKind::RateVsSubcarriers:
                sweep = {3, 5, 7};
                break;
        }
    }
    if (seeds.empty()) {
        if (kind == ExperimentKind::SquintVsBandwidth)
            seeds = {1};
        else
            seeds = {1, 2, 3};
    }
}

ExperimentSummary run_experiment(const ExperimentSpec& spec_in)
{
    ExperimentSpec spec = spec_in;
    spec.apply_defaults();
    fs::create_directories(spec.out_dir / experiment_name(spec.kind));
    write_manifest(spec.out_dir / experiment_name(spec.kind), spec);

    ExperimentSummary summary;
    for (MoveMode mode : spec.modes)
        for (double value : spec.sweep)
            for (std::uint64_t seed : spec.seeds) {
                CellOutcome cell;
                cell.mode = mode;
                cell.sweep_value = value;
                cell.seed = seed;
                cell.dir = cell_dir(spec.out_dir, spec.kind, mode, value, seed);
                summary.cells.push_back(std::move(cell));
            }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < summary.cells.size();
             i = next.fetch_add(1)) {
            CellOutcome& cell = summary.cells[i];
            try {
                run_cell(spec, cell);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
                fs::create_directories(cell.dir);
                write_text(cell.dir / "error.txt", std::string(e.what()) + "\n");
            }
        }
    };
    const int threads =
        std::min<int>(resolve_thread_count(spec.n_threads), summary.cells.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::future<void>> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) pool.push_back(std::async(std::launch::async, worker));
        for (auto& f : pool) f.get();
    }
    for (const auto& c : summary.cells)
        if (!c.ok) ++summary.n_failed;
    return summary;
}

std::vector<fs::path> emit_plot_data(const fs::path& result_dir)
{
    if (!fs::exists(result_dir))
        throw ValidationError("plotdata: directory '" + result_dir.string() +
                              "' does not exist");
    std::vector<fs::path> manifests;
    for (const auto& entry : fs::directory_iterator(result_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json"))
            manifests.push_back(entry.path());
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty())
        throw ValidationError("plotdata: no experiment manifests under '" +
                              result_dir.string() + "'");

    const fs::path plot_dir = result_dir / "plotdata";
    fs::create_directories(plot_dir);
    std::vector<fs::path> written;

    for (const fs::path& exp_dir : manifests) {
        const Manifest m = read_manifest(exp_dir / "manifest.json");
        const std::string key = sweep_key(m.kind);
        std::ostringstream os;
        const bool curves =
            m.kind == ExperimentKind::SquintVsBandwidth || m.kind == ExperimentKind::GainVsMode;
        const bool traces = m.kind == ExperimentKind::Convergence;
        if (curves)
            os << "mode," << key << ",seed,freq_hz,gain\n";
        else if (traces)
            os << "mode," << key << ",seed,iter,global_best_fitness\n";
        else
            os << "mode," << key << ",seed,sum_rate,violations\n";

        for (MoveMode mode : m.modes) {
            for (double value : m.sweep) {
                for (std::uint64_t seed : m.seeds) {
                    const fs::path dir = cell_dir(result_dir, m.kind, mode, value, seed);
                    const std::string prefix = std::string(mode_name(mode)) + "," +
                                               fmt_value(value) + "," + std::to_string(seed);
                    if (!fs::exists(dir / "report.json")) {
                        os << prefix << (curves ? ",NA,NA" : traces ? ",NA,NA" : ",NA,NA")
                           << "\n";
                        continue;
                    }
                    if (curves) {
                        std::ifstream in(dir / "gain_curve.csv");
                        std::string line;
                        std::getline(in, line); // header
                        while (std::getline(in, line)) {
                            if (line.empty()) continue;
                            const auto comma = line.find(',');
                            os << prefix << "," << line.substr(0, comma) << ","
                               << line.substr(comma + 1) << "\n";
                        }
                    } else if (traces) {
                        const OptimizationReport rep = load_report(dir / "report.json");
                        for (std::size_t i = 0; i < rep.pso_trace.size(); ++i)
                            os << prefix << "," << i << "," << fmt_double(rep.pso_trace[i])
                               << "\n";
                    } else {
                        const OptimizationReport rep = load_report(dir / "report.json");
                        os << prefix << "," << fmt_double(rep.objective_value) << ","
                           << rep.violations << "\n";
                    }
                }
            }
        }
        const fs::path out = plot_dir / (fs::path(exp_dir).filename().string() + ".csv");
        write_text(out, os.str());
        written.push_back(out);
    }
    return written;
}

Scenario make_desk_scenario(std::uint64_t placement_seed)
{
    Scenario s;
    s.system.n_antennas = 4;
    s.system.n_elements = 8;
    s.system.n_users = 2;
    s.system.n_subcarriers = 5;
    s.system.center_freq_hz = 40e9;
    s.system.bandwidth_hz = 10e9;
    s.system.max_power_w = 15.0;
    s.system.noise_power_w = 1e-14; // -110 dBm
    s.system.aperture_m = 0.5;
    s.system.min_spacing_m = 0.5 * s.system.center_wavelength_m();
    s.geometry.bs_position = {100.0, 25.0, 5.0};
    s.geometry.stars_center = {0.0, 0.0, 1.0};
    s.swarm.n_particles = 10;
    s.swarm.max_iters = 30;
    s.bcd.max_outer_bcd_iters = 50;
    redraw_users(s, placement_seed);
    s.layout = default_layout(MoveMode::RB, s.system);
    s.validate();
    return s;
}

Scenario make_paper_scenario(std::uint64_t placement_seed)
{
    Scenario s = make_desk_scenario(placement_seed);
    s.system.n_elements = 16;
    s.system.n_users = 4;
    s.system.n_subcarriers = 11;
    s.swarm.n_particles = 20;
    s.swarm.max_iters = 100;
    redraw_users(s, placement_seed);
    s.layout = default_layout(MoveMode::RB, s.system);
    s.validate();
    return s;
}

void redraw_users(Scenario& scenario, std::uint64_t placement_seed)
{
    std::mt19937_64 rng(placement_seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const int k_count = scenario.system.n_users;
    const Eigen::Vector3d c = scenario.geometry.stars_center;
    const double bs_side = scenario.geometry.bs_position.y() - c.y();
    scenario.geometry.users.clear();
    // alternate regions; radius area-uniform in [0.2, 2] m on each side
    for (int k = 0; k < k_count; ++k) {
        const bool transmission = k % 2 == 0;
        const double r = 2.0 * std::sqrt(0.01 + 0.99 * uni(rng));
        const double tau = kPi * (0.02 + 0.96 * uni(rng)); // keep clear of the plane
        const double side = transmission ? -bs_side : bs_side;
        UserSpec u;
        u.position = {c.x() + r * std::cos(tau), c.y() + std::copysign(r * std::sin(tau), side),
                      c.z()};
        u.region = transmission ? Region::Transmission : Region::Reflection;
        scenario.geometry.users.push_back(u);
    }
}

int resolve_thread_count(int requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("STARS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace mestars
