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

#include "mestars/report.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mestars {

using nlohmann::json;

namespace {

json complex_vector_to_json(const Eigen::VectorXcd& v)
{
    json out = json::array(); // interleaved re, im
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i].real());
        out.push_back(v[i].imag());
    }
    return out;
}

Eigen::VectorXcd complex_vector_from_json(const json& j)
{
    if (!j.is_array() || j.size() % 2 != 0)
        throw ValidationError("report: malformed interleaved complex array");
    Eigen::VectorXcd v(j.size() / 2);
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v[i] = {j[2 * i].get<double>(), j[2 * i + 1].get<double>()};
    return v;
}

json real_vector_to_json(const Eigen::VectorXd& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd real_vector_from_json(const json& j)
{
    Eigen::VectorXd v(j.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json layout_to_json(const ElementLayout& l)
{
    json j;
    j["mode"] = mode_name(l.mode);
    j["aperture_m"] = l.aperture_m;
    json offs = json::array();
    for (const auto& o : l.offsets) offs.push_back({o.x(), o.y()});
    j["offsets"] = std::move(offs);
    if (l.horizontal) {
        j["track_count"] = l.horizontal->track_count;
        j["track_index"] = l.horizontal->track_index;
        j["track_spacing_m"] = l.horizontal->spacing_m;
    }
    if (l.vertical) {
        j["track_count"] = l.vertical->track_count;
        j["track_index"] = l.vertical->track_index;
        j["track_spacing_m"] = l.vertical->spacing_m;
    }
    if (l.diagonal) j["z_intercepts"] = l.diagonal->z_intercept_m;
    return j;
}

ElementLayout layout_from_json(const json& j)
{
    ElementLayout l;
    l.mode = mode_from_name(j.at("mode").get<std::string>());
    l.aperture_m = j.at("aperture_m").get<double>();
    for (const auto& o : j.at("offsets")) l.offsets.emplace_back(o[0].get<double>(), o[1].get<double>());
    switch (l.mode) {
        case MoveMode::HB: {
            ElementLayout::HorizontalTracks t;
            t.track_count = j.at("track_count").get<int>();
            t.track_index = j.at("track_index").get<std::vector<int>>();
            t.spacing_m = j.at("track_spacing_m").get<double>();
            l.horizontal = std::move(t);
            break;
        }
        case MoveMode::VB: {
            ElementLayout::VerticalTracks t;
            t.track_count = j.at("track_count").get<int>();
            t.track_index = j.at("track_index").get<std::vector<int>>();
            t.spacing_m = j.at("track_spacing_m").get<double>();
            l.vertical = std::move(t);
            break;
        }
        case MoveMode::DB: {
            ElementLayout::DiagonalTracks t;
            t.z_intercept_m = j.at("z_intercepts").get<std::vector<double>>();
            l.diagonal = std::move(t);
            break;
        }
        default:
            break;
    }
    return l;
}

json report_body(const OptimizationReport& r)
{
    json j;
    j["fingerprint"] = r.fingerprint;
    j["mode"] = mode_name(r.mode);
    j["seed"] = r.seed;
    j["objective_kind"] = r.objective_kind;
    j["layout"] = layout_to_json(r.best_layout);
    j["best_fitness"] = r.best_fitness;
    j["objective_value"] = r.objective_value;
    j["violations"] = r.violations;
    j["penalty_weight"] = r.penalty_weight;
    j["pso_trace"] = r.pso_trace;
    j["pso_violations_trace"] = r.pso_violations_trace;
    j["has_inner"] = r.has_inner;
    if (r.has_inner) {
        json w = json::array();
        for (const auto& per_l : r.precoders) {
            json row = json::array();
            for (const auto& v : per_l) row.push_back(complex_vector_to_json(v));
            w.push_back(std::move(row));
        }
        j["precoders"] = std::move(w);
        json c;
        c["amp_t"] = real_vector_to_json(r.coefficients.amp_t);
        c["amp_r"] = real_vector_to_json(r.coefficients.amp_r);
        c["phase_t"] = real_vector_to_json(r.coefficients.phase_t);
        c["phase_r"] = real_vector_to_json(r.coefficients.phase_r);
        j["coefficients"] = std::move(c);
        j["bcd_surrogate_trace"] = r.bcd_surrogate_trace;
        j["bcd_sum_rate_trace"] = r.bcd_sum_rate_trace;
    }
    return j;
}

} // namespace

OptimizationReport make_report(const Scenario& scenario, const PsoResult& pso,
                               std::uint64_t seed, const std::string& objective_kind)
{
    OptimizationReport r;
    r.fingerprint = scenario_fingerprint(scenario);
    r.mode = pso.mode;
    r.seed = seed;
    r.objective_kind = objective_kind;
    r.best_layout = pso.best_layout;
    r.best_fitness = pso.best_fitness;
    r.objective_value = pso.has_inner ? pso.best_objective : pso.best_fitness;
    r.violations = pso.best_violations;
    r.penalty_weight = pso.penalty_weight;
    r.pso_trace = pso.global_best_trace;
    r.pso_violations_trace = pso.violations_trace;
    r.has_inner = pso.has_inner;
    if (pso.has_inner) {
        r.precoders = pso.best_inner.w;
        r.coefficients = pso.best_inner.coefficients;
        r.bcd_surrogate_trace = pso.best_inner.surrogate_trace;
        r.bcd_sum_rate_trace = pso.best_inner.sum_rate_trace;
        r.objective_value = pso.best_inner.final_sum_rate;
    }
    return r;
}

std::string report_to_canonical_string(const OptimizationReport& report)
{
    return report_body(report).dump(2) + "\n";
}

void save_report(const OptimizationReport& report, const std::filesystem::path& path)
{
    json j = report_body(report);
    j["timings"] = {{"swarm_s", report.timings.swarm_s},
                    {"resolve_s", report.timings.resolve_s},
                    {"total_s", report.timings.total_s}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

OptimizationReport load_report(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("report: cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: parse error: ") + e.what());
    }
    OptimizationReport r;
    try {
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.mode = mode_from_name(j.at("mode").get<std::string>());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.objective_kind = j.at("objective_kind").get<std::string>();
        r.best_layout = layout_from_json(j.at("layout"));
        r.best_fitness = j.at("best_fitness").get<double>();
        r.objective_value = j.at("objective_value").get<double>();
        r.violations = j.at("violations").get<int>();
        r.penalty_weight = j.at("penalty_weight").get<double>();
        r.pso_trace = j.at("pso_trace").get<std::vector<double>>();
        r.pso_violations_trace = j.at("pso_violations_trace").get<std::vector<int>>();
        r.has_inner = j.at("has_inner").get<bool>();
        if (r.has_inner) {
            for (const auto& row : j.at("precoders")) {
                std::vector<Eigen::VectorXcd> per_l;
                for (const auto& v : row) per_l.push_back(complex_vector_from_json(v));
                r.precoders.push_back(std::move(per_l));
            }
            const auto& c = j.at("coefficients");
            r.coefficients.amp_t = real_vector_from_json(c.at("amp_t"));
            r.coefficients.amp_r = real_vector_from_json(c.at("amp_r"));
            r.coefficients.phase_t = real_vector_from_json(c.at("phase_t"));
            r.coefficients.phase_r = real_vector_from_json(c.at("phase_r"));
            r.bcd_surrogate_trace = j.at("bcd_surrogate_trace").get<std::vector<double>>();
            r.bcd_sum_rate_trace = j.at("bcd_sum_rate_trace").get<std::vector<double>>();
        }
        if (j.contains("timings")) {
            r.timings.swarm_s = j["timings"].value("swarm_s", 0.0);
            r.timings.resolve_s = j["timings"].value("resolve_s", 0.0);
            r.timings.total_s = j["timings"].value("total_s", 0.0);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("report: schema error: ") + e.what());
    }
    return r;
}

void verify_report(const OptimizationReport& report, const Scenario& scenario)
{
    if (report.fingerprint != scenario_fingerprint(scenario))
        throw ValidationError("report.fingerprint: does not match the scenario");
    report.best_layout.validate();
    const int expected_violations =
        min_distance_violations(report.best_layout.offsets, scenario.system.min_spacing_m);
    if (expected_violations != report.violations)
        throw ValidationError("report.violations: disagrees with the stored layout");
    if (report.has_inner) {
        report.coefficients.validate();
        const double budget =
            scenario.system.max_power_w / scenario.system.n_subcarriers + 1e-8;
        for (std::size_t l = 0; l < report.precoders.size(); ++l) {
            double p = 0.0;
            for (const auto& w : report.precoders[l]) p += w.squaredNorm();
            if (p > budget)
                throw ValidationError("report.precoders: per-subcarrier power budget "
                                      "exceeded on subcarrier " +
                                      std::to_string(l));
        }
    }
}

} // namespace mestars
