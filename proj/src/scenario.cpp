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

#include "mestars/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mestars {

using nlohmann::json;

namespace {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

[[noreturn]] void fail(const std::string& path, const std::string& msg)
{
    throw ValidationError(path + ": " + msg);
}

const json& require(const json& obj, const char* key, const std::string& path)
{
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "." + key, "missing");
    return *it;
}

template <typename T>
T get_as(const json& v, const std::string& path)
{
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        fail(path, std::string("wrong type (") + e.what() + ")");
    }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& path)
{
    return get_as<T>(require(obj, key, path), path + "." + key);
}

template <typename T>
T field_or(const json& obj, const char* key, const std::string& path, T fallback)
{
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return get_as<T>(*it, path + "." + key);
}

Eigen::Vector3d vec3_field(const json& obj, const char* key, const std::string& path)
{
    const json& v = require(obj, key, path);
    const std::string p = path + "." + key;
    if (!v.is_array() || v.size() != 3) fail(p, "expected an array of 3 numbers");
    return {get_as<double>(v[0], p), get_as<double>(v[1], p), get_as<double>(v[2], p)};
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& path)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(known.begin(), known.end(), [&](const char* k) {
                return it.key() == k;
            }) == known.end())
            fail(path + "." + it.key(), "unknown key");
    }
}

SystemConfig parse_system(const json& j)
{
    const std::string path = "system";
    reject_unknown_keys(j,
                        {"n_antennas", "n_elements", "n_users", "n_subcarriers",
                         "center_freq_hz", "bandwidth_hz", "max_power_w", "max_power_dbm",
                         "noise_power_w", "noise_power_dbm", "aperture_m", "min_spacing_m",
                         "bs_antenna_spacing_m", "absorption"},
                        path);
    SystemConfig cfg;
    cfg.n_antennas = field<int>(j, "n_antennas", path);
    cfg.n_elements = field<int>(j, "n_elements", path);
    cfg.n_users = field<int>(j, "n_users", path);
    cfg.n_subcarriers = field<int>(j, "n_subcarriers", path);
    cfg.center_freq_hz = field<double>(j, "center_freq_hz", path);
    cfg.bandwidth_hz = field<double>(j, "bandwidth_hz", path);

    const bool has_pw = j.contains("max_power_w"), has_pd = j.contains("max_power_dbm");
    if (has_pw == has_pd) fail(path, "exactly one of max_power_w / max_power_dbm required");
    cfg.max_power_w = has_pw ? field<double>(j, "max_power_w", path)
                             : dbm_to_watts(field<double>(j, "max_power_dbm", path));

    const bool has_nw = j.contains("noise_power_w"), has_nd = j.contains("noise_power_dbm");
    if (has_nw == has_nd) fail(path, "exactly one of noise_power_w / noise_power_dbm required");
    cfg.noise_power_w = has_nw ? field<double>(j, "noise_power_w", path)
                               : dbm_to_watts(field<double>(j, "noise_power_dbm", path));

    cfg.aperture_m = field<double>(j, "aperture_m", path);
    cfg.min_spacing_m = field<double>(j, "min_spacing_m", path);
    cfg.bs_antenna_spacing_m = field_or<double>(j, "bs_antenna_spacing_m", path, 0.0);

    if (j.contains("absorption")) {
        const json& a = j["absorption"];
        if (!a.is_array()) fail(path + ".absorption", "expected an array of [freq_hz, k] pairs");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = path + ".absorption[" + std::to_string(i) + "]";
            if (!a[i].is_array() || a[i].size() != 2) fail(p, "expected [freq_hz, k]");
            cfg.absorption.breakpoints.emplace_back(get_as<double>(a[i][0], p),
                                                    get_as<double>(a[i][1], p));
        }
    }
    return cfg;
}

Geometry parse_geometry(const json& j)
{
    const std::string path = "geometry";
    reject_unknown_keys(j, {"bs_position", "stars_center", "users"}, path);
    Geometry g;
    g.bs_position = vec3_field(j, "bs_position", path);
    g.stars_center = vec3_field(j, "stars_center", path);
    const json& users = require(j, "users", path);
    if (!users.is_array()) fail(path + ".users", "expected an array");
    for (std::size_t k = 0; k < users.size(); ++k) {
        const std::string p = path + ".users[" + std::to_string(k) + "]";
        reject_unknown_keys(users[k], {"position", "region"}, p);
        UserSpec u;
        u.position = vec3_field(users[k], "position", p);
        u.region = region_from_name(field<std::string>(users[k], "region", p));
        g.users.push_back(u);
    }
    return g;
}

ElementLayout parse_layout(const json& j, const SystemConfig& cfg)
{
    const std::string path = "layout";
    reject_unknown_keys(j, {"mode", "offsets", "track_count", "track_index", "track_spacing_m",
                            "z_intercepts"},
                        path);
    const MoveMode mode = mode_from_name(field<std::string>(j, "mode", path));
    if (!j.contains("offsets")) {
        // everything derived from the canonical per-mode construction
        return default_layout(mode, cfg);
    }
    ElementLayout layout;
    layout.mode = mode;
    layout.aperture_m = cfg.aperture_m;
    const json& offs = j["offsets"];
    if (!offs.is_array()) fail(path + ".offsets", "expected an array of [x, z] pairs");
    for (std::size_t m = 0; m < offs.size(); ++m) {
        const std::string p = path + ".offsets[" + std::to_string(m) + "]";
        if (!offs[m].is_array() || offs[m].size() != 2) fail(p, "expected [x, z]");
        layout.offsets.emplace_back(get_as<double>(offs[m][0], p), get_as<double>(offs[m][1], p));
    }
    switch (mode) {
        case MoveMode::HB: {
            ElementLayout::HorizontalTracks t;
            t.track_count = field<int>(j, "track_count", path);
            t.track_index = field<std::vector<int>>(j, "track_index", path);
            t.spacing_m = field<double>(j, "track_spacing_m", path);
            layout.horizontal = std::move(t);
            break;
        }
        case MoveMode::VB: {
            ElementLayout::VerticalTracks t;
            t.track_count = field<int>(j, "track_count", path);
            t.track_index = field<std::vector<int>>(j, "track_index", path);
            t.spacing_m = field<double>(j, "track_spacing_m", path);
            layout.vertical = std::move(t);
            break;
        }
        case MoveMode::DB: {
            ElementLayout::DiagonalTracks t;
            t.z_intercept_m = field<std::vector<double>>(j, "z_intercepts", path);
            layout.diagonal = std::move(t);
            break;
        }
        case MoveMode::RB:
        case MoveMode::FP:
            break;
    }
    return layout;
}

SwarmConfig parse_swarm(const json& j)
{
    const std::string path = "swarm";
    reject_unknown_keys(j, {"n_particles", "max_iters", "c1", "c2", "omega_max", "omega_min",
                            "penalty_weight", "seed"},
                        path);
    SwarmConfig s;
    s.n_particles = field_or<int>(j, "n_particles", path, s.n_particles);
    s.max_iters = field_or<int>(j, "max_iters", path, s.max_iters);
    s.c1 = field_or<double>(j, "c1", path, s.c1);
    s.c2 = field_or<double>(j, "c2", path, s.c2);
    s.omega_max = field_or<double>(j, "omega_max", path, s.omega_max);
    s.omega_min = field_or<double>(j, "omega_min", path, s.omega_min);
    s.penalty_weight = field_or<double>(j, "penalty_weight", path, s.penalty_weight);
    s.seed = field_or<std::uint64_t>(j, "seed", path, s.seed);
    return s;
}

BcdConfig parse_bcd(const json& j)
{
    const std::string path = "bcd";
    reject_unknown_keys(j, {"convergence_eps", "n_randomizations", "max_outer_bcd_iters"}, path);
    BcdConfig b;
    b.convergence_eps = field_or<double>(j, "convergence_eps", path, b.convergence_eps);
    b.n_randomizations = field_or<int>(j, "n_randomizations", path, b.n_randomizations);
    b.max_outer_bcd_iters = field_or<int>(j, "max_outer_bcd_iters", path, b.max_outer_bcd_iters);
    return b;
}

json layout_to_json(const ElementLayout& l)
{
    json j;
    j["mode"] = mode_name(l.mode);
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

} // namespace

double AbsorptionTable::at(double freq_hz) const
{
    double value = 0.0;
    for (const auto& [f, k] : breakpoints) {
        if (f > freq_hz) break;
        value = k;
    }
    return value;
}

const char* region_name(Region r)
{
    return r == Region::Transmission ? "transmission" : "reflection";
}

Region region_from_name(const std::string& name)
{
    if (name == "transmission") return Region::Transmission;
    if (name == "reflection") return Region::Reflection;
    throw ValidationError("region: expected 'transmission' or 'reflection', got '" + name + "'");
}

void SystemConfig::validate() const
{
    if (n_antennas < 1) throw ValidationError("system.n_antennas: must be >= 1");
    if (n_elements < 1) throw ValidationError("system.n_elements: must be >= 1");
    if (n_users < 1) throw ValidationError("system.n_users: must be >= 1");
    if (n_subcarriers < 1) throw ValidationError("system.n_subcarriers: must be >= 1");
    if (!(center_freq_hz > 0.5 * bandwidth_hz))
        throw ValidationError("system.center_freq_hz: must exceed bandwidth_hz / 2");
    if (!(bandwidth_hz >= 0.0)) throw ValidationError("system.bandwidth_hz: must be >= 0");
    if (!(max_power_w > 0.0)) throw ValidationError("system.max_power_w: must be positive");
    if (!(noise_power_w > 0.0)) throw ValidationError("system.noise_power_w: must be positive");
    if (!(aperture_m > 0.0)) throw ValidationError("system.aperture_m: must be positive");
    if (!(min_spacing_m >= 0.0)) throw ValidationError("system.min_spacing_m: must be >= 0");
    if (!(bs_antenna_spacing_m >= 0.0))
        throw ValidationError("system.bs_antenna_spacing_m: must be >= 0");
    double prev = -1.0;
    for (std::size_t i = 0; i < absorption.breakpoints.size(); ++i) {
        const auto& [f, k] = absorption.breakpoints[i];
        const std::string p = "system.absorption[" + std::to_string(i) + "]";
        if (!(f > prev)) throw ValidationError(p + ": breakpoints must be strictly increasing");
        if (!(k >= 0.0)) throw ValidationError(p + ": absorption must be >= 0");
        prev = f;
    }
}

void Geometry::validate(const SystemConfig& cfg) const
{
    if ((bs_position - stars_center).norm() == 0.0)
        throw ValidationError("geometry.bs_position: coincides with stars_center");
    const double plane_y = stars_center.y();
    const double bs_side = bs_position.y() - plane_y;
    if (bs_side == 0.0)
        throw ValidationError("geometry.bs_position: lies in the surface plane, "
                              "transmission/reflection sides are undefined");
    for (std::size_t k = 0; k < users.size(); ++k) {
        const std::string p = "geometry.users[" + std::to_string(k) + "]";
        const auto& u = users[k];
        if ((u.position - stars_center).norm() == 0.0)
            fail(p + ".position", "coincides with stars_center");
        const double side = u.position.y() - plane_y;
        if (side == 0.0) fail(p + ".position", "lies in the surface plane");
        // reflection shares the BS half-space, transmission is the far side
        const Region expected =
            (side > 0) == (bs_side > 0) ? Region::Reflection : Region::Transmission;
        if (u.region != expected)
            fail(p + ".region",
                 std::string("tag '") + region_name(u.region) + "' inconsistent with y = " +
                     std::to_string(u.position.y()) + " (expected '" + region_name(expected) +
                     "')");
    }
    (void)cfg;
}

void SwarmConfig::validate() const
{
    if (n_particles < 1) throw ValidationError("swarm.n_particles: must be >= 1");
    if (max_iters < 1) throw ValidationError("swarm.max_iters: must be >= 1");
    if (!(omega_max >= omega_min) || !(omega_min >= 0.0))
        throw ValidationError("swarm.omega: need omega_max >= omega_min >= 0");
    if (!(penalty_weight >= 0.0))
        throw ValidationError("swarm.penalty_weight: must be >= 0 (0 = automatic)");
}

void BcdConfig::validate() const
{
    if (!(convergence_eps > 0.0)) throw ValidationError("bcd.convergence_eps: must be positive");
    if (n_randomizations < 1) throw ValidationError("bcd.n_randomizations: must be >= 1");
    if (max_outer_bcd_iters < 1)
        throw ValidationError("bcd.max_outer_bcd_iters: must be >= 1");
}

void Scenario::validate()
{
    warnings.clear();
    system.validate();
    geometry.validate(system);
    if (static_cast<int>(geometry.users.size()) != system.n_users)
        throw ValidationError("geometry.users: size " + std::to_string(geometry.users.size()) +
                              " does not match system.n_users = " +
                              std::to_string(system.n_users));
    if (layout.aperture_m != system.aperture_m)
        throw ValidationError("layout.aperture_m: disagrees with system.aperture_m");
    layout.validate();
    if (layout.size() != system.n_elements)
        throw ValidationError("layout.offsets: size " + std::to_string(layout.size()) +
                              " does not match system.n_elements = " +
                              std::to_string(system.n_elements));
    swarm.validate();
    bcd.validate();

    const double rayleigh = rayleigh_distance(system);
    for (std::size_t k = 0; k < geometry.users.size(); ++k) {
        const double d = (geometry.users[k].position - geometry.stars_center).norm();
        if (d > rayleigh) {
            std::ostringstream w;
            w << "geometry.users[" << k << "]: distance " << d
              << " m exceeds the Rayleigh distance " << rayleigh
              << " m; the spherical-wavefront model is not needed there";
            warnings.push_back(w.str());
        }
    }
}

std::vector<double> subcarrier_frequencies(const SystemConfig& cfg)
{
    const int l_count = cfg.n_subcarriers;
    std::vector<double> f(l_count);
    for (int l = 1; l <= l_count; ++l)
        f[l - 1] = cfg.center_freq_hz + cfg.bandwidth_hz / l_count * (l - 0.5 * (l_count + 1));
    return f;
}

IncidenceAngles incidence_angles(const Geometry& geometry)
{
    // standard arrival-angle convention: elevation measured from the
    // horizontal x-y plane (sin(el) = k_z), azimuth around z measured
    // from the surface normal +y toward +x. For ground-level geometries
    // the z phase coefficient cos(el) is close to 1, so vertical element
    // movement carries most of the dispersion-control leverage.
    IncidenceAngles angles;
    const Eigen::Vector3d k = (geometry.bs_position - geometry.stars_center).normalized();
    angles.elevation_arrival_rad = std::asin(std::clamp(k.z(), -1.0, 1.0));
    const double rho = std::hypot(k.x(), k.y());
    if (rho < 1e-12) {
        angles.azimuth_arrival_rad = 0.0; // degenerate: arrival along the z-axis
    } else {
        double az = std::atan2(k.x(), k.y());
        if (az < 0.0) az += kTwoPi;
        angles.azimuth_arrival_rad = az;
    }

    const Eigen::Vector3d dep = (geometry.stars_center - geometry.bs_position).normalized();
    angles.departure_rad = std::asin(std::clamp(dep.x(), -1.0, 1.0));
    return angles;
}

double rayleigh_distance(const SystemConfig& cfg)
{
    const double diag = cfg.aperture_m * std::sqrt(2.0);
    return 2.0 * diag * diag / cfg.center_wavelength_m();
}

Scenario load_scenario_from_string(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("scenario: JSON parse error: ") + e.what());
    }
    reject_unknown_keys(j, {"system", "geometry", "layout", "swarm", "bcd"}, "scenario");
    Scenario s;
    s.system = parse_system(require(j, "system", "scenario"));
    s.geometry = parse_geometry(require(j, "geometry", "scenario"));
    s.layout = parse_layout(require(j, "layout", "scenario"), s.system);
    s.swarm = j.contains("swarm") ? parse_swarm(j["swarm"]) : SwarmConfig{};
    s.bcd = j.contains("bcd") ? parse_bcd(j["bcd"]) : BcdConfig{};
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario: cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario_from_string(buf.str());
}

std::string scenario_to_canonical_string(const Scenario& s)
{
    json j;
    json& sys = j["system"];
    sys["n_antennas"] = s.system.n_antennas;
    sys["n_elements"] = s.system.n_elements;
    sys["n_users"] = s.system.n_users;
    sys["n_subcarriers"] = s.system.n_subcarriers;
    sys["center_freq_hz"] = s.system.center_freq_hz;
    sys["bandwidth_hz"] = s.system.bandwidth_hz;
    sys["max_power_w"] = s.system.max_power_w;
    sys["noise_power_w"] = s.system.noise_power_w;
    sys["aperture_m"] = s.system.aperture_m;
    sys["min_spacing_m"] = s.system.min_spacing_m;
    sys["bs_antenna_spacing_m"] = s.system.bs_antenna_spacing_m;
    if (!s.system.absorption.breakpoints.empty()) {
        json a = json::array();
        for (const auto& [f, k] : s.system.absorption.breakpoints) a.push_back({f, k});
        sys["absorption"] = std::move(a);
    }

    json& geo = j["geometry"];
    geo["bs_position"] = {s.geometry.bs_position.x(), s.geometry.bs_position.y(),
                          s.geometry.bs_position.z()};
    geo["stars_center"] = {s.geometry.stars_center.x(), s.geometry.stars_center.y(),
                           s.geometry.stars_center.z()};
    json users = json::array();
    for (const auto& u : s.geometry.users) {
        json ju;
        ju["position"] = {u.position.x(), u.position.y(), u.position.z()};
        ju["region"] = region_name(u.region);
        users.push_back(std::move(ju));
    }
    geo["users"] = std::move(users);

    j["layout"] = layout_to_json(s.layout);

    json& sw = j["swarm"];
    sw["n_particles"] = s.swarm.n_particles;
    sw["max_iters"] = s.swarm.max_iters;
    sw["c1"] = s.swarm.c1;
    sw["c2"] = s.swarm.c2;
    sw["omega_max"] = s.swarm.omega_max;
    sw["omega_min"] = s.swarm.omega_min;
    sw["penalty_weight"] = s.swarm.penalty_weight;
    sw["seed"] = s.swarm.seed;

    json& bc = j["bcd"];
    bc["convergence_eps"] = s.bcd.convergence_eps;
    bc["n_randomizations"] = s.bcd.n_randomizations;
    bc["max_outer_bcd_iters"] = s.bcd.max_outer_bcd_iters;

    return j.dump(2) + "\n";
}

void save_scenario(const Scenario& s, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("scenario: cannot write '" + path.string() + "'");
    out << scenario_to_canonical_string(s);
}

std::string scenario_fingerprint(const Scenario& s)
{
    const std::string text = scenario_to_canonical_string(s);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mestars
