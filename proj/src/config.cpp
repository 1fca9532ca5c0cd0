// SPDX-License-Identifier: Apache-2.0
//
// latprec - lattice all-pass precoder tracking for MIMO-OFDM links
// Copyright (C) 2026 The latprec authors
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

#include "latprec/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace latprec {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(Errc::ConfigError, msg); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> items(const std::string& key, const std::string& value) {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']') fail(key + ": expected a [list]");
    std::vector<std::string> out;
    const std::string body = trim(std::string_view(value).substr(1, value.size() - 2));
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::string t = trim(part);
        if (t.empty()) fail(key + ": empty list element");
        out.push_back(std::move(t));
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos == v.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    fail(key + ": '" + v + "' is not a finite number");
}

int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos == v.size() && x >= -(1L << 30) && x <= (1L << 30)) return static_cast<int>(x);
    } catch (const std::exception&) {
    }
    fail(key + ": '" + v + "' is not an integer");
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key + ": expected true or false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
    std::vector<double> out;
    for (const auto& s : items(key, v)) out.push_back(to_double(key, s));
    return out;
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"m", [](SimConfig& c, const std::string& k, const std::string& v) { c.m = to_int(k, v); }},
        {"n_fft", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_fft = to_int(k, v); }},
        {"n_pilots", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_pilots = to_int(k, v); }},
        {"lattice_order", [](SimConfig& c, const std::string& k, const std::string& v) { c.lattice_order = to_int(k, v); }},
        {"lattice_nodes", [](SimConfig& c, const std::string& k, const std::string& v) { c.lattice_nodes = to_int(k, v); }},
        {"angle_delay_taps", [](SimConfig& c, const std::string& k, const std::string& v) { c.angle_delay_taps = to_int(k, v); }},
        {"pdp.powers_db", [](SimConfig& c, const std::string& k, const std::string& v) { c.pdp.powers_db = to_doubles(k, v); }},
        {"pdp.delays_ns", [](SimConfig& c, const std::string& k, const std::string& v) { c.pdp.delays_ns = to_doubles(k, v); }},
        {"bandwidth_hz", [](SimConfig& c, const std::string& k, const std::string& v) { c.bandwidth_hz = to_double(k, v); }},
        {"speed_kmh", [](SimConfig& c, const std::string& k, const std::string& v) { c.speed_kmh = to_doubles(k, v); }},
        {"carrier_hz", [](SimConfig& c, const std::string& k, const std::string& v) { c.carrier_hz = to_double(k, v); }},
        {"symbol_s", [](SimConfig& c, const std::string& k, const std::string& v) { c.symbol_s = to_double(k, v); }},
        {"alpha_override", [](SimConfig& c, const std::string& k, const std::string& v) { c.alpha_override = to_doubles(k, v); }},
        {"snr_db", [](SimConfig& c, const std::string& k, const std::string& v) { c.snr_db = to_doubles(k, v); }},
        {"n_frames", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_frames = to_int(k, v); }},
        {"n_seeds", [](SimConfig& c, const std::string& k, const std::string& v) { c.n_seeds = to_int(k, v); }},
        {"schemes", [](SimConfig& c, const std::string& k, const std::string& v) { c.schemes = items(k, v); }},
        {"sigma", [](SimConfig& c, const std::string& k, const std::string& v) { c.sigma = to_double(k, v); }},
        {"sigma_by_speed", [](SimConfig& c, const std::string& k, const std::string& v) { c.sigma_by_speed = to_doubles(k, v); }},
        {"initial_step", [](SimConfig& c, const std::string& k, const std::string& v) { c.initial_step = to_double(k, v); }},
        {"min_step", [](SimConfig& c, const std::string& k, const std::string& v) { c.min_step = to_double(k, v); }},
        {"max_step", [](SimConfig& c, const std::string& k, const std::string& v) { c.max_step = to_double(k, v); }},
        {"clip_margin", [](SimConfig& c, const std::string& k, const std::string& v) { c.clip_margin = to_double(k, v); }},
        {"bootstrap", [](SimConfig& c, const std::string& k, const std::string& v) { c.bootstrap = to_bool(k, v); }},
        {"lattice_isometric_reflections", [](SimConfig& c, const std::string& k, const std::string& v) { c.lattice_isometric_reflections = to_bool(k, v); }},
        {"isometry_band", [](SimConfig& c, const std::string& k, const std::string& v) { c.isometry_band = to_double(k, v); }},
        {"snip_tol", [](SimConfig& c, const std::string& k, const std::string& v) { c.snip_tol = to_double(k, v); }},
        {"snip_max_iterations", [](SimConfig& c, const std::string& k, const std::string& v) { c.snip_max_iterations = to_int(k, v); }},
        {"threads", [](SimConfig& c, const std::string& k, const std::string& v) { c.threads = to_int(k, v); }},
    };
    return table;
}

}  // namespace

double SimConfig::sigma_for_speed(std::size_t speed_index) const {
    return speed_index < sigma_by_speed.size() ? sigma_by_speed[speed_index] : sigma;
}

TrackerConfig SimConfig::tracker(TargetKind kind, std::size_t speed_index) const {
    TrackerConfig t;
    t.kind = kind;
    t.sigma = sigma_for_speed(speed_index);
    t.initial_step = initial_step;
    t.min_step = min_step;
    t.max_step = max_step;
    t.clip_margin = clip_margin;
    return t;
}

void SimConfig::validate() const {
    if (m < 1 || m > 64) fail("m must lie in [1, 64]");
    if (n_fft < 2) fail("n_fft must be at least 2");
    if (n_pilots < 2 || n_pilots > n_fft) fail("n_pilots must lie in [2, n_fft]");
    if (lattice_order < 1) fail("lattice_order must be at least 1");
    if (lattice_nodes < 0 || effective_lattice_nodes() > n_fft) fail("lattice_nodes must lie in [0, n_fft]");
    if (effective_lattice_nodes() - 1 > lattice_order) fail("lattice_nodes may exceed lattice_order by at most one");
    if (angle_delay_taps < 0 || effective_angle_delay_taps() > n_fft) fail("angle_delay_taps must lie in [0, n_fft]");
    try {
        pdp.validate();
    } catch (const Error& e) {
        fail(std::string("pdp: ") + e.what());
    }
    if (!(bandwidth_hz > 0.0)) fail("bandwidth_hz must be positive");
    if (speed_kmh.empty()) fail("speed_kmh needs at least one value");
    for (double v : speed_kmh)
        if (!(v >= 0.0)) fail("speed_kmh values must be non-negative");
    if (!(carrier_hz > 0.0) || !(symbol_s > 0.0)) fail("carrier_hz and symbol_s must be positive");
    if (!alpha_override.empty()) {
        if (alpha_override.size() != static_cast<std::size_t>(m * m)) fail("alpha_override needs m*m values");
        for (double a : alpha_override)
            if (!(a >= 0.0 && a <= 1.0)) fail("alpha_override values must lie in [0, 1]");
    }
    if (snr_db.empty()) fail("snr_db needs at least one value");
    if (n_frames < 1) fail("n_frames must be at least 1");
    if (n_seeds < 1) fail("n_seeds must be at least 1");
    if (schemes.empty()) fail("schemes needs at least one entry");
    for (const auto& s : schemes) {
        if (s == kPerfectScheme) continue;
        try {
            parse_scheme(s);
        } catch (const Error&) {
            fail("unknown scheme '" + s + "'");
        }
    }
    for (std::size_t i = 0; i < schemes.size(); ++i)
        if (std::find(schemes.begin() + static_cast<long>(i) + 1, schemes.end(), schemes[i]) != schemes.end())
            fail("scheme '" + schemes[i] + "' listed twice");
    if (!(sigma > 1.0)) fail("sigma must exceed 1");
    if (!sigma_by_speed.empty()) {
        if (sigma_by_speed.size() != speed_kmh.size()) fail("sigma_by_speed needs one value per speed");
        for (double s : sigma_by_speed)
            if (!(s > 1.0)) fail("sigma_by_speed values must exceed 1");
    }
    if (!(min_step > 0.0) || !(initial_step >= min_step) || !(max_step >= initial_step))
        fail("steps must satisfy 0 < min_step <= initial_step <= max_step");
    if (!(clip_margin > 0.0 && clip_margin < 1.0)) fail("clip_margin must lie in (0, 1)");
    if (!(isometry_band > 0.0 && isometry_band < 1.0)) fail("isometry_band must lie in (0, 1)");
    if (!(snip_tol > 0.0)) fail("snip_tol must be positive");
    if (snip_max_iterations < 0) fail("snip_max_iterations must be non-negative");
    if (threads < 0) fail("threads must be non-negative");
}

SimConfig parse_config(std::string_view text) {
    SimConfig cfg;
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        const std::string value = trim(std::string_view(t).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen.count(key)) fail("line " + std::to_string(lineno) + ": key '" + key + "' repeated");
        seen[key] = lineno;
        if (value.empty()) fail("line " + std::to_string(lineno) + ": missing value for '" + key + "'");
        it->second(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void apply_full_scale(SimConfig& cfg) {
    cfg.n_fft = 4096;
    struct Setup {
        int m, pilots, order;
    };
    for (const Setup s : {Setup{4, 4, 3}, Setup{8, 4, 5}, Setup{12, 8, 7}, Setup{15, 8, 7}}) {
        if (cfg.m == s.m) {
            cfg.n_pilots = s.pilots;
            cfg.lattice_order = s.order;
        }
    }
    cfg.validate();
}

}  // namespace latprec
