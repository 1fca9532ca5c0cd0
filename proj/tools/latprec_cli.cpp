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

// Command-line front end: simulate, design, track, report.
//
// Exit codes: 0 success, 2 configuration or input error, 3 numerical
// failure (including failed simulation cells and transcript mismatches).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "latprec/allpass.hpp"
#include "latprec/config.hpp"
#include "latprec/feedback.hpp"
#include "latprec/harness.hpp"
#include "latprec/matcore.hpp"
#include "latprec/report.hpp"

namespace fs = std::filesystem;
using namespace latprec;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::ConfigError:
        case Errc::InvalidInput: return kConfigError;
        default: return kNumericalFailure;
    }
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(Errc::InvalidInput, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << text)) throw Error(Errc::InvalidInput, "cannot write '" + path.string() + "'");
}

void print_summary(const std::vector<SummaryRow>& rows) {
    std::printf("%-12s %9s %7s %6s %12s %10s %6s\n", "scheme", "speed", "snr_db", "seeds", "rate", "ci95", "bits");
    for (const auto& r : rows)
        std::printf("%-12s %9.3g %7.3g %6d %12.6f %10.6f %6.0f\n", r.scheme.c_str(), r.speed_kmh, r.snr_db, r.n_seeds,
                    r.rate_mean, r.rate_ci95, r.bits);
}

CMat matrix_from_json(const nlohmann::json& re, const nlohmann::json& im) {
    if (!re.is_array() || re.empty() || !im.is_array() || im.size() != re.size())
        throw Error(Errc::InvalidInput, "node value needs matching 're' and 'im' row arrays");
    const auto rows = static_cast<Eigen::Index>(re.size());
    const auto cols = static_cast<Eigen::Index>(re[0].size());
    CMat A(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (re[r].size() != static_cast<std::size_t>(cols) || im[r].size() != static_cast<std::size_t>(cols))
            throw Error(Errc::InvalidInput, "ragged node matrix");
        for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return A;
}

// Accepts [{"omega": w, "re": [[...]], "im": [[...]]}, ...] or the same
// array under a top-level "nodes" key.
std::vector<UnitaryNode> load_nodes(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidInput, std::string("nodes file: ") + e.what());
    }
    const nlohmann::json& arr = j.is_object() && j.contains("nodes") ? j["nodes"] : j;
    if (!arr.is_array()) throw Error(Errc::InvalidInput, "nodes file must hold an array of nodes");
    std::vector<UnitaryNode> nodes;
    try {
        for (const auto& n : arr) nodes.push_back({n.at("omega").get<double>(), matrix_from_json(n.at("re"), n.at("im"))});
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidInput, std::string("nodes file: ") + e.what());
    }
    return nodes;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, const std::string& out, bool full_scale, int threads) {
    SimConfig cfg = load_config(config_path);
    if (full_scale) apply_full_scale(cfg);
    if (threads > 0) cfg.threads = threads;
    const RunResult r = run_simulation(cfg, seed);
    const fs::path dir(out);
    write_report(r, dir);
    fs::create_directories(dir / "transcripts");
    for (const auto& t : r.transcripts) {
        char name[160];
        std::snprintf(name, sizeof name, "%s_%g_%llu.txt", t.scheme.c_str(), t.speed_kmh, static_cast<unsigned long long>(t.seed));
        spit(dir / "transcripts" / name, serialize_transcript(t.transcript));
    }
    print_summary(summarize(r));
    if (r.design_misses > 0) std::fprintf(stderr, "note: %d lattice designs missed snip_tol\n", r.design_misses);
    for (const auto& f : r.failures)
        std::fprintf(stderr, "cell failed: %s speed=%g seed=%llu: %s\n", f.scheme.c_str(), f.speed_kmh,
                     static_cast<unsigned long long>(f.seed), f.message.c_str());
    return r.failures.empty() ? kOk : kNumericalFailure;
}

int cmd_design(const std::string& nodes_path, int order, const std::string& out, double tol) {
    const std::vector<UnitaryNode> nodes = load_nodes(nodes_path);
    SnipOptions opt;
    opt.tol = tol;
    const SnipFit fit = snip_fit(nodes, order, opt);
    spit(out, serialize_lattice(fit.params));
    std::printf("residual %.6g after %d iterations\n", fit.residual, fit.iterations);
    if (fit.residual > tol) throw DesignNotConverged(fit.residual, tol);
    return kOk;
}

int cmd_track(const std::string& path) {
    const Transcript tr = parse_transcript(slurp(path));
    const ReplayResult res = replay_transcript(tr);
    std::printf("scheme %s, %zu trackers, %zu frames, %d bits/frame\n", to_string(tr.scheme), tr.initial.size(), res.frames,
                res.final_state.bits_per_frame());
    std::printf("final estimate hash %016llx\n", static_cast<unsigned long long>(estimate_hash(res.final_state)));
    if (res.first_mismatch >= 0) {
        std::fprintf(stderr, "replay diverges at frame %ld\n", tr.frames[static_cast<std::size_t>(res.first_mismatch)].t);
        return kNumericalFailure;
    }
    std::printf("replay matches the encoder at every frame\n");
    return kOk;
}

int cmd_report(const std::string& in, const std::string& out) {
    const RunResult r = read_results(in);
    write_report(r, out);
    print_summary(summarize(r));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"latprec: lattice all-pass precoder feedback for MIMO-OFDM"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 1;
    bool full_scale = false;
    int threads = 0;
    auto* sim = app.add_subcommand("simulate", "Run the link simulation and write CSV results");
    sim->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    sim->add_option("--seed", seed, "Base seed");
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_flag("--full-scale", full_scale, "4096 subcarriers with the reference pilot/order pairing");
    sim->add_option("--threads", threads, "Worker threads (0 = config value)");

    std::string nodes_path, design_out;
    int order = 0;
    double tol = 1e-3;
    auto* des = app.add_subcommand("design", "Fit a lattice all-pass filter to unitary nodes");
    des->add_option("--nodes", nodes_path, "JSON nodes file")->required()->check(CLI::ExistingFile);
    des->add_option("--order", order, "Lattice length M")->required();
    des->add_option("--out", design_out, "Output lattice record")->required();
    des->add_option("--tol", tol, "Node residual tolerance");

    std::string transcript_path;
    auto* trk = app.add_subcommand("track", "Replay a feedback transcript and verify it bit-exactly");
    trk->add_option("--transcript", transcript_path, "Transcript file")->required()->check(CLI::ExistingFile);

    std::string report_in, report_out;
    auto* rep = app.add_subcommand("report", "Rebuild CSV files and the summary from a result directory");
    rep->add_option("--in", report_in, "Input directory")->required()->check(CLI::ExistingDirectory);
    rep->add_option("--out", report_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (*sim) return cmd_simulate(config_path, seed, out_dir, full_scale, threads);
        if (*des) return cmd_design(nodes_path, order, design_out, tol);
        if (*trk) return cmd_track(transcript_path);
        if (*rep) return cmd_report(report_in, report_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericalFailure;
    }
    return kOk;
}
