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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <tuple>
#include <fstream>
#include <sstream>

#include "latprec/config.hpp"
#include "latprec/report.hpp"

using namespace latprec;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::InvalidInput;
}

RunResult small_result() {
    RunResult r;
    for (std::uint64_t seed : {1u, 2u, 3u})
        for (int frame = 1; frame <= 2; ++frame)
            r.rates.push_back({"lattice", 10.0, 5.0, seed, frame, 3.0 + 0.1 * static_cast<double>(seed) + 0.01 * frame, 96,
                               0.1 / 3.0, 0.2});
    r.kappa.push_back({10.0, 1, 1, 0.5, 1e-5});
    r.flags.push_back({"lattice", 10.0, 1, 0, 0.125});
    r.failures.push_back({"givens", 50.0, 4, "BranchCut: eigenvalue at -1, \"quoted\""});
    return r;
}

}  // namespace

TEST_CASE("config parsing") {
    const SimConfig c = parse_config(
        "# comment\n"
        "m = 2\n"
        "n_fft = 64   # trailing comment\n"
        "speed_kmh = [10, 50]\n"
        "schemes = [perfect, lattice]\n"
        "bootstrap = false\n"
        "pdp.powers_db = [0, -3]\n"
        "pdp.delays_ns = [0, 5]\n");
    CHECK(c.m == 2);
    CHECK(c.n_fft == 64);
    CHECK(c.speed_kmh == std::vector<double>{10.0, 50.0});
    CHECK(c.schemes == std::vector<std::string>{"perfect", "lattice"});
    CHECK_FALSE(c.bootstrap);
    CHECK(c.pdp.powers_db.size() == 2);
    CHECK(c.effective_lattice_nodes() == 4);
    CHECK(c.effective_angle_delay_taps() == 4);

    CHECK(code_of([] { parse_config("colour = red\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("m = 2\nm = 3\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("m = two\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("n_pilots = 300\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("lattice_order = 0\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("schemes = [lattice, wavelet]\n"); }) == Errc::ConfigError);
    CHECK(code_of([] { parse_config("sigma = 1.0\n"); }) == Errc::ConfigError);
}

TEST_CASE("per-speed tracker settings and full scale") {
    SimConfig c = parse_config("speed_kmh = [10, 50]\nsigma_by_speed = [1.4, 1.8]\n");
    CHECK(c.sigma_for_speed(1) == 1.8);
    CHECK(c.tracker(TargetKind::Unitary, 0).sigma == 1.4);
    CHECK(code_of([] { parse_config("speed_kmh = [10, 50]\nsigma_by_speed = [1.4]\n"); }) == Errc::ConfigError);

    for (auto [m, pilots, order] : {std::tuple{4, 4, 3}, {8, 4, 5}, {12, 8, 7}, {15, 8, 7}}) {
        SimConfig f;
        f.m = m;
        apply_full_scale(f);
        CHECK(f.n_fft == 4096);
        CHECK(f.n_pilots == pilots);
        CHECK(f.lattice_order == order);
    }
}

TEST_CASE("shipped desk profile parses") {
    const SimConfig c = load_config(std::string(LATPREC_SOURCE_DIR) + "/configs/desk.conf");
    CHECK(c.m == 4);
    CHECK(c.n_fft == 256);
    CHECK(c.angle_delay_taps == 3);
}

TEST_CASE("summary statistics") {
    const std::vector<SummaryRow> s = summarize(small_result());
    REQUIRE(s.size() == 1);
    CHECK(s[0].n_seeds == 3);
    // Per-seed means 3.115, 3.215, 3.315.
    CHECK(s[0].rate_mean == doctest::Approx(3.215));
    CHECK(s[0].rate_ci95 == doctest::Approx(1.96 * 0.1 / std::sqrt(3.0)));
    CHECK(s[0].bits == 96.0);
    CHECK(code_of([] { summarize(RunResult{}); }) == Errc::InvalidInput);
}

TEST_CASE("CSV schemas and round trips") {
    const RunResult r = small_result();
    const std::string rates = rates_csv(r.rates);
    CHECK(rates.rfind("scheme,speed_kmh,snr_db,seed,frame,rate_bps_hz,bits,frob_err,flag_err_mean\n", 0) == 0);
    CHECK(rates.find('\r') == std::string::npos);
    // 17 significant digits.
    CHECK(rates.find("0.033333333333333333") != std::string::npos);
    CHECK(rates_csv(parse_rates_csv(rates)) == rates);
    CHECK(kappa_csv(parse_kappa_csv(kappa_csv(r.kappa))) == kappa_csv(r.kappa));
    CHECK(flags_csv(parse_flags_csv(flags_csv(r.flags))) == flags_csv(r.flags));
    const std::vector<CellFailure> f = parse_failures_csv(failures_csv(r.failures));
    REQUIRE(f.size() == 1);
    CHECK(f[0].message == r.failures[0].message);

    RunResult one;
    one.rates.push_back(r.rates[0]);
    const std::string single = rates_csv(one.rates);
    CHECK(std::count(single.begin(), single.end(), '\n') == 2);

    CHECK_THROWS_AS(parse_rates_csv("scheme,rate\nlattice,1\n"), Error);
}

TEST_CASE("report directory round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "latprec_report_test";
    std::filesystem::remove_all(dir);
    const RunResult r = small_result();
    write_report(r, dir);
    const RunResult back = read_results(dir);
    CHECK(rates_csv(back.rates) == rates_csv(r.rates));
    CHECK(kappa_csv(back.kappa) == kappa_csv(r.kappa));
    CHECK(summary_csv(summarize(back)) == summary_csv(summarize(r)));
    std::filesystem::remove_all(dir);
}
