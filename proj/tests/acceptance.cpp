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

// Acceptance suite: one PASS/FAIL line per criterion. With no arguments all
// criteria run; otherwise only the listed numbers. Exit status is non-zero
// when any selected criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "latprec/allpass.hpp"
#include "latprec/channel.hpp"
#include "latprec/feedback.hpp"
#include "latprec/harness.hpp"
#include "latprec/lattice.hpp"
#include "latprec/matcore.hpp"
#include "latprec/precoder.hpp"
#include "support.hpp"

using namespace latprec;
using namespace latprec::test;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double probe_unitarity(const LatticeParams& p, int probes) {
    const LatticeResponse resp(p);
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) worst = std::max(worst, unitarity_gap(resp.at(-pi + 2.0 * pi * k / probes)));
    return worst;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome budgets() {
    struct Row {
        Scheme s;
        int m, n, expect;
    };
    const Row rows[] = {
        {Scheme::Geodesic, 4, 4, 128},  {Scheme::Geodesic, 8, 4, 512},  {Scheme::Geodesic, 12, 8, 2304},
        {Scheme::Geodesic, 15, 8, 3600}, {Scheme::Givens, 4, 4, 64},     {Scheme::Givens, 8, 4, 256},
        {Scheme::Givens, 12, 8, 1152},   {Scheme::Givens, 15, 8, 1800},  {Scheme::Lattice, 4, 3, 96},
        {Scheme::Lattice, 8, 5, 640},    {Scheme::Lattice, 12, 7, 2016}, {Scheme::Lattice, 15, 7, 3150},
    };
    int bad = 0;
    for (const Row& r : rows) bad += bit_budget(r.s, r.m, r.n) != r.expect;
    return {bad == 0, fmt("%.0f of 12 table entries differ", bad)};
}

Outcome stage_unitarity() {
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int m : {1, 2, 4, 8})
        for (int i = 0; i < 250; ++i) {
            const CMat S = t_matrix(random_contractive(m, rng, 0.999)).stacked();
            worst = std::max(worst, unitarity_gap(S));
        }
    return {worst <= 1e-10, fmt("worst |T^H T - I|_F = %.3g over 1000 stages", worst)};
}

Outcome all_pass() {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<int> dm(1, 4), dM(1, 8);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) worst = std::max(worst, probe_unitarity(random_lattice(dm(rng), dM(rng), rng, 0.99), 512));
    return {worst <= 1e-8, fmt("worst |G^H G - I|_F = %.3g over 200 lattices x 512 probes", worst)};
}

Outcome round_trip() {
    std::mt19937_64 rng(1003);
    std::uniform_int_distribution<int> dm(1, 3), dM(1, 6);
    double wp = 0.0, wr = 0.0;
    for (int i = 0; i < 100; ++i) {
        const LatticeParams p = random_lattice(dm(rng), dM(rng), rng);
        const LatticeParams q = lccde_to_lattice(lattice_to_lccde(p));
        if (q.kappas.size() != p.kappas.size()) return {false, "stage count changed"};
        for (std::size_t k = 0; k < p.kappas.size(); ++k) wp = std::max(wp, (q.kappas[k] - p.kappas[k]).norm());
        wp = std::max(wp, (q.residue - p.residue).norm());
        for (int k = 0; k < 64; ++k) {
            const double w = -pi + 2.0 * pi * k / 64.0;
            wr = std::max(wr, (frequency_response(p, w) - frequency_response(q, w)).norm());
        }
    }
    return {wp <= 1e-8 && wr <= 1e-8, fmt("parameter error %.3g, response error %.3g", wp, wr)};
}

Outcome snip_mmwave() {
    double wr = 0.0, wu = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const TappedChannel ch = pdp_to_taps(PowerDelayProfile::mmwave_28ghz(), 4, 400e6, seed);
        const std::vector<CMat> V = optimal_precoders(freq_grid(ch, 256)).mats;
        std::vector<UnitaryNode> nodes;
        for (int i = 0; i < 4; ++i) nodes.push_back({subcarrier_omega(64 * i, 256), V[64 * i]});
        LatticeParams p;
        try {
            p = snip_design(nodes, 3);
        } catch (const DesignNotConverged& e) {
            return {false, fmt("seed %.0f did not converge, residual %.3g", static_cast<double>(seed), e.residual())};
        }
        for (const UnitaryNode& n : nodes) wr = std::max(wr, (frequency_response(p, n.omega) - n.value).norm());
        wu = std::max(wu, probe_unitarity(p, 512));
    }
    return {wr <= 1e-3 && wu <= 1e-8, fmt("5 channels: node residual %.3g, all-pass error %.3g", wr, wu)};
}

Outcome tracking_stability() {
    std::mt19937_64 rng(1006);
    const int m = 4;
    LatticeParams truth = random_lattice(m, 3, rng, 0.99);
    TrackerConfig kc;
    kc.kind = TargetKind::Contractive;
    TrackerConfig uc;
    uc.kind = TargetKind::Unitary;
    std::vector<AdaptiveTrackerState> init{make_tracker(CMat::Zero(m, m), kc), make_tracker(CMat::Zero(m, m), kc),
                                           make_tracker(CMat::Identity(m, m), uc)};
    TrackerBank bank(init);
    double worst = 0.0;
    int unstable = 0;
    for (int t = 0; t < 1000; ++t) {
        // Truth drifts and keeps running into the contractivity boundary.
        for (CMat& K : truth.kappas) K = clip_contractive(K + 0.05 * gaussian(m, m, rng), 1e-6);
        truth.residue = nearest_unitary(truth.residue + 0.05 * gaussian(m, m, rng));
        bank.encode(std::vector<CMat>{truth.kappas[0], truth.kappas[1], truth.residue});
        const std::vector<CMat> est = bank.estimates();
        const LatticeParams p{{est[0], est[1]}, est[2]};
        if (!stability_check(p)) {
            ++unstable;
            continue;
        }
        worst = std::max(worst, probe_unitarity(p, 32));
    }
    return {unstable == 0 && worst <= 1e-6,
            fmt("%.0f unstable states in 1000 updates, worst all-pass error %.3g", unstable, worst)};
}

Outcome replica() {
    // A 200-frame lattice session through the full link.
    SimConfig c;
    c.n_fft = 64;
    c.schemes = {"lattice"};
    c.snr_db = {10.0};
    c.n_frames = 200;
    c.n_seeds = 1;
    c.threads = 1;
    const RunResult r = run_simulation(c, 7);
    if (!r.failures.empty() || r.transcripts.size() != 1) return {false, "simulation cell failed"};
    const Transcript& tr = r.transcripts[0].transcript;
    const ReplayResult rep = replay_transcript(parse_transcript(serialize_transcript(tr)));

    // Encoder and decoder side by side, compared entry by entry.
    TrackerBank enc(tr.initial), dec(tr.initial);
    std::size_t differing = 0;
    for (const TranscriptFrame& f : tr.frames) {
        dec.decode(f.bits);
        enc.decode(f.bits);
        const std::vector<CMat> a = enc.estimates(), b = dec.estimates();
        for (std::size_t i = 0; i < a.size(); ++i) differing += (a[i].array() != b[i].array()).count();
        const LatticeParams pa{{a[0], a[1]}, a[2]}, pb{{b[0], b[1]}, b[2]};
        for (double w : {-2.0, 0.5, 3.0}) differing += (frequency_response(pa, w).array() != frequency_response(pb, w).array()).count();
    }
    const bool ok = tr.frames.size() == 200 && rep.first_mismatch == -1 && differing == 0;
    return {ok, fmt("%.0f frames, first hash mismatch %.0f, %.0f differing entries", static_cast<double>(tr.frames.size()),
                    static_cast<double>(rep.first_mismatch), static_cast<double>(differing))};
}

double j0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -(x * x / 4.0) / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

Outcome doppler() {
    const double a10 = doppler_alpha({10.0, 28e9, 75e-6});
    const double a100 = doppler_alpha({100.0, 28e9, 75e-6});
    auto oracle = [](double kmh) { return j0_series(2.0 * pi * kmh / 3.6 / kSpeedOfLight * 28e9 * 75e-6); };
    const bool ok = std::abs(a10 - 0.996273) <= 1e-5 && std::abs(a100 - 0.6602) <= 1e-3 &&
                    std::abs(a10 - oracle(10.0)) <= 1e-12 && std::abs(a100 - oracle(100.0)) <= 1e-12;
    return {ok, fmt("alpha(10) = %.7f, alpha(100) = %.5f", a10, a100)};
}

Outcome convergence() {
    SimConfig c;
    c.schemes = {"lattice"};
    c.speed_kmh = {50.0};
    c.snr_db = {10.0};
    c.n_frames = 30;
    c.n_seeds = 20;
    c.bootstrap = false;
    const RunResult r = run_simulation(c, 1);
    if (!r.failures.empty()) return {false, "simulation cell failed"};
    std::vector<double> first, last;
    for (const KappaRow& k : r.kappa) {
        if (k.frame == 1) first.push_back(k.kappa_err);
        if (k.frame == 30) last.push_back(k.kappa_err);
    }
    const double m1 = median(first), m30 = median(last);
    return {m30 <= 0.2 * m1, fmt("median reflection error frame 1 %.4f, frame 30 %.4f, ratio %.3f (need <= 0.2)", m1, m30, m30 / m1)};
}

Outcome rate_ordering() {
    SimConfig c;
    c.angle_delay_taps = 3;
    c.speed_kmh = {10.0};
    c.n_frames = 40;
    c.n_seeds = 20;
    const RunResult r = run_simulation(c, 1);
    if (!r.failures.empty()) return {false, "simulation cell failed"};
    // Mean over seeds and converged frames.
    std::map<std::pair<std::string, double>, std::pair<double, int>> acc;
    std::map<std::string, int> bits;
    for (const RateRow& row : r.rates) {
        bits[row.scheme] = row.bits;
        if (row.frame < 20) continue;
        auto& a = acc[{row.scheme, row.snr_db}];
        a.first += row.rate_bps_hz;
        ++a.second;
    }
    auto mean = [&](const std::string& s, double snr) {
        const auto& a = acc[{s, snr}];
        return a.first / a.second;
    };
    bool ok = bits["lattice"] == 96 && bits["angle_delay"] == 96 && bits["geodesic"] == 128;
    std::string detail;
    for (double snr : c.snr_db) {
        const double p = mean("perfect", snr), l = mean("lattice", snr), g = mean("geodesic", snr),
                     a = mean("angle_delay", snr);
        ok = ok && p >= l && l >= a && std::abs(l - g) <= 0.5;
        detail += fmt("[%.0f dB: perfect %.3f lattice %.3f geodesic %.3f", snr, p, l, g) + fmt(" angle-delay %.3f] ", a);
    }
    return {ok, detail};
}

Outcome zf_closed_form() {
    std::mt19937_64 rng(1011);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    double worst = 0.0;
    for (int m : {1, 2, 4, 8})
        for (int i = 0; i < 50; ++i) {
            CMat H = CMat::Zero(m, m);
            const double gamma = u(rng);
            double expect = 0.0;
            for (int k = 0; k < m; ++k) {
                H(k, k) = u(rng);
                expect += std::log2(1.0 + gamma * std::norm(H(k, k)));
            }
            RateConfig rc;
            rc.gamma = gamma;
            worst = std::max(worst, std::abs(zf_rate(H, CMat::Identity(m, m), rc) - expect));
            // Same channel seen through its optimal precoders.
            worst = std::max(worst, std::abs(grid_rate(std::vector<CMat>{H}, optimal_precoders(std::vector<CMat>{H}).mats, rc) - expect));
        }
    return {worst <= 1e-9, fmt("worst deviation %.3g over 400 diagonal channels", worst)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"feedback bit budgets", budgets},
        {"stage unitarity", stage_unitarity},
        {"all-pass on the whole circle", all_pass},
        {"lattice / difference-equation round trip", round_trip},
        {"interpolation design on the mmWave channel", snip_mmwave},
        {"stability under tracking", tracking_stability},
        {"encoder/decoder replica consistency", replica},
        {"Doppler coefficient", doppler},
        {"reflection tracking convergence at 50 km/h", convergence},
        {"rate ordering at equal or lower feedback", rate_ordering},
        {"zero-forcing rate closed forms", zf_closed_form},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(id)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
