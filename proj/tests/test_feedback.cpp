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

#include <cmath>
#include <numbers>

#include "latprec/feedback.hpp"
#include "latprec/lattice.hpp"
#include "latprec/matcore.hpp"
#include "support.hpp"

using namespace latprec;

TEST_CASE("feedback bit budgets") {
    CHECK(bit_budget(Scheme::Geodesic, 4, 4) == 128);
    CHECK(bit_budget(Scheme::Geodesic, 8, 8) == 1024);
    CHECK(bit_budget(Scheme::Givens, 12, 8) == 1152);
    CHECK(bit_budget(Scheme::Givens, 15, 8) == 1800);
    CHECK(bit_budget(Scheme::Lattice, 4, 3) == 96);
    CHECK(bit_budget(Scheme::Lattice, 15, 7) == 3150);
    CHECK(bit_budget(Scheme::AngleDelay, 4, 3) == 96);
    CHECK_THROWS_AS(bit_budget(Scheme::Lattice, 0, 3), Error);
    CHECK(parse_scheme("angle_delay") == Scheme::AngleDelay);
    CHECK(std::string(to_string(Scheme::Givens)) == "givens");
    CHECK_THROWS_AS(parse_scheme("wavelet"), Error);
    CHECK(parse_target_kind(to_string(TargetKind::NearIsometry)) == TargetKind::NearIsometry);
}

TEST_CASE("scalar tracker follows the hand-simulated sequence") {
    TrackerConfig cfg;
    cfg.kind = TargetKind::Real;
    cfg.sigma = 2.0;
    cfg.initial_step = 0.1;
    AdaptiveTrackerState s = make_tracker(CMat::Zero(1, 1), cfg);
    const CMat truth = CMat::Ones(1, 1);
    const double expect[] = {0.1, 0.3, 0.7, 1.5};
    for (double e : expect) {
        const BitVec b = encode_update(truth, s);
        REQUIRE(b.size() == 1);
        CHECK(b[0] == 1);
        CHECK(s.estimate(0, 0).real() == doctest::Approx(e).epsilon(1e-14));
    }
    // Overshoot: the sign flips and the step shrinks by sigma.
    const BitVec b = encode_update(truth, s);
    CHECK(b[0] == 0);
    CHECK(s.step(0, 0).real() == doctest::Approx(0.4));
    CHECK(s.estimate(0, 0).real() == doctest::Approx(1.1));
}

TEST_CASE("tie rule and step adaptation") {
    TrackerConfig cfg;
    cfg.initial_step = 0.05;
    AdaptiveTrackerState s = make_tracker(CMat::Zero(2, 2), cfg);
    const BitVec b = encode_update(CMat::Zero(2, 2), s);
    REQUIRE(b.size() == 8);
    for (auto v : b) CHECK(v == 1);
    CHECK((s.estimate - CMat::Constant(2, 2, cplx(0.05, 0.05))).norm() < 1e-15);

    // Equal signs multiply the step by exactly sigma, opposite signs divide.
    const double before = s.step(0, 0).real();
    encode_update(CMat::Constant(2, 2, cplx(5.0, 5.0)), s);
    CHECK(s.step(0, 0).real() == before * cfg.sigma);
    const double mid = s.step(0, 0).real();
    encode_update(CMat::Constant(2, 2, cplx(-5.0, -5.0)), s);
    CHECK(s.step(0, 0).real() == mid / cfg.sigma);
    CHECK(s.step(0, 0).imag() == mid / cfg.sigma);
}

TEST_CASE("steps stay within their clamps") {
    TrackerConfig cfg;
    cfg.kind = TargetKind::Real;
    AdaptiveTrackerState s = make_tracker(CMat::Zero(1, 1), cfg);
    for (int i = 0; i < 100; ++i) encode_update(CMat::Constant(1, 1, 1e9), s);
    CHECK(s.step(0, 0).real() == cfg.max_step);
    AdaptiveTrackerState t = make_tracker(CMat::Zero(1, 1), cfg);
    for (int i = 0; i < 100; ++i) encode_update(CMat::Constant(1, 1, (i % 2) ? 1e9 : -1e9), t);
    CHECK(t.step(0, 0).real() == cfg.min_step);
}

TEST_CASE("steady-state tracking of an AR(1) scalar") {
    TrackerConfig cfg;
    cfg.kind = TargetKind::Real;
    AdaptiveTrackerState s = make_tracker(CMat::Zero(1, 1), cfg);
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n(0.0, 1.0);
    const double alpha = 0.996;
    double x = n(rng);
    double err = 0.0, step = 0.0;
    int count = 0;
    for (int t = 0; t < 1000; ++t) {
        x = alpha * x + std::sqrt(1.0 - alpha * alpha) * n(rng);
        encode_update(CMat::Constant(1, 1, x), s);
        if (t >= 500) {
            err += std::abs(x - s.estimate(0, 0).real());
            step += s.step(0, 0).real();
            ++count;
        }
    }
    CHECK(err / count < 5.0 * step / count);
}

TEST_CASE("projections keep reflections stable and unitaries unitary") {
    std::mt19937_64 rng(5);
    for (TargetKind kind : {TargetKind::Contractive, TargetKind::NearIsometry}) {
        TrackerConfig cfg;
        cfg.kind = kind;
        AdaptiveTrackerState k = make_tracker(CMat::Zero(3, 3), cfg);
        TrackerConfig ucfg;
        ucfg.kind = TargetKind::Unitary;
        AdaptiveTrackerState r = make_tracker(CMat::Identity(3, 3), ucfg);
        for (int t = 0; t < 1000; ++t) {
            const CMat truthK = 1.3 * latprec::test::random_unitary(3, rng);
            encode_update(truthK, k);
            encode_update(latprec::test::random_unitary(3, rng), r);
            CHECK(spectral_norm(k.estimate) <= 1.0 - cfg.clip_margin + 1e-12);
            CHECK(unitarity_error(r.estimate) <= 1e-6);
            CHECK(stability_check(LatticeParams{{k.estimate}, r.estimate}));
        }
    }
}

TEST_CASE("angle targets wrap across the seam") {
    TrackerConfig cfg;
    cfg.kind = TargetKind::Angle;
    AdaptiveTrackerState s = make_tracker(CMat::Constant(1, 1, 3.1), cfg);
    // Truth just across pi: the short way is upward.
    const BitVec b = encode_update(CMat::Constant(1, 1, -3.1), s);
    CHECK(b[0] == 1);
    CHECK(std::abs(s.estimate(0, 0).real()) <= std::numbers::pi);
}

TEST_CASE("decoder replays the encoder exactly") {
    std::mt19937_64 rng(12);
    TrackerConfig cfg;
    cfg.kind = TargetKind::Contractive;
    AdaptiveTrackerState enc = make_tracker(CMat::Zero(2, 2), cfg);
    AdaptiveTrackerState dec = enc;
    for (int t = 0; t < 200; ++t) {
        const BitVec b = encode_update(latprec::test::random_contractive(2, rng), enc);
        decode_update(b, dec);
        CHECK(enc.estimate == dec.estimate);
        CHECK(enc.step == dec.step);
    }
    const CMat before = dec.estimate;
    decode_update(BitVec{}, dec);
    CHECK(dec.estimate == before);
    CHECK_THROWS_AS(decode_update(BitVec(3, 1), dec), Error);
    CHECK_THROWS_AS(encode_update(CMat::Zero(3, 3), enc), Error);
}

TEST_CASE("bit strings in hex") {
    const BitVec bits{1, 0, 1, 1, 0, 0, 0, 1, 1};
    const std::string hex = bits_to_hex(bits);
    CHECK(hex == "b18");
    CHECK(hex_to_bits(hex, bits.size()) == bits);
    CHECK_THROWS_AS(hex_to_bits("b1", 9), Error);
    CHECK_THROWS_AS(hex_to_bits("x18", 9), Error);
}

TEST_CASE("transcript round trip and replay") {
    std::mt19937_64 rng(77);
    TrackerConfig kc;
    kc.kind = TargetKind::Contractive;
    TrackerConfig uc;
    uc.kind = TargetKind::Unitary;
    std::vector<AdaptiveTrackerState> init{make_tracker(latprec::test::random_contractive(2, rng), kc),
                                           make_tracker(latprec::test::random_unitary(2, rng), uc)};
    TrackerBank enc(init), dec(init);
    Transcript tr{Scheme::Lattice, init, {}};
    for (long t = 1; t <= 50; ++t) {
        const std::vector<CMat> truths{latprec::test::random_contractive(2, rng), latprec::test::random_unitary(2, rng)};
        const BitVec b = enc.encode(truths);
        CHECK(static_cast<int>(b.size()) == enc.bits_per_frame());
        dec.decode(b);
        CHECK(estimate_hash(enc) == estimate_hash(dec));
        tr.frames.push_back({t, b, estimate_hash(enc)});
    }
    const std::string text = serialize_transcript(tr);
    const Transcript back = parse_transcript(text);
    CHECK(serialize_transcript(back) == text);
    const ReplayResult r = replay_transcript(back);
    CHECK(r.first_mismatch == -1);
    CHECK(r.frames == 50);
    const std::vector<CMat> a = r.final_state.estimates(), b = dec.estimates();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    Transcript bad = back;
    bad.frames[20].bits[3] ^= 1;
    CHECK(replay_transcript(bad).first_mismatch == 20);
    CHECK_THROWS_AS(parse_transcript("not a transcript"), Error);
}
