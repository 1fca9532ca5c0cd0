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

#include "latprec/channel.hpp"
#include "support.hpp"

using namespace latprec;

namespace {

// J0 from its power series, summed until the terms vanish.
double j0_series(double x) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -(x * x / 4.0) / (static_cast<double>(k) * k);
        sum += term;
        if (std::abs(term) < 1e-18) break;
    }
    return sum;
}

double alpha_oracle(double kmh) {
    const double fd = kmh / 3.6 / 299792458.0 * 28e9;
    return j0_series(2.0 * std::numbers::pi * fd * 75e-6);
}

}  // namespace

TEST_CASE("Doppler coefficient against a series oracle") {
    CHECK(doppler_alpha({0.0, 28e9, 75e-6}) == 1.0);
    const double a10 = doppler_alpha({10.0, 28e9, 75e-6});
    const double a100 = doppler_alpha({100.0, 28e9, 75e-6});
    CHECK(std::abs(a10 - alpha_oracle(10.0)) < 1e-12);
    CHECK(std::abs(a100 - alpha_oracle(100.0)) < 1e-12);
    CHECK(std::abs(a10 - 0.996273) < 1e-5);
    CHECK(std::abs(a100 - 0.6602) < 1e-3);
    for (double x : {0.1, 1.0, 2.0, 2.3}) CHECK(std::abs(bessel_j0(x) - j0_series(x)) < 1e-13);

    try {
        doppler_alpha({2000.0, 28e9, 75e-6});
        FAIL("speed beyond the first zero accepted");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AlphaOutOfRange);
    }
}

TEST_CASE("profile to taps") {
    PowerDelayProfile one{{0.0}, {0.0}};
    const TappedChannel a = pdp_to_taps(one, 2, 400e6, 42);
    const TappedChannel b = pdp_to_taps(one, 2, 400e6, 42);
    REQUIRE(a.taps.size() == 1);
    CHECK(a.delays[0] == 0.0);
    CHECK(a.taps[0] == b.taps[0]);
    CHECK(pdp_to_taps(one, 2, 400e6, 43).taps[0] != a.taps[0]);

    // Entry variance 1 over many draws.
    double acc = 0.0;
    const int n = 4000;
    for (int s = 0; s < n; ++s) acc += pdp_to_taps(one, 1, 400e6, 1000 + s).taps[0].squaredNorm();
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.06));

    const TappedChannel t = pdp_to_taps(PowerDelayProfile::mmwave_28ghz(), 4, 400e6, 1);
    CHECK(t.taps.size() == 5);
    CHECK(t.delays[1] == doctest::Approx(381e-9 * 400e6));

    CHECK_THROWS_AS(pdp_to_taps(PowerDelayProfile{{}, {}}, 2, 400e6, 1), Error);
}

TEST_CASE("frequency response") {
    PowerDelayProfile one{{0.0}, {0.0}};
    const TappedChannel a = pdp_to_taps(one, 3, 400e6, 9);
    for (double w : {-2.0, 0.0, 1.3}) CHECK((freq_response(a, w) - a.taps[0]).norm() < 1e-15);

    const TappedChannel t = pdp_to_taps(PowerDelayProfile::mmwave_28ghz(), 2, 400e6, 9);
    CMat sum = CMat::Zero(2, 2);
    for (const CMat& h : t.taps) sum += h;
    CHECK((freq_response(t, 0.0) - sum).norm() < 1e-14);

    // Direct sum of delayed taps, fractional delays included.
    const double w = 0.37;
    CMat direct = CMat::Zero(2, 2);
    for (std::size_t l = 0; l < t.taps.size(); ++l) direct += t.taps[l] * std::polar(1.0, -w * t.delays[l]);
    CHECK((freq_response(t, w) - direct).norm() < 1e-14);

    const std::vector<CMat> grid = freq_grid(t, 16);
    REQUIRE(grid.size() == 16);
    CHECK((grid[5] - freq_response(t, subcarrier_omega(5, 16))).norm() < 1e-14);
}

TEST_CASE("AR(1) evolution") {
    const TappedChannel t = pdp_to_taps(PowerDelayProfile::mmwave_28ghz(), 2, 400e6, 5);
    const TappedChannel same = evolve_ar1(t, 1.0, 77);
    for (std::size_t l = 0; l < t.taps.size(); ++l) CHECK(same.taps[l] == t.taps[l]);
    CHECK(same.t == t.t + 1);

    // alpha = 0: the output depends only on the innovation seed.
    const TappedChannel other = pdp_to_taps(PowerDelayProfile::mmwave_28ghz(), 2, 400e6, 6);
    const TappedChannel x = evolve_ar1(t, 0.0, 77);
    const TappedChannel y = evolve_ar1(other, 0.0, 77);
    for (std::size_t l = 0; l < t.taps.size(); ++l) CHECK((x.taps[l] - y.taps[l]).norm() < 1e-15);

    CHECK_THROWS_AS(evolve_ar1(t, 1.5, 1), Error);
    CHECK_THROWS_AS(evolve_ar1(t, -0.1, 1), Error);

    // Stationary variance of the LOS tap stays at one.
    PowerDelayProfile one{{0.0}, {0.0}};
    double acc = 0.0;
    int n = 0;
    TappedChannel s = pdp_to_taps(one, 1, 400e6, 1);
    for (int k = 0; k < 20000; ++k) {
        s = evolve_ar1(s, 0.9, 500 + k);
        if (k > 100) {
            acc += s.taps[0].squaredNorm();
            ++n;
        }
    }
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.1));
}
