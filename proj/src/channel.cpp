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

#include "latprec/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "latprec/matcore.hpp"

namespace latprec {

namespace {

constexpr double kFirstBesselZero = 2.404825557695773;

cplx circular_gaussian(std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

}  // namespace

PowerDelayProfile PowerDelayProfile::mmwave_28ghz() {
    return {{0.0, -112.0, -132.0, -142.0, -153.0}, {0.0, 381.0, 407.0, 1433.0, 1500.0}};
}

void PowerDelayProfile::validate() const {
    if (powers_db.empty() || powers_db.size() != delays_ns.size())
        throw Error(Errc::InvalidInput, "power-delay profile needs equal, non-zero lengths");
    if (delays_ns.front() != 0.0) throw Error(Errc::InvalidInput, "first delay must be 0");
    for (std::size_t i = 0; i < powers_db.size(); ++i) {
        if (!std::isfinite(powers_db[i]) || !std::isfinite(delays_ns[i]))
            throw Error(Errc::InvalidInput, "power-delay profile has non-finite entries");
        if (i > 0 && delays_ns[i] <= delays_ns[i - 1])
            throw Error(Errc::InvalidInput, "delays must be strictly increasing");
    }
}

TappedChannel pdp_to_taps(const PowerDelayProfile& pdp, int m, double bandwidth_hz, std::uint64_t seed) {
    pdp.validate();
    if (m < 1) throw Error(Errc::InvalidInput, "antenna count must be positive");
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw Error(Errc::InvalidInput, "bandwidth must be positive");

    std::mt19937_64 rng(seed);
    TappedChannel ch;
    for (std::size_t l = 0; l < pdp.powers_db.size(); ++l) {
        const double gain = std::pow(10.0, pdp.powers_db[l] / 20.0);
        CMat tap(m, m);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) tap(i, j) = gain * circular_gaussian(rng);
        ch.taps.push_back(std::move(tap));
        ch.delays.push_back(pdp.delays_ns[l] * 1e-9 * bandwidth_hz);
        ch.tap_gains.push_back(gain);
    }
    return ch;
}

CMat freq_response(const TappedChannel& ch, double omega) {
    if (ch.taps.empty()) throw Error(Errc::InvalidInput, "channel has no taps");
    CMat H = CMat::Zero(ch.dim(), ch.dim());
    for (std::size_t l = 0; l < ch.taps.size(); ++l)
        H += ch.taps[l] * std::polar(1.0, -omega * ch.delays[l]);
    return H;
}

double subcarrier_omega(int k, int n_fft) {
    return wrap_angle(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_fft));
}

std::vector<CMat> freq_grid(const TappedChannel& ch, int n_fft) {
    if (n_fft < 1) throw Error(Errc::InvalidInput, "n_fft must be positive");
    std::vector<CMat> grid;
    grid.reserve(static_cast<std::size_t>(n_fft));
    for (int k = 0; k < n_fft; ++k) grid.push_back(freq_response(ch, subcarrier_omega(k, n_fft)));
    return grid;
}

double bessel_j0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= -q / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (std::abs(term) < 1e-17) break;
    }
    return sum;
}

double doppler_alpha(const DopplerParams& p) {
    if (!(p.speed_kmh >= 0.0) || !(p.carrier_hz >= 0.0) || !(p.symbol_s >= 0.0))
        throw Error(Errc::InvalidInput, "Doppler parameters must be non-negative");
    const double fd = (p.speed_kmh / 3.6) / kSpeedOfLight * p.carrier_hz;
    const double arg = 2.0 * std::numbers::pi * fd * p.symbol_s;
    if (arg >= kFirstBesselZero)
        throw Error(Errc::AlphaOutOfRange, "2 pi f_d T_s is beyond the first zero of J0");
    return bessel_j0(arg);
}

TappedChannel evolve_ar1(const TappedChannel& ch, const Eigen::MatrixXd& alpha, std::uint64_t seed) {
    const int m = ch.dim();
    if (alpha.rows() != m || alpha.cols() != m) throw Error(Errc::InvalidInput, "alpha shape mismatch");
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        if (!(alpha.data()[i] >= 0.0 && alpha.data()[i] <= 1.0))
            throw Error(Errc::InvalidInput, "alpha must lie in [0, 1]");
    if (ch.tap_gains.size() != ch.taps.size()) throw Error(Errc::InvalidInput, "tap gains missing");

    std::mt19937_64 rng(seed);
    TappedChannel next = ch;
    for (std::size_t l = 0; l < ch.taps.size(); ++l) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                const double a = alpha(i, j);
                const cplx w = circular_gaussian(rng);
                next.taps[l](i, j) = a * ch.taps[l](i, j) + std::sqrt(1.0 - a * a) * ch.tap_gains[l] * w;
            }
        }
    }
    next.t = ch.t + 1;
    return next;
}

TappedChannel evolve_ar1(const TappedChannel& ch, double alpha, std::uint64_t seed) {
    return evolve_ar1(ch, Eigen::MatrixXd::Constant(ch.dim(), ch.dim(), alpha), seed);
}

}  // namespace latprec
