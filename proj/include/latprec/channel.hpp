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

// Tapped-delay-line MIMO channel: construction from a power-delay profile,
// first-order autoregressive time evolution and frequency response on the
// subcarrier grid.

#pragma once

#include <cstdint>
#include <vector>

#include "latprec/errors.hpp"

namespace latprec {

struct PowerDelayProfile {
    std::vector<double> powers_db;  ///< relative to the first component
    std::vector<double> delays_ns;  ///< first entry 0, strictly increasing

    /// 28 GHz millimetre-wave profile: LOS component plus four weak
    /// reflections.
    static PowerDelayProfile mmwave_28ghz();

    void validate() const;
};

struct TappedChannel {
    std::vector<CMat> taps;        ///< H[l], m x m
    std::vector<double> delays;    ///< in samples, delays[0] == 0
    std::vector<double> tap_gains; ///< linear amplitude of each tap's profile entry
    long t = 0;                    ///< time index, incremented by each evolution step

    int dim() const { return taps.empty() ? 0 : static_cast<int>(taps.front().rows()); }
};

struct DopplerParams {
    double speed_kmh = 0.0;
    double carrier_hz = 28e9;
    double symbol_s = 75e-6;
};

inline constexpr double kSpeedOfLight = 299792458.0;

/// Draws iid circular complex Gaussian taps (unit variance, scaled by the
/// profile amplitude) and converts delays to fractional samples.
TappedChannel pdp_to_taps(const PowerDelayProfile& pdp, int m, double bandwidth_hz, std::uint64_t seed);

/// H(e^{jw}) = sum_l H[l] e^{-j w tau_l}
CMat freq_response(const TappedChannel& ch, double omega);

/// Frequency responses at the n_fft subcarrier frequencies 2 pi k / n_fft.
std::vector<CMat> freq_grid(const TappedChannel& ch, int n_fft);

/// Angular frequency of subcarrier k, wrapped into (-pi, pi].
double subcarrier_omega(int k, int n_fft);

/// J0 by its power series, summed until terms fall below 1e-17.
double bessel_j0(double x);

/// Correlation coefficient J0(2 pi f_d T_s), f_d = v F_c / c.
/// Throws AlphaOutOfRange once the argument reaches the first zero of J0.
double doppler_alpha(const DopplerParams& p);

/// One AR(1) step applied to every entry of every tap:
/// h_t = alpha h_{t-1} + sqrt(1 - alpha^2) g_l w, w ~ CN(0, 1), where g_l is
/// the tap's profile amplitude (so each tap keeps its profile power).
TappedChannel evolve_ar1(const TappedChannel& ch, double alpha, std::uint64_t seed);

/// Per-entry variant; alpha is m x m and applied to every tap.
TappedChannel evolve_ar1(const TappedChannel& ch, const Eigen::MatrixXd& alpha, std::uint64_t seed);

}  // namespace latprec
