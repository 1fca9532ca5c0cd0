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

// Experiment description and its text file form.
//
// The file is a list of "key = value" lines. Values are numbers, bare
// words, true/false, or bracketed comma-separated lists. '#' starts a
// comment. Unknown keys are rejected.
//
//     m = 4
//     speed_kmh = [10, 50]
//     schemes = [perfect, lattice, geodesic]
//     pdp.powers_db = [0, -112, -132, -142, -153]

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "latprec/channel.hpp"
#include "latprec/feedback.hpp"

namespace latprec {

/// Scheme names accepted by the harness: the feedback schemes plus
/// "perfect", which uses the true precoders with zero feedback.
inline constexpr const char* kPerfectScheme = "perfect";

struct SimConfig {
    int m = 4;
    int n_fft = 256;
    int n_pilots = 4;
    int lattice_order = 3;
    /// Design nodes for the lattice, circularly equispaced; 0 means
    /// lattice_order + 1.
    int lattice_nodes = 0;
    /// Taps kept by the angle-delay scheme; 0 means n_pilots.
    int angle_delay_taps = 0;
    PowerDelayProfile pdp = PowerDelayProfile::mmwave_28ghz();
    double bandwidth_hz = 400e6;
    std::vector<double> speed_kmh{10.0};
    double carrier_hz = 28e9;
    double symbol_s = 75e-6;
    /// Row-major m x m AR(1) coefficients; empty means the Doppler value
    /// for every entry.
    std::vector<double> alpha_override;
    std::vector<double> snr_db{0.0, 5.0, 10.0, 15.0, 20.0};
    int n_frames = 40;
    int n_seeds = 20;
    std::vector<std::string> schemes{kPerfectScheme, "lattice", "geodesic", "givens", "angle_delay"};
    double sigma = 1.5;
    /// One step-growth factor per speed; empty means sigma everywhere.
    std::vector<double> sigma_by_speed;
    double initial_step = 0.05;
    double min_step = 1e-4;
    double max_step = 1.0;
    double clip_margin = 1e-3;
    /// Frame 0 hands every scheme an unquantized initial state. When false
    /// trackers start from zero reflections and identity unitaries.
    bool bootstrap = true;
    /// Lattice reflections whose frame-0 design has every singular value
    /// within isometry_band of 1 are tracked as near-isometries instead of
    /// by uniform spectral clipping.
    bool lattice_isometric_reflections = true;
    double isometry_band = 1e-2;
    double snip_tol = 1e-3;
    int snip_max_iterations = 2000;
    /// Worker threads; 0 uses the hardware concurrency.
    int threads = 0;

    int effective_lattice_nodes() const { return lattice_nodes > 0 ? lattice_nodes : lattice_order + 1; }
    int effective_angle_delay_taps() const { return angle_delay_taps > 0 ? angle_delay_taps : n_pilots; }
    double sigma_for_speed(std::size_t speed_index) const;
    TrackerConfig tracker(TargetKind kind, std::size_t speed_index) const;

    /// Throws Error(ConfigError) describing the first violated constraint.
    void validate() const;
};

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);

/// 4096 subcarriers plus the pilot count and lattice length paired with m
/// in the reference setups (m = 4, 8, 12, 15). Other m keep their values.
void apply_full_scale(SimConfig& cfg);

}  // namespace latprec
