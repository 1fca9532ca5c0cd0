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

// End-to-end link simulation. For every (scheme, speed, seed) cell a
// channel trajectory is generated, the receiver derives the scheme's
// feedback targets from the true precoders, sends sign bits, and the
// transmitter rebuilds the full precoder grid from its decoder replica
// alone. Cells run on a worker pool; results come back in a fixed order.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latprec/config.hpp"
#include "latprec/feedback.hpp"

namespace latprec {

struct RateRow {
    std::string scheme;
    double speed_kmh = 0.0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    int frame = 0;
    double rate_bps_hz = 0.0;
    int bits = 0;
    double frob_err = 0.0;       ///< mean over subcarriers of |P_hat - V|_F
    double flag_err_mean = 0.0;  ///< mean over subcarriers of the column chordal distance
};

/// Lattice only: distance between tracked and designed reflections.
struct KappaRow {
    double speed_kmh = 0.0;
    std::uint64_t seed = 0;
    int frame = 0;
    double kappa_err = 0.0;  ///< sqrt(sum_k |K_hat_k - K_k|_F^2)
    double design_residual = 0.0;
};

/// Per-subcarrier flag distance averaged over the scored frames.
struct FlagRow {
    std::string scheme;
    double speed_kmh = 0.0;
    std::uint64_t seed = 0;
    int subcarrier = 0;
    double flag_err = 0.0;
};

struct CellFailure {
    std::string scheme;
    double speed_kmh = 0.0;
    std::uint64_t seed = 0;
    std::string message;
};

struct CellTranscript {
    std::string scheme;
    double speed_kmh = 0.0;
    std::uint64_t seed = 0;
    Transcript transcript;
};

struct RunResult {
    std::vector<RateRow> rates;
    std::vector<KappaRow> kappa;
    std::vector<FlagRow> flags;
    std::vector<CellFailure> failures;
    std::vector<CellTranscript> transcripts;
    /// Frames whose lattice design missed snip_tol (tracking continues on
    /// the best fit found).
    int design_misses = 0;
};

/// Channels seen by every scheme of one (speed, seed) cell, frames
/// 0..n_frames.
std::vector<TappedChannel> channel_trajectory(const SimConfig& cfg, std::size_t speed_index, std::uint64_t seed,
                                              int n_frames);

/// Seeds base_seed, base_seed + 1, ... (cfg.n_seeds of them). Frame 0
/// initializes; frames 1..n_frames are scored. Deterministic for a fixed
/// (cfg, base_seed) regardless of the thread count.
RunResult run_simulation(const SimConfig& cfg, std::uint64_t base_seed);

}  // namespace latprec
