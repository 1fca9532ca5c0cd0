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

// One-bit adaptive tracking of matrix and scalar parameters.
//
// Each real component of a tracked quantity is sent as a single sign bit.
// Encoder and decoder run the same recursion on the same bits, so their
// estimates stay bit-identical without ever exchanging the estimate itself:
//
//     mu_t = mu_{t-1} * sigma    if b_t == b_{t-1}
//            mu_{t-1} / sigma    otherwise
//     x_t  = x_{t-1} + b_t mu_t
//
// The first update of a tracker has no previous bit and uses the initial
// step unchanged.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latprec/errors.hpp"

namespace latprec {

enum class Scheme { Geodesic, Givens, Lattice, AngleDelay };

const char* to_string(Scheme s) noexcept;
/// Accepts "geodesic", "givens", "lattice", "angle_delay".
Scheme parse_scheme(std::string_view name);

/// Feedback bits per frame. pilots_or_order is the pilot count for the
/// geodesic and Givens schemes, the number of stored matrices (reflections
/// plus residue) for the lattice, and the tap count for angle-delay.
int bit_budget(Scheme s, int m, int pilots_or_order);

enum class TargetKind {
    Free,         ///< complex entries, no projection
    Contractive,  ///< complex; spectrally clipped to sigma_max <= 1 - clip_margin
    Unitary,      ///< complex; projected to the nearest unitary matrix
    /// complex; projected to (1 - clip_margin) times the nearest unitary
    /// matrix. For reflections designed close to the unit sphere, where
    /// uniform scaling would leave the noise-induced spread of singular
    /// values in place.
    NearIsometry,
    Real,         ///< real parts only, one bit per entry
    Angle,        ///< real parts only, differences and estimates wrapped to (-pi, pi]
};

const char* to_string(TargetKind k) noexcept;
TargetKind parse_target_kind(std::string_view name);

struct TrackerConfig {
    TargetKind kind = TargetKind::Free;
    double sigma = 1.5;
    double initial_step = 0.05;
    double min_step = 1e-4;
    double max_step = 1.0;
    double clip_margin = 1e-3;
};

/// Step and last_sign keep the real-part value in .real() and the
/// imaginary-part value in .imag(). last_sign is 0 before the first update.
struct AdaptiveTrackerState {
    CMat estimate;
    CMat step;
    CMat last_sign;
    TrackerConfig cfg;

    int bits_per_update() const;
};

AdaptiveTrackerState make_tracker(const CMat& initial, const TrackerConfig& cfg);

/// 1 encodes +1, 0 encodes -1.
using BitVec = std::vector<std::uint8_t>;

/// Quantizes truth - estimate to sign bits (sign(0) = +1) and applies them.
BitVec encode_update(const CMat& truth, AdaptiveTrackerState& state);

/// Applies received bits. An empty stream leaves the state untouched.
void decode_update(std::span<const std::uint8_t> bits, AdaptiveTrackerState& state);

/// A group of trackers that share one feedback frame; bits are laid out
/// tracker by tracker, entries row-major, real part before imaginary part.
class TrackerBank {
public:
    TrackerBank() = default;
    explicit TrackerBank(std::vector<AdaptiveTrackerState> trackers);

    int bits_per_frame() const;
    BitVec encode(std::span<const CMat> truths);
    void decode(std::span<const std::uint8_t> bits);

    std::vector<CMat> estimates() const;
    const std::vector<AdaptiveTrackerState>& trackers() const { return trackers_; }

private:
    std::vector<AdaptiveTrackerState> trackers_;
};

/// FNV-1a over the raw bytes of every estimate.
std::uint64_t estimate_hash(const TrackerBank& bank);

/// MSB-first; the last hex digit is zero padded.
std::string bits_to_hex(std::span<const std::uint8_t> bits);
BitVec hex_to_bits(std::string_view hex, std::size_t n_bits);

struct TranscriptFrame {
    long t = 0;
    BitVec bits;
    std::uint64_t hash = 0;  ///< estimate_hash of the encoder after this frame
};

struct Transcript {
    Scheme scheme = Scheme::Lattice;
    std::vector<AdaptiveTrackerState> initial;
    std::vector<TranscriptFrame> frames;
};

std::string serialize_transcript(const Transcript& tr);
Transcript parse_transcript(std::string_view text);

struct ReplayResult {
    TrackerBank final_state;
    std::size_t frames = 0;
    /// Index into Transcript::frames of the first hash mismatch, or -1.
    long first_mismatch = -1;
};

ReplayResult replay_transcript(const Transcript& tr);

}  // namespace latprec
