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

#pragma once

#include <span>
#include <vector>

#include "latprec/errors.hpp"

namespace latprec {

struct PrecoderGrid {
    std::vector<CMat> mats;  ///< one unitary precoder per subcarrier
    int n_fft() const { return static_cast<int>(mats.size()); }
};

struct RateConfig {
    double gamma = 1.0;  ///< linear SNR per stream
    int n_streams = 0;   ///< 0 means all m streams
};

/// Right singular vectors of every subcarrier channel, phase-canonicalized.
PrecoderGrid optimal_precoders(std::span<const CMat> H);

/// Column permutation and per-column phases of V that best match ref
/// (greedy on |ref^H V|, largest overlap first). The result spans the same
/// per-stream subspaces as V, so ZF rates are unchanged; it is used to keep
/// a precoder sequence continuous over time.
CMat align_precoder(const CMat& V, const CMat& ref);

/// Zero-forcing achievable rate in bits/s/Hz:
/// F = (gamma H_eq^H H_eq)^-1, rate = sum_k log2(1 + 1/F_kk), H_eq = H P.
/// Throws RankDeficient when H_eq^H H_eq cannot be inverted reliably.
double zf_rate(const CMat& H, const CMat& P, const RateConfig& cfg);

/// Mean of zf_rate over the subcarriers, in fixed subcarrier order.
/// Rank-deficient subcarriers contribute 0 and are counted in
/// rank_deficient when it is non-null.
double grid_rate(std::span<const CMat> H, std::span<const CMat> P, const RateConfig& cfg,
                 int* rank_deficient = nullptr);

}  // namespace latprec
