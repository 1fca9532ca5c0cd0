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

// Comparison precoder feedback schemes: piecewise geodesic interpolation
// of unitary pilots, Givens-angle parameterization with phase unwrapping,
// and truncation of the precoder's delay-domain response.

#pragma once

#include <span>
#include <vector>

#include "latprec/errors.hpp"

namespace latprec {

/// n_pilots subcarriers spread over [0, n_fft - 1], both ends included.
std::vector<int> pilot_indices(int n_fft, int n_pilots);

/// V = prod_k D_k prod_l G_{k,l}^T, column by column. D_k puts phases on
/// rows k..m-1 and the real rotations G_{k,l} act on adjacent rows.
struct GivensParams {
    int m = 0;
    std::vector<double> phis;    ///< m(m+1)/2, in (-pi, pi]
    std::vector<double> thetas;  ///< m(m-1)/2, in [0, pi/2]
};

GivensParams givens_decompose(const CMat& V);
CMat givens_reconstruct(const GivensParams& p);

/// Linear interpolation of every parameter along the pilot positions, with
/// phase jumps above pi unwrapped first. Targets outside the pilot span
/// take the nearest end segment.
GivensParams givens_interpolate(std::span<const GivensParams> at_pilots, std::span<const int> pilots, double target);

/// givens_interpolate + givens_reconstruct at subcarriers 0..n_fft-1.
std::vector<CMat> givens_grid(std::span<const GivensParams> at_pilots, std::span<const int> pilots, int n_fft);

/// Va exp(t log(Va^H Vb)). When Va^H Vb has an eigenvalue at -1 the columns
/// of Vb are phase-aligned to Va and the log is retried once.
CMat geodesic_interpolate(const CMat& Va, const CMat& Vb, double t);

/// Piecewise geodesic between adjacent pilots.
std::vector<CMat> geodesic_grid(std::span<const CMat> at_pilots, std::span<const int> pilots, int n_fft);

struct AngleDelayPrecoder {
    std::vector<CMat> taps;  ///< leading inverse-DFT taps of the grid
    int n_fft = 0;
};

AngleDelayPrecoder angle_delay_truncate(std::span<const CMat> grid, int n_taps);

/// Forward DFT of the zero-padded taps. Not unitary in general.
std::vector<CMat> angle_delay_reconstruct(const AngleDelayPrecoder& ad);

}  // namespace latprec
