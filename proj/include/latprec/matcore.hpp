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

// Dense complex kernels used throughout the library: canonical SVD,
// principal square roots of PSD matrices, unitarity helpers and subspace
// distances. Everything here is a pure function of its arguments.

#pragma once

#include "latprec/errors.hpp"

namespace latprec {

struct SvdResult {
    CMat U;
    RVec S;  ///< descending
    CMat V;  ///< columns phase-canonicalized
};

/// SVD of a square matrix, A = U diag(S) V^H.
///
/// Each column of V is rotated so that its largest-magnitude entry (lowest
/// row index on ties) is real and non-negative; U absorbs the matching
/// phase. Inside a block of repeated singular values the basis is whatever
/// the Jacobi sweep produced, so only the spanned subspace is meaningful.
SvdResult svd(const CMat& A);

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Eigenvalues down to -1e-12 (relative to max(1, |A|_F)) are clamped to 0.
CMat sqrtm_psd(const CMat& A);

/// Per-column chordal distance sqrt(sum_k 1 - |v1_k^H v2_k|^2) between two
/// unitary matrices. Insensitive to column phases; symmetric bit-for-bit.
double flag_distance(const CMat& V1, const CMat& V2);

/// Same measure as flag_distance but for arbitrary full-column-rank
/// matrices: columns are normalized first. Used when scoring precoders
/// that are not unitary.
double column_chordal_distance(const CMat& A, const CMat& B);

/// |V^H V - I|_F
double unitarity_error(const CMat& V);
bool is_unitary(const CMat& V, double tol = 1e-8);

/// Nearest unitary matrix in Frobenius norm (unitary polar factor).
CMat nearest_unitary(const CMat& A);

double spectral_norm(const CMat& A);
bool all_finite(const CMat& A);

/// Throws InvalidInput unless A is square and finite.
void require_square_finite(const CMat& A, const char* what);

/// Rotates every column of V so its largest-magnitude entry is real >= 0.
/// When U is given its columns receive the same rotation.
void canonicalize_column_phases(CMat& V, CMat* U = nullptr);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace latprec
