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

// Matrix lattice realization of para-unitary (all-pass) filters.
//
// A lattice of length M holds reflection matrices K_0 ... K_{M-2} and a
// unitary residue R. Stage k is the 2m x 2m unitary
//
//     T_k = [ K_k                  (I - K_k K_k^H)^(1/2) ]
//           [ (I - K_k^H K_k)^(1/2)  -K_k^H              ]
//
// with port 2 closed through a unit delay onto the shorter lattice that
// follows it. K_0 is the outermost stage, so G(z -> inf) = K_0, and R is
// what remains after the last stage.

#pragma once

#include <cstddef>
#include <vector>

#include "latprec/errors.hpp"

namespace latprec {

struct RationalAllPass;

/// Strict contractivity margin on sigma_max(K) accepted by t_matrix.
inline constexpr double kContractivityMargin = 1e-9;

struct LatticeParams {
    std::vector<CMat> kappas;  ///< K_0 ... K_{M-2}
    CMat residue;              ///< R, unitary

    int dim() const { return static_cast<int>(residue.rows()); }
    /// M: number of stored matrices (stages + residue).
    int length() const { return static_cast<int>(kappas.size()) + 1; }
    /// Complex scalars stored: M m^2.
    std::size_t complex_parameter_count() const {
        return static_cast<std::size_t>(length()) * static_cast<std::size_t>(dim() * dim());
    }
};

struct TStage {
    CMat t11, t12, t21, t22;
    CMat stacked() const;
};

TStage t_matrix(const CMat& K);

/// Stage-by-stage port-2 closure, starting from G = R:
///   G <- T11 + T12 z^-1 G (I - T22 z^-1 G)^-1 T21.
/// The T-parameters are computed once; use this when evaluating many
/// frequencies.
class LatticeResponse {
public:
    explicit LatticeResponse(const LatticeParams& params);

    CMat at(double omega) const;
    const LatticeParams& params() const { return params_; }
    const std::vector<TStage>& stages() const { return stages_; }

private:
    LatticeParams params_;
    std::vector<TStage> stages_;  // stages_[k] belongs to kappas[k]
};

CMat frequency_response(const LatticeParams& params, double omega);

/// Algorithm: normalize D_0 = I, peel K = N_0, deflate by one, repeat.
LatticeParams lccde_to_lattice(const RationalAllPass& G);

/// True iff every I - K^H K and I - K K^H has minimum eigenvalue > 1e-12
/// and R is unitary to 1e-8.
bool stability_check(const LatticeParams& params);

/// Scales K so that sigma_max(K) <= 1 - margin. Returns K unchanged when it
/// already satisfies the bound.
CMat clip_contractive(const CMat& K, double margin);

}  // namespace latprec
