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

// Direct Form II view of matrix all-pass filters, G(z) = N(z) D(z)^-1 with
// polynomials in z^-1, plus the interpolating design that produces lattice
// parameters from unitary samples.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latprec/errors.hpp"
#include "latprec/lattice.hpp"

namespace latprec {

/// sum_i coeffs[i] z^-i
struct MatrixPolynomial {
    std::vector<CMat> coeffs;

    int dim() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs.front().rows()); }
    int length() const { return static_cast<int>(coeffs.size()); }
    CMat at(cplx zinv) const;
};

struct RationalAllPass {
    MatrixPolynomial num;  ///< N
    MatrixPolynomial den;  ///< D, D_0 = I
};

/// N(e^{jw}) D(e^{jw})^-1. Throws NumericalInstability when D(e^{jw}) has
/// condition number above 1e12.
CMat evaluate(const RationalAllPass& G, double omega);

/// Cascades the lattice stages into (N, D); both have length M.
/// Throws UnstableLattice if stability_check fails.
RationalAllPass lattice_to_lccde(const LatticeParams& params);

struct UnitaryNode {
    double omega;
    CMat value;
};

struct SnipOptions {
    double tol = 1e-3;          ///< contract on max_k |G(w_k) - V_k|_F
    int max_iterations = 2000;
    /// The descent stops early once the residual is below tol * stop_ratio.
    double stop_ratio = 0.01;
    /// Reflection matrices are kept at sigma_max <= 1 - design_margin.
    double design_margin = 1e-5;
    /// Starting point; when empty a deterministic start is built from the
    /// nodes.
    std::optional<LatticeParams> warm_start;
};

struct SnipFit {
    LatticeParams params;
    double residual = 0.0;  ///< max_k |G(w_k) - V_k|_F
    int iterations = 0;
};

/// Fits a stable lattice of the given length to the unitary nodes by
/// descent in lattice coordinates; stability and para-unitarity hold at
/// every iterate. Never throws on a poor fit; inspect residual.
/// Fit loss sum_k |G(w_k) - V_k|_F^2. The optional gradients are the
/// conjugate Wirtinger derivatives dL/dX^* with respect to each reflection
/// and the residue (unconstrained), so dL = 2 Re sum tr(grad^H dX).
double snip_loss(std::span<const UnitaryNode> nodes, const LatticeParams& params,
                 std::vector<CMat>* grad_kappas = nullptr, CMat* grad_residue = nullptr);

SnipFit snip_fit(std::span<const UnitaryNode> nodes, int order, const SnipOptions& opts = {});

/// snip_fit plus the tolerance contract: throws DesignNotConverged when the
/// residual stays above opts.tol.
LatticeParams snip_design(std::span<const UnitaryNode> nodes, int order, const SnipOptions& opts = {});

/// Text record: header line, m, M, then every K and R row-major with
/// 17 significant digits. Parsing reproduces the doubles bit-exactly.
std::string serialize_lattice(const LatticeParams& params);
LatticeParams parse_lattice(std::string_view text);

}  // namespace latprec
