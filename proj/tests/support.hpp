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

#include <cstdint>
#include <random>

#include "latprec/errors.hpp"
#include "latprec/lattice.hpp"

namespace latprec::test {

inline CMat gaussian(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    CMat A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = cplx(n(rng), n(rng));
    return A;
}

// Haar-like unitary from the QR factor of a complex Gaussian matrix.
inline CMat random_unitary(int m, std::mt19937_64& rng) {
    Eigen::HouseholderQR<CMat> qr(gaussian(m, m, rng));
    CMat Q = qr.householderQ();
    const CMat R = qr.matrixQR();
    for (int j = 0; j < m; ++j) Q.col(j) *= std::polar(1.0, std::arg(R(j, j)));
    return Q;
}

// Random matrix with largest singular value drawn from [0, smax).
inline CMat random_contractive(int m, std::mt19937_64& rng, double smax = 0.95) {
    const CMat A = gaussian(m, m, rng);
    Eigen::JacobiSVD<CMat> svd(A);
    std::uniform_real_distribution<double> u(0.0, smax);
    return A * (u(rng) / svd.singularValues()(0));
}

inline LatticeParams random_lattice(int m, int M, std::mt19937_64& rng, double smax = 0.95) {
    LatticeParams p;
    for (int s = 0; s + 1 < M; ++s) p.kappas.push_back(random_contractive(m, rng, smax));
    p.residue = random_unitary(m, rng);
    return p;
}

inline double unitarity_gap(const CMat& G) {
    return (G.adjoint() * G - CMat::Identity(G.cols(), G.cols())).norm();
}

}  // namespace latprec::test
