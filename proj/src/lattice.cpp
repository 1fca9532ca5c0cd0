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

#include "latprec/lattice.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "latprec/allpass.hpp"
#include "latprec/matcore.hpp"

namespace latprec {

CMat TStage::stacked() const {
    const Eigen::Index m = t11.rows();
    CMat T(2 * m, 2 * m);
    T << t11, t12, t21, t22;
    return T;
}

TStage t_matrix(const CMat& K) {
    require_square_finite(K, "reflection matrix");
    if (spectral_norm(K) > 1.0 - kContractivityMargin)
        throw Error(Errc::NotContractive, "reflection matrix has sigma_max >= 1");
    const Eigen::Index m = K.rows();
    const CMat I = CMat::Identity(m, m);
    return {K, sqrtm_psd(I - K * K.adjoint()), sqrtm_psd(I - K.adjoint() * K), -K.adjoint()};
}

CMat clip_contractive(const CMat& K, double margin) {
    const double s = spectral_norm(K);
    const double bound = 1.0 - margin;
    if (s <= bound) return K;
    return K * (bound / s);
}

LatticeResponse::LatticeResponse(const LatticeParams& params) : params_(params) {
    require_square_finite(params_.residue, "lattice residue");
    for (const CMat& K : params_.kappas) {
        if (K.rows() != params_.residue.rows() || K.cols() != params_.residue.cols())
            throw Error(Errc::InvalidInput, "reflection matrix size differs from residue");
        stages_.push_back(t_matrix(K));
    }
}

CMat LatticeResponse::at(double omega) const {
    const Eigen::Index m = params_.residue.rows();
    const CMat I = CMat::Identity(m, m);
    const cplx zinv = std::polar(1.0, -omega);
    CMat G = params_.residue;
    for (std::size_t s = stages_.size(); s-- > 0;) {
        const TStage& T = stages_[s];
        const CMat Y = zinv * G;
        Eigen::PartialPivLU<CMat> lu(I - T.t22 * Y);
        if (!(lu.rcond() > 1e-14)) throw Error(Errc::NumericalInstability, "lattice feedback loop is singular");
        G = T.t11 + T.t12 * Y * lu.solve(T.t21);
    }
    return G;
}

CMat frequency_response(const LatticeParams& params, double omega) {
    return LatticeResponse(params).at(omega);
}

bool stability_check(const LatticeParams& params) {
    const CMat& R = params.residue;
    if (R.rows() == 0 || R.rows() != R.cols() || !is_unitary(R, 1e-8)) return false;
    const Eigen::Index m = R.rows();
    const CMat I = CMat::Identity(m, m);
    for (const CMat& K : params.kappas) {
        if (K.rows() != m || K.cols() != m || !all_finite(K)) return false;
        for (const CMat& X : {CMat(I - K.adjoint() * K), CMat(I - K * K.adjoint())}) {
            Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
            if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 1e-12)) return false;
        }
    }
    return true;
}

namespace {

double poly_norm(const std::vector<CMat>& p) {
    double acc = 0.0;
    for (const CMat& c : p) acc += c.squaredNorm();
    return std::sqrt(acc);
}

}  // namespace

LatticeParams lccde_to_lattice(const RationalAllPass& G) {
    std::vector<CMat> N = G.num.coeffs;
    std::vector<CMat> D = G.den.coeffs;
    if (N.empty() || N.size() != D.size())
        throw Error(Errc::InvalidInput, "numerator and denominator need equal, non-zero lengths");
    const Eigen::Index m = N.front().rows();
    for (std::size_t i = 0; i < N.size(); ++i) {
        require_square_finite(N[i], "numerator coefficient");
        require_square_finite(D[i], "denominator coefficient");
        if (N[i].rows() != m || D[i].rows() != m) throw Error(Errc::InvalidInput, "coefficient size mismatch");
    }
    const CMat I = CMat::Identity(m, m);

    auto normalize = [&]() {
        Eigen::PartialPivLU<CMat> lu(D.front());
        if (!(lu.rcond() > 1e-12)) throw Error(Errc::UnstableInput, "D_0 is singular");
        const CMat D0inv = lu.inverse();
        for (std::size_t i = 0; i < N.size(); ++i) {
            N[i] = N[i] * D0inv;
            D[i] = D[i] * D0inv;
        }
    };

    LatticeParams out;
    while (N.size() > 1) {
        normalize();
        const CMat K = N.front();
        if (spectral_norm(K) > 1.0 - kContractivityMargin)
            throw Error(Errc::UnstableInput, "extracted reflection matrix is not contractive");
        const TStage T = t_matrix(K);
        const CMat A = T.t21;
        const CMat Ainv = A.inverse();
        const CMat AhA_inv = (A.adjoint() * A).inverse();
        const CMat left_inv = (T.t12 + K * Ainv * K.adjoint()).inverse();

        const std::size_t L = N.size();
        std::vector<CMat> Dhat(L), Nhat(L);
        for (std::size_t i = 0; i < L; ++i) {
            Dhat[i] = AhA_inv * (D[i] - K.adjoint() * N[i]);
            Nhat[i] = N[i] - K * Dhat[i];
        }
        std::vector<CMat> Dn(L), Nn(L);
        for (std::size_t i = 0; i < L; ++i) {
            Dn[i] = A * Dhat[i];
            Nn[i] = left_inv * Nhat[i];
        }
        // Degree drops by one: the trailing denominator and leading
        // numerator coefficients must vanish for a lossless input.
        const double scale = 1.0 + poly_norm(Dn) + poly_norm(Nn);
        if (Dn.back().norm() > 1e-6 * scale || Nn.front().norm() > 1e-6 * scale)
            throw Error(Errc::UnstableInput, "input does not deflate; it is not a lossless filter of this length");
        Dn.pop_back();
        Nn.erase(Nn.begin());
        D = std::move(Dn);
        N = std::move(Nn);
        out.kappas.push_back(K);
    }
    normalize();
    out.residue = N.front();
    if (!is_unitary(out.residue, 1e-8)) throw Error(Errc::UnstableInput, "residue is not unitary");
    (void)I;
    return out;
}

}  // namespace latprec
