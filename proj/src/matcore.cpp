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

#include "latprec/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace latprec {

bool all_finite(const CMat& A) {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i < A.rows(); ++i)
            if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) return false;
    return true;
}

void require_square_finite(const CMat& A, const char* what) {
    if (A.rows() == 0 || A.rows() != A.cols())
        throw Error(Errc::InvalidInput, std::string(what) + " must be a non-empty square matrix");
    if (!all_finite(A)) throw Error(Errc::InvalidInput, std::string(what) + " has non-finite entries");
}

double wrap_angle(double a) {
    constexpr double pi = std::numbers::pi;
    double w = std::remainder(a, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

void canonicalize_column_phases(CMat& V, CMat* U) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        Eigen::Index best = 0;
        double best_mag = -1.0;
        for (Eigen::Index i = 0; i < V.rows(); ++i) {
            const double mag = std::abs(V(i, j));
            if (mag > best_mag) {
                best_mag = mag;
                best = i;
            }
        }
        if (best_mag <= 0.0) continue;
        const cplx rot = std::conj(V(best, j)) / best_mag;
        V.col(j) *= rot;
        V(best, j) = cplx(best_mag, 0.0);
        if (U != nullptr) U->col(j) *= rot;
    }
}

SvdResult svd(const CMat& A) {
    require_square_finite(A, "svd input");
    Eigen::JacobiSVD<CMat> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
    canonicalize_column_phases(out.V, &out.U);
    return out;
}

CMat sqrtm_psd(const CMat& A) {
    require_square_finite(A, "sqrtm_psd input");
    const double scale = std::max(1.0, A.norm());
    if ((A - A.adjoint()).norm() > 1e-10 * scale)
        throw Error(Errc::NotPSD, "matrix is not Hermitian");
    const CMat H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> eig(H);
    if (eig.info() != Eigen::Success) throw Error(Errc::NumericalInstability, "eigensolver failed");
    RVec lam = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-12 * scale) throw Error(Errc::NotPSD, "matrix has a negative eigenvalue");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    const CMat& Q = eig.eigenvectors();
    CMat B = Q * lam.asDiagonal() * Q.adjoint();
    return 0.5 * (B + B.adjoint());
}

namespace {

// |a^H b|^2 written so that swapping the arguments only negates the
// imaginary accumulator; the result is identical in both orders.
double abs2_inner(const CMat& A, Eigen::Index ca, const CMat& B, Eigen::Index cb) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const double ar = A(i, ca).real(), ai = A(i, ca).imag();
        const double br = B(i, cb).real(), bi = B(i, cb).imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return re * re + im * im;
}

double chordal_sum(const CMat& A, const CMat& B) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < A.cols(); ++k) acc += std::max(0.0, 1.0 - abs2_inner(A, k, B, k));
    return std::sqrt(acc);
}

}  // namespace

double flag_distance(const CMat& V1, const CMat& V2) {
    if (V1.rows() != V2.rows() || V1.cols() != V2.cols())
        throw Error(Errc::InvalidInput, "flag_distance shape mismatch");
    require_square_finite(V1, "flag_distance argument");
    require_square_finite(V2, "flag_distance argument");
    if (!is_unitary(V1) || !is_unitary(V2))
        throw Error(Errc::InvalidInput, "flag_distance requires unitary arguments");
    return chordal_sum(V1, V2);
}

double column_chordal_distance(const CMat& A, const CMat& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw Error(Errc::InvalidInput, "column_chordal_distance shape mismatch");
    CMat An = A, Bn = B;
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
        const double na = An.col(k).norm(), nb = Bn.col(k).norm();
        if (na == 0.0 || nb == 0.0) throw Error(Errc::InvalidInput, "zero column in chordal distance");
        An.col(k) /= na;
        Bn.col(k) /= nb;
    }
    return chordal_sum(An, Bn);
}

double unitarity_error(const CMat& V) {
    return (V.adjoint() * V - CMat::Identity(V.cols(), V.cols())).norm();
}

bool is_unitary(const CMat& V, double tol) {
    return V.rows() == V.cols() && all_finite(V) && unitarity_error(V) <= tol;
}

CMat nearest_unitary(const CMat& A) {
    require_square_finite(A, "nearest_unitary input");
    Eigen::JacobiSVD<CMat> solver(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return solver.matrixU() * solver.matrixV().adjoint();
}

double spectral_norm(const CMat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> solver(A);
    return solver.singularValues()(0);
}

}  // namespace latprec
