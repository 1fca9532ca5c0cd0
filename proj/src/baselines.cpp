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

#include "latprec/baselines.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "latprec/matcore.hpp"

namespace latprec {

std::vector<int> pilot_indices(int n_fft, int n_pilots) {
    if (n_fft < 1 || n_pilots < 1 || n_pilots > n_fft)
        throw Error(Errc::InvalidInput, "pilot count must lie in [1, n_fft]");
    if (n_pilots == 1) return {0};
    std::vector<int> idx(static_cast<std::size_t>(n_pilots));
    for (int i = 0; i < n_pilots; ++i)
        idx[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(static_cast<double>(i) * (n_fft - 1) / (n_pilots - 1)));
    return idx;
}

GivensParams givens_decompose(const CMat& V) {
    require_square_finite(V, "precoder");
    if (!is_unitary(V, 1e-8)) throw Error(Errc::InvalidInput, "givens_decompose needs a unitary matrix");
    const Eigen::Index m = V.rows();
    GivensParams p;
    p.m = static_cast<int>(m);
    CMat X = V;
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index i = k; i < m; ++i) {
            const double phi = std::arg(X(i, k));
            p.phis.push_back(phi);
            X.row(i) *= std::polar(1.0, -phi);
        }
        for (Eigen::Index l = m - 1; l > k; --l) {
            const double a = std::max(0.0, X(l - 1, k).real());
            const double b = std::max(0.0, X(l, k).real());
            const double theta = std::atan2(b, a);
            p.thetas.push_back(theta);
            const double c = std::cos(theta), s = std::sin(theta);
            const Eigen::RowVectorXcd r0 = X.row(l - 1), r1 = X.row(l);
            X.row(l - 1) = c * r0 + s * r1;
            X.row(l) = -s * r0 + c * r1;
        }
    }
    return p;
}

CMat givens_reconstruct(const GivensParams& p) {
    const int m = p.m;
    if (m < 1 || p.phis.size() != static_cast<std::size_t>(m * (m + 1) / 2) ||
        p.thetas.size() != static_cast<std::size_t>(m * (m - 1) / 2))
        throw Error(Errc::InvalidInput, "Givens parameter counts do not match m");
    // Undo the decomposition steps in reverse order.
    CMat X = CMat::Identity(m, m);
    std::size_t ip = p.phis.size(), it = p.thetas.size();
    for (int k = m - 1; k >= 0; --k) {
        for (int l = k + 1; l < m; ++l) {
            const double theta = p.thetas[--it];
            const double c = std::cos(theta), s = std::sin(theta);
            const Eigen::RowVectorXcd r0 = X.row(l - 1), r1 = X.row(l);
            X.row(l - 1) = c * r0 - s * r1;
            X.row(l) = s * r0 + c * r1;
        }
        for (int i = m - 1; i >= k; --i) X.row(i) *= std::polar(1.0, p.phis[--ip]);
    }
    return X;
}

namespace {

void check_pilots(std::size_t n_values, std::span<const int> pilots) {
    if (pilots.size() < 2) throw Error(Errc::InvalidInput, "interpolation needs at least two pilots");
    if (n_values != pilots.size()) throw Error(Errc::InvalidInput, "one value per pilot required");
    for (std::size_t i = 1; i < pilots.size(); ++i)
        if (pilots[i] <= pilots[i - 1]) throw Error(Errc::InvalidInput, "pilot positions must increase");
}

// Segment index and local coordinate for a target position.
std::pair<std::size_t, double> locate(std::span<const int> pilots, double target) {
    std::size_t j = 0;
    while (j + 2 < pilots.size() && target > pilots[j + 1]) ++j;
    const double t = (target - pilots[j]) / static_cast<double>(pilots[j + 1] - pilots[j]);
    return {j, t};
}

}  // namespace

GivensParams givens_interpolate(std::span<const GivensParams> at_pilots, std::span<const int> pilots, double target) {
    check_pilots(at_pilots.size(), pilots);
    const GivensParams& first = at_pilots.front();
    for (const auto& g : at_pilots)
        if (g.m != first.m || g.phis.size() != first.phis.size() || g.thetas.size() != first.thetas.size())
            throw Error(Errc::InvalidInput, "Givens parameters differ in size across pilots");
    const auto [j, t] = locate(pilots, target);
    GivensParams out = first;
    for (std::size_t i = 0; i < first.phis.size(); ++i) {
        // Unwrap along the pilots up to the segment end.
        double prev = at_pilots[0].phis[i], a = prev, b = prev;
        for (std::size_t q = 1; q <= j + 1; ++q) {
            const double cur = prev + wrap_angle(at_pilots[q].phis[i] - prev);
            if (q == j) a = cur;
            if (q == j + 1) b = cur;
            prev = cur;
        }
        if (j == 0) a = at_pilots[0].phis[i];
        out.phis[i] = wrap_angle(a + t * (b - a));
    }
    for (std::size_t i = 0; i < first.thetas.size(); ++i) {
        const double a = at_pilots[j].thetas[i], b = at_pilots[j + 1].thetas[i];
        out.thetas[i] = a + t * (b - a);
    }
    return out;
}

std::vector<CMat> givens_grid(std::span<const GivensParams> at_pilots, std::span<const int> pilots, int n_fft) {
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(n_fft));
    for (int k = 0; k < n_fft; ++k) out.push_back(givens_reconstruct(givens_interpolate(at_pilots, pilots, k)));
    return out;
}

namespace {

// Eigen-decomposition of a unitary matrix; returns false near the branch
// cut at -1.
bool unitary_log_parts(const CMat& M, CMat& U, RVec& phases) {
    Eigen::ComplexSchur<CMat> schur(M);
    if (schur.info() != Eigen::Success) throw Error(Errc::NumericalInstability, "Schur decomposition failed");
    U = schur.matrixU();
    const CMat& T = schur.matrixT();
    phases.resize(T.rows());
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
        if (std::abs(T(i, i) + 1.0) < 1e-9) return false;
        phases(i) = std::arg(T(i, i));
    }
    return true;
}

}  // namespace

CMat geodesic_interpolate(const CMat& Va, const CMat& Vb, double t) {
    require_square_finite(Va, "geodesic endpoint");
    require_square_finite(Vb, "geodesic endpoint");
    if (Va.rows() != Vb.rows()) throw Error(Errc::InvalidInput, "geodesic endpoints differ in size");
    if (!is_unitary(Va, 1e-8) || !is_unitary(Vb, 1e-8)) throw Error(Errc::InvalidInput, "geodesic endpoints must be unitary");
    if (!std::isfinite(t)) throw Error(Errc::InvalidInput, "geodesic parameter must be finite");
    CMat B = Vb;
    CMat U;
    RVec ph;
    if (!unitary_log_parts(Va.adjoint() * B, U, ph)) {
        const CMat M = Va.adjoint() * B;
        for (Eigen::Index c = 0; c < B.cols(); ++c) {
            const cplx d = M(c, c);
            if (std::abs(d) > 0.0) B.col(c) *= std::conj(d) / std::abs(d);
        }
        if (!unitary_log_parts(Va.adjoint() * B, U, ph))
            throw Error(Errc::BranchCut, "geodesic log hits an eigenvalue at -1");
    }
    if (t == 0.0) return Va;
    if (t == 1.0) return B;
    CVec d(ph.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) d(i) = std::polar(1.0, t * ph(i));
    return Va * U * d.asDiagonal() * U.adjoint();
}

std::vector<CMat> geodesic_grid(std::span<const CMat> at_pilots, std::span<const int> pilots, int n_fft) {
    check_pilots(at_pilots.size(), pilots);
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(n_fft));
    for (int k = 0; k < n_fft; ++k) {
        const auto [j, t] = locate(pilots, k);
        out.push_back(geodesic_interpolate(at_pilots[j], at_pilots[j + 1], t));
    }
    return out;
}

AngleDelayPrecoder angle_delay_truncate(std::span<const CMat> grid, int n_taps) {
    const int n = static_cast<int>(grid.size());
    if (n < 1 || n_taps < 1 || n_taps > n) throw Error(Errc::InvalidInput, "tap count must lie in [1, n_fft]");
    const Eigen::Index m = grid.front().rows();
    AngleDelayPrecoder ad;
    ad.n_fft = n;
    for (int l = 0; l < n_taps; ++l) {
        CMat acc = CMat::Zero(m, grid.front().cols());
        for (int k = 0; k < n; ++k) {
            const long kl = (static_cast<long>(k) * l) % n;
            acc += std::polar(1.0, 2.0 * M_PI * static_cast<double>(kl) / n) * grid[static_cast<std::size_t>(k)];
        }
        ad.taps.push_back(acc / static_cast<double>(n));
    }
    return ad;
}

std::vector<CMat> angle_delay_reconstruct(const AngleDelayPrecoder& ad) {
    if (ad.taps.empty() || ad.n_fft < static_cast<int>(ad.taps.size()))
        throw Error(Errc::InvalidInput, "angle-delay precoder needs 1..n_fft taps");
    const int n = ad.n_fft;
    std::vector<CMat> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        CMat acc = CMat::Zero(ad.taps.front().rows(), ad.taps.front().cols());
        for (std::size_t l = 0; l < ad.taps.size(); ++l) {
            const long kl = (static_cast<long>(k) * static_cast<long>(l)) % n;
            acc += std::polar(1.0, -2.0 * M_PI * static_cast<double>(kl) / n) * ad.taps[l];
        }
        out.push_back(std::move(acc));
    }
    return out;
}

}  // namespace latprec
