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

#include "latprec/precoder.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "latprec/matcore.hpp"

namespace latprec {

PrecoderGrid optimal_precoders(std::span<const CMat> H) {
    PrecoderGrid grid;
    grid.mats.reserve(H.size());
    for (const CMat& Hk : H) grid.mats.push_back(svd(Hk).V);
    return grid;
}

CMat align_precoder(const CMat& V, const CMat& ref) {
    if (V.rows() != ref.rows() || V.cols() != ref.cols()) throw Error(Errc::InvalidInput, "align_precoder shape mismatch");
    const Eigen::Index n = V.cols();
    const CMat C = ref.adjoint() * V;
    std::vector<bool> used_row(static_cast<std::size_t>(n), false), used_col(static_cast<std::size_t>(n), false);
    CMat out(V.rows(), n);
    for (Eigen::Index step = 0; step < n; ++step) {
        Eigen::Index bi = -1, bj = -1;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (used_row[static_cast<std::size_t>(i)]) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (used_col[static_cast<std::size_t>(j)]) continue;
                if (std::abs(C(i, j)) > best) {
                    best = std::abs(C(i, j));
                    bi = i;
                    bj = j;
                }
            }
        }
        used_row[static_cast<std::size_t>(bi)] = used_col[static_cast<std::size_t>(bj)] = true;
        const cplx c = C(bi, bj);
        out.col(bi) = V.col(bj) * (std::abs(c) > 0.0 ? std::conj(c) / std::abs(c) : cplx(1.0));
    }
    return out;
}

double zf_rate(const CMat& H, const CMat& P, const RateConfig& cfg) {
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw Error(Errc::InvalidInput, "gamma must be positive");
    if (H.cols() != P.rows() || H.rows() == 0 || P.cols() == 0)
        throw Error(Errc::InvalidInput, "channel/precoder shape mismatch");
    if (!all_finite(H) || !all_finite(P)) throw Error(Errc::InvalidInput, "non-finite channel or precoder");

    const int streams = cfg.n_streams > 0 ? cfg.n_streams : static_cast<int>(P.cols());
    if (streams > P.cols()) throw Error(Errc::InvalidInput, "more streams than precoder columns");

    const CMat Heq = H * P.leftCols(streams);
    const CMat gram = cfg.gamma * (Heq.adjoint() * Heq);
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success) throw Error(Errc::RankDeficient, "equivalent channel is rank deficient");
    const Eigen::VectorXd d = llt.matrixLLT().diagonal().real();
    if (d.minCoeff() <= 1e-6 * d.maxCoeff()) throw Error(Errc::RankDeficient, "equivalent channel is ill-conditioned");

    const CMat F = llt.solve(CMat::Identity(streams, streams));
    double rate = 0.0;
    for (int k = 0; k < streams; ++k) rate += std::log2(1.0 + 1.0 / F(k, k).real());
    return rate;
}

double grid_rate(std::span<const CMat> H, std::span<const CMat> P, const RateConfig& cfg, int* rank_deficient) {
    if (H.size() != P.size() || H.empty()) throw Error(Errc::InvalidInput, "grid length mismatch");
    double sum = 0.0;
    int deficient = 0;
    for (std::size_t k = 0; k < H.size(); ++k) {
        try {
            sum += zf_rate(H[k], P[k], cfg);
        } catch (const Error& e) {
            if (e.code() != Errc::RankDeficient) throw;
            ++deficient;
        }
    }
    if (rank_deficient != nullptr) *rank_deficient = deficient;
    return sum / static_cast<double>(H.size());
}

}  // namespace latprec
