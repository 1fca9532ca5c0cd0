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

// Interpolating all-pass design by descent in lattice coordinates.
//
// Loss: L = sum_k |G(w_k) - V_k|_F^2. Gradients are conjugate (Wirtinger)
// cotangents, dL = 2 Re tr(Xbar^H dX), propagated backwards through the
// stage closures. Reflection matrices move in the flat chart and are clipped
// back inside the unit ball; the residue moves on the unitary group with a
// polar retraction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "latprec/allpass.hpp"
#include "latprec/matcore.hpp"

namespace latprec {
namespace {

struct NodeCache {
    std::vector<CMat> Y, Zi, W, P;  // indexed by stage
};

struct Eval {
    double loss = 0.0;
    double max_residual = 0.0;
};

// Solves A X + X A = C for Hermitian positive definite A.
CMat lyapunov_hermitian(const Eigen::SelfAdjointEigenSolver<CMat>& eig, const CMat& C) {
    const CMat& U = eig.eigenvectors();
    const RVec& l = eig.eigenvalues();
    CMat X = U.adjoint() * C * U;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) /= (l(i) + l(j));
    return U * X * U.adjoint();
}

class Objective {
public:
    Objective(std::span<const UnitaryNode> nodes, int m) : nodes_(nodes), m_(m) {}

    Eval value(const LatticeParams& p) const {
        const LatticeResponse resp(p);
        Eval e;
        for (const UnitaryNode& n : nodes_) {
            const double r = (resp.at(n.omega) - n.value).norm();
            e.loss += r * r;
            e.max_residual = std::max(e.max_residual, r);
        }
        return e;
    }

    Eval gradient(const LatticeParams& p, std::vector<CMat>& gK, CMat& gR) const {
        const std::size_t S = p.kappas.size();
        const CMat I = CMat::Identity(m_, m_);
        std::vector<TStage> T;
        T.reserve(S);
        for (const CMat& K : p.kappas) T.push_back(t_matrix(K));

        gK.assign(S, CMat::Zero(m_, m_));
        std::vector<CMat> gA(S, CMat::Zero(m_, m_)), gB(S, CMat::Zero(m_, m_));
        gR = CMat::Zero(m_, m_);
        Eval e;
        NodeCache c;
        c.Y.resize(S);
        c.Zi.resize(S);
        c.W.resize(S);
        c.P.resize(S);

        for (const UnitaryNode& n : nodes_) {
            const cplx q = std::polar(1.0, -n.omega);
            CMat G = p.residue;
            for (std::size_t s = S; s-- > 0;) {
                c.Y[s] = q * G;
                c.Zi[s] = (I + p.kappas[s].adjoint() * c.Y[s]).partialPivLu().inverse();
                c.W[s] = c.Zi[s] * T[s].t21;
                c.P[s] = c.Y[s] * c.W[s];
                G = p.kappas[s] + T[s].t12 * c.P[s];
            }
            CMat Gbar = G - n.value;
            const double r = Gbar.norm();
            e.loss += r * r;
            e.max_residual = std::max(e.max_residual, r);

            for (std::size_t s = 0; s < S; ++s) {
                const CMat& K = p.kappas[s];
                gK[s] += Gbar;
                gB[s] += Gbar * c.P[s].adjoint();
                const CMat Pbar = T[s].t12.adjoint() * Gbar;
                CMat Ybar = Pbar * c.W[s].adjoint();
                const CMat Wbar = c.Y[s].adjoint() * Pbar;
                const CMat Zibar = Wbar * T[s].t21.adjoint();
                gA[s] += c.Zi[s].adjoint() * Wbar;
                const CMat Zbar = -c.Zi[s].adjoint() * Zibar * c.Zi[s].adjoint();
                gK[s] += c.Y[s] * Zbar.adjoint();
                Ybar += K * Zbar;
                Gbar = std::conj(q) * Ybar;
            }
            gR += Gbar;
        }

        // Square-root adjoints: A = (I - K^H K)^(1/2), B = (I - K K^H)^(1/2).
        for (std::size_t s = 0; s < S; ++s) {
            const CMat& K = p.kappas[s];
            Eigen::SelfAdjointEigenSolver<CMat> ea(T[s].t21);
            Eigen::SelfAdjointEigenSolver<CMat> eb(T[s].t12);
            const CMat Xa = lyapunov_hermitian(ea, gA[s]);
            const CMat Xb = lyapunov_hermitian(eb, gB[s]);
            gK[s] -= K * (Xa + Xa.adjoint()) + (Xb + Xb.adjoint()) * K;
        }
        // The factor 2 of dL = 2 Re tr(.) is dropped everywhere; it only
        // rescales the step.
        return e;
    }

private:
    std::span<const UnitaryNode> nodes_;
    int m_;
};

CMat skew(const CMat& X) { return 0.5 * (X - X.adjoint()); }

void validate_nodes(std::span<const UnitaryNode> nodes, int order) {
    if (nodes.empty()) throw Error(Errc::InvalidInput, "design needs at least one node");
    if (order < 1) throw Error(Errc::InvalidInput, "design order must be at least 1");
    const Eigen::Index m = nodes.front().value.rows();
    std::vector<double> w;
    for (const UnitaryNode& n : nodes) {
        require_square_finite(n.value, "node value");
        if (n.value.rows() != m) throw Error(Errc::InvalidInput, "node values differ in size");
        if (!is_unitary(n.value, 1e-6)) throw Error(Errc::InvalidInput, "node value is not unitary");
        if (!std::isfinite(n.omega) || n.omega <= -M_PI || n.omega > M_PI)
            throw Error(Errc::InvalidInput, "node frequency outside (-pi, pi]");
        w.push_back(n.omega);
    }
    std::sort(w.begin(), w.end());
    if (std::adjacent_find(w.begin(), w.end()) != w.end()) throw Error(Errc::InvalidInput, "node frequencies repeat");
    if (order < static_cast<int>(nodes.size()) - 1)
        throw Error(Errc::InvalidInput, "design order is below the node count minus one");
}

LatticeParams default_start(std::span<const UnitaryNode> nodes, int order) {
    std::vector<std::size_t> idx(nodes.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return nodes[a].omega < nodes[b].omega; });
    const CMat& Vmed = nodes[idx[(idx.size() - 1) / 2]].value;
    const Eigen::Index m = Vmed.rows();
    LatticeParams p;
    p.kappas.assign(static_cast<std::size_t>(order - 1), CMat::Zero(m, m));
    p.residue = nearest_unitary(Vmed);
    return p;
}

// Nearly constant start: an outer reflection close to the unit sphere pins
// G to the node mean everywhere except a narrow band around the frequencies
// where the inner response closes the loop on -1. The residue phase is
// chosen so those bands fall between the nodes.
LatticeParams near_constant_start(std::span<const UnitaryNode> nodes, int order, double margin, const Objective& obj,
                                  const LatticeParams* previous, double accept) {
    const Eigen::Index m = nodes.front().value.rows();
    CMat S = CMat::Zero(m, m);
    for (const UnitaryNode& n : nodes) S += n.value;
    const CMat Vbar = nearest_unitary(S);
    // Keeping the previous residue makes consecutive designs continuous,
    // which is what a tracker downstream wants.
    if (previous && previous->length() == order) {
        LatticeParams p;
        p.kappas.assign(static_cast<std::size_t>(order - 1), CMat::Zero(m, m));
        p.kappas.front() = (1.0 - margin) * Vbar;
        p.residue = nearest_unitary(previous->residue);
        if (obj.value(p).max_residual <= accept) return p;
    }
    LatticeParams best;
    double best_loss = std::numeric_limits<double>::infinity();
    constexpr int kPhases = 64;
    for (int i = 0; i < kPhases; ++i) {
        LatticeParams p;
        p.kappas.assign(static_cast<std::size_t>(order - 1), CMat::Zero(m, m));
        p.kappas.front() = (1.0 - margin) * Vbar;
        p.residue = Vbar * std::polar(1.0, 2.0 * M_PI * i / kPhases);
        const double l = obj.value(p).loss;
        if (l < best_loss) {
            best_loss = l;
            best = std::move(p);
        }
    }
    return best;
}

struct Descent {
    LatticeParams params;
    Eval eval;
    int iterations = 0;
};

Descent descend(LatticeParams p, const Objective& obj, int m, std::size_t n_nodes, double margin,
                const SnipOptions& opts) {
    std::vector<CMat> gK;
    CMat gR;
    Eval cur = obj.gradient(p, gK, gR);
    const double stop = opts.tol * opts.stop_ratio;
    double step = 0.5 / static_cast<double>(n_nodes);
    int it = 0;
    for (; it < opts.max_iterations && cur.max_residual > stop; ++it) {
        const CMat omega = skew(p.residue.adjoint() * gR);
        bool accepted = false;
        while (step > 1e-18) {
            LatticeParams trial;
            trial.kappas.resize(p.kappas.size());
            for (std::size_t s = 0; s < p.kappas.size(); ++s)
                trial.kappas[s] = clip_contractive(p.kappas[s] - step * gK[s], margin);
            trial.residue = nearest_unitary(p.residue * (CMat::Identity(m, m) - step * omega));
            const Eval e = obj.value(trial);
            if (e.loss < cur.loss) {
                p = std::move(trial);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        step *= 1.5;
        cur = obj.gradient(p, gK, gR);
    }
    return {std::move(p), cur, it};
}

}  // namespace

double snip_loss(std::span<const UnitaryNode> nodes, const LatticeParams& params, std::vector<CMat>* grad_kappas,
                 CMat* grad_residue) {
    const Objective obj(nodes, params.dim());
    if (grad_kappas == nullptr && grad_residue == nullptr) return obj.value(params).loss;
    std::vector<CMat> gK;
    CMat gR;
    const Eval e = obj.gradient(params, gK, gR);
    if (grad_kappas != nullptr) *grad_kappas = std::move(gK);
    if (grad_residue != nullptr) *grad_residue = std::move(gR);
    return e.loss;
}

SnipFit snip_fit(std::span<const UnitaryNode> nodes, int order, const SnipOptions& opts) {
    validate_nodes(nodes, order);
    const int m = static_cast<int>(nodes.front().value.rows());
    const double margin = std::max(opts.design_margin, 2.0 * kContractivityMargin);
    const Objective obj(nodes, m);

    SnipFit fit;
    if (order == 1) {
        // Constant filter: orthogonal Procrustes over the nodes.
        CMat S = CMat::Zero(m, m);
        for (const UnitaryNode& n : nodes) S += n.value;
        fit.params.residue = nearest_unitary(S);
        fit.residual = obj.value(fit.params).max_residual;
        return fit;
    }

    LatticeParams p;
    if (opts.warm_start && opts.warm_start->length() == order && opts.warm_start->dim() == m) {
        p = *opts.warm_start;
        for (CMat& K : p.kappas) K = clip_contractive(K, margin);
        p.residue = nearest_unitary(p.residue);
    } else {
        p = default_start(nodes, order);
    }
    Descent d = descend(std::move(p), obj, m, nodes.size(), margin, opts);
    int total = d.iterations;
    if (d.eval.max_residual > opts.tol) {
        const LatticeParams* prev = opts.warm_start ? &*opts.warm_start : nullptr;
        Descent alt = descend(near_constant_start(nodes, order, margin, obj, prev, opts.tol * opts.stop_ratio), obj, m,
                              nodes.size(), margin, opts);
        total += alt.iterations;
        if (alt.eval.loss < d.eval.loss) d = std::move(alt);
    }
    fit.params = std::move(d.params);
    fit.residual = d.eval.max_residual;
    fit.iterations = total;
    return fit;
}

LatticeParams snip_design(std::span<const UnitaryNode> nodes, int order, const SnipOptions& opts) {
    SnipFit fit = snip_fit(nodes, order, opts);
    if (!(fit.residual <= opts.tol)) throw DesignNotConverged(fit.residual, opts.tol);
    return std::move(fit.params);
}

}  // namespace latprec
