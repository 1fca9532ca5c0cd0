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

#include "latprec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <thread>

#include "latprec/allpass.hpp"
#include "latprec/baselines.hpp"
#include "latprec/channel.hpp"
#include "latprec/lattice.hpp"
#include "latprec/matcore.hpp"
#include "latprec/precoder.hpp"

namespace latprec {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(splitmix(a) ^ (b * 0xd6e8feb86659fd93ULL)); }

class Trajectory {
public:
    Trajectory(const SimConfig& cfg, std::size_t speed_index, std::uint64_t seed) : cfg_(cfg), seed_(seed) {
        ch_ = pdp_to_taps(cfg.pdp, cfg.m, cfg.bandwidth_hz, mix(seed, 0));
        if (cfg.alpha_override.empty()) {
            const double a = doppler_alpha({cfg.speed_kmh[speed_index], cfg.carrier_hz, cfg.symbol_s});
            alpha_ = Eigen::MatrixXd::Constant(cfg.m, cfg.m, a);
        } else {
            alpha_ = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                cfg.alpha_override.data(), cfg.m, cfg.m);
        }
    }

    void advance() { ch_ = evolve_ar1(ch_, alpha_, mix(seed_, static_cast<std::uint64_t>(ch_.t) + 1)); }
    std::vector<CMat> grid() const { return freq_grid(ch_, cfg_.n_fft); }
    const TappedChannel& channel() const { return ch_; }

private:
    const SimConfig& cfg_;
    std::uint64_t seed_;
    TappedChannel ch_;
    Eigen::MatrixXd alpha_;
};

// Receiver-side target extraction and transmitter-side reconstruction for
// one feedback scheme.
class Link {
public:
    virtual ~Link() = default;
    virtual std::vector<CMat> targets(const std::vector<CMat>& V) = 0;
    /// Tracker states before any feedback: the targets themselves when
    /// bootstrapping, otherwise a neutral starting point.
    virtual std::vector<AdaptiveTrackerState> initial(const std::vector<CMat>& targets, bool bootstrap) const = 0;
    virtual std::vector<CMat> reconstruct(const std::vector<CMat>& estimates) const = 0;
};

CMat identity_like(const CMat& A) { return CMat::Identity(A.rows(), A.cols()); }

class GeodesicLink : public Link {
public:
    GeodesicLink(const SimConfig& cfg, std::size_t speed) : cfg_(cfg), speed_(speed), pilots_(pilot_indices(cfg.n_fft, cfg.n_pilots)) {}

    std::vector<CMat> targets(const std::vector<CMat>& V) override {
        std::vector<CMat> out;
        for (int p : pilots_) out.push_back(V[static_cast<std::size_t>(p)]);
        return out;
    }
    std::vector<AdaptiveTrackerState> initial(const std::vector<CMat>& t, bool bootstrap) const override {
        std::vector<AdaptiveTrackerState> out;
        for (const CMat& V : t) out.push_back(make_tracker(bootstrap ? V : identity_like(V), cfg_.tracker(TargetKind::Unitary, speed_)));
        return out;
    }
    std::vector<CMat> reconstruct(const std::vector<CMat>& est) const override {
        return geodesic_grid(est, pilots_, cfg_.n_fft);
    }

private:
    const SimConfig& cfg_;
    std::size_t speed_;
    std::vector<int> pilots_;
};

CMat column(const std::vector<double>& v) {
    CMat c(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) c(static_cast<Eigen::Index>(i)) = v[i];
    return c;
}

class GivensLink : public Link {
public:
    GivensLink(const SimConfig& cfg, std::size_t speed) : cfg_(cfg), speed_(speed), pilots_(pilot_indices(cfg.n_fft, cfg.n_pilots)) {}

    // Per pilot: phases, then rotation angles.
    std::vector<CMat> targets(const std::vector<CMat>& V) override {
        std::vector<CMat> out;
        for (int p : pilots_) {
            const GivensParams g = givens_decompose(V[static_cast<std::size_t>(p)]);
            out.push_back(column(g.phis));
            out.push_back(column(g.thetas));
        }
        return out;
    }
    std::vector<AdaptiveTrackerState> initial(const std::vector<CMat>& t, bool bootstrap) const override {
        std::vector<AdaptiveTrackerState> out;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const TargetKind kind = (i % 2 == 0) ? TargetKind::Angle : TargetKind::Real;
            out.push_back(make_tracker(bootstrap ? t[i] : CMat::Zero(t[i].rows(), 1), cfg_.tracker(kind, speed_)));
        }
        return out;
    }
    std::vector<CMat> reconstruct(const std::vector<CMat>& est) const override {
        std::vector<GivensParams> g(pilots_.size());
        for (std::size_t p = 0; p < pilots_.size(); ++p) {
            g[p].m = cfg_.m;
            for (Eigen::Index i = 0; i < est[2 * p].rows(); ++i) g[p].phis.push_back(est[2 * p](i).real());
            for (Eigen::Index i = 0; i < est[2 * p + 1].rows(); ++i) g[p].thetas.push_back(est[2 * p + 1](i).real());
        }
        return givens_grid(g, pilots_, cfg_.n_fft);
    }

private:
    const SimConfig& cfg_;
    std::size_t speed_;
    std::vector<int> pilots_;
};

class AngleDelayLink : public Link {
public:
    AngleDelayLink(const SimConfig& cfg, std::size_t speed) : cfg_(cfg), speed_(speed) {}

    std::vector<CMat> targets(const std::vector<CMat>& V) override {
        return angle_delay_truncate(V, cfg_.effective_angle_delay_taps()).taps;
    }
    std::vector<AdaptiveTrackerState> initial(const std::vector<CMat>& t, bool bootstrap) const override {
        std::vector<AdaptiveTrackerState> out;
        for (std::size_t l = 0; l < t.size(); ++l) {
            const CMat start = bootstrap ? t[l] : (l == 0 ? identity_like(t[l]) : CMat::Zero(t[l].rows(), t[l].cols()));
            out.push_back(make_tracker(start, cfg_.tracker(TargetKind::Free, speed_)));
        }
        return out;
    }
    // Columns are renormalized so every stream keeps unit transmit power.
    std::vector<CMat> reconstruct(const std::vector<CMat>& est) const override {
        std::vector<CMat> grid = angle_delay_reconstruct({est, cfg_.n_fft});
        for (CMat& P : grid)
            for (Eigen::Index c = 0; c < P.cols(); ++c) {
                const double n = P.col(c).norm();
                if (n > 0.0) P.col(c) /= n;
            }
        return grid;
    }

private:
    const SimConfig& cfg_;
    std::size_t speed_;
};

class LatticeLink : public Link {
public:
    LatticeLink(const SimConfig& cfg, std::size_t speed) : cfg_(cfg), speed_(speed) {
        const int n = cfg.effective_lattice_nodes();
        for (int i = 0; i < n; ++i) nodes_.push_back(static_cast<int>(std::lround(static_cast<double>(i) * cfg.n_fft / n)) % cfg.n_fft);
    }

    std::vector<CMat> targets(const std::vector<CMat>& V) override {
        std::vector<UnitaryNode> nodes;
        for (int k : nodes_) nodes.push_back({subcarrier_omega(k, cfg_.n_fft), V[static_cast<std::size_t>(k)]});
        SnipOptions opt;
        opt.tol = cfg_.snip_tol;
        opt.max_iterations = cfg_.snip_max_iterations;
        opt.warm_start = previous_;
        SnipFit fit = snip_fit(nodes, cfg_.lattice_order, opt);
        residual_ = fit.residual;
        if (fit.residual > cfg_.snip_tol) ++misses_;
        previous_ = fit.params;
        std::vector<CMat> out = fit.params.kappas;
        out.push_back(fit.params.residue);
        return out;
    }
    std::vector<AdaptiveTrackerState> initial(const std::vector<CMat>& t, bool bootstrap) const override {
        std::vector<AdaptiveTrackerState> out;
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            // The projection is fixed once from the frame-0 design and
            // conveyed with the initial state.
            const RVec s = svd(t[i]).S;
            const bool iso = cfg_.lattice_isometric_reflections && s(s.size() - 1) >= 1.0 - cfg_.isometry_band;
            const CMat start = bootstrap ? t[i] : CMat::Zero(t[i].rows(), t[i].cols());
            out.push_back(make_tracker(start, cfg_.tracker(iso ? TargetKind::NearIsometry : TargetKind::Contractive, speed_)));
        }
        out.push_back(make_tracker(bootstrap ? t.back() : identity_like(t.back()), cfg_.tracker(TargetKind::Unitary, speed_)));
        return out;
    }
    std::vector<CMat> reconstruct(const std::vector<CMat>& est) const override {
        LatticeParams p;
        p.kappas.assign(est.begin(), est.end() - 1);
        p.residue = est.back();
        const LatticeResponse resp(p);
        std::vector<CMat> grid;
        grid.reserve(static_cast<std::size_t>(cfg_.n_fft));
        for (int k = 0; k < cfg_.n_fft; ++k) grid.push_back(resp.at(subcarrier_omega(k, cfg_.n_fft)));
        return grid;
    }

    double residual() const { return residual_; }
    int misses() const { return misses_; }

private:
    const SimConfig& cfg_;
    std::size_t speed_;
    std::vector<int> nodes_;
    std::optional<LatticeParams> previous_;
    double residual_ = 0.0;
    int misses_ = 0;
};

struct Job {
    std::string scheme;
    std::size_t speed_index;
    std::uint64_t seed;
};

struct CellOutput {
    std::vector<RateRow> rates;
    std::vector<KappaRow> kappa;
    std::vector<FlagRow> flags;
    std::optional<CellTranscript> transcript;
    std::optional<CellFailure> failure;
    int design_misses = 0;
};

std::unique_ptr<Link> make_link(const SimConfig& cfg, const std::string& scheme, std::size_t speed) {
    switch (parse_scheme(scheme)) {
        case Scheme::Geodesic: return std::make_unique<GeodesicLink>(cfg, speed);
        case Scheme::Givens: return std::make_unique<GivensLink>(cfg, speed);
        case Scheme::Lattice: return std::make_unique<LatticeLink>(cfg, speed);
        case Scheme::AngleDelay: return std::make_unique<AngleDelayLink>(cfg, speed);
    }
    throw Error(Errc::InvalidInput, "unknown scheme");
}

int expected_bits(const SimConfig& cfg, Scheme s) {
    switch (s) {
        case Scheme::Geodesic:
        case Scheme::Givens: return bit_budget(s, cfg.m, cfg.n_pilots);
        case Scheme::Lattice: return bit_budget(s, cfg.m, cfg.lattice_order);
        case Scheme::AngleDelay: return bit_budget(s, cfg.m, cfg.effective_angle_delay_taps());
    }
    return -1;
}

void score(const SimConfig& cfg, const Job& job, int frame, int bits, const std::vector<CMat>& H,
           const std::vector<CMat>& V, const std::vector<CMat>& P, std::vector<double>& flag_acc, CellOutput& out) {
    double frob = 0.0, flag = 0.0;
    for (std::size_t k = 0; k < V.size(); ++k) {
        frob += (P[k] - V[k]).norm();
        const double d = column_chordal_distance(P[k], V[k]);
        flag += d;
        flag_acc[k] += d;
    }
    const double n = static_cast<double>(V.size());
    for (double snr : cfg.snr_db) {
        RateConfig rc;
        rc.gamma = std::pow(10.0, snr / 10.0);
        RateRow r;
        r.scheme = job.scheme;
        r.speed_kmh = cfg.speed_kmh[job.speed_index];
        r.snr_db = snr;
        r.seed = job.seed;
        r.frame = frame;
        r.rate_bps_hz = grid_rate(H, P, rc);
        r.bits = bits;
        r.frob_err = frob / n;
        r.flag_err_mean = flag / n;
        out.rates.push_back(std::move(r));
    }
}

CellOutput run_cell(const SimConfig& cfg, const Job& job) {
    CellOutput out;
    const double speed = cfg.speed_kmh[job.speed_index];
    try {
        Trajectory traj(cfg, job.speed_index, job.seed);
        const bool perfect = job.scheme == kPerfectScheme;
        std::unique_ptr<Link> link = perfect ? nullptr : make_link(cfg, job.scheme, job.speed_index);
        auto* lattice = dynamic_cast<LatticeLink*>(link.get());

        std::vector<CMat> H = traj.grid();
        std::vector<CMat> V = optimal_precoders(H).mats;
        std::optional<TrackerBank> encoder, decoder;
        Transcript tr;
        int bits = 0;
        if (link) {
            const std::vector<AdaptiveTrackerState> init = link->initial(link->targets(V), cfg.bootstrap);
            encoder.emplace(init);
            decoder.emplace(init);
            tr.scheme = parse_scheme(job.scheme);
            tr.initial = init;
            bits = encoder->bits_per_frame();
            if (bits != expected_bits(cfg, tr.scheme))
                throw Error(Errc::InvalidInput, "feedback frame size differs from the scheme's bit budget");
        }
        std::vector<double> flag_acc(V.size(), 0.0);
        for (int frame = 1; frame <= cfg.n_frames; ++frame) {
            traj.advance();
            H = traj.grid();
            // The receiver keeps its precoder representation continuous in
            // time; column order and phases carry no rate information.
            std::vector<CMat> Vn = optimal_precoders(H).mats;
            for (std::size_t k = 0; k < Vn.size(); ++k) Vn[k] = align_precoder(Vn[k], V[k]);
            V = std::move(Vn);
            std::vector<CMat> P;
            if (link) {
                // Receiver: targets from the true precoders, then sign bits.
                const std::vector<CMat> truth = link->targets(V);
                const BitVec fb = encoder->encode(truth);
                // Transmitter: only the bits reach the replica.
                decoder->decode(fb);
                const std::uint64_t h = estimate_hash(*encoder);
                if (h != estimate_hash(*decoder)) throw Error(Errc::NumericalInstability, "decoder replica diverged");
                tr.frames.push_back({frame, fb, h});
                const std::vector<CMat> est = decoder->estimates();
                P = link->reconstruct(est);
                if (lattice) {
                    double e2 = 0.0;
                    for (std::size_t s = 0; s + 1 < truth.size(); ++s) e2 += (est[s] - truth[s]).squaredNorm();
                    out.kappa.push_back({speed, job.seed, frame, std::sqrt(e2), lattice->residual()});
                }
            } else {
                P = V;
            }
            score(cfg, job, frame, bits, H, V, P, flag_acc, out);
        }
        for (std::size_t k = 0; k < flag_acc.size(); ++k)
            out.flags.push_back({job.scheme, speed, job.seed, static_cast<int>(k), flag_acc[k] / cfg.n_frames});
        if (link) out.transcript = CellTranscript{job.scheme, speed, job.seed, std::move(tr)};
        if (lattice) out.design_misses = lattice->misses();
    } catch (const std::exception& e) {
        CellOutput failed;
        failed.failure = CellFailure{job.scheme, speed, job.seed, e.what()};
        return failed;
    }
    return out;
}

}  // namespace

std::vector<TappedChannel> channel_trajectory(const SimConfig& cfg, std::size_t speed_index, std::uint64_t seed,
                                              int n_frames) {
    cfg.validate();
    if (speed_index >= cfg.speed_kmh.size() || n_frames < 0)
        throw Error(Errc::InvalidInput, "channel_trajectory: speed index or frame count out of range");
    Trajectory traj(cfg, speed_index, seed);
    std::vector<TappedChannel> out{traj.channel()};
    for (int f = 1; f <= n_frames; ++f) {
        traj.advance();
        out.push_back(traj.channel());
    }
    return out;
}

RunResult run_simulation(const SimConfig& cfg, std::uint64_t base_seed) {
    cfg.validate();
    std::vector<Job> jobs;
    for (const std::string& scheme : cfg.schemes)
        for (std::size_t s = 0; s < cfg.speed_kmh.size(); ++s)
            for (int i = 0; i < cfg.n_seeds; ++i) jobs.push_back({scheme, s, base_seed + static_cast<std::uint64_t>(i)});

    std::vector<CellOutput> slots(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs.size();) slots[j] = run_cell(cfg, jobs[j]);
    };
    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(jobs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunResult res;
    for (CellOutput& c : slots) {
        if (c.failure) {
            res.failures.push_back(std::move(*c.failure));
            continue;
        }
        res.rates.insert(res.rates.end(), std::make_move_iterator(c.rates.begin()), std::make_move_iterator(c.rates.end()));
        res.kappa.insert(res.kappa.end(), c.kappa.begin(), c.kappa.end());
        res.flags.insert(res.flags.end(), std::make_move_iterator(c.flags.begin()), std::make_move_iterator(c.flags.end()));
        if (c.transcript) res.transcripts.push_back(std::move(*c.transcript));
        res.design_misses += c.design_misses;
    }
    return res;
}

}  // namespace latprec
