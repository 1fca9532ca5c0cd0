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

#include "latprec/feedback.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "latprec/lattice.hpp"
#include "latprec/matcore.hpp"

namespace latprec {

const char* to_string(Scheme s) noexcept {
    switch (s) {
        case Scheme::Geodesic: return "geodesic";
        case Scheme::Givens: return "givens";
        case Scheme::Lattice: return "lattice";
        case Scheme::AngleDelay: return "angle_delay";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::Geodesic, Scheme::Givens, Scheme::Lattice, Scheme::AngleDelay})
        if (name == to_string(s)) return s;
    throw Error(Errc::InvalidInput, "unknown scheme '" + std::string(name) + "'");
}

int bit_budget(Scheme s, int m, int pilots_or_order) {
    if (m < 1 || pilots_or_order < 1) throw Error(Errc::InvalidInput, "bit_budget needs positive arguments");
    const int m2 = m * m;
    switch (s) {
        case Scheme::Geodesic: return 2 * m2 * pilots_or_order;
        case Scheme::Givens: return m2 * pilots_or_order;
        case Scheme::Lattice: return 2 * m2 * pilots_or_order;
        case Scheme::AngleDelay: return 2 * m2 * pilots_or_order;
    }
    throw Error(Errc::InvalidInput, "unknown scheme");
}

const char* to_string(TargetKind k) noexcept {
    switch (k) {
        case TargetKind::Free: return "free";
        case TargetKind::Contractive: return "contractive";
        case TargetKind::Unitary: return "unitary";
        case TargetKind::NearIsometry: return "near_isometry";
        case TargetKind::Real: return "real";
        case TargetKind::Angle: return "angle";
    }
    return "unknown";
}

TargetKind parse_target_kind(std::string_view name) {
    for (TargetKind k : {TargetKind::Free, TargetKind::Contractive, TargetKind::Unitary, TargetKind::NearIsometry,
                         TargetKind::Real, TargetKind::Angle})
        if (name == to_string(k)) return k;
    throw Error(Errc::InvalidInput, "unknown tracker kind '" + std::string(name) + "'");
}

namespace {

bool real_only(TargetKind k) { return k == TargetKind::Real || k == TargetKind::Angle; }

// One real component of a tracker: adapt the step, then move the estimate.
double advance(double est, double& step, double& last, double b, const TrackerConfig& cfg) {
    if (last != 0.0) step = (b == last) ? step * cfg.sigma : step / cfg.sigma;
    step = std::clamp(step, cfg.min_step, cfg.max_step);
    last = b;
    return est + b * step;
}

void project(AdaptiveTrackerState& s) {
    switch (s.cfg.kind) {
        case TargetKind::Contractive: s.estimate = clip_contractive(s.estimate, s.cfg.clip_margin); break;
        case TargetKind::Unitary: s.estimate = nearest_unitary(s.estimate); break;
        case TargetKind::NearIsometry:
            // Zero is the cold-start state; it has no polar factor.
            if (s.estimate.norm() > 0.0) s.estimate = (1.0 - s.cfg.clip_margin) * nearest_unitary(s.estimate);
            break;
        case TargetKind::Angle: s.estimate = s.estimate.unaryExpr([](cplx v) { return cplx(wrap_angle(v.real()), 0.0); }); break;
        default: break;
    }
}

void apply_bits(std::span<const std::uint8_t> bits, AdaptiveTrackerState& s) {
    const bool ro = real_only(s.cfg.kind);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < s.estimate.rows(); ++r) {
        for (Eigen::Index c = 0; c < s.estimate.cols(); ++c) {
            cplx& e = s.estimate(r, c);
            cplx& st = s.step(r, c);
            cplx& ls = s.last_sign(r, c);
            double sr = st.real(), lr = ls.real();
            const double re = advance(e.real(), sr, lr, bits[i++] ? 1.0 : -1.0, s.cfg);
            double si = st.imag(), li = ls.imag(), im = e.imag();
            if (!ro) im = advance(e.imag(), si, li, bits[i++] ? 1.0 : -1.0, s.cfg);
            e = cplx(re, im);
            st = cplx(sr, si);
            ls = cplx(lr, li);
        }
    }
    project(s);
}

void validate_config(const TrackerConfig& cfg) {
    if (!(cfg.sigma > 1.0)) throw Error(Errc::InvalidInput, "tracker sigma must exceed 1");
    if (!(cfg.min_step > 0.0) || !(cfg.initial_step >= cfg.min_step) || !(cfg.max_step >= cfg.initial_step))
        throw Error(Errc::InvalidInput, "tracker steps must satisfy 0 < min <= initial <= max");
    if (!(cfg.clip_margin > 0.0) || !(cfg.clip_margin < 1.0))
        throw Error(Errc::InvalidInput, "tracker clip margin must lie in (0, 1)");
}

}  // namespace

int AdaptiveTrackerState::bits_per_update() const {
    const int n = static_cast<int>(estimate.size());
    return real_only(cfg.kind) ? n : 2 * n;
}

namespace {

// State with the given estimate taken verbatim (no projection).
AdaptiveTrackerState raw_tracker(const CMat& initial, const TrackerConfig& cfg) {
    validate_config(cfg);
    if (initial.size() == 0 || !all_finite(initial)) throw Error(Errc::InvalidInput, "tracker needs a finite initial estimate");
    AdaptiveTrackerState s;
    s.cfg = cfg;
    s.estimate = initial;
    if (real_only(cfg.kind)) s.estimate = s.estimate.real().cast<cplx>();
    s.step = CMat::Constant(initial.rows(), initial.cols(), cplx(cfg.initial_step, real_only(cfg.kind) ? 0.0 : cfg.initial_step));
    s.last_sign = CMat::Zero(initial.rows(), initial.cols());
    return s;
}

}  // namespace

AdaptiveTrackerState make_tracker(const CMat& initial, const TrackerConfig& cfg) {
    AdaptiveTrackerState s = raw_tracker(initial, cfg);
    project(s);
    return s;
}

BitVec encode_update(const CMat& truth, AdaptiveTrackerState& state) {
    if (truth.rows() != state.estimate.rows() || truth.cols() != state.estimate.cols())
        throw Error(Errc::InvalidInput, "truth and estimate shapes differ");
    if (!all_finite(truth)) throw Error(Errc::InvalidInput, "truth has non-finite entries");
    const bool ro = real_only(state.cfg.kind);
    const bool angle = state.cfg.kind == TargetKind::Angle;
    BitVec bits;
    bits.reserve(static_cast<std::size_t>(state.bits_per_update()));
    for (Eigen::Index r = 0; r < truth.rows(); ++r) {
        for (Eigen::Index c = 0; c < truth.cols(); ++c) {
            double dr = truth(r, c).real() - state.estimate(r, c).real();
            if (angle) dr = wrap_angle(dr);
            bits.push_back(dr >= 0.0 ? 1 : 0);
            if (!ro) bits.push_back(truth(r, c).imag() - state.estimate(r, c).imag() >= 0.0 ? 1 : 0);
        }
    }
    apply_bits(bits, state);
    return bits;
}

void decode_update(std::span<const std::uint8_t> bits, AdaptiveTrackerState& state) {
    if (bits.empty()) return;
    if (static_cast<int>(bits.size()) != state.bits_per_update())
        throw Error(Errc::InvalidInput, "bit count does not match the tracked shape");
    apply_bits(bits, state);
}

TrackerBank::TrackerBank(std::vector<AdaptiveTrackerState> trackers) : trackers_(std::move(trackers)) {}

int TrackerBank::bits_per_frame() const {
    int n = 0;
    for (const auto& t : trackers_) n += t.bits_per_update();
    return n;
}

BitVec TrackerBank::encode(std::span<const CMat> truths) {
    if (truths.size() != trackers_.size()) throw Error(Errc::InvalidInput, "one truth per tracker required");
    BitVec all;
    all.reserve(static_cast<std::size_t>(bits_per_frame()));
    for (std::size_t i = 0; i < trackers_.size(); ++i) {
        const BitVec b = encode_update(truths[i], trackers_[i]);
        all.insert(all.end(), b.begin(), b.end());
    }
    return all;
}

void TrackerBank::decode(std::span<const std::uint8_t> bits) {
    if (bits.empty()) return;
    if (static_cast<int>(bits.size()) != bits_per_frame()) throw Error(Errc::InvalidInput, "frame bit count mismatch");
    std::size_t off = 0;
    for (auto& t : trackers_) {
        const auto n = static_cast<std::size_t>(t.bits_per_update());
        decode_update(bits.subspan(off, n), t);
        off += n;
    }
}

std::vector<CMat> TrackerBank::estimates() const {
    std::vector<CMat> out;
    out.reserve(trackers_.size());
    for (const auto& t : trackers_) out.push_back(t.estimate);
    return out;
}

std::uint64_t estimate_hash(const TrackerBank& bank) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& t : bank.trackers()) {
        const auto* p = reinterpret_cast<const unsigned char*>(t.estimate.data());
        const std::size_t n = static_cast<std::size_t>(t.estimate.size()) * sizeof(cplx);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    }
    return h;
}

std::string bits_to_hex(std::span<const std::uint8_t> bits) {
    static const char* digits = "0123456789abcdef";
    std::string out((bits.size() + 3) / 4, '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        const std::size_t d = i / 4;
        const int v = static_cast<int>(std::strchr(digits, out[d]) - digits) | (8 >> (i % 4));
        out[d] = digits[v];
    }
    return out;
}

BitVec hex_to_bits(std::string_view hex, std::size_t n_bits) {
    if (hex.size() != (n_bits + 3) / 4) throw Error(Errc::InvalidInput, "hex length does not match the bit count");
    BitVec bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        const char ch = hex[i / 4];
        int v;
        if (ch >= '0' && ch <= '9') v = ch - '0';
        else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
        else throw Error(Errc::InvalidInput, "bad hex digit in bit string");
        bits[i] = (v & (8 >> (i % 4))) ? 1 : 0;
    }
    return bits;
}

namespace {

constexpr const char* kTranscriptHeader = "latprec-transcript v1";

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& tok) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos == tok.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::InvalidInput, "transcript has a malformed number '" + tok + "'");
}

template <class T>
T expect(std::istringstream& is, const char* what) {
    T v;
    if (!(is >> v)) throw Error(Errc::InvalidInput, std::string("transcript truncated at ") + what);
    return v;
}

void expect_word(std::istringstream& is, const char* word) {
    if (expect<std::string>(is, word) != word) throw Error(Errc::InvalidInput, std::string("transcript expected '") + word + "'");
}

}  // namespace

std::string serialize_transcript(const Transcript& tr) {
    std::ostringstream os;
    os << kTranscriptHeader << '\n' << "scheme " << to_string(tr.scheme) << '\n';
    os << "trackers " << tr.initial.size() << '\n';
    for (const auto& t : tr.initial) {
        os << "tracker " << to_string(t.cfg.kind) << ' ' << t.estimate.rows() << ' ' << t.estimate.cols() << ' '
           << fmt17(t.cfg.sigma) << ' ' << fmt17(t.cfg.initial_step) << ' ' << fmt17(t.cfg.min_step) << ' '
           << fmt17(t.cfg.max_step) << ' ' << fmt17(t.cfg.clip_margin) << '\n';
        for (Eigen::Index r = 0; r < t.estimate.rows(); ++r) {
            for (Eigen::Index c = 0; c < t.estimate.cols(); ++c)
                os << (c ? " " : "") << fmt17(t.estimate(r, c).real()) << ' ' << fmt17(t.estimate(r, c).imag());
            os << '\n';
        }
    }
    os << "frames " << tr.frames.size() << '\n';
    char hash[24];
    for (const auto& f : tr.frames) {
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(f.hash));
        os << f.t << ' ' << bits_to_hex(f.bits) << ' ' << hash << '\n';
    }
    return os.str();
}

Transcript parse_transcript(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string header;
    std::getline(is, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kTranscriptHeader) throw Error(Errc::InvalidInput, "not a latprec transcript");
    Transcript tr;
    expect_word(is, "scheme");
    tr.scheme = parse_scheme(expect<std::string>(is, "scheme"));
    expect_word(is, "trackers");
    const long n_trackers = expect<long>(is, "tracker count");
    if (n_trackers < 0 || n_trackers > 100000) throw Error(Errc::InvalidInput, "bad tracker count");
    for (long i = 0; i < n_trackers; ++i) {
        expect_word(is, "tracker");
        TrackerConfig cfg;
        cfg.kind = parse_target_kind(expect<std::string>(is, "kind"));
        const long rows = expect<long>(is, "rows");
        const long cols = expect<long>(is, "cols");
        if (rows < 1 || cols < 1 || rows * cols > 1 << 24) throw Error(Errc::InvalidInput, "bad tracker shape");
        cfg.sigma = parse_double(expect<std::string>(is, "sigma"));
        cfg.initial_step = parse_double(expect<std::string>(is, "step"));
        cfg.min_step = parse_double(expect<std::string>(is, "min step"));
        cfg.max_step = parse_double(expect<std::string>(is, "max step"));
        cfg.clip_margin = parse_double(expect<std::string>(is, "clip margin"));
        CMat init(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                const double re = parse_double(expect<std::string>(is, "estimate"));
                const double im = parse_double(expect<std::string>(is, "estimate"));
                init(r, c) = cplx(re, im);
            }
        tr.initial.push_back(raw_tracker(init, cfg));
    }
    const std::size_t n_bits = static_cast<std::size_t>(TrackerBank(tr.initial).bits_per_frame());
    expect_word(is, "frames");
    const long n_frames = expect<long>(is, "frame count");
    if (n_frames < 0) throw Error(Errc::InvalidInput, "bad frame count");
    for (long i = 0; i < n_frames; ++i) {
        TranscriptFrame f;
        f.t = expect<long>(is, "frame index");
        f.bits = hex_to_bits(expect<std::string>(is, "bits"), n_bits);
        const std::string h = expect<std::string>(is, "hash");
        try {
            std::size_t pos = 0;
            f.hash = std::stoull(h, &pos, 16);
            if (pos != h.size()) throw std::invalid_argument("hash");
        } catch (const std::exception&) {
            throw Error(Errc::InvalidInput, "transcript has a malformed hash");
        }
        tr.frames.push_back(std::move(f));
    }
    std::string extra;
    if (is >> extra) throw Error(Errc::InvalidInput, "trailing data after transcript");
    return tr;
}

ReplayResult replay_transcript(const Transcript& tr) {
    ReplayResult res{TrackerBank(tr.initial), 0, -1};
    for (std::size_t i = 0; i < tr.frames.size(); ++i) {
        res.final_state.decode(tr.frames[i].bits);
        ++res.frames;
        if (res.first_mismatch < 0 && estimate_hash(res.final_state) != tr.frames[i].hash)
            res.first_mismatch = static_cast<long>(i);
    }
    return res;
}

}  // namespace latprec
