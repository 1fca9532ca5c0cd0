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

#include "latprec/allpass.hpp"

#include <cstdio>
#include <sstream>

#include <Eigen/LU>

#include "latprec/matcore.hpp"

namespace latprec {

CMat MatrixPolynomial::at(cplx zinv) const {
    if (coeffs.empty()) throw Error(Errc::InvalidInput, "empty matrix polynomial");
    // Horner in z^-1.
    CMat acc = coeffs.back();
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) acc = coeffs[i] + zinv * acc;
    return acc;
}

CMat evaluate(const RationalAllPass& G, double omega) {
    if (G.num.length() == 0 || G.num.length() != G.den.length())
        throw Error(Errc::InvalidInput, "numerator and denominator need equal, non-zero lengths");
    const cplx zinv = std::polar(1.0, -omega);
    const CMat N = G.num.at(zinv);
    const CMat D = G.den.at(zinv);
    const RVec s = svd(D).S;
    if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > 1e12)
        throw Error(Errc::NumericalInstability, "denominator is near-singular on the unit circle");
    return N * D.partialPivLu().inverse();
}

namespace {

// p(z) -> z^-1 p(z)
std::vector<CMat> delayed(const std::vector<CMat>& p) {
    std::vector<CMat> out;
    out.reserve(p.size() + 1);
    out.push_back(CMat::Zero(p.front().rows(), p.front().cols()));
    out.insert(out.end(), p.begin(), p.end());
    return out;
}

}  // namespace

RationalAllPass lattice_to_lccde(const LatticeParams& params) {
    if (!stability_check(params)) throw Error(Errc::UnstableLattice, "lattice parameters fail the stability check");
    const Eigen::Index m = params.residue.rows();
    std::vector<CMat> N{params.residue};
    std::vector<CMat> D{CMat::Identity(m, m)};
    for (std::size_t s = params.kappas.size(); s-- > 0;) {
        const CMat& K = params.kappas[s];
        const TStage T = t_matrix(K);
        const CMat& A = T.t21;
        const CMat& B = T.t12;
        const CMat Ainv = A.inverse();
        const std::vector<CMat> zN = delayed(N);
        D.push_back(CMat::Zero(m, m));
        std::vector<CMat> Dn(D.size()), Nn(D.size());
        for (std::size_t i = 0; i < D.size(); ++i) {
            Dn[i] = Ainv * (D[i] + K.adjoint() * zN[i]) * A;
            Nn[i] = K * Dn[i] + B * zN[i] * A;
        }
        // Exact by construction; remove rounding so D_0 = I holds bitwise.
        Dn.front() = CMat::Identity(m, m);
        D = std::move(Dn);
        N = std::move(Nn);
    }
    return {MatrixPolynomial{std::move(N)}, MatrixPolynomial{std::move(D)}};
}

namespace {

constexpr const char* kLatticeHeader = "lattice-params v1";

void write_matrix(std::ostringstream& os, const CMat& A) {
    char buf[64];
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
        for (Eigen::Index c = 0; c < A.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g", A(r, c).real(), A(r, c).imag());
            os << (c ? " " : "") << buf;
        }
        os << '\n';
    }
}

CMat read_matrix(std::istringstream& is, int m) {
    CMat A(m, m);
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            std::string re, im;
            if (!(is >> re >> im)) throw Error(Errc::InvalidInput, "lattice record truncated");
            try {
                std::size_t p1 = 0, p2 = 0;
                const double x = std::stod(re, &p1);
                const double y = std::stod(im, &p2);
                if (p1 != re.size() || p2 != im.size()) throw std::invalid_argument("trailing");
                A(r, c) = cplx(x, y);
            } catch (const std::exception&) {
                throw Error(Errc::InvalidInput, "lattice record has a malformed number");
            }
        }
    }
    return A;
}

}  // namespace

std::string serialize_lattice(const LatticeParams& params) {
    std::ostringstream os;
    os << kLatticeHeader << '\n' << params.dim() << ' ' << params.length() << '\n';
    for (const CMat& K : params.kappas) write_matrix(os, K);
    write_matrix(os, params.residue);
    return os.str();
}

LatticeParams parse_lattice(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::string header;
    std::getline(is, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kLatticeHeader) throw Error(Errc::InvalidInput, "not a lattice-params v1 record");
    int m = 0, M = 0;
    if (!(is >> m >> M) || m < 1 || M < 1 || m > 4096 || M > 1 << 20)
        throw Error(Errc::InvalidInput, "lattice record has bad dimensions");
    LatticeParams p;
    for (int k = 0; k + 1 < M; ++k) p.kappas.push_back(read_matrix(is, m));
    p.residue = read_matrix(is, m);
    std::string extra;
    if (is >> extra) throw Error(Errc::InvalidInput, "trailing data after lattice record");
    return p;
}

}  // namespace latprec
