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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace latprec {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// Failure categories shared by every module.
enum class Errc {
    InvalidInput,
    NotPSD,
    NotContractive,
    NumericalInstability,
    UnstableLattice,
    UnstableInput,
    DesignNotConverged,
    BranchCut,
    RankDeficient,
    AlphaOutOfRange,
    ConfigError,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised when an interpolating design misses its tolerance; carries the
/// best residual reached so callers can retry with a longer filter.
class DesignNotConverged : public Error {
public:
    DesignNotConverged(double residual, double tol);
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace latprec
