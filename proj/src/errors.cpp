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

#include "latprec/errors.hpp"

#include <sstream>

namespace latprec {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::NotPSD: return "NotPSD";
        case Errc::NotContractive: return "NotContractive";
        case Errc::NumericalInstability: return "NumericalInstability";
        case Errc::UnstableLattice: return "UnstableLattice";
        case Errc::UnstableInput: return "UnstableInput";
        case Errc::DesignNotConverged: return "DesignNotConverged";
        case Errc::BranchCut: return "BranchCut";
        case Errc::RankDeficient: return "RankDeficient";
        case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
        case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

namespace {
std::string not_converged_message(double residual, double tol) {
    std::ostringstream os;
    os << "node residual " << residual << " exceeds tolerance " << tol;
    return os.str();
}
}  // namespace

DesignNotConverged::DesignNotConverged(double residual, double tol)
    : Error(Errc::DesignNotConverged, not_converged_message(residual, tol)), residual_(residual) {}

}  // namespace latprec
