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

// CSV persistence of simulation results and the per-SNR summary table.
//
// Files written to a result directory:
//   rates.csv         scheme,speed_kmh,snr_db,seed,frame,rate_bps_hz,bits,frob_err,flag_err_mean
//   kappa.csv         scheme,speed_kmh,seed,frame,kappa_err,design_residual
//   flag_profile.csv  scheme,speed_kmh,seed,subcarrier,flag_err
//   failures.csv      scheme,speed_kmh,seed,message
//   summary.csv       scheme,speed_kmh,snr_db,n_seeds,rate_mean,rate_ci95,bits,frob_err_mean,flag_err_mean
// Numbers use 17 significant digits, so reading a directory back and
// writing it again reproduces every file byte for byte.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "latprec/harness.hpp"

namespace latprec {

struct SummaryRow {
    std::string scheme;
    double speed_kmh = 0.0;
    double snr_db = 0.0;
    int n_seeds = 0;
    double rate_mean = 0.0;  ///< mean over seeds of the per-seed frame average
    double rate_ci95 = 0.0;  ///< 1.96 * sample sd / sqrt(n_seeds)
    double bits = 0.0;       ///< mean feedback bits per frame
    double frob_err_mean = 0.0;
    double flag_err_mean = 0.0;
};

/// Groups in order of first appearance of the scheme, then ascending speed
/// and SNR. Throws InvalidInput when there are no rate rows.
std::vector<SummaryRow> summarize(const RunResult& r);

std::string rates_csv(const std::vector<RateRow>& rows);
std::string kappa_csv(const std::vector<KappaRow>& rows);
std::string flags_csv(const std::vector<FlagRow>& rows);
std::string failures_csv(const std::vector<CellFailure>& rows);
std::string summary_csv(const std::vector<SummaryRow>& rows);

std::vector<RateRow> parse_rates_csv(std::string_view text);
std::vector<KappaRow> parse_kappa_csv(std::string_view text);
std::vector<FlagRow> parse_flags_csv(std::string_view text);
std::vector<CellFailure> parse_failures_csv(std::string_view text);

/// Writes all five files; creates the directory if needed.
void write_report(const RunResult& r, const std::filesystem::path& dir);

/// Reads rates.csv (required) and the other result files when present.
RunResult read_results(const std::filesystem::path& dir);

}  // namespace latprec
