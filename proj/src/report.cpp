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

#include "latprec/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace latprec {

namespace {

constexpr const char* kRatesHeader = "scheme,speed_kmh,snr_db,seed,frame,rate_bps_hz,bits,frob_err,flag_err_mean";
constexpr const char* kKappaHeader = "scheme,speed_kmh,seed,frame,kappa_err,design_residual";
constexpr const char* kFlagsHeader = "scheme,speed_kmh,seed,subcarrier,flag_err";
constexpr const char* kFailuresHeader = "scheme,speed_kmh,seed,message";
constexpr const char* kSummaryHeader =
    "scheme,speed_kmh,snr_db,n_seeds,rate_mean,rate_ci95,bits,frob_err_mean,flag_err_mean";

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += (c == '\n' || c == '\r') ? ' ' : c;
    }
    return out + "\"";
}

// Splits one CSV line; supports double-quoted fields.
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    bool in_q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_q) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                in_q = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_q = true;
        } else if (c == ',') {
            f.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(std::move(cur));
    return f;
}

std::vector<std::vector<std::string>> rows_of(std::string_view text, const char* header, std::size_t n_fields) {
    std::istringstream is{std::string(text)};
    std::string line;
    if (!std::getline(is, line) || line != header)
        throw Error(Errc::InvalidInput, std::string("CSV header must be '") + header + "'");
    std::vector<std::vector<std::string>> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != n_fields) throw Error(Errc::InvalidInput, "CSV row has " + std::to_string(f.size()) + " fields: " + line);
        out.push_back(std::move(f));
    }
    return out;
}

double to_d(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::InvalidInput, "CSV field '" + s + "' is not a number");
}

long long to_ll(const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::InvalidInput, "CSV field '" + s + "' is not an integer");
}

std::uint64_t to_u64(const std::string& s) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos == s.size() && !s.empty() && s[0] != '-') return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::InvalidInput, "CSV field '" + s + "' is not an unsigned integer");
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(Errc::InvalidInput, "cannot open " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::InvalidInput, "cannot write " + p.string());
    f << text;
    if (!f) throw Error(Errc::InvalidInput, "write failed for " + p.string());
}

}  // namespace

std::vector<SummaryRow> summarize(const RunResult& r) {
    if (r.rates.empty()) throw Error(Errc::InvalidInput, "no rate rows to summarize");
    std::vector<std::string> order;
    for (const auto& row : r.rates)
        if (std::find(order.begin(), order.end(), row.scheme) == order.end()) order.push_back(row.scheme);

    struct Acc {
        double rate = 0.0, bits = 0.0, frob = 0.0, flag = 0.0;
        int n = 0;
    };
    using Key = std::tuple<std::size_t, double, double>;
    std::map<Key, std::map<std::uint64_t, Acc>> groups;
    for (const auto& row : r.rates) {
        const std::size_t si = static_cast<std::size_t>(std::find(order.begin(), order.end(), row.scheme) - order.begin());
        Acc& a = groups[{si, row.speed_kmh, row.snr_db}][row.seed];
        a.rate += row.rate_bps_hz;
        a.bits += row.bits;
        a.frob += row.frob_err;
        a.flag += row.flag_err_mean;
        ++a.n;
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, seeds] : groups) {
        SummaryRow s;
        s.scheme = order[std::get<0>(key)];
        s.speed_kmh = std::get<1>(key);
        s.snr_db = std::get<2>(key);
        s.n_seeds = static_cast<int>(seeds.size());
        std::vector<double> per_seed;
        for (const auto& [seed, a] : seeds) {
            per_seed.push_back(a.rate / a.n);
            s.bits += a.bits / a.n;
            s.frob_err_mean += a.frob / a.n;
            s.flag_err_mean += a.flag / a.n;
        }
        const double n = static_cast<double>(per_seed.size());
        for (double v : per_seed) s.rate_mean += v;
        s.rate_mean /= n;
        s.bits /= n;
        s.frob_err_mean /= n;
        s.flag_err_mean /= n;
        if (per_seed.size() > 1) {
            double ss = 0.0;
            for (double v : per_seed) ss += (v - s.rate_mean) * (v - s.rate_mean);
            s.rate_ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string rates_csv(const std::vector<RateRow>& rows) {
    std::string out = std::string(kRatesHeader) + "\n";
    for (const auto& r : rows)
        out += r.scheme + "," + num(r.speed_kmh) + "," + num(r.snr_db) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.frame) + "," + num(r.rate_bps_hz) + "," + std::to_string(r.bits) + "," + num(r.frob_err) +
               "," + num(r.flag_err_mean) + "\n";
    return out;
}

std::string kappa_csv(const std::vector<KappaRow>& rows) {
    std::string out = std::string(kKappaHeader) + "\n";
    for (const auto& r : rows)
        out += std::string("lattice,") + num(r.speed_kmh) + "," + std::to_string(r.seed) + "," + std::to_string(r.frame) +
               "," + num(r.kappa_err) + "," + num(r.design_residual) + "\n";
    return out;
}

std::string flags_csv(const std::vector<FlagRow>& rows) {
    std::string out = std::string(kFlagsHeader) + "\n";
    for (const auto& r : rows)
        out += r.scheme + "," + num(r.speed_kmh) + "," + std::to_string(r.seed) + "," + std::to_string(r.subcarrier) + "," +
               num(r.flag_err) + "\n";
    return out;
}

std::string failures_csv(const std::vector<CellFailure>& rows) {
    std::string out = std::string(kFailuresHeader) + "\n";
    for (const auto& r : rows)
        out += r.scheme + "," + num(r.speed_kmh) + "," + std::to_string(r.seed) + "," + quoted(r.message) + "\n";
    return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = std::string(kSummaryHeader) + "\n";
    for (const auto& r : rows)
        out += r.scheme + "," + num(r.speed_kmh) + "," + num(r.snr_db) + "," + std::to_string(r.n_seeds) + "," +
               num(r.rate_mean) + "," + num(r.rate_ci95) + "," + num(r.bits) + "," + num(r.frob_err_mean) + "," +
               num(r.flag_err_mean) + "\n";
    return out;
}

std::vector<RateRow> parse_rates_csv(std::string_view text) {
    std::vector<RateRow> out;
    for (const auto& f : rows_of(text, kRatesHeader, 9))
        out.push_back({f[0], to_d(f[1]), to_d(f[2]), to_u64(f[3]), static_cast<int>(to_ll(f[4])), to_d(f[5]),
                       static_cast<int>(to_ll(f[6])), to_d(f[7]), to_d(f[8])});
    return out;
}

std::vector<KappaRow> parse_kappa_csv(std::string_view text) {
    std::vector<KappaRow> out;
    for (const auto& f : rows_of(text, kKappaHeader, 6))
        out.push_back({to_d(f[1]), to_u64(f[2]), static_cast<int>(to_ll(f[3])), to_d(f[4]), to_d(f[5])});
    return out;
}

std::vector<FlagRow> parse_flags_csv(std::string_view text) {
    std::vector<FlagRow> out;
    for (const auto& f : rows_of(text, kFlagsHeader, 5))
        out.push_back({f[0], to_d(f[1]), to_u64(f[2]), static_cast<int>(to_ll(f[3])), to_d(f[4])});
    return out;
}

std::vector<CellFailure> parse_failures_csv(std::string_view text) {
    std::vector<CellFailure> out;
    for (const auto& f : rows_of(text, kFailuresHeader, 4)) out.push_back({f[0], to_d(f[1]), to_u64(f[2]), f[3]});
    return out;
}

void write_report(const RunResult& r, const std::filesystem::path& dir) {
    const std::vector<SummaryRow> summary = summarize(r);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::InvalidInput, "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "rates.csv", rates_csv(r.rates));
    write_file(dir / "kappa.csv", kappa_csv(r.kappa));
    write_file(dir / "flag_profile.csv", flags_csv(r.flags));
    write_file(dir / "failures.csv", failures_csv(r.failures));
    write_file(dir / "summary.csv", summary_csv(summary));
}

RunResult read_results(const std::filesystem::path& dir) {
    RunResult r;
    r.rates = parse_rates_csv(read_file(dir / "rates.csv"));
    if (std::filesystem::exists(dir / "kappa.csv")) r.kappa = parse_kappa_csv(read_file(dir / "kappa.csv"));
    if (std::filesystem::exists(dir / "flag_profile.csv")) r.flags = parse_flags_csv(read_file(dir / "flag_profile.csv"));
    if (std::filesystem::exists(dir / "failures.csv")) r.failures = parse_failures_csv(read_file(dir / "failures.csv"));
    return r;
}

}  // namespace latprec
