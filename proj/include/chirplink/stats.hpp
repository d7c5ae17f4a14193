#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "chirplink/errors.hpp"

namespace chirplink {

struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};

// Wilson score interval for a binomial proportion.  Better behaved than the
// normal approximation at the extreme rates this simulator produces (PDR near
// 0 and near 1 are the interesting cases).
inline WilsonInterval wilson_interval(int successes, int trials, double z = 1.96) {
    if (trials <= 0) throw DomainError("wilson_interval: trials must be positive");
    if (successes < 0 || successes > trials)
        throw DomainError("wilson_interval: successes out of range");
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = (z / denom) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Linear-interpolation percentile (the numpy default).  p in [0, 100].
inline double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw DomainError("percentile: empty sample");
    if (p < 0.0 || p > 100.0) throw DomainError("percentile: p out of [0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = (p / 100.0) * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(rank));
    if (lo == hi) return values[lo];
    const double frac = rank - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

inline double mean(const std::vector<double>& values) {
    if (values.empty()) throw DomainError("mean: empty sample");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / values.size();
}

// Per-distance sweep outcome.  Failure counters partition the non-delivered
// trials: delivered + header + fec + crc + channel_lost == trials always.
struct DistanceResult {
    double distance_m = 0.0;
    int trials = 0;
    int delivered = 0;
    int header_failures = 0;
    int fec_failures = 0;
    int crc_failures = 0;
    int channel_lost = 0;
    double pdr = 0.0;
    WilsonInterval pdr_ci;
    double mean_latency_s = std::numeric_limits<double>::quiet_NaN();
    double p95_latency_s = std::numeric_limits<double>::quiet_NaN();
    double mean_snr_db = std::numeric_limits<double>::quiet_NaN();

    int accounted() const {
        return delivered + header_failures + fec_failures + crc_failures + channel_lost;
    }
};

struct SweepResult {
    std::string scenario;
    std::string fidelity;
    std::uint64_t seed = 0;
    std::vector<DistanceResult> rows;
};

inline constexpr std::string_view kSweepCsvHeader =
    "distance_m,trials,delivered,pdr,pdr_ci_low,pdr_ci_high,"
    "header_failures,fec_failures,crc_failures,channel_lost,"
    "mean_latency_s,p95_latency_s,mean_snr_db";

inline std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    out << std::setprecision(10);
    for (const auto& r : result.rows) {
        out << r.distance_m << ',' << r.trials << ',' << r.delivered << ',' << r.pdr << ','
            << r.pdr_ci.low << ',' << r.pdr_ci.high << ',' << r.header_failures << ','
            << r.fec_failures << ',' << r.crc_failures << ',' << r.channel_lost << ','
            << r.mean_latency_s << ',' << r.p95_latency_s << ',' << r.mean_snr_db << '\n';
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream in{line};
    std::string field;
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

} // namespace detail

// Parses output of sweep_to_csv (header line required).  Metadata fields of
// the returned SweepResult are left empty; the CSV carries only the table.
inline SweepResult sweep_from_csv(std::string_view csv) {
    SweepResult result;
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader)
        throw ConfigError("sweep CSV: missing or unexpected header line");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 13)
            throw ConfigError("sweep CSV line " + std::to_string(line_no) +
                              ": expected 13 fields, got " + std::to_string(fields.size()));
        DistanceResult r;
        try {
            r.distance_m = std::stod(fields[0]);
            r.trials = std::stoi(fields[1]);
            r.delivered = std::stoi(fields[2]);
            r.pdr = std::stod(fields[3]);
            r.pdr_ci.low = std::stod(fields[4]);
            r.pdr_ci.high = std::stod(fields[5]);
            r.header_failures = std::stoi(fields[6]);
            r.fec_failures = std::stoi(fields[7]);
            r.crc_failures = std::stoi(fields[8]);
            r.channel_lost = std::stoi(fields[9]);
            r.mean_latency_s = std::stod(fields[10]);
            r.p95_latency_s = std::stod(fields[11]);
            r.mean_snr_db = std::stod(fields[12]);
        } catch (const std::exception&) {
            throw ConfigError("sweep CSV line " + std::to_string(line_no) +
                              ": unparseable number");
        }
        result.rows.push_back(r);
    }
    return result;
}

} // namespace chirplink
