#include "qrng/stats_tests.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qrng {

namespace {

std::vector<std::uint8_t> unpack(const BitStream& stream) {
    std::vector<std::uint8_t> bits(stream.produced);
    for (std::uint64_t i = 0; i < stream.produced; ++i)
        bits[i] = (stream.bytes[i / 8] >> (7 - i % 8)) & 1u;
    return bits;
}

void require_length(std::size_t n, std::size_t min_len, const char* test) {
    if (n < min_len)
        throw std::invalid_argument(std::string(test) + ": sequence too short (need >= " +
                                    std::to_string(min_len) + " bits)");
}

double igamc(double a, double x) { return boost::math::gamma_q(a, x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TestResult monobit_impl(const std::vector<std::uint8_t>& bits) {
    require_length(bits.size(), 100, "monobit");
    const double n = static_cast<double>(bits.size());
    std::int64_t s = 0;
    for (auto b : bits) s += b ? 1 : -1;
    const double s_obs = std::abs(static_cast<double>(s)) / std::sqrt(n);
    const double p = std::erfc(s_obs / std::sqrt(2.0));
    return {"monobit", s_obs, p, p >= kPassThreshold, true};
}

TestResult block_frequency_impl(const std::vector<std::uint8_t>& bits, std::size_t M) {
    require_length(bits.size(), 100, "block_frequency");
    if (M < 2) throw std::invalid_argument("block_frequency: block_len must be >= 2");
    const std::size_t N = bits.size() / M;
    if (N == 0) throw std::invalid_argument("block_frequency: sequence shorter than one block");
    double chi2 = 0.0;
    for (std::size_t b = 0; b < N; ++b) {
        std::size_t ones = 0;
        for (std::size_t i = b * M; i < (b + 1) * M; ++i) ones += bits[i];
        const double pi = static_cast<double>(ones) / static_cast<double>(M);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(M);
    const double p = igamc(static_cast<double>(N) / 2.0, chi2 / 2.0);
    return {"block_frequency", chi2, p, p >= kPassThreshold, true};
}

TestResult runs_impl(const std::vector<std::uint8_t>& bits) {
    require_length(bits.size(), 100, "runs");
    const double n = static_cast<double>(bits.size());
    std::size_t ones = 0;
    for (auto b : bits) ones += b;
    const double pi = static_cast<double>(ones) / n;
    // Prerequisite: the monobit-style balance condition; a failing stream gets an
    // inapplicable verdict rather than a p-value.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return {"runs", pi, 0.0, false, false};
    std::uint64_t v = 1;
    for (std::size_t i = 0; i + 1 < bits.size(); ++i)
        if (bits[i] != bits[i + 1]) ++v;
    const double num = std::abs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
    const double p = std::erfc(num / den);
    return {"runs", static_cast<double>(v), p, p >= kPassThreshold, true};
}

TestResult cusum_impl(const std::vector<std::uint8_t>& bits, bool reverse) {
    require_length(bits.size(), 100, "cumulative_sums");
    const std::size_t n = bits.size();
    std::int64_t sum = 0;
    std::int64_t z = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t b = reverse ? bits[n - 1 - i] : bits[i];
        sum += b ? 1 : -1;
        z = std::max(z, std::abs(sum));
    }
    const double zd = static_cast<double>(z);
    const double nd = static_cast<double>(n);
    const double sqn = std::sqrt(nd);
    double sum1 = 0.0;
    for (auto k = static_cast<std::int64_t>(std::floor((-nd / zd + 1.0) / 4.0));
         k <= static_cast<std::int64_t>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        const double kd = static_cast<double>(k);
        sum1 += normal_cdf((4.0 * kd + 1.0) * zd / sqn) - normal_cdf((4.0 * kd - 1.0) * zd / sqn);
    }
    double sum2 = 0.0;
    for (auto k = static_cast<std::int64_t>(std::floor((-nd / zd - 3.0) / 4.0));
         k <= static_cast<std::int64_t>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        const double kd = static_cast<double>(k);
        sum2 += normal_cdf((4.0 * kd + 3.0) * zd / sqn) - normal_cdf((4.0 * kd + 1.0) * zd / sqn);
    }
    const double p = std::clamp(1.0 - sum1 + sum2, 0.0, 1.0);
    const char* name = reverse ? "cumulative_sums_reverse" : "cumulative_sums_forward";
    return {name, zd, p, p >= kPassThreshold, true};
}

TestResult approximate_entropy_impl(const std::vector<std::uint8_t>& bits, int m) {
    require_length(bits.size(), 100, "approximate_entropy");
    if (m < 1 || m > 24) throw std::invalid_argument("approximate_entropy: pattern_len out of range");
    const std::size_t n = bits.size();
    if ((std::size_t{1} << (m + 1)) > n)
        throw std::invalid_argument("approximate_entropy: pattern_len too large for the sequence");

    // phi(m) over cyclically extended windows, counted with a rolling pattern index.
    auto phi = [&](int mm) {
        if (mm == 0) return 0.0;
        std::vector<std::uint64_t> counts(std::size_t{1} << mm, 0);
        const std::uint64_t mask = (std::uint64_t{1} << mm) - 1;
        std::uint64_t idx = 0;
        for (int i = 0; i < mm - 1; ++i) idx = ((idx << 1) | bits[i % n]) & mask;
        for (std::size_t i = 0; i < n; ++i) {
            idx = ((idx << 1) | bits[(i + mm - 1) % n]) & mask;
            ++counts[idx];
        }
        double acc = 0.0;
        for (auto c : counts) {
            if (c == 0) continue;
            const double f = static_cast<double>(c) / static_cast<double>(n);
            acc += f * std::log(f);
        }
        return acc;
    };

    const double apen = phi(m) - phi(m + 1);
    const double chi2 = 2.0 * static_cast<double>(n) * (std::log(2.0) - apen);
    const double p = igamc(std::pow(2.0, m - 1), chi2 / 2.0);
    return {"approximate_entropy", chi2, p, p >= kPassThreshold, true};
}

} // namespace

TestResult frequency_monobit(const BitStream& stream) { return monobit_impl(unpack(stream)); }

TestResult block_frequency(const BitStream& stream, std::size_t block_len) {
    return block_frequency_impl(unpack(stream), block_len);
}

TestResult runs_test(const BitStream& stream) { return runs_impl(unpack(stream)); }

std::pair<TestResult, TestResult> cumulative_sums(const BitStream& stream) {
    const auto bits = unpack(stream);
    return {cusum_impl(bits, false), cusum_impl(bits, true)};
}

TestResult approximate_entropy(const BitStream& stream, int pattern_len) {
    return approximate_entropy_impl(unpack(stream), pattern_len);
}

TestReport run_battery(const BitStream& stream, const std::vector<std::string>& battery) {
    const auto bits = unpack(stream);
    TestReport report;
    report.sequence_length = stream.produced;
    for (const auto& name : battery) {
        if (name == "monobit") {
            report.tests.push_back(monobit_impl(bits));
        } else if (name == "block_frequency") {
            report.tests.push_back(block_frequency_impl(bits, 128));
        } else if (name == "runs") {
            report.tests.push_back(runs_impl(bits));
        } else if (name == "cumulative_sums") {
            report.tests.push_back(cusum_impl(bits, false));
            report.tests.push_back(cusum_impl(bits, true));
        } else if (name == "approximate_entropy") {
            report.tests.push_back(approximate_entropy_impl(bits, 10));
        } else {
            throw std::invalid_argument("run_battery: unknown test name '" + name + "'");
        }
    }
    report.overall_pass = !report.tests.empty() &&
                          std::all_of(report.tests.begin(), report.tests.end(),
                                      [](const TestResult& t) { return t.pass; });
    return report;
}

std::string format_report_table(const TestReport& report) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-26s %12s  %s\n", "test", "p-value", "verdict");
    out += line;
    out += std::string(46, '-') + "\n";
    for (const auto& t : report.tests) {
        if (!t.applicable) {
            std::snprintf(line, sizeof line, "%-26s %12s  %s\n", t.name.c_str(), "-", "n/a");
        } else {
            std::snprintf(line, sizeof line, "%-26s %12.6f  %s\n", t.name.c_str(), t.p_value,
                          t.pass ? "PASS" : "FAIL");
        }
        out += line;
    }
    out += std::string(46, '-') + "\n";
    std::snprintf(line, sizeof line, "%llu bits, overall: %s\n",
                  static_cast<unsigned long long>(report.sequence_length),
                  report.overall_pass ? "PASS" : "FAIL");
    out += line;
    return out;
}

} // namespace qrng
