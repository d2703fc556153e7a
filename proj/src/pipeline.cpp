#include "qrng/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace qrng {

ComparatorBank configure_bank(double v_th, double dv_gamma) {
    if (!std::isfinite(v_th) || !std::isfinite(dv_gamma))
        throw std::invalid_argument("configure_bank: thresholds must be finite");
    if (dv_gamma < 0.0) throw std::invalid_argument("configure_bank: dv_gamma must be >= 0");
    return {v_th, dv_gamma, v_th - dv_gamma, v_th + dv_gamma};
}

void BitStream::append(bool bit) {
    const std::uint64_t pos = produced % 8;
    if (pos == 0) bytes.push_back(0);
    if (bit) {
        bytes.back() |= static_cast<std::uint8_t>(1u << (7 - pos));
        ++kept_ones;
    }
    ++produced;
}

bool BitStream::bit(std::uint64_t index) const {
    if (index >= produced) throw std::out_of_range("BitStream::bit: index past produced count");
    return (bytes[index / 8] >> (7 - index % 8)) & 1u;
}

PipelineStats make_stats(const BitStream& stream, double input_rate_hz) {
    if (!(input_rate_hz > 0.0))
        throw std::invalid_argument("make_stats: input_rate_hz must be > 0");
    PipelineStats st;
    st.input_rate_hz = input_rate_hz;
    if (stream.consumed > 0)
        st.keep_rate =
            static_cast<double>(stream.produced) / static_cast<double>(stream.consumed);
    if (stream.produced > 0)
        st.ones_fraction =
            static_cast<double>(stream.kept_ones) / static_cast<double>(stream.produced);
    st.implied_output_rate = st.input_rate_hz * st.keep_rate;
    return st;
}

TwoComparatorExtractor::TwoComparatorExtractor(const ComparatorBank& bank) : bank_(bank) {
    if (!(bank.v_th1 <= bank.v_th) || !(bank.v_th <= bank.v_th2) || bank.dv_gamma < 0.0)
        throw std::invalid_argument("extractor: malformed comparator bank");
}

TwoComparatorExtractor::TwoComparatorExtractor(const ComparatorBank& bank, BitStream resume)
    : TwoComparatorExtractor(bank) {
    if (resume.produced + resume.discarded != resume.consumed)
        throw std::invalid_argument("extractor: resume stream violates conservation");
    out_ = std::move(resume);
}

void TwoComparatorExtractor::feed(std::span<const double> samples) {
    for (const double v : samples) {
        ++out_.consumed;
        const bool c1 = v > bank_.v_th1;
        const bool c2 = v > bank_.v_th2;
        if (c1 == c2)
            out_.append(c1);
        else
            ++out_.discarded;
    }
}

ExtractionResult digitize_and_extract(std::span<const double> samples, const ComparatorBank& bank,
                                      double input_rate_hz) {
    TwoComparatorExtractor ex(bank);
    ex.feed(samples);
    ExtractionResult res{ex.take(), {}};
    res.stats = make_stats(res.stream, input_rate_hz);
    return res;
}

KeepRateCheck keep_rate_check(const PipelineStats& stats, const Gamma& gamma, double tolerance) {
    if (gamma.infinite)
        throw std::invalid_argument("keep_rate_check: gamma must be finite");
    if (!(gamma.value >= 1.0))
        throw std::invalid_argument("keep_rate_check: gamma must be >= 1");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("keep_rate_check: tolerance must be >= 0");
    KeepRateCheck chk;
    chk.expected = 1.0 / gamma.value;
    chk.deviation = std::abs(stats.keep_rate - chk.expected);
    chk.pass = chk.deviation <= tolerance;
    return chk;
}

} // namespace qrng
