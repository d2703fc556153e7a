#pragma once

#include "qrng/reduction.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qrng {

/// Default input pulse repetition rate used for output-rate accounting, Hz.
inline constexpr double kDefaultInputRateHz = 2.5e9;

/// Two comparator thresholds straddling the median threshold by the discard half-width.
struct ComparatorBank {
    double v_th = 0.0;
    double dv_gamma = 0.0;
    double v_th1 = 0.0; ///< v_th - dv_gamma
    double v_th2 = 0.0; ///< v_th + dv_gamma
};

/// Builds the bank; negative dv_gamma is rejected.
ComparatorBank configure_bank(double v_th, double dv_gamma);

/// Packed bit sequence with extraction accounting. produced + discarded = consumed
/// always holds; bits are packed 8 per byte, first bit in the most significant
/// position, with the final partial byte zero-padded.
struct BitStream {
    std::vector<std::uint8_t> bytes;
    std::uint64_t produced = 0;  ///< kept bits
    std::uint64_t consumed = 0;  ///< input samples seen
    std::uint64_t discarded = 0; ///< samples with c1 xor c2 = 1
    std::uint64_t kept_ones = 0; ///< ones among kept bits

    void append(bool bit);
    bool bit(std::uint64_t index) const; ///< index < produced
};

/// Rates of a finished extraction run.
struct PipelineStats {
    double keep_rate = 0.0;     ///< produced / consumed; 0 for an empty run
    double ones_fraction = 0.0; ///< kept_ones / produced; 0 for an empty stream
    double input_rate_hz = kDefaultInputRateHz;
    double implied_output_rate = 0.0; ///< input_rate_hz * keep_rate, bits per second
};

PipelineStats make_stats(const BitStream& stream, double input_rate_hz = kDefaultInputRateHz);

/// Streaming two-comparator extractor. Each sample is digitized by both comparators
/// (c = [value > threshold], strict inequality); when the two bits agree the common
/// bit is kept, otherwise the sample is discarded. Equivalently: keep 0 when
/// value <= v_th1, keep 1 when value > v_th2, discard inside (v_th1, v_th2].
/// Restartable: construct with a previously taken BitStream to continue a run.
class TwoComparatorExtractor {
  public:
    explicit TwoComparatorExtractor(const ComparatorBank& bank);
    TwoComparatorExtractor(const ComparatorBank& bank, BitStream resume);

    void feed(std::span<const double> samples);
    const BitStream& stream() const { return out_; }
    BitStream take() { return std::move(out_); }
    const ComparatorBank& bank() const { return bank_; }

  private:
    ComparatorBank bank_;
    BitStream out_;
};

/// One-shot extraction of a whole batch.
struct ExtractionResult {
    BitStream stream;
    PipelineStats stats;
};

ExtractionResult digitize_and_extract(std::span<const double> samples, const ComparatorBank& bank,
                                      double input_rate_hz = kDefaultInputRateHz);

/// Verdict of comparing a run's keep rate against the 1/gamma prediction.
struct KeepRateCheck {
    bool pass = false;
    double deviation = 0.0; ///< |keep_rate - 1/gamma|
    double expected = 1.0;  ///< 1/gamma
};

/// gamma must be finite; tolerance is the caller's acceptance band on the deviation.
KeepRateCheck keep_rate_check(const PipelineStats& stats, const Gamma& gamma, double tolerance);

} // namespace qrng
