#pragma once

#include "qrng/montecarlo.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qrng {

/// Result of stepping a reference comparator across the signal and counting ones
/// and zeros at each threshold.
struct SweepRecord {
    std::vector<double> thresholds;      ///< strictly increasing, uniform step
    std::vector<std::uint64_t> ones;     ///< samples with value > threshold
    std::vector<std::uint64_t> zeros;    ///< samples with value <= threshold
    std::vector<double> ratios;          ///< ones/zeros; 0 where saturated
    std::vector<bool> saturated;         ///< zeros == 0, ratio not representable
    std::size_t bits_per_step = 0;
    std::uint64_t seed = 0;

    double delta_v() const { return thresholds[1] - thresholds[0]; }
    void validate() const;
};

/// Convenience: n_steps + 1 uniformly spaced thresholds covering [lo, hi].
std::vector<double> make_threshold_grid(double lo, double hi, std::size_t n_steps);

/// Acquires bits_per_step fresh samples per threshold (as a hardware sweep would)
/// and records the ones/zeros ratios. Deterministic under seed; each threshold uses
/// an independently derived stream.
SweepRecord run_sweep(const OpticalConfig& cfg, const NoiseConfig& noise,
                      const std::vector<double>& v_grid, std::size_t bits_per_step,
                      std::uint64_t seed,
                      const std::optional<ChirpJitterConfig>& cj = std::nullopt);

/// Density recovered from the sweep ratios plus bookkeeping about skipped pairs.
struct SweepReconstruction {
    EmpiricalPdf pdf;              ///< bins are the threshold intervals; renormalized
    double raw_mass = 0.0;         ///< integral before renormalization
    std::vector<std::size_t> gaps; ///< indices of threshold pairs skipped (saturation)
};

/// Turns adjacent ratio pairs into densities:
///   f_i = |R_i - R_{i+1}| / (dV * (1 + R_i + R_{i+1} + R_i * R_{i+1}))
/// For exact ratios R = (1 - F)/F this equals the finite difference
/// (F(V_{i+1}) - F(V_i))/dV identically. Pairs touching a saturated threshold are
/// skipped (left at zero density) and listed in `gaps`.
SweepReconstruction reconstruct_pdf(const SweepRecord& rec);

} // namespace qrng
