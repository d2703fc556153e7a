#pragma once

#include "qrng/analytic_model.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace qrng {

/// How the pulse-pair phase difference is drawn.
enum class PhaseMode {
    exact_uniform,   ///< uniform on [0, pi); the idealized fully-diffused limit
    wrapped_gaussian ///< Gaussian with RMS sigma_phi * sqrt(2), folded into [0, pi)
};

/// Classical noise channels applied on top of the interference model.
struct NoiseConfig {
    double sigma_s1 = 0.0;     ///< RMS intensity fluctuation of pulse 1, >= 0
    double sigma_s2 = 0.0;     ///< RMS intensity fluctuation of pulse 2, >= 0
    double sigma_zeta = 0.0;   ///< RMS additive detection noise, >= 0
    double sigma_jitter = 0.0; ///< RMS pulse-overlap jitter in seconds; > 0 needs chirp params
    PhaseMode phase_mode = PhaseMode::exact_uniform;

    void validate() const;
};

/// A batch of simulated detector values with its provenance.
struct SampleBatch {
    std::vector<double> values;
    std::uint64_t seed = 0;
    std::uint64_t rejected_redraws = 0; ///< non-positive intensity draws that were retried

    std::size_t count() const { return values.size(); }
};

/// Draws n folded phase differences. Deterministic in (cfg, mode, seed); sample i does
/// not depend on n, so prefixes of longer runs match shorter runs exactly.
std::vector<double> sample_phase(const OpticalConfig& cfg, PhaseMode mode, std::size_t n,
                                 std::uint64_t seed);

/// Draws n detector values: interference of two fluctuating pulses plus additive noise.
/// When noise.sigma_jitter > 0, per-pulse visibility is recomputed from a Gaussian
/// overlap offset and `cj` must be provided; otherwise cfg.visibility is used as is.
SampleBatch sample_signals(const OpticalConfig& cfg, const NoiseConfig& noise,
                           const std::optional<ChirpJitterConfig>& cj, std::size_t n,
                           std::uint64_t seed);

/// Normalized histogram density. Integrates to exactly 1 over its support by
/// construction (up to rounding); bins are uniform.
struct EmpiricalPdf {
    std::vector<double> bin_edges; ///< size bins + 1, strictly increasing
    std::vector<double> densities; ///< size bins, >= 0
    std::uint64_t sample_count = 0;

    std::size_t bin_count() const { return densities.size(); }
    double bin_width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
    double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
    double support_lo() const { return bin_edges.front(); }
    double support_hi() const { return bin_edges.back(); }

    /// Integral of the density over all bins.
    double total_mass() const;
    /// Integral of the piecewise-constant density over [a, b] intersected with the support.
    double mass_between(double a, double b) const;
    /// Piecewise-linear CDF of the binned density, clamped outside the support.
    double cdf(double x) const;
    /// Exact inverse of cdf(): linear interpolation inside the bin holding mass
    /// p * total_mass(). p in [0, 1] required.
    double quantile(double p) const;

    void validate() const;
};

/// Bins a batch into `bin_count` uniform bins. Without an explicit range the support is
/// the sample min/max padded by a relative epsilon so every sample lands inside a bin;
/// with an explicit range, samples outside it are dropped and the density renormalizes
/// over the remainder.
EmpiricalPdf estimate_pdf(const SampleBatch& batch, std::size_t bin_count,
                          std::optional<std::pair<double, double>> range = std::nullopt);

} // namespace qrng
