#pragma once

#include "qrng/analytic_model.hpp"
#include "qrng/montecarlo.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qrng {

/// Min-entropy in bits. `infinite` marks the zero-interval-mass case (no sample can
/// land in the reference interval), which is reported rather than thrown.
struct MinEntropy {
    double bits = 0.0;
    bool infinite = false;
};

/// Quantum reduction factor. Infinite values are a tagged sentinel, never an IEEE
/// infinity, so serialization stays unambiguous.
struct Gamma {
    double value = 1.0;
    bool infinite = false;
};

/// Lower limit of the min-entropy integral. Classical noise places mass below the
/// quantum support edge; the verbatim definition starts at s_min and ignores it,
/// the alternative counts everything below the interval's upper end.
enum class HInfMode {
    from_s_min,     ///< integrate [s_min, s_min + width/2] (default, definition read verbatim)
    unbounded_below ///< integrate (-inf, s_min + width/2], realized as [support_lo, ...]
};

std::string to_string(HInfMode mode);

/// Min-entropy of the noise-free interference distribution under 1-bit (comparator)
/// digitization: -log2 of the arcsine mass on [s_min, midpoint]. Analytically exactly 1.
double quantum_min_entropy_comparator(const InterferencePdf& pdf);

/// Comparator min-entropy of an empirical distribution: -log2 of its mass on
/// [s_min, s_min + width/2], where s_min/width come from the analytic support.
MinEntropy min_entropy_comparator(const EmpiricalPdf& pdf, double s_min, double width,
                                  HInfMode mode = HInfMode::from_s_min);

/// Same, for an arbitrary density function integrated by adaptive quadrature
/// (absolute mass tolerance 1e-9). Only the verbatim lower limit is meaningful for a
/// bare density callable, so HInfMode::unbounded_below is rejected here.
MinEntropy min_entropy_comparator(const std::function<double(double)>& density, double s_min,
                                  double width, HInfMode mode = HInfMode::from_s_min);

/// Reduction factor for comparator digitization: Gamma = 1 / (2 - h_inf).
/// h_inf >= 2 yields the infinite sentinel; h_inf < 1 is rejected.
Gamma gamma_comparator(double h_inf);
Gamma gamma_comparator(const MinEntropy& h_inf);

/// Probability of the most likely ADC bin: the arcsine mass of [s_min, s_min + delta_u]
/// (the first bin is the mode because the density peaks at the support edge).
/// Requires 0 < delta_u < width.
double p_max_adc(const InterferencePdf& pdf, double delta_u);

/// ADC min-entropy of the full (noise-broadened) distribution over the first bin.
MinEntropy min_entropy_adc(const EmpiricalPdf& pdf, double s_min, double delta_u,
                           HInfMode mode = HInfMode::from_s_min);
MinEntropy min_entropy_adc(const std::function<double(double)>& density, double s_min,
                           double delta_u, HInfMode mode = HInfMode::from_s_min);

/// Reduction factor for an n-bit ADC: Gamma = n / (1 + h_inf_q - h_inf).
/// Non-positive denominator yields the infinite sentinel; h_inf < h_inf_q is rejected.
/// At n = 1 with delta_u = width/2 this reduces exactly to gamma_comparator.
Gamma gamma_adc(int n_bits, double h_inf_q, double h_inf);

/// Comparator threshold choice: the median of the empirical distribution, computed by
/// piecewise-linear interpolation inside the bin containing cumulative mass 0.5.
double comparator_threshold(const EmpiricalPdf& pdf);

/// Peak geometry of a two-peaked empirical distribution.
struct BroadeningResult {
    double b = 0.0;          ///< broadening factor W / (peak_right - peak_left), >= 1 in practice
    double w = 0.0;          ///< extent of the contiguous density > floor region around the mode
    double peak_left = 0.0;  ///< abscissa of the left maximum, parabola-refined
    double peak_right = 0.0; ///< abscissa of the right maximum, parabola-refined
};

/// Measures how much classical noise broadened the two-peaked interference histogram.
/// Throws std::invalid_argument("peaks not found...") on unimodal or flat inputs
/// (the strong chirp+jitter central-peak regime is out of this estimator's scope).
BroadeningResult broadening_factor(const EmpiricalPdf& pdf, double density_floor = 1e-5);

/// Everything needed to rebuild or audit a reduction-factor curve point grid.
struct CurveConfig {
    OpticalConfig optical;
    NoiseConfig base_noise;                ///< sigma_zeta is overridden per grid point
    std::vector<double> sigma_zeta_grid;   ///< non-empty, strictly increasing, >= 0
    std::size_t samples_per_point = 10'000'000;
    std::size_t bin_count = 256;           ///< canonical binning; B is floor-convention sensitive
    double density_floor = 1e-5;
    std::uint64_t seed = 1;
};

struct GammaCurvePoint {
    double sigma_zeta = 0.0;
    double b = 1.0;
    double gamma = 1.0;
    double h_inf = 1.0;
};

/// Monotone (B, Gamma) calibration curve; interpolate with gamma_from_b.
struct GammaCurve {
    std::vector<GammaCurvePoint> points; ///< b strictly increasing, gamma non-decreasing
    CurveConfig generation_config;
    double density_floor = 1e-5;
    std::size_t repaired_points = 0; ///< raw points adjusted by isotonic repair
    bool truncated = false;          ///< true if an infinite-Gamma grid point cut the grid short
    double truncated_at_sigma_zeta = 0.0;

    void validate() const;
};

/// Simulates the grid and assembles the curve. Grid points whose reduction factor is
/// infinite truncate the curve (flagged in the result); non-monotone raw values are
/// repaired by isotonic averaging and counted in repaired_points.
GammaCurve build_gamma_curve(const CurveConfig& cfg);

struct GammaLookup {
    Gamma gamma;
    bool below_range = false; ///< b was below the curve; left-endpoint value returned
};

/// Piecewise-linear interpolation of the curve at broadening factor b.
/// Below the range returns the left endpoint with a warning flag; above the range
/// returns the infinite sentinel (the curve gives no finite guarantee out there).
GammaLookup gamma_from_b(const GammaCurve& curve, double b);

/// Alternative reduction factor that replaces the quantum support edge with the left
/// peak position when integrating. Known to overestimate; kept for comparison.
Gamma gamma_leftmax(const EmpiricalPdf& pdf, double width_hint, double density_floor = 1e-5);

/// Half-width of the discard band around v_th: solves
///   mass(v_th, v_th + dv) = (gamma - 1) / (2 gamma)
/// by bisection on the empirical CDF to 1e-6 mass tolerance. The symmetric band then
/// discards P = (gamma - 1) / gamma, consistent with gamma = 1 / (1 - P).
/// Throws if either side of v_th holds less than the required one-sided mass.
double untrusted_interval(const EmpiricalPdf& pdf, double v_th, const Gamma& gamma);

/// Full audit record of one reduction analysis.
struct ReductionReport {
    MinEntropy h_inf;
    double h_inf_q = 1.0;
    Gamma gamma;
    double p_max = 0.5;
    double broadening_b = 0.0;
    double width_w = 0.0;
    double peak_left = 0.0;
    double peak_right = 0.0;
    double v_th = 0.0;
    double dv_gamma = 0.0; ///< meaningless when gamma.infinite
    HInfMode h_inf_mode = HInfMode::from_s_min;
};

/// Runs the whole comparator-digitization analysis of an empirical pdf against the
/// analytic support: median threshold, peak geometry, min-entropies, the reduction
/// factor looked up on the calibration curve, and the discard band. A broadening
/// factor beyond the curve's range leaves gamma flagged infinite (untrusted regime)
/// and dv_gamma at 0.
ReductionReport analyze_pdf(const EmpiricalPdf& pdf, const InterferencePdf& analytic,
                            const GammaCurve& curve, HInfMode mode = HInfMode::from_s_min);

} // namespace qrng
