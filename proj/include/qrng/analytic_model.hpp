#pragma once

#include <stdexcept>

namespace qrng {

/// Laser-pulse chirp and overlap-jitter parameters controlling interference visibility.
struct ChirpJitterConfig {
    double alpha = 0.0;          ///< linewidth enhancement (Henry) factor, >= 0
    double pulse_width = 50e-12; ///< RMS pulse duration in seconds, > 0
    double overlap_offset = 0.0; ///< pulse overlap inaccuracy in seconds

    void validate() const;
};

/// Mean optical parameters of one interfering pulse pair.
struct OpticalConfig {
    double s1_mean = 1.0;     ///< mean normalized intensity, short arm, > 0
    double s2_mean = 1.0;     ///< mean normalized intensity, long arm, > 0
    double visibility = 1.0;  ///< interference visibility in [0, 1]
    double delta_theta = 0.0; ///< deterministic interferometer phase offset, radians
    double sigma_phi = 2.0 * 3.141592653589793238462643383279502884;
    ///< RMS of a single pulse's diffused phase, radians; the pulse-pair phase
    ///< difference then has RMS sigma_phi * sqrt(2)
    int k_factor = 1; ///< interferometer type multiplier entering the phase offset, 1 or 2

    void validate() const;
};

/// Support of the noise-free interference intensity distribution.
///
/// The intensity of two interfering pulses with fixed intensities s1, s2 and a
/// uniformly random phase difference follows an arcsine law on [s_min, s_max].
struct InterferencePdf {
    double s_min = 0.0;
    double s_max = 0.0;
    double width = 0.0; ///< s_max - s_min = 4 * visibility * sqrt(s1 * s2)

    double midpoint() const { return 0.5 * (s_min + s_max); }
    double half_width() const { return 0.5 * width; }
};

/// Computes the arcsine support from the pulse-pair configuration.
/// Zero visibility is a legal degenerate case (point mass at s1 + s2).
InterferencePdf interference_bounds(const OpticalConfig& cfg);

/// Arcsine density at x. Diverges toward the endpoints; x must lie strictly inside
/// (s_min, s_max) or std::domain_error is thrown (endpoints included). Degenerate
/// support is rejected, so integrators must use open (midpoint-style) rules.
double quantum_pdf_eval(const InterferencePdf& pdf, double x);

/// Arcsine CDF at y, clamped to [0, 1] outside the support.
double quantum_cdf_eval(const InterferencePdf& pdf, double y);

/// Inverse CDF; p must lie in (0, 1). Exact closed form, no iteration.
double quantum_quantile(const InterferencePdf& pdf, double p);

/// Visibility of chirped-pulse interference under a pulse-overlap offset:
/// eta = exp(-(1 + alpha^2) * dt^2 / (8 w^2)).
double visibility_from_overlap(const ChirpJitterConfig& cj);

/// Wrapped-Gaussian distribution of the pulse-pair phase difference folded into
/// [0, pi) by the cosine symmetry of the interference term.
struct WrappedPhasePdf {
    double sigma_dphi = 0.0;  ///< RMS of the unwrapped pulse-pair phase difference, > 0
    double delta_theta = 0.0; ///< deterministic phase offset before folding
    int truncation_terms = 8; ///< theta-series terms kept; error per theta_tail_bound
};

/// Third Jacobi theta function: 1 + 2 * sum_{j=1..terms} q^{j^2} cos(2 j u).
double jacobi_theta3(double u, double q, int terms);

/// Upper bound on the truncation error of jacobi_theta3 after `terms` terms,
/// valid for 0 <= q < 1: 2 q^{(terms+1)^2} / (1 - q).
double theta_tail_bound(double q, int terms);

/// Density of the folded phase: zero outside [0, pi), theta-series value inside.
/// As sigma_dphi grows the density converges to the uniform value 1/pi, with
/// sup-distance bounded by 2q/pi where q = exp(-sigma_dphi^2 / 2).
double wrapped_phase_pdf_eval(const WrappedPhasePdf& pdf, double x);

/// How far the folded phase can sit from uniform, and whether the headline
/// "effectively uniform" condition sigma_phi * sqrt(2) > 2 pi holds.
struct UniformityMargin {
    double sigma_dphi = 0.0; ///< sigma_phi * sqrt(2)
    double two_q = 0.0;      ///< 2 exp(-sigma_dphi^2 / 2); sup deviation is two_q / pi
    bool criterion_met = false;
};

UniformityMargin uniformity_margin(double sigma_phi);

} // namespace qrng
