#include "qrng/analytic_model.hpp"

#include "qrng/rng.hpp"

#include <cmath>
#include <string>

namespace qrng {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

void require_real(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

void require_support(const InterferencePdf& pdf) {
    require_real(pdf.s_min, "s_min");
    require_real(pdf.s_max, "s_max");
    if (!(pdf.width > 0.0) || !(pdf.s_max > pdf.s_min))
        throw std::invalid_argument("interference pdf has degenerate support (width must be > 0)");
}

} // namespace

void ChirpJitterConfig::validate() const {
    require_real(alpha, "alpha");
    require_real(pulse_width, "pulse_width");
    require_real(overlap_offset, "overlap_offset");
    require(alpha >= 0.0, "alpha must be >= 0");
    require(pulse_width > 0.0, "pulse_width must be > 0");
}

void OpticalConfig::validate() const {
    require_real(s1_mean, "s1_mean");
    require_real(s2_mean, "s2_mean");
    require_real(visibility, "visibility");
    require_real(delta_theta, "delta_theta");
    require_real(sigma_phi, "sigma_phi");
    require(s1_mean > 0.0, "s1_mean must be > 0");
    require(s2_mean > 0.0, "s2_mean must be > 0");
    require(visibility >= 0.0 && visibility <= 1.0, "visibility must be in [0, 1]");
    require(sigma_phi >= 0.0, "sigma_phi must be >= 0");
    require(k_factor == 1 || k_factor == 2, "k_factor must be 1 or 2");
}

InterferencePdf interference_bounds(const OpticalConfig& cfg) {
    cfg.validate();
    const double cross = 2.0 * cfg.visibility * std::sqrt(cfg.s1_mean * cfg.s2_mean);
    const double mid = cfg.s1_mean + cfg.s2_mean;
    return {mid - cross, mid + cross, 2.0 * cross};
}

double quantum_pdf_eval(const InterferencePdf& pdf, double x) {
    require_support(pdf);
    if (!(x > pdf.s_min) || !(x < pdf.s_max))
        throw std::domain_error("quantum_pdf_eval: x outside the open support (s_min, s_max)");
    return 1.0 / (kPi * std::sqrt((x - pdf.s_min) * (pdf.s_max - x)));
}

double quantum_cdf_eval(const InterferencePdf& pdf, double y) {
    require_support(pdf);
    if (y <= pdf.s_min) return 0.0;
    if (y >= pdf.s_max) return 1.0;
    // With y = midpoint - half_width * cos(pi p), the mass below y is
    // 1 - acos((y - midpoint) / half_width) / pi.
    const double t = (y - pdf.midpoint()) / pdf.half_width();
    return 1.0 - std::acos(t) / kPi;
}

double quantum_quantile(const InterferencePdf& pdf, double p) {
    require_support(pdf);
    if (!(p > 0.0) || !(p < 1.0))
        throw std::invalid_argument("quantum_quantile: p must lie strictly inside (0, 1)");
    return pdf.midpoint() - pdf.half_width() * std::cos(kPi * p);
}

double visibility_from_overlap(const ChirpJitterConfig& cj) {
    cj.validate();
    const double dt = cj.overlap_offset;
    const double w2 = cj.pulse_width * cj.pulse_width;
    return std::exp(-(1.0 + cj.alpha * cj.alpha) * dt * dt / (8.0 * w2));
}

double jacobi_theta3(double u, double q, int terms) {
    if (!(q >= 0.0) || !(q < 1.0)) throw std::invalid_argument("jacobi_theta3: q must be in [0, 1)");
    if (terms < 0) throw std::invalid_argument("jacobi_theta3: terms must be >= 0");
    double sum = 1.0;
    double qj = 1.0; // q^{j^2}, advanced by q^{2j-1} each step
    double qodd = q;
    const double q2 = q * q;
    for (int j = 1; j <= terms; ++j) {
        qj *= qodd; // q^{(j-1)^2} * q^{2j-1} = q^{j^2}
        qodd *= q2;
        sum += 2.0 * qj * std::cos(2.0 * j * u);
    }
    return sum;
}

double theta_tail_bound(double q, int terms) {
    if (!(q >= 0.0) || !(q < 1.0))
        throw std::invalid_argument("theta_tail_bound: q must be in [0, 1)");
    if (terms < 0) throw std::invalid_argument("theta_tail_bound: terms must be >= 0");
    // |2 sum_{j>terms} q^{j^2} cos(..)| <= 2 sum_{j>terms} q^{j^2} <= 2 q^{(terms+1)^2} / (1-q);
    // the geometric majorant kicks in because j^2 >= (terms+1)^2 + (j - terms - 1).
    const double e = static_cast<double>(terms + 1) * static_cast<double>(terms + 1);
    return 2.0 * std::pow(q, e) / (1.0 - q);
}

double wrapped_phase_pdf_eval(const WrappedPhasePdf& pdf, double x) {
    if (!(pdf.sigma_dphi > 0.0) || !std::isfinite(pdf.sigma_dphi))
        throw std::invalid_argument(
            "wrapped_phase_pdf_eval: sigma_dphi must be > 0 (zero is a point mass, not a density)");
    if (pdf.truncation_terms < 1)
        throw std::invalid_argument("wrapped_phase_pdf_eval: truncation_terms must be >= 1");
    if (x < 0.0 || x >= kPi) return 0.0;
    const double q = std::exp(-0.5 * pdf.sigma_dphi * pdf.sigma_dphi);
    const double a = 0.5 * (x - pdf.delta_theta);
    const double b = 0.5 * (x + pdf.delta_theta);
    return (jacobi_theta3(a, q, pdf.truncation_terms) + jacobi_theta3(b, q, pdf.truncation_terms)) /
           (2.0 * kPi);
}

UniformityMargin uniformity_margin(double sigma_phi) {
    if (!(sigma_phi >= 0.0) || !std::isfinite(sigma_phi))
        throw std::invalid_argument("uniformity_margin: sigma_phi must be >= 0 and finite");
    UniformityMargin m;
    m.sigma_dphi = sigma_phi * std::sqrt(2.0);
    m.two_q = 2.0 * std::exp(-0.5 * m.sigma_dphi * m.sigma_dphi);
    m.criterion_met = m.sigma_dphi > 2.0 * kPi;
    return m;
}

} // namespace qrng
