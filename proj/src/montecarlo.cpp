#include "qrng/montecarlo.hpp"

#include "qrng/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrng {

namespace {

// Samples are generated in fixed-size chunks, each from a stream keyed by
// (seed, domain, chunk index). Sample i is a pure function of the seed, so results do
// not depend on how generation is scheduled, and prefixes agree across batch sizes.
constexpr std::size_t kChunk = 1u << 16;
constexpr std::uint64_t kDomainPhase = 0x70686173653a3030ULL;
constexpr std::uint64_t kDomainSignal = 0x7369676e616c3a30ULL;

double fold_phase(double x) {
    double y = std::fmod(x, 2.0 * kPi);
    if (y < 0.0) y += 2.0 * kPi;
    if (y > kPi) y = 2.0 * kPi - y;
    if (y >= kPi) y = std::nextafter(kPi, 0.0); // keep the half-open contract
    return y;
}

double draw_phase(Xoshiro256pp& g, const OpticalConfig& cfg, PhaseMode mode) {
    if (mode == PhaseMode::exact_uniform) return kPi * g.uniform01();
    return fold_phase(cfg.delta_theta + cfg.sigma_phi * std::sqrt(2.0) * g.gaussian());
}

double draw_intensity(Xoshiro256pp& g, double mean, double sigma, std::uint64_t& redraws) {
    if (sigma == 0.0) return mean;
    for (;;) {
        const double v = mean + sigma * g.gaussian();
        if (v > 0.0) return v;
        ++redraws;
    }
}

} // namespace

void NoiseConfig::validate() const {
    auto nonneg = [](double v, const char* name) {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
    };
    nonneg(sigma_s1, "sigma_s1");
    nonneg(sigma_s2, "sigma_s2");
    nonneg(sigma_zeta, "sigma_zeta");
    nonneg(sigma_jitter, "sigma_jitter");
}

std::vector<double> sample_phase(const OpticalConfig& cfg, PhaseMode mode, std::size_t n,
                                 std::uint64_t seed) {
    cfg.validate();
    if (n == 0) throw std::invalid_argument("sample_phase: n must be > 0");
    if (mode == PhaseMode::wrapped_gaussian && cfg.sigma_phi == 0.0)
        throw std::invalid_argument("sample_phase: wrapped_gaussian needs sigma_phi > 0");
    std::vector<double> out(n);
    const std::uint64_t base = derive_seed(seed, kDomainPhase);
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t stop = std::min(n, start + kChunk);
        Xoshiro256pp g(derive_seed(base, start / kChunk));
        for (std::size_t i = start; i < stop; ++i) out[i] = draw_phase(g, cfg, mode);
    }
    return out;
}

SampleBatch sample_signals(const OpticalConfig& cfg, const NoiseConfig& noise,
                           const std::optional<ChirpJitterConfig>& cj, std::size_t n,
                           std::uint64_t seed) {
    cfg.validate();
    noise.validate();
    if (n == 0) throw std::invalid_argument("sample_signals: n must be > 0");
    const bool jitter_on = noise.sigma_jitter > 0.0;
    if (jitter_on && !cj)
        throw std::invalid_argument("sample_signals: sigma_jitter > 0 requires chirp parameters");
    if (cj) cj->validate();
    if (noise.phase_mode == PhaseMode::wrapped_gaussian && cfg.sigma_phi == 0.0)
        throw std::invalid_argument("sample_signals: wrapped_gaussian needs sigma_phi > 0");

    // Constant part of the jitter visibility exponent: (1 + alpha^2) / (8 w^2).
    double jitter_coeff = 0.0;
    if (jitter_on) {
        const double w2 = cj->pulse_width * cj->pulse_width;
        jitter_coeff = (1.0 + cj->alpha * cj->alpha) / (8.0 * w2);
    }

    SampleBatch batch;
    batch.seed = seed;
    batch.values.resize(n);
    const std::uint64_t base = derive_seed(seed, kDomainSignal);
    std::uint64_t redraws = 0;
    for (std::size_t start = 0; start < n; start += kChunk) {
        const std::size_t stop = std::min(n, start + kChunk);
        Xoshiro256pp g(derive_seed(base, start / kChunk));
        for (std::size_t i = start; i < stop; ++i) {
            const double dphi = draw_phase(g, cfg, noise.phase_mode);
            const double s1 = draw_intensity(g, cfg.s1_mean, noise.sigma_s1, redraws);
            const double s2 = draw_intensity(g, cfg.s2_mean, noise.sigma_s2, redraws);
            double eta = cfg.visibility;
            if (jitter_on) {
                const double dt = cj->overlap_offset + noise.sigma_jitter * g.gaussian();
                eta = std::exp(-jitter_coeff * dt * dt);
            }
            double s = s1 + s2 + 2.0 * eta * std::sqrt(s1 * s2) * std::cos(dphi);
            if (noise.sigma_zeta > 0.0) s += noise.sigma_zeta * g.gaussian();
            batch.values[i] = s;
        }
    }
    batch.rejected_redraws = redraws;
    return batch;
}

void EmpiricalPdf::validate() const {
    if (bin_edges.size() < 2 || densities.size() + 1 != bin_edges.size())
        throw std::invalid_argument("empirical pdf: edge/density size mismatch");
    for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i)
        if (!(bin_edges[i] < bin_edges[i + 1]))
            throw std::invalid_argument("empirical pdf: bin edges must increase strictly");
    for (double d : densities)
        if (!std::isfinite(d) || d < 0.0)
            throw std::invalid_argument("empirical pdf: densities must be finite and >= 0");
}

double EmpiricalPdf::total_mass() const {
    double m = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) m += densities[i] * bin_width(i);
    return m;
}

double EmpiricalPdf::mass_between(double a, double b) const {
    if (!(a <= b)) throw std::invalid_argument("mass_between: need a <= b");
    double m = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        const double lo = std::max(bin_edges[i], a);
        const double hi = std::min(bin_edges[i + 1], b);
        if (hi > lo) m += densities[i] * (hi - lo);
    }
    return m;
}

double EmpiricalPdf::cdf(double x) const {
    if (x <= support_lo()) return 0.0;
    if (x >= support_hi()) return total_mass();
    return mass_between(support_lo(), x);
}

double EmpiricalPdf::quantile(double p) const {
    if (!(p >= 0.0) || !(p <= 1.0)) throw std::invalid_argument("quantile: p must be in [0, 1]");
    const double target = p * total_mass();
    double cum = 0.0;
    for (std::size_t i = 0; i < densities.size(); ++i) {
        const double step = densities[i] * bin_width(i);
        // Piecewise-linear CDF: invert inside the bin where the target mass falls.
        if (cum + step >= target && step > 0.0) {
            const double frac = (target - cum) / step;
            return bin_edges[i] + frac * bin_width(i);
        }
        cum += step;
    }
    return support_hi();
}

EmpiricalPdf estimate_pdf(const SampleBatch& batch, std::size_t bin_count,
                          std::optional<std::pair<double, double>> range) {
    if (batch.values.empty()) throw std::invalid_argument("estimate_pdf: empty batch");
    if (bin_count < 16) throw std::invalid_argument("estimate_pdf: bin_count must be >= 16");

    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
        if (!(lo < hi)) throw std::invalid_argument("estimate_pdf: range must satisfy lo < hi");
    } else {
        const auto [mn, mx] = std::minmax_element(batch.values.begin(), batch.values.end());
        const double span = *mx - *mn;
        const double pad = span > 0.0 ? span * 1e-9 : std::max(1.0, std::abs(*mn)) * 1e-9;
        lo = *mn - pad;
        hi = *mx + pad;
    }

    EmpiricalPdf pdf;
    pdf.bin_edges.resize(bin_count + 1);
    const double width = (hi - lo) / static_cast<double>(bin_count);
    for (std::size_t i = 0; i <= bin_count; ++i)
        pdf.bin_edges[i] = lo + width * static_cast<double>(i);
    pdf.bin_edges.back() = hi;

    std::vector<std::uint64_t> counts(bin_count, 0);
    std::uint64_t inside = 0;
    const double scale = static_cast<double>(bin_count) / (hi - lo);
    for (double v : batch.values) {
        if (v < lo || v >= hi) continue;
        auto idx = static_cast<std::size_t>((v - lo) * scale);
        if (idx >= bin_count) idx = bin_count - 1;
        ++counts[idx];
        ++inside;
    }
    if (inside == 0) throw std::invalid_argument("estimate_pdf: no samples inside the given range");

    pdf.densities.resize(bin_count);
    for (std::size_t i = 0; i < bin_count; ++i)
        pdf.densities[i] =
            static_cast<double>(counts[i]) / (static_cast<double>(inside) * pdf.bin_width(i));
    pdf.sample_count = inside;
    return pdf;
}

} // namespace qrng
