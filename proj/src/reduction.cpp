#include "qrng/reduction.hpp"

#include "qrng/rng.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrng {

namespace {

constexpr std::uint64_t kDomainCurve = 0x67616d6d613a3030ULL;

// Mass below which an interval is treated as empty (the infinite-entropy sentinel).
constexpr double kZeroMass = 0.0;

double integrate_density(const std::function<double(double)>& density, double a, double b) {
    // Double-exponential quadrature: open rule, so integrable endpoint singularities
    // (the arcsine edges) are handled without evaluating the density at a or b.
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(density, a, b, 1e-10);
}

MinEntropy entropy_from_mass(double mass) {
    if (!(mass > kZeroMass)) return {0.0, true};
    return {-std::log2(mass), false};
}

} // namespace

std::string to_string(HInfMode mode) {
    return mode == HInfMode::from_s_min ? "from_s_min" : "unbounded_below";
}

double quantum_min_entropy_comparator(const InterferencePdf& pdf) {
    // The arcsine CDF at the midpoint is exactly 1/2, so the comparator's most
    // likely symbol has probability 1/2 and the min-entropy is exactly 1 bit.
    const double mass = quantum_cdf_eval(pdf, pdf.s_min + 0.5 * pdf.width);
    return -std::log2(mass);
}

MinEntropy min_entropy_comparator(const EmpiricalPdf& pdf, double s_min, double width,
                                  HInfMode mode) {
    pdf.validate();
    if (!(width > 0.0) || !std::isfinite(s_min))
        throw std::invalid_argument("min_entropy_comparator: need finite s_min and width > 0");
    const double hi = s_min + 0.5 * width;
    const double lo = mode == HInfMode::from_s_min ? s_min : pdf.support_lo();
    return entropy_from_mass(pdf.mass_between(std::min(lo, hi), hi));
}

MinEntropy min_entropy_comparator(const std::function<double(double)>& density, double s_min,
                                  double width, HInfMode mode) {
    if (!(width > 0.0) || !std::isfinite(s_min))
        throw std::invalid_argument("min_entropy_comparator: need finite s_min and width > 0");
    if (mode != HInfMode::from_s_min)
        throw std::invalid_argument(
            "min_entropy_comparator: unbounded_below needs a binned pdf with a known support");
    return entropy_from_mass(integrate_density(density, s_min, s_min + 0.5 * width));
}

Gamma gamma_comparator(double h_inf) {
    if (!(h_inf >= 1.0))
        throw std::invalid_argument("gamma_comparator: h_inf must be >= 1");
    if (h_inf >= 2.0) return {0.0, true};
    return {1.0 / (2.0 - h_inf), false};
}

Gamma gamma_comparator(const MinEntropy& h_inf) {
    if (h_inf.infinite) return {0.0, true};
    return gamma_comparator(h_inf.bits);
}

double p_max_adc(const InterferencePdf& pdf, double delta_u) {
    if (!(delta_u > 0.0) || delta_u >= pdf.width)
        throw std::invalid_argument("p_max_adc: need 0 < delta_u < width");
    // The density peaks toward s_min, so the first bin is the most likely one.
    return quantum_cdf_eval(pdf, pdf.s_min + delta_u);
}

MinEntropy min_entropy_adc(const EmpiricalPdf& pdf, double s_min, double delta_u, HInfMode mode) {
    pdf.validate();
    if (!(delta_u > 0.0) || !std::isfinite(s_min))
        throw std::invalid_argument("min_entropy_adc: need finite s_min and delta_u > 0");
    const double hi = s_min + delta_u;
    const double lo = mode == HInfMode::from_s_min ? s_min : pdf.support_lo();
    return entropy_from_mass(pdf.mass_between(std::min(lo, hi), hi));
}

MinEntropy min_entropy_adc(const std::function<double(double)>& density, double s_min,
                           double delta_u, HInfMode mode) {
    if (!(delta_u > 0.0) || !std::isfinite(s_min))
        throw std::invalid_argument("min_entropy_adc: need finite s_min and delta_u > 0");
    if (mode != HInfMode::from_s_min)
        throw std::invalid_argument(
            "min_entropy_adc: unbounded_below needs a binned pdf with a known support");
    return entropy_from_mass(integrate_density(density, s_min, s_min + delta_u));
}

Gamma gamma_adc(int n_bits, double h_inf_q, double h_inf) {
    if (n_bits < 1) throw std::invalid_argument("gamma_adc: n_bits must be >= 1");
    if (!(h_inf >= h_inf_q))
        throw std::invalid_argument("gamma_adc: h_inf must be >= h_inf_q");
    const double denom = 1.0 + h_inf_q - h_inf;
    if (denom <= 0.0) return {0.0, true};
    return {static_cast<double>(n_bits) / denom, false};
}

double comparator_threshold(const EmpiricalPdf& pdf) {
    pdf.validate();
    return pdf.quantile(0.5);
}

BroadeningResult broadening_factor(const EmpiricalPdf& pdf, double density_floor) {
    pdf.validate();
    if (!(density_floor > 0.0))
        throw std::invalid_argument("broadening_factor: density_floor must be > 0");
    const auto& d = pdf.densities;
    const std::size_t n = d.size();

    // Split at the median bin and take each side's mode as a peak candidate.
    const double med = pdf.quantile(0.5);
    std::size_t med_bin = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (med < pdf.bin_edges[i + 1]) {
            med_bin = i;
            break;
        }
    }
    std::size_t left = 0;
    for (std::size_t i = 1; i <= med_bin; ++i)
        if (d[i] > d[left]) left = i;
    std::size_t right = med_bin + 1 < n ? med_bin + 1 : n - 1;
    for (std::size_t i = right; i < n; ++i)
        if (d[i] > d[right]) right = i;

    // Bimodality: demand a genuine valley strictly between the candidates.
    bool dip = false;
    if (right > left + 1) {
        double valley = std::numeric_limits<double>::infinity();
        for (std::size_t i = left + 1; i < right; ++i) valley = std::min(valley, d[i]);
        dip = valley < 0.9 * std::min(d[left], d[right]);
    }
    if (!dip)
        throw std::invalid_argument(
            "broadening_factor: peaks not found (distribution is not two-peaked)");

    // Parabolic vertex through the mode bin and its neighbors; cuts the
    // bin-quantization error in the peak separation.
    auto refine = [&](std::size_t b) {
        if (b == 0 || b + 1 == n) return pdf.bin_center(b);
        const double y0 = d[b - 1], y1 = d[b], y2 = d[b + 1];
        const double curv = y0 - 2.0 * y1 + y2;
        if (!(curv < 0.0)) return pdf.bin_center(b);
        double t = 0.5 * (y0 - y2) / curv;
        t = std::clamp(t, -0.5, 0.5);
        return pdf.bin_center(b) + t * pdf.bin_width(b);
    };

    BroadeningResult res;
    res.peak_left = refine(left);
    res.peak_right = refine(right);
    if (!(res.peak_right > res.peak_left))
        throw std::invalid_argument("broadening_factor: peaks not found (degenerate separation)");

    // W: the contiguous above-floor region containing the global mode.
    const std::size_t mode_bin = d[left] >= d[right] ? left : right;
    std::size_t lo = mode_bin, hi = mode_bin;
    while (lo > 0 && d[lo - 1] > density_floor) --lo;
    while (hi + 1 < n && d[hi + 1] > density_floor) ++hi;
    res.w = pdf.bin_edges[hi + 1] - pdf.bin_edges[lo];
    res.b = res.w / (res.peak_right - res.peak_left);
    return res;
}

void GammaCurve::validate() const {
    if (points.empty()) throw std::invalid_argument("gamma curve: no points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].b > points[i - 1].b))
            throw std::invalid_argument("gamma curve: b values must increase strictly");
        if (points[i].gamma < points[i - 1].gamma)
            throw std::invalid_argument("gamma curve: gamma values must be non-decreasing");
    }
}

GammaCurve build_gamma_curve(const CurveConfig& cfg) {
    cfg.optical.validate();
    cfg.base_noise.validate();
    if (cfg.sigma_zeta_grid.empty())
        throw std::invalid_argument("build_gamma_curve: sigma_zeta_grid must be non-empty");
    for (std::size_t i = 0; i < cfg.sigma_zeta_grid.size(); ++i) {
        const double v = cfg.sigma_zeta_grid[i];
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("build_gamma_curve: grid values must be finite and >= 0");
        if (i > 0 && !(v > cfg.sigma_zeta_grid[i - 1]))
            throw std::invalid_argument("build_gamma_curve: grid must increase strictly");
    }
    if (cfg.base_noise.sigma_jitter > 0.0)
        throw std::invalid_argument(
            "build_gamma_curve: jitter regime is out of scope for the curve estimator");
    if (cfg.samples_per_point < 10'000)
        throw std::invalid_argument("build_gamma_curve: samples_per_point must be >= 10000");

    const InterferencePdf analytic = interference_bounds(cfg.optical);
    if (!(analytic.width > 0.0))
        throw std::invalid_argument("build_gamma_curve: zero-visibility config has no width");

    GammaCurve curve;
    curve.generation_config = cfg;
    curve.density_floor = cfg.density_floor;

    const std::uint64_t base = derive_seed(cfg.seed, kDomainCurve);
    for (std::size_t i = 0; i < cfg.sigma_zeta_grid.size(); ++i) {
        NoiseConfig noise = cfg.base_noise;
        noise.sigma_zeta = cfg.sigma_zeta_grid[i];
        const auto batch = sample_signals(cfg.optical, noise, std::nullopt, cfg.samples_per_point,
                                          derive_seed(base, i));
        const auto pdf = estimate_pdf(batch, cfg.bin_count);
        MinEntropy h = min_entropy_comparator(pdf, analytic.s_min, analytic.width);
        // The model guarantees h >= 1; Monte-Carlo noise can dip a zero-noise grid
        // point a fraction of a millibit below, so project back onto the feasible set.
        if (!h.infinite) h.bits = std::max(h.bits, 1.0);
        const Gamma g = gamma_comparator(h);
        if (g.infinite) {
            curve.truncated = true;
            curve.truncated_at_sigma_zeta = cfg.sigma_zeta_grid[i];
            break;
        }
        const auto peaks = broadening_factor(pdf, cfg.density_floor);
        curve.points.push_back({cfg.sigma_zeta_grid[i], peaks.b, g.value, h.bits});
    }
    if (curve.points.empty())
        throw std::invalid_argument("build_gamma_curve: no finite-gamma grid points");

    // Isotonic repair (pool adjacent violators) of both coordinates, then nudge any
    // still-tied b values apart so interpolation stays well defined.
    auto pava = [](std::vector<double>& v) {
        std::size_t m = 0;
        std::vector<double> out(v.size());
        std::vector<std::size_t> cnt(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[m] = v[i];
            cnt[m] = 1;
            ++m;
            while (m > 1 && out[m - 2] > out[m - 1]) {
                const double merged = (out[m - 2] * static_cast<double>(cnt[m - 2]) +
                                       out[m - 1] * static_cast<double>(cnt[m - 1])) /
                                      static_cast<double>(cnt[m - 2] + cnt[m - 1]);
                cnt[m - 2] += cnt[m - 1];
                out[m - 2] = merged;
                --m;
            }
        }
        std::size_t k = 0;
        for (std::size_t blk = 0; blk < m; ++blk)
            for (std::size_t rep = 0; rep < cnt[blk]; ++rep) v[k++] = out[blk];
    };

    std::vector<double> bs, gs;
    for (const auto& p : curve.points) {
        bs.push_back(p.b);
        gs.push_back(p.gamma);
    }
    auto bs0 = bs;
    auto gs0 = gs;
    pava(bs);
    pava(gs);
    for (std::size_t i = 1; i < bs.size(); ++i)
        if (bs[i] <= bs[i - 1]) bs[i] = std::nextafter(bs[i - 1], std::numeric_limits<double>::max());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (bs[i] != bs0[i] || gs[i] != gs0[i]) ++curve.repaired_points;
        curve.points[i].b = bs[i];
        curve.points[i].gamma = gs[i];
    }
    curve.validate();
    return curve;
}

GammaLookup gamma_from_b(const GammaCurve& curve, double b) {
    curve.validate();
    if (!std::isfinite(b)) throw std::invalid_argument("gamma_from_b: b must be finite");
    const auto& pts = curve.points;
    if (b < pts.front().b) return {{pts.front().gamma, false}, true};
    if (b > pts.back().b) return {{0.0, true}, false};
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (b <= pts[i].b) {
            const double t = (b - pts[i - 1].b) / (pts[i].b - pts[i - 1].b);
            return {{pts[i - 1].gamma + t * (pts[i].gamma - pts[i - 1].gamma), false}, false};
        }
    }
    return {{pts.back().gamma, false}, false};
}

Gamma gamma_leftmax(const EmpiricalPdf& pdf, double width_hint, double density_floor) {
    if (!(width_hint > 0.0))
        throw std::invalid_argument("gamma_leftmax: width_hint must be > 0");
    const auto peaks = broadening_factor(pdf, density_floor);
    const MinEntropy h = min_entropy_comparator(pdf, peaks.peak_left, width_hint);
    return gamma_comparator(h);
}

double untrusted_interval(const EmpiricalPdf& pdf, double v_th, const Gamma& gamma) {
    pdf.validate();
    if (gamma.infinite)
        throw std::invalid_argument("untrusted_interval: gamma must be finite");
    if (!(gamma.value >= 1.0))
        throw std::invalid_argument("untrusted_interval: gamma must be >= 1");
    if (!(v_th > pdf.support_lo()) || !(v_th < pdf.support_hi()))
        throw std::invalid_argument("untrusted_interval: v_th must lie inside the pdf support");
    const double target = (gamma.value - 1.0) / (2.0 * gamma.value);
    if (target == 0.0) return 0.0;

    constexpr double kMassTol = 1e-6;
    if (pdf.mass_between(v_th, pdf.support_hi()) < target - kMassTol ||
        pdf.mass_between(pdf.support_lo(), v_th) < target - kMassTol)
        throw std::invalid_argument(
            "untrusted_interval: required one-sided mass unreachable around v_th");

    double lo = 0.0, hi = pdf.support_hi() - v_th;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double mass = pdf.mass_between(v_th, v_th + mid);
        if (std::abs(mass - target) <= kMassTol) return mid;
        if (mass < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ReductionReport analyze_pdf(const EmpiricalPdf& pdf, const InterferencePdf& analytic,
                            const GammaCurve& curve, HInfMode mode) {
    ReductionReport rep;
    rep.h_inf_mode = mode;
    rep.v_th = comparator_threshold(pdf);
    const auto peaks = broadening_factor(pdf, curve.density_floor);
    rep.broadening_b = peaks.b;
    rep.width_w = peaks.w;
    rep.peak_left = peaks.peak_left;
    rep.peak_right = peaks.peak_right;
    rep.h_inf_q = quantum_min_entropy_comparator(analytic);
    rep.h_inf = min_entropy_comparator(pdf, analytic.s_min, analytic.width, mode);
    if (!rep.h_inf.infinite) rep.h_inf.bits = std::max(rep.h_inf.bits, rep.h_inf_q);
    rep.p_max = rep.h_inf.infinite ? 0.0 : std::exp2(-rep.h_inf.bits);
    rep.gamma = gamma_from_b(curve, rep.broadening_b).gamma;
    rep.dv_gamma = rep.gamma.infinite ? 0.0 : untrusted_interval(pdf, rep.v_th, rep.gamma);
    return rep;
}

} // namespace qrng
