#include "qrng/reduction.hpp"
#include "qrng/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace qrng;

namespace {

OpticalConfig calib_optics() {
    OpticalConfig cfg;
    cfg.visibility = 0.95;
    return cfg;
}

NoiseConfig calib_noise(double sigma_zeta) {
    NoiseConfig n;
    n.sigma_s1 = 0.05;
    n.sigma_s2 = 0.05;
    n.sigma_zeta = sigma_zeta;
    return n;
}

EmpiricalPdf uniform_pdf(double lo, double hi, std::size_t bins = 50) {
    EmpiricalPdf pdf;
    for (std::size_t i = 0; i <= bins; ++i)
        pdf.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(i) / bins);
    pdf.densities.assign(bins, 1.0 / (hi - lo));
    pdf.sample_count = 1;
    return pdf;
}

/// Two raised Gaussian bumps tabulated into bins; peaks at +/- center.
EmpiricalPdf bimodal_pdf(double center, double sigma, std::size_t bins = 200) {
    EmpiricalPdf pdf;
    const double lo = -center - 6 * sigma, hi = center + 6 * sigma;
    for (std::size_t i = 0; i <= bins; ++i)
        pdf.bin_edges.push_back(lo + (hi - lo) * static_cast<double>(i) / bins);
    double mass = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
        const double x = pdf.bin_center(i);
        const double g = std::exp(-0.5 * std::pow((x - center) / sigma, 2)) +
                         std::exp(-0.5 * std::pow((x + center) / sigma, 2));
        pdf.densities.push_back(g);
        mass += g * pdf.bin_width(i);
    }
    for (auto& d : pdf.densities) d /= mass;
    pdf.sample_count = 1;
    return pdf;
}

} // namespace

TEST_CASE("comparator reduction factor formula") {
    CHECK(gamma_comparator(1.0).value == doctest::Approx(1.0));
    CHECK_FALSE(gamma_comparator(1.0).infinite);
    CHECK(gamma_comparator(1.5).value == doctest::Approx(2.0));
    CHECK(gamma_comparator(1.2).value == doctest::Approx(1.25));
    CHECK(gamma_comparator(2.0).infinite);
    CHECK(gamma_comparator(2.7).infinite);
    CHECK_THROWS_AS(gamma_comparator(0.99), std::invalid_argument);

    CHECK(gamma_comparator(MinEntropy{1.5, false}).value == doctest::Approx(2.0));
    CHECK(gamma_comparator(MinEntropy{0.0, true}).infinite);
}

TEST_CASE("adc reduction factor and its comparator limit") {
    // n-bit formula collapses to the comparator one at n = 1, delta_u = width / 2
    for (double h : {1.0, 1.3, 1.7, 1.99})
        CHECK(gamma_adc(1, 1.0, h).value == gamma_comparator(h).value);
    CHECK(gamma_adc(1, 1.0, 2.0).infinite);

    CHECK(gamma_adc(8, 1.0, 1.0).value == doctest::Approx(8.0)); // no classical noise: gamma = n
    CHECK(gamma_adc(4, 2.5, 3.0).value == doctest::Approx(4.0 / 0.5));
    CHECK(gamma_adc(4, 1.0, 2.5).infinite); // denominator <= 0

    CHECK_THROWS_AS(gamma_adc(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_adc(1, 1.5, 1.2), std::invalid_argument); // h below quantum value
}

TEST_CASE("most-likely adc bin probability on the arcsine law") {
    const auto b = interference_bounds(calib_optics());
    // first-bin mass via the arcsine CDF; cross-check with the angle-substitution oracle
    for (double du : {0.05, 0.4, 1.0, 2.0}) {
        const double p = p_max_adc(b, du);
        CHECK(p == doctest::Approx(oracles::arcsine_mass(b, b.s_min, b.s_min + du))
                       .epsilon(1e-10));
        CHECK(p == doctest::Approx(1.0 - std::acos(du / b.half_width() - 1.0) / kPi)
                       .epsilon(1e-12));
    }
    CHECK_THROWS_AS(p_max_adc(b, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(p_max_adc(b, b.width), std::invalid_argument);
}

TEST_CASE("quantum comparator min-entropy is one bit exactly") {
    for (double eta : {1.0, 0.95, 0.477, 0.1}) {
        auto o = calib_optics();
        o.visibility = eta;
        CHECK(quantum_min_entropy_comparator(interference_bounds(o)) ==
              doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("density-callable min-entropy integrates the singular edge") {
    const auto b = interference_bounds(calib_optics());
    const auto density = [&](double x) { return quantum_pdf_eval(b, x); };
    const auto h = min_entropy_comparator(density, b.s_min, b.width);
    REQUIRE_FALSE(h.infinite);
    // quadrature solves the mass to 1e-9; in bits that is ~3e-9
    CHECK(h.bits == doctest::Approx(1.0).epsilon(1e-7));

    CHECK_THROWS_AS(min_entropy_comparator(density, b.s_min, b.width, HInfMode::unbounded_below),
                    std::invalid_argument);
    CHECK_THROWS_AS(min_entropy_comparator(density, b.s_min, 0.0), std::invalid_argument);

    const auto h_adc = min_entropy_adc(density, b.s_min, 0.5 * b.width);
    CHECK(h_adc.bits == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("empirical min-entropy: noise raises it, lower-limit modes order correctly") {
    const auto analytic = interference_bounds(calib_optics());

    const auto clean = estimate_pdf(
        sample_signals(calib_optics(), NoiseConfig{}, std::nullopt, 200000, 5), 256);
    const auto h_clean = min_entropy_comparator(clean, analytic.s_min, analytic.width);
    CHECK(h_clean.bits == doctest::Approx(1.0).epsilon(0.02));

    const auto noisy = estimate_pdf(
        sample_signals(calib_optics(), calib_noise(0.15), std::nullopt, 200000, 5), 256);
    const auto h_noisy = min_entropy_comparator(noisy, analytic.s_min, analytic.width);
    CHECK(h_noisy.bits > 1.02);

    const auto h_all =
        min_entropy_comparator(noisy, analytic.s_min, analytic.width, HInfMode::unbounded_below);
    CHECK(h_all.bits <= h_noisy.bits); // counting sub-s_min mass can only grow the interval mass

    SUBCASE("zero interval mass reports the infinite sentinel") {
        const auto far = uniform_pdf(10.0, 11.0);
        const auto h = min_entropy_comparator(far, 0.0, 2.0);
        CHECK(h.infinite);
        CHECK(gamma_comparator(h).infinite);
    }
}

TEST_CASE("median threshold splits the empirical mass in half") {
    EmpiricalPdf pdf = uniform_pdf(0.0, 1.0, 20);
    pdf.densities[0] = 5.0; // asymmetric: heavy first bin
    double mass = 0.0;
    for (std::size_t i = 0; i < pdf.bin_count(); ++i) mass += pdf.densities[i] * pdf.bin_width(i);
    for (auto& d : pdf.densities) d /= mass;

    const double v = comparator_threshold(pdf);
    CHECK(pdf.mass_between(pdf.support_lo(), v) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v < 0.5); // pulled toward the heavy side
}

TEST_CASE("broadening factor on a synthetic two-peak density") {
    // sigma wide enough that the valley stays above the floor: one contiguous region
    const auto pdf = bimodal_pdf(1.5, 0.6);
    const auto res = broadening_factor(pdf, 1e-5);

    const double bin = pdf.bin_width(0);
    CHECK(std::abs(res.peak_left + 1.5) < bin);
    CHECK(std::abs(res.peak_right - 1.5) < bin);
    CHECK(res.w > 0.0);
    CHECK(res.b == doctest::Approx(res.w / (res.peak_right - res.peak_left)));
    CHECK(res.b > 1.0);

    SUBCASE("unimodal input is rejected with the peaks diagnostic") {
        const auto uni = bimodal_pdf(0.0, 0.4); // both bumps coincide: single peak
        CHECK_THROWS_WITH_AS(broadening_factor(uni, 1e-5),
                             doctest::Contains("peaks not found"), std::invalid_argument);
        CHECK_THROWS_AS(broadening_factor(pdf, 0.0), std::invalid_argument);
    }

    SUBCASE("noise-free arcsine histogram gives b just above one") {
        const auto clean = estimate_pdf(
            sample_signals(OpticalConfig{}, NoiseConfig{}, std::nullopt, 200000, 17), 256);
        const auto r = broadening_factor(clean, 1e-5);
        CHECK(r.b > 1.0);
        CHECK(r.b < 1.02);
    }
}

TEST_CASE("untrusted interval solves the one-sided mass equation") {
    const auto pdf = uniform_pdf(0.0, 1.0);
    const double v = 0.5;

    CHECK(untrusted_interval(pdf, v, Gamma{1.0, false}) == 0.0);

    const double dv = untrusted_interval(pdf, v, Gamma{1.25, false});
    CHECK(dv == doctest::Approx(0.1).epsilon(1e-4)); // uniform density 1: mass == length
    CHECK(pdf.mass_between(v, v + dv) == doctest::Approx(0.1).epsilon(2e-5));
    // symmetric discard band carries (gamma-1)/gamma total
    CHECK(pdf.mass_between(v - dv, v + dv) == doctest::Approx(0.2).epsilon(2e-5));

    const double dv2 = untrusted_interval(pdf, v, Gamma{2.0, false});
    CHECK(pdf.mass_between(v, v + dv2) == doctest::Approx(0.25).epsilon(2e-5));

    SUBCASE("unreachable one-sided mass is an error") {
        CHECK_THROWS_AS(untrusted_interval(pdf, 0.95, Gamma{1.25, false}),
                        std::invalid_argument); // only 0.05 mass to the right
        CHECK_THROWS_AS(untrusted_interval(pdf, 0.05, Gamma{1.25, false}),
                        std::invalid_argument); // mirror case on the left
    }
    CHECK_THROWS_AS(untrusted_interval(pdf, 0.5, Gamma{0.0, true}), std::invalid_argument);
    CHECK_THROWS_AS(untrusted_interval(pdf, -1.0, Gamma{1.25, false}), std::invalid_argument);
    CHECK_THROWS_AS(untrusted_interval(pdf, 0.5, Gamma{0.5, false}), std::invalid_argument);
}

TEST_CASE("curve interpolation, range handling, and validation") {
    GammaCurve curve;
    curve.points = {{0.0, 1.2, 1.1, 1.1}, {0.1, 1.6, 1.3, 1.25}, {0.2, 2.0, 1.8, 1.45}};

    CHECK(gamma_from_b(curve, 1.6).gamma.value == doctest::Approx(1.3));
    CHECK(gamma_from_b(curve, 1.4).gamma.value == doctest::Approx(1.2)); // halfway 1.1 -> 1.3
    CHECK(gamma_from_b(curve, 2.0).gamma.value == doctest::Approx(1.8));

    const auto below = gamma_from_b(curve, 1.0);
    CHECK(below.below_range);
    CHECK(below.gamma.value == doctest::Approx(1.1));

    const auto above = gamma_from_b(curve, 2.5);
    CHECK(above.gamma.infinite);
    CHECK_FALSE(above.below_range);

    CHECK_THROWS_AS(gamma_from_b(curve, std::nan("")), std::invalid_argument);

    GammaCurve bad = curve;
    bad.points[1].b = 1.2; // tie breaks strict b ordering
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = curve;
    bad.points[2].gamma = 1.0; // gamma regression
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.points.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("gamma curve built from a small grid is monotone and deterministic") {
    CurveConfig cfg;
    cfg.optical = calib_optics();
    cfg.base_noise = calib_noise(0.0);
    cfg.sigma_zeta_grid = {0.0, 0.08, 0.16};
    cfg.samples_per_point = 50'000;
    cfg.bin_count = 128;
    cfg.seed = 3;

    const auto curve = build_gamma_curve(cfg);
    REQUIRE(curve.points.size() == 3);
    CHECK_NOTHROW(curve.validate());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(curve.points[i].sigma_zeta == cfg.sigma_zeta_grid[i]);
        CHECK(curve.points[i].h_inf >= 1.0);
        CHECK(curve.points[i].gamma >= 1.0);
    }
    CHECK(curve.points[2].gamma > curve.points[0].gamma); // noise raises the reduction factor
    CHECK_FALSE(curve.truncated);

    const auto again = build_gamma_curve(cfg);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(curve.points[i].b == again.points[i].b);
        CHECK(curve.points[i].gamma == again.points[i].gamma);
    }

    SUBCASE("config validation") {
        auto bad = cfg;
        bad.sigma_zeta_grid = {0.1, 0.1};
        CHECK_THROWS_AS(build_gamma_curve(bad), std::invalid_argument);
        bad = cfg;
        bad.base_noise.sigma_jitter = 1e-12;
        CHECK_THROWS_AS(build_gamma_curve(bad), std::invalid_argument);
        bad = cfg;
        bad.samples_per_point = 100;
        CHECK_THROWS_AS(build_gamma_curve(bad), std::invalid_argument);
    }
}

TEST_CASE("left-maximum shortcut overestimates the reduction factor") {
    const auto analytic = interference_bounds(calib_optics());
    const auto pdf = estimate_pdf(
        sample_signals(calib_optics(), calib_noise(0.1), std::nullopt, 200000, 8), 256);

    auto h = min_entropy_comparator(pdf, analytic.s_min, analytic.width);
    h.bits = std::max(h.bits, 1.0);
    const auto direct = gamma_comparator(h);
    const auto shortcut = gamma_leftmax(pdf, analytic.width);

    REQUIRE_FALSE(direct.infinite);
    REQUIRE_FALSE(shortcut.infinite);
    CHECK(shortcut.value >= direct.value);

    SUBCASE("noise-free histogram keeps the shortcut near one") {
        const auto clean = estimate_pdf(
            sample_signals(OpticalConfig{}, NoiseConfig{}, std::nullopt, 200000, 18), 256);
        const auto g = gamma_leftmax(clean, 4.0);
        CHECK(g.value == doctest::Approx(1.0).epsilon(0.03));
    }
    CHECK_THROWS_AS(gamma_leftmax(pdf, 0.0), std::invalid_argument);
}

TEST_CASE("full analysis report on the calibration regime") {
    CurveConfig cc;
    cc.optical = calib_optics();
    cc.base_noise = calib_noise(0.0);
    cc.sigma_zeta_grid = {0.0, 0.05, 0.1, 0.15, 0.2};
    cc.samples_per_point = 50'000;
    cc.bin_count = 128;
    cc.seed = 4;
    const auto curve = build_gamma_curve(cc);

    const auto analytic = interference_bounds(calib_optics());
    const auto pdf = estimate_pdf(
        sample_signals(calib_optics(), calib_noise(0.1), std::nullopt, 200000, 12), 256);
    const auto rep = analyze_pdf(pdf, analytic, curve);

    CHECK(rep.h_inf_q == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE_FALSE(rep.h_inf.infinite);
    CHECK(rep.h_inf.bits >= 1.0);
    CHECK(rep.peak_left < rep.v_th);
    CHECK(rep.v_th < rep.peak_right);
    CHECK(rep.broadening_b > 1.0);
    CHECK(rep.width_w >= rep.peak_right - rep.peak_left);
    REQUIRE_FALSE(rep.gamma.infinite);
    CHECK(rep.gamma.value >= 1.0);
    CHECK(rep.h_inf_mode == HInfMode::from_s_min);

    if (rep.gamma.value > 1.0 + 1e-6) {
        CHECK(rep.dv_gamma > 0.0);
        const double one_sided = (rep.gamma.value - 1.0) / (2.0 * rep.gamma.value);
        CHECK(pdf.mass_between(rep.v_th, rep.v_th + rep.dv_gamma) ==
              doctest::Approx(one_sided).epsilon(1e-3));
    }

    SUBCASE("alternative lower-limit mode is recorded and lowers h_inf") {
        const auto rep2 = analyze_pdf(pdf, analytic, curve, HInfMode::unbounded_below);
        CHECK(rep2.h_inf_mode == HInfMode::unbounded_below);
        CHECK(rep2.h_inf.bits <= rep.h_inf.bits + 1e-12);
    }
}
