#include "qrng/commands.hpp"

#include "qrng/pipeline.hpp"
#include "qrng/reduction.hpp"
#include "qrng/rng.hpp"
#include "qrng/stats_tests.hpp"
#include "qrng/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrng::cmd {

namespace {

// Stage tag for the extractor's own sample stream; keeps it independent from the
// simulate/sweep/curve streams derived from the same run seed.
constexpr std::uint64_t kTagExtract = 0x657874726163743aULL; // "extract:"

std::filesystem::path out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

io::json dump_json(const std::filesystem::path& path, io::json j) {
    io::write_text_atomic(path, j.dump(2) + "\n");
    return j;
}

io::json load_json(const std::filesystem::path& path, const std::string& stage) {
    if (!std::filesystem::exists(path))
        throw std::runtime_error(stage + ": missing prior artifact, expected " + path.string());
    return io::json::parse(io::read_text(path));
}

/// Threshold grid for the staircase sweep: the analytic support stretched by 10% of
/// the width plus five detector-noise sigmas on each side, so the classical tails are
/// covered, cut into 128 uniform steps.
std::vector<double> sweep_grid(const RunConfig& cfg) {
    const auto bounds = interference_bounds(cfg.optical);
    const double pad = 0.1 * bounds.width + 5.0 * cfg.noise.sigma_zeta;
    return make_threshold_grid(bounds.s_min - pad, bounds.s_max + pad, 128);
}

CurveConfig curve_config_for(const RunConfig& cfg) {
    CurveConfig cc;
    cc.optical = cfg.optical;
    cc.base_noise = cfg.noise;
    // The curve calibrates the detector-noise (sigma_zeta) dependence; overlap jitter
    // is a separate optical effect and the grid points are generated without it.
    cc.base_noise.sigma_jitter = 0.0;
    cc.sigma_zeta_grid = cfg.sigma_zeta_grid;
    cc.samples_per_point = cfg.sample_count;
    cc.bin_count = cfg.bins;
    cc.density_floor = cfg.density_floor;
    cc.seed = cfg.seed;
    return cc;
}

GammaCurve obtain_curve(const RunConfig& cfg, const std::filesystem::path& dir,
                        std::vector<std::string>& notes) {
    const auto path = dir / "curve.json";
    const CurveConfig want = curve_config_for(cfg);
    if (std::filesystem::exists(path)) {
        auto curve = io::gamma_curve_from_json(io::json::parse(io::read_text(path)));
        if (io::to_json(curve.generation_config) == io::to_json(want)) return curve;
        notes.push_back("curve.json was built from a different config; rebuilding");
    }
    auto curve = build_gamma_curve(want);
    dump_json(path, io::to_json(curve));
    io::write_text_atomic(dir / "curve.csv", io::gamma_curve_csv(curve));
    return curve;
}

io::json support_json(const InterferencePdf& b) {
    return io::json{{"s_min", b.s_min}, {"s_max", b.s_max}, {"width", b.width}};
}

} // namespace

io::json simulate(const RunConfig& cfg) {
    cfg.validate();
    const auto dir = out_dir(cfg);

    const auto batch = sample_signals(cfg.optical, cfg.noise, cfg.chirp_jitter,
                                      cfg.sample_count, cfg.seed);
    const auto pdf = estimate_pdf(batch, cfg.bins);

    io::write_text_atomic(dir / "samples.csv", io::samples_csv(batch));
    io::write_bytes_atomic(dir / "samples.bin", io::samples_binary(batch));
    io::write_text_atomic(dir / "pdf.csv", io::pdf_csv(pdf));

    io::json meta{{"config", io::to_json(cfg)},
                  {"seed", cfg.seed},
                  {"sample_count", batch.count()},
                  {"rejected_redraws", batch.rejected_redraws},
                  {"support", support_json(interference_bounds(cfg.optical))},
                  {"files", {"samples.csv", "samples.bin", "pdf.csv"}}};
    return dump_json(dir / "samples.json", std::move(meta));
}

io::json sweep(const RunConfig& cfg) {
    cfg.validate();
    const auto dir = out_dir(cfg);

    const auto grid = sweep_grid(cfg);
    const std::size_t bits_per_step = std::max<std::uint64_t>(cfg.sample_count / 100, 10'000);
    const auto rec = run_sweep(cfg.optical, cfg.noise, grid, bits_per_step, cfg.seed,
                               cfg.chirp_jitter);
    const auto recon = reconstruct_pdf(rec);

    io::write_text_atomic(dir / "sweep.csv", io::sweep_csv(rec));
    io::write_text_atomic(dir / "sweep_pdf.csv", io::pdf_csv(recon.pdf));

    io::json meta{{"config", io::to_json(cfg)},
                  {"seed", cfg.seed},
                  {"bits_per_step", rec.bits_per_step},
                  {"delta_v", rec.delta_v()},
                  {"thresholds", rec.thresholds.size()},
                  {"saturated_thresholds",
                   std::count(rec.saturated.begin(), rec.saturated.end(), true)},
                  {"raw_mass", recon.raw_mass},
                  {"skipped_pairs", recon.gaps},
                  {"files", {"sweep.csv", "sweep_pdf.csv"}}};
    return dump_json(dir / "sweep.json", std::move(meta));
}

io::json analyze(const RunConfig& cfg, const AnalyzeOptions& opts) {
    cfg.validate();
    const auto dir = out_dir(cfg);

    std::filesystem::path pdf_path;
    if (opts.pdf_path) {
        pdf_path = *opts.pdf_path;
        if (!std::filesystem::exists(pdf_path))
            throw std::runtime_error("analyze: pdf file not found: " + pdf_path.string());
    } else if (std::filesystem::exists(dir / "sweep_pdf.csv")) {
        pdf_path = dir / "sweep_pdf.csv";
    } else if (std::filesystem::exists(dir / "pdf.csv")) {
        pdf_path = dir / "pdf.csv";
    } else {
        throw std::runtime_error("analyze: missing prior artifact, expected " +
                                 (dir / "sweep_pdf.csv").string() + " or " +
                                 (dir / "pdf.csv").string());
    }
    const auto pdf = io::parse_pdf_csv(io::read_text(pdf_path));

    std::vector<std::string> warnings;
    const auto curve = obtain_curve(cfg, dir, warnings);
    const auto analytic = interference_bounds(cfg.optical);
    const auto report = analyze_pdf(pdf, analytic, curve, opts.h_inf_mode);
    if (gamma_from_b(curve, report.broadening_b).below_range)
        warnings.push_back("broadening factor below the calibration curve range; "
                           "left-endpoint gamma used");

    io::json j = io::to_json(report);
    j["pdf_source"] = pdf_path.string();
    j["config"] = io::to_json(cfg);
    j["warnings"] = warnings;
    return dump_json(dir / "report.json", std::move(j));
}

io::json extract(const RunConfig& cfg, const ExtractOptions& opts) {
    cfg.validate();
    if (opts.recalibrate_every != 0 && opts.recalibrate_every < 10'000)
        throw std::invalid_argument("extract: recalibrate_every must be 0 or >= 10000");
    const auto dir = out_dir(cfg);

    const auto report = io::report_from_json(load_json(dir / "report.json", "extract"));
    if (report.gamma.infinite)
        throw std::runtime_error("extract: untrusted noise regime (reduction factor is "
                                 "infinite); refusing to produce bits");

    GammaCurve curve;
    if (opts.recalibrate_every != 0)
        curve = io::gamma_curve_from_json(load_json(dir / "curve.json", "extract"));

    auto bank = configure_bank(report.v_th, report.dv_gamma);
    const std::uint64_t stage_seed = derive_seed(cfg.seed, kTagExtract);
    const auto batch = sample_signals(cfg.optical, cfg.noise, cfg.chirp_jitter,
                                      cfg.sample_count, stage_seed);

    TwoComparatorExtractor extractor(bank);
    io::json recal_events = io::json::array();
    const std::uint64_t window =
        opts.recalibrate_every == 0 ? batch.count() : opts.recalibrate_every;
    std::uint64_t done = 0;
    while (done < batch.count()) {
        const std::uint64_t n = std::min<std::uint64_t>(window, batch.count() - done);
        extractor.feed({batch.values.data() + done, static_cast<std::size_t>(n)});
        done += n;
        if (opts.recalibrate_every != 0 && n == window && done < batch.count()) {
            SampleBatch win;
            win.values.assign(batch.values.begin() + static_cast<std::ptrdiff_t>(done - n),
                              batch.values.begin() + static_cast<std::ptrdiff_t>(done));
            const auto wpdf = estimate_pdf(win, cfg.bins);
            const double v_th = comparator_threshold(wpdf);
            const auto peaks = broadening_factor(wpdf, cfg.density_floor);
            const auto lookup = gamma_from_b(curve, peaks.b);
            if (lookup.gamma.infinite)
                throw std::runtime_error("extract: untrusted noise regime detected during "
                                         "recalibration; stopping");
            const double dv = untrusted_interval(wpdf, v_th, lookup.gamma);
            auto resumed = extractor.take();
            bank = configure_bank(v_th, dv);
            extractor = TwoComparatorExtractor(bank, std::move(resumed));
            recal_events.push_back(io::json{{"at_consumed", done},
                                            {"v_th", v_th},
                                            {"dv_gamma", dv},
                                            {"b", peaks.b},
                                            {"gamma", lookup.gamma.value}});
        }
    }

    const auto stream = extractor.take();
    const auto stats = make_stats(stream);
    io::write_bytes_atomic(dir / "bits.bin", stream.bytes);

    io::json meta{{"bit_count", stream.produced},
                  {"keep_rate", stats.keep_rate},
                  {"bank", io::to_json(bank)},
                  {"seed", stage_seed},
                  {"configs", io::json{{"run", io::to_json(cfg)}}},
                  {"consumed", stream.consumed},
                  {"discarded", stream.discarded},
                  {"kept_ones", stream.kept_ones},
                  {"stats", io::to_json(stats)},
                  {"recalibrate_every", opts.recalibrate_every},
                  {"recalibrations", std::move(recal_events)}};
    return dump_json(dir / "bits.json", std::move(meta));
}

io::json test(const RunConfig& cfg) {
    cfg.validate();
    const auto dir = out_dir(cfg);

    const auto meta = load_json(dir / "bits.json", "test");
    const std::uint64_t bit_count = meta.at("bit_count").get<std::uint64_t>();
    if (!std::filesystem::exists(dir / "bits.bin"))
        throw std::runtime_error("test: missing prior artifact, expected " +
                                 (dir / "bits.bin").string());

    BitStream stream;
    stream.bytes = io::read_bytes(dir / "bits.bin");
    if (stream.bytes.size() != (bit_count + 7) / 8)
        throw std::runtime_error("test: bits.bin length does not match bit_count in bits.json");
    stream.produced = bit_count;
    stream.consumed = bit_count;
    for (std::uint64_t i = 0; i < bit_count; ++i) stream.kept_ones += stream.bit(i);

    const auto report = run_battery(stream);
    io::write_text_atomic(dir / "tests.txt", format_report_table(report));

    io::json j = io::to_json(report);
    j["config"] = io::to_json(cfg);
    return dump_json(dir / "tests.json", std::move(j));
}

io::json pipeline(const RunConfig& cfg, const PipelineOptions& opts) {
    const auto sweep_meta = sweep(cfg);
    const auto report_meta = analyze(cfg, opts.analyze);
    const auto bits_meta = extract(cfg, opts.extract);
    const auto tests_meta = test(cfg);

    const auto dir = out_dir(cfg);
    io::json j{{"config", io::to_json(cfg)},
               {"stages", {"sweep", "analyze", "extract", "test"}},
               {"gamma", report_meta.at("gamma")},
               {"keep_rate", bits_meta.at("keep_rate")},
               {"bit_count", bits_meta.at("bit_count")},
               {"overall_pass", tests_meta.at("overall_pass")},
               {"saturated_thresholds", sweep_meta.at("saturated_thresholds")}};
    return dump_json(dir / "pipeline.json", std::move(j));
}

} // namespace qrng::cmd
