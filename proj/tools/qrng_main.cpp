#include "qrng/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <optional>
#include <string>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::optional<std::string> out;
};

void add_common(CLI::App* sub, CommonArgs& args) {
    auto* cfg = sub->add_option("--config", args.config_path, "run config JSON file");
    auto* preset = sub->add_option("--preset", args.preset_name, "named parameter set")
                       ->check(CLI::IsMember({"fig1c", "fig2", "noiseless"}));
    cfg->excludes(preset);
    sub->add_option("--seed", args.seed, "override the run seed");
    sub->add_option("--samples", args.samples, "override sample_count");
    sub->add_option("--out", args.out, "override output_dir");
}

qrng::RunConfig resolve_config(const CommonArgs& args) {
    qrng::RunConfig cfg;
    if (!args.config_path.empty()) {
        auto loaded = qrng::load_config(args.config_path);
        for (const auto& w : loaded.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        cfg = loaded.config;
    } else if (!args.preset_name.empty()) {
        cfg = qrng::preset(args.preset_name);
    } else {
        throw std::invalid_argument("one of --config or --preset is required");
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.samples) cfg.sample_count = *args.samples;
    if (args.out) cfg.output_dir = *args.out;
    return cfg;
}

void print_result(const qrng::io::json& j) { std::printf("%s\n", j.dump(2).c_str()); }

int fail(const std::string& message) {
    const qrng::io::json err{{"error", message}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"laser-pulse interference QRNG simulator and entropy analysis toolkit"};
    app.require_subcommand(1);

    CommonArgs sim_args, sweep_args, analyze_args, extract_args, test_args, pipe_args;
    std::string analyze_pdf, analyze_mode = "from_s_min";
    std::string pipe_mode = "from_s_min";
    std::uint64_t extract_recal = 0, pipe_recal = 0;

    auto* sim = app.add_subcommand("simulate", "draw samples and write the histogram density");
    add_common(sim, sim_args);

    auto* swp = app.add_subcommand("sweep", "comparator threshold sweep and density reconstruction");
    add_common(swp, sweep_args);

    auto* ana = app.add_subcommand("analyze", "reduction-factor analysis of a density");
    add_common(ana, analyze_args);
    ana->add_option("--pdf", analyze_pdf, "density CSV to analyze (default: sweep_pdf.csv, then pdf.csv)");
    ana->add_option("--h-inf-mode", analyze_mode, "min-entropy integration lower limit")
        ->check(CLI::IsMember({"from_s_min", "unbounded_below"}));

    auto* ext = app.add_subcommand("extract", "two-comparator bit extraction using report.json");
    add_common(ext, extract_args);
    ext->add_option("--recalibrate-every", extract_recal,
                    "re-derive the threshold pair every N samples (0 = off)");

    auto* tst = app.add_subcommand("test", "randomness test battery on bits.bin");
    add_common(tst, test_args);

    auto* pipe = app.add_subcommand("pipeline", "chain sweep -> analyze -> extract -> test");
    add_common(pipe, pipe_args);
    pipe->add_option("--h-inf-mode", pipe_mode, "min-entropy integration lower limit")
        ->check(CLI::IsMember({"from_s_min", "unbounded_below"}));
    pipe->add_option("--recalibrate-every", pipe_recal,
                     "re-derive the threshold pair every N samples (0 = off)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const qrng::io::json err{{"error", e.what()}};
        std::fprintf(stderr, "%s\n", err.dump().c_str());
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    }

    try {
        if (*sim) {
            print_result(qrng::cmd::simulate(resolve_config(sim_args)));
        } else if (*swp) {
            print_result(qrng::cmd::sweep(resolve_config(sweep_args)));
        } else if (*ana) {
            qrng::cmd::AnalyzeOptions opts;
            if (!analyze_pdf.empty()) opts.pdf_path = analyze_pdf;
            opts.h_inf_mode = analyze_mode == "unbounded_below" ? qrng::HInfMode::unbounded_below
                                                                : qrng::HInfMode::from_s_min;
            print_result(qrng::cmd::analyze(resolve_config(analyze_args), opts));
        } else if (*ext) {
            qrng::cmd::ExtractOptions opts;
            opts.recalibrate_every = extract_recal;
            print_result(qrng::cmd::extract(resolve_config(extract_args), opts));
        } else if (*tst) {
            print_result(qrng::cmd::test(resolve_config(test_args)));
        } else if (*pipe) {
            qrng::cmd::PipelineOptions opts;
            opts.analyze.h_inf_mode = pipe_mode == "unbounded_below"
                                          ? qrng::HInfMode::unbounded_below
                                          : qrng::HInfMode::from_s_min;
            opts.extract.recalibrate_every = pipe_recal;
            print_result(qrng::cmd::pipeline(resolve_config(pipe_args), opts));
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 0;
}
