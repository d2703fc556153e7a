#pragma once

#include "qrng/artifacts.hpp"
#include "qrng/config.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace qrng::cmd {

/// Stage artifacts, all written under config.output_dir:
///   simulate: samples.csv, samples.bin, pdf.csv, samples.json
///   sweep:    sweep.csv, sweep_pdf.csv, sweep.json
///   analyze:  curve.json, curve.csv, report.json
///   extract:  bits.bin, bits.json
///   test:     tests.json, tests.txt
///   pipeline: all of the above (sweep -> analyze -> extract -> test) plus pipeline.json
/// Each stage returns the JSON it wrote as its metadata artifact. Every metadata JSON
/// embeds the full run config and seed, so a rerun can be reproduced from any artifact.

io::json simulate(const RunConfig& cfg);

io::json sweep(const RunConfig& cfg);

struct AnalyzeOptions {
    /// Density to analyze. Unset: prefer sweep_pdf.csv, fall back to pdf.csv, else fail
    /// naming the expected files.
    std::optional<std::filesystem::path> pdf_path;
    HInfMode h_inf_mode = HInfMode::from_s_min;
};

io::json analyze(const RunConfig& cfg, const AnalyzeOptions& opts = {});

struct ExtractOptions {
    /// 0 disables. Otherwise the threshold pair is re-derived from the trailing window
    /// of this many samples every time one fills; re-calibration events are logged in
    /// bits.json. Must be 0 or >= 10000.
    std::uint64_t recalibrate_every = 0;
};

io::json extract(const RunConfig& cfg, const ExtractOptions& opts = {});

io::json test(const RunConfig& cfg);

struct PipelineOptions {
    AnalyzeOptions analyze;
    ExtractOptions extract;
};

io::json pipeline(const RunConfig& cfg, const PipelineOptions& opts = {});

} // namespace qrng::cmd
