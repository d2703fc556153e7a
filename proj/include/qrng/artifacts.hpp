#pragma once

#include "qrng/config.hpp"
#include "qrng/pipeline.hpp"
#include "qrng/reduction.hpp"
#include "qrng/stats_tests.hpp"
#include "qrng/sweep.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace qrng::io {

using json = nlohmann::ordered_json;

/// Atomic file writes: content lands under a temporary name in the target directory
/// and is renamed into place, so readers never observe partial artifacts.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

std::string read_text(const std::filesystem::path& path);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

/// Doubles in CSV artifacts are printed with %.17g: lossless round-trip and
/// byte-identical reruns.
std::string format_double(double v);

/// CSV with header "s_value", one sample per line.
std::string samples_csv(const SampleBatch& batch);

/// Raw little-endian IEEE-754 doubles, byte order fixed regardless of host.
std::vector<std::uint8_t> samples_binary(const SampleBatch& batch);
std::vector<double> parse_samples_binary(const std::vector<std::uint8_t>& bytes);

/// CSV with header "bin_left,bin_right,density".
std::string pdf_csv(const EmpiricalPdf& pdf);
EmpiricalPdf parse_pdf_csv(const std::string& text);

/// CSV with header "v_th,ratio,ones,zeros"; a saturated threshold (no zeros) carries
/// the literal token `saturated` in the ratio column.
std::string sweep_csv(const SweepRecord& rec);

/// CSV with header "b,gamma".
std::string gamma_curve_csv(const GammaCurve& curve);

json to_json(const OpticalConfig& cfg);
json to_json(const NoiseConfig& cfg);
json to_json(const ChirpJitterConfig& cfg);
json to_json(const RunConfig& cfg);
json to_json(const CurveConfig& cfg);
json to_json(const GammaCurve& curve);
json to_json(const ReductionReport& report);
json to_json(const TestReport& report);
json to_json(const PipelineStats& stats);
json to_json(const ComparatorBank& bank);

OpticalConfig optical_from_json(const json& j);
NoiseConfig noise_from_json(const json& j);
ChirpJitterConfig chirp_from_json(const json& j);
RunConfig run_config_from_json(const json& j);
GammaCurve gamma_curve_from_json(const json& j);
ReductionReport report_from_json(const json& j);

/// Throws std::invalid_argument naming the first key of `j` that is not in `allowed`.
void reject_unknown_fields(const json& j, const std::vector<std::string>& allowed,
                           const std::string& context);

} // namespace qrng::io
