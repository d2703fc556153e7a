#pragma once

#include "qrng/montecarlo.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qrng {

/// Aggregated run parameters for the CLI stages. Serialized as JSON with exactly
/// these field names; unknown fields in a config file are errors.
struct RunConfig {
    OpticalConfig optical;
    NoiseConfig noise;
    std::optional<ChirpJitterConfig> chirp_jitter;
    std::uint64_t sample_count = 1'000'000;
    std::uint64_t seed = 1;
    std::size_t bins = 256;
    double density_floor = 1e-5;
    std::vector<double> sigma_zeta_grid;
    std::string output_dir = "out";

    void validate() const;
};

/// Grid 0, 0.0125, ..., 0.25: the detector-noise range the reduction curve covers.
std::vector<double> default_sigma_zeta_grid();

/// Named parameter sets:
///  - "noiseless": unit pulses, perfect visibility, no classical noise
///  - "fig1c": sigma_s = 0.05, sigma_zeta = 0.1, visibility 0.95 (the calibration regime)
///  - "fig2": fig1c noises plus strong chirp (alpha = 6, 50 ps pulses) and 20 ps overlap jitter
RunConfig preset(const std::string& name);

struct LoadedConfig {
    RunConfig config;
    std::vector<std::string> warnings;
};

/// Parses a config JSON file. Unknown fields anywhere are rejected. If chirp_jitter is
/// given without an explicit optical.visibility, visibility is derived from the chirp
/// parameters; if both are given, the literal visibility wins and a warning is issued.
LoadedConfig load_config(const std::filesystem::path& path);

} // namespace qrng
