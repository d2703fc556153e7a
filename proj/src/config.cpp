#include "qrng/config.hpp"

#include "qrng/artifacts.hpp"
#include "qrng/rng.hpp"

#include <stdexcept>

namespace qrng {

void RunConfig::validate() const {
    optical.validate();
    noise.validate();
    if (chirp_jitter) chirp_jitter->validate();
    if (sample_count < 10'000)
        throw std::invalid_argument("sample_count must be at least 10000");
    if (bins < 16) throw std::invalid_argument("bins must be at least 16");
    if (!(density_floor > 0.0)) throw std::invalid_argument("density_floor must be positive");
    if (sigma_zeta_grid.empty())
        throw std::invalid_argument("sigma_zeta_grid must not be empty");
    for (std::size_t i = 0; i < sigma_zeta_grid.size(); ++i) {
        if (!(sigma_zeta_grid[i] >= 0.0))
            throw std::invalid_argument("sigma_zeta_grid values must be non-negative");
        if (i > 0 && !(sigma_zeta_grid[i] > sigma_zeta_grid[i - 1]))
            throw std::invalid_argument("sigma_zeta_grid must be strictly increasing");
    }
    if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

std::vector<double> default_sigma_zeta_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.0125 * i);
    return grid;
}

RunConfig preset(const std::string& name) {
    RunConfig cfg;
    cfg.sigma_zeta_grid = default_sigma_zeta_grid();
    if (name == "noiseless") {
        cfg.noise.phase_mode = PhaseMode::exact_uniform;
        return cfg;
    }
    if (name == "fig1c") {
        cfg.optical.visibility = 0.95;
        cfg.noise.sigma_s1 = 0.05;
        cfg.noise.sigma_s2 = 0.05;
        cfg.noise.sigma_zeta = 0.1;
        return cfg;
    }
    if (name == "fig2") {
        cfg.noise.sigma_s1 = 0.05;
        cfg.noise.sigma_s2 = 0.05;
        cfg.noise.sigma_zeta = 0.1;
        cfg.noise.sigma_jitter = 20e-12;
        ChirpJitterConfig cj;
        cj.alpha = 6.0;
        cj.pulse_width = 50e-12;
        cj.overlap_offset = 0.0;
        cfg.chirp_jitter = cj;
        cfg.optical.visibility = 1.0; // attenuation comes from the per-sample jitter draw
        return cfg;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

LoadedConfig load_config(const std::filesystem::path& path) {
    io::json j;
    try {
        j = io::json::parse(io::read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    LoadedConfig loaded;
    loaded.config = io::run_config_from_json(j);

    const bool has_chirp = j.contains("chirp_jitter") && !j.at("chirp_jitter").is_null();
    const bool explicit_visibility =
        j.contains("optical") && j.at("optical").contains("visibility");
    if (has_chirp && !explicit_visibility) {
        loaded.config.optical.visibility = visibility_from_overlap(*loaded.config.chirp_jitter);
    } else if (has_chirp && explicit_visibility) {
        loaded.warnings.push_back(
            "both optical.visibility and chirp_jitter are set; using the literal visibility");
    }
    loaded.config.validate();
    return loaded;
}

} // namespace qrng
