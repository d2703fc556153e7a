#include "qrng/sweep.hpp"

#include "qrng/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qrng {

namespace {
constexpr std::uint64_t kDomainSweep = 0x73776565703a3030ULL;
}

void SweepRecord::validate() const {
    const std::size_t n = thresholds.size();
    if (n < 2) throw std::invalid_argument("sweep record: need at least 2 thresholds");
    if (ones.size() != n || zeros.size() != n || ratios.size() != n || saturated.size() != n)
        throw std::invalid_argument("sweep record: column length mismatch");
    const double dv = thresholds[1] - thresholds[0];
    if (!(dv > 0.0)) throw std::invalid_argument("sweep record: thresholds must increase");
    for (std::size_t i = 1; i < n; ++i) {
        const double step = thresholds[i] - thresholds[i - 1];
        if (std::abs(step - dv) > 1e-9 * std::abs(dv))
            throw std::invalid_argument("sweep record: threshold step must be uniform");
    }
    if (bits_per_step == 0) throw std::invalid_argument("sweep record: bits_per_step is zero");
}

std::vector<double> make_threshold_grid(double lo, double hi, std::size_t n_steps) {
    if (!(lo < hi)) throw std::invalid_argument("make_threshold_grid: need lo < hi");
    if (n_steps < 1) throw std::invalid_argument("make_threshold_grid: need at least 1 step");
    std::vector<double> grid(n_steps + 1);
    const double dv = (hi - lo) / static_cast<double>(n_steps);
    for (std::size_t i = 0; i <= n_steps; ++i) grid[i] = lo + dv * static_cast<double>(i);
    return grid;
}

SweepRecord run_sweep(const OpticalConfig& cfg, const NoiseConfig& noise,
                      const std::vector<double>& v_grid, std::size_t bits_per_step,
                      std::uint64_t seed, const std::optional<ChirpJitterConfig>& cj) {
    if (bits_per_step < 10'000)
        throw std::invalid_argument("run_sweep: bits_per_step must be >= 10000");
    SweepRecord rec;
    rec.thresholds = v_grid;
    rec.bits_per_step = bits_per_step;
    rec.seed = seed;
    const std::size_t n = v_grid.size();
    rec.ones.resize(n);
    rec.zeros.resize(n);
    rec.ratios.assign(n, 0.0);
    rec.saturated.assign(n, false);

    const std::uint64_t base = derive_seed(seed, kDomainSweep);
    for (std::size_t i = 0; i < n; ++i) {
        const auto batch = sample_signals(cfg, noise, cj, bits_per_step, derive_seed(base, i));
        std::uint64_t ones = 0;
        for (double v : batch.values)
            if (v > v_grid[i]) ++ones;
        rec.ones[i] = ones;
        rec.zeros[i] = bits_per_step - ones;
        if (rec.zeros[i] == 0) {
            rec.saturated[i] = true;
        } else {
            rec.ratios[i] = static_cast<double>(ones) / static_cast<double>(rec.zeros[i]);
        }
    }
    rec.validate();
    return rec;
}

SweepReconstruction reconstruct_pdf(const SweepRecord& rec) {
    rec.validate();
    const std::size_t pairs = rec.thresholds.size() - 1;
    const double dv = rec.delta_v();

    SweepReconstruction out;
    out.pdf.bin_edges = rec.thresholds;
    out.pdf.densities.assign(pairs, 0.0);
    out.pdf.sample_count = static_cast<std::uint64_t>(rec.bits_per_step) * rec.thresholds.size();

    std::size_t usable = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        if (rec.saturated[i] || rec.saturated[i + 1]) {
            out.gaps.push_back(i);
            continue;
        }
        const double r0 = rec.ratios[i];
        const double r1 = rec.ratios[i + 1];
        out.pdf.densities[i] = std::abs(r0 - r1) / (dv * (1.0 + r0 + r1 + r0 * r1));
        ++usable;
    }
    if (usable < 1)
        throw std::invalid_argument(
            "reconstruct_pdf: need at least 2 consecutive unsaturated thresholds");

    out.raw_mass = out.pdf.total_mass();
    if (!(out.raw_mass > 0.0))
        throw std::invalid_argument("reconstruct_pdf: all reconstructed densities are zero");
    for (double& d : out.pdf.densities) d /= out.raw_mass;
    return out;
}

} // namespace qrng
