#include "qrng/artifacts.hpp"

#include "qrng/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qrng::io {

namespace {

void rename_into_place(const std::filesystem::path& tmp, const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("failed to move artifact into place: " + path.string() + ": " +
                                 ec.message());
    }
}

std::filesystem::path tmp_name(const std::filesystem::path& path) {
    return path.parent_path() / (path.filename().string() + ".tmp");
}

json gamma_to_json(const Gamma& g) {
    if (g.infinite) return json("infinite");
    return json(g.value);
}

Gamma gamma_from_json(const json& j, const std::string& context) {
    if (j.is_string()) {
        if (j.get<std::string>() == "infinite") return {0.0, true};
        throw std::invalid_argument(context + ": expected a number or \"infinite\"");
    }
    return {j.get<double>(), false};
}

json min_entropy_to_json(const MinEntropy& h) {
    if (h.infinite) return json("infinite");
    return json(h.bits);
}

MinEntropy min_entropy_from_json(const json& j, const std::string& context) {
    if (j.is_string()) {
        if (j.get<std::string>() == "infinite") return {0.0, true};
        throw std::invalid_argument(context + ": expected a number or \"infinite\"");
    }
    return {j.get<double>(), false};
}

} // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = tmp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    rename_into_place(tmp, path);
}

void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    const auto tmp = tmp_name(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    rename_into_place(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    return {text.begin(), text.end()};
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string samples_csv(const SampleBatch& batch) {
    std::string out = "s_value\n";
    for (double v : batch.values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> samples_binary(const SampleBatch& batch) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(batch.values.size() * 8);
    for (double v : batch.values) {
        const auto u = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
    }
    return bytes;
}

std::vector<double> parse_samples_binary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() % 8 != 0)
        throw std::invalid_argument("sample binary: size is not a multiple of 8");
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) u = (u << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        values[i] = std::bit_cast<double>(u);
    }
    return values;
}

std::string pdf_csv(const EmpiricalPdf& pdf) {
    std::string out = "bin_left,bin_right,density\n";
    for (std::size_t i = 0; i < pdf.bin_count(); ++i) {
        out += format_double(pdf.bin_edges[i]);
        out += ',';
        out += format_double(pdf.bin_edges[i + 1]);
        out += ',';
        out += format_double(pdf.densities[i]);
        out += '\n';
    }
    return out;
}

EmpiricalPdf parse_pdf_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "bin_left,bin_right,density")
        throw std::invalid_argument("pdf csv: missing or wrong header (want bin_left,bin_right,density)");
    EmpiricalPdf pdf;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        double l, r, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &l, &r, &d) != 3)
            throw std::invalid_argument("pdf csv: parse error at line " + std::to_string(lineno));
        if (pdf.bin_edges.empty()) {
            pdf.bin_edges.push_back(l);
        } else if (std::abs(pdf.bin_edges.back() - l) >
                   1e-12 * std::max(1.0, std::abs(l))) {
            throw std::invalid_argument("pdf csv: bins not contiguous at line " +
                                        std::to_string(lineno));
        }
        pdf.bin_edges.push_back(r);
        pdf.densities.push_back(d);
    }
    pdf.validate();
    return pdf;
}

std::string sweep_csv(const SweepRecord& rec) {
    std::string out = "v_th,ratio,ones,zeros\n";
    for (std::size_t i = 0; i < rec.thresholds.size(); ++i) {
        out += format_double(rec.thresholds[i]);
        out += ',';
        out += rec.saturated[i] ? "saturated" : format_double(rec.ratios[i]);
        out += ',';
        out += std::to_string(rec.ones[i]);
        out += ',';
        out += std::to_string(rec.zeros[i]);
        out += '\n';
    }
    return out;
}

std::string gamma_curve_csv(const GammaCurve& curve) {
    std::string out = "b,gamma\n";
    for (const auto& p : curve.points) {
        out += format_double(p.b);
        out += ',';
        out += format_double(p.gamma);
        out += '\n';
    }
    return out;
}

json to_json(const OpticalConfig& cfg) {
    return json{{"s1_mean", cfg.s1_mean},       {"s2_mean", cfg.s2_mean},
                {"visibility", cfg.visibility}, {"delta_theta", cfg.delta_theta},
                {"sigma_phi", cfg.sigma_phi},   {"k_factor", cfg.k_factor}};
}

json to_json(const NoiseConfig& cfg) {
    return json{{"sigma_s1", cfg.sigma_s1},
                {"sigma_s2", cfg.sigma_s2},
                {"sigma_zeta", cfg.sigma_zeta},
                {"sigma_jitter", cfg.sigma_jitter},
                {"phase_mode",
                 cfg.phase_mode == PhaseMode::exact_uniform ? "exact_uniform" : "wrapped_gaussian"}};
}

json to_json(const ChirpJitterConfig& cfg) {
    return json{{"alpha", cfg.alpha},
                {"pulse_width", cfg.pulse_width},
                {"overlap_offset", cfg.overlap_offset}};
}

json to_json(const RunConfig& cfg) {
    json j{{"optical", to_json(cfg.optical)},
           {"noise", to_json(cfg.noise)},
           {"chirp_jitter", cfg.chirp_jitter ? to_json(*cfg.chirp_jitter) : json(nullptr)},
           {"sample_count", cfg.sample_count},
           {"seed", cfg.seed},
           {"bins", cfg.bins},
           {"density_floor", cfg.density_floor},
           {"sigma_zeta_grid", cfg.sigma_zeta_grid},
           {"output_dir", cfg.output_dir}};
    return j;
}

json to_json(const CurveConfig& cfg) {
    return json{{"optical", to_json(cfg.optical)},
                {"base_noise", to_json(cfg.base_noise)},
                {"sigma_zeta_grid", cfg.sigma_zeta_grid},
                {"samples_per_point", cfg.samples_per_point},
                {"bin_count", cfg.bin_count},
                {"density_floor", cfg.density_floor},
                {"seed", cfg.seed}};
}

json to_json(const GammaCurve& curve) {
    json pts = json::array();
    for (const auto& p : curve.points)
        pts.push_back(json{{"sigma_zeta", p.sigma_zeta}, {"b", p.b}, {"gamma", p.gamma},
                           {"h_inf", p.h_inf}});
    return json{{"points", pts},
                {"generation_config", to_json(curve.generation_config)},
                {"density_floor", curve.density_floor},
                {"repaired_points", curve.repaired_points},
                {"truncated", curve.truncated},
                {"truncated_at_sigma_zeta", curve.truncated_at_sigma_zeta}};
}

json to_json(const ReductionReport& report) {
    return json{{"h_inf", min_entropy_to_json(report.h_inf)},
                {"h_inf_q", report.h_inf_q},
                {"gamma", gamma_to_json(report.gamma)},
                {"p_max", report.p_max},
                {"broadening_b", report.broadening_b},
                {"width_w", report.width_w},
                {"peak_left", report.peak_left},
                {"peak_right", report.peak_right},
                {"v_th", report.v_th},
                {"dv_gamma", report.gamma.infinite ? json(nullptr) : json(report.dv_gamma)},
                {"h_inf_mode", to_string(report.h_inf_mode)}};
}

json to_json(const TestReport& report) {
    json tests = json::array();
    for (const auto& t : report.tests)
        tests.push_back(json{{"name", t.name},
                             {"statistic", t.statistic},
                             {"p_value", t.p_value},
                             {"pass", t.pass},
                             {"applicable", t.applicable}});
    return json{{"sequence_length", report.sequence_length},
                {"overall_pass", report.overall_pass},
                {"tests", tests}};
}

json to_json(const PipelineStats& stats) {
    return json{{"keep_rate", stats.keep_rate},
                {"ones_fraction", stats.ones_fraction},
                {"input_rate_hz", stats.input_rate_hz},
                {"implied_output_rate", stats.implied_output_rate}};
}

json to_json(const ComparatorBank& bank) {
    return json{{"v_th", bank.v_th},
                {"dv_gamma", bank.dv_gamma},
                {"v_th1", bank.v_th1},
                {"v_th2", bank.v_th2}};
}

void reject_unknown_fields(const json& j, const std::vector<std::string>& allowed,
                           const std::string& context) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument(context + ": unknown field '" + key + "'");
    }
}

OpticalConfig optical_from_json(const json& j) {
    reject_unknown_fields(
        j, {"s1_mean", "s2_mean", "visibility", "delta_theta", "sigma_phi", "k_factor"},
        "optical");
    OpticalConfig cfg;
    cfg.s1_mean = j.value("s1_mean", cfg.s1_mean);
    cfg.s2_mean = j.value("s2_mean", cfg.s2_mean);
    cfg.visibility = j.value("visibility", cfg.visibility);
    cfg.delta_theta = j.value("delta_theta", cfg.delta_theta);
    cfg.sigma_phi = j.value("sigma_phi", cfg.sigma_phi);
    cfg.k_factor = j.value("k_factor", cfg.k_factor);
    return cfg;
}

NoiseConfig noise_from_json(const json& j) {
    reject_unknown_fields(j, {"sigma_s1", "sigma_s2", "sigma_zeta", "sigma_jitter", "phase_mode"},
                          "noise");
    NoiseConfig cfg;
    cfg.sigma_s1 = j.value("sigma_s1", cfg.sigma_s1);
    cfg.sigma_s2 = j.value("sigma_s2", cfg.sigma_s2);
    cfg.sigma_zeta = j.value("sigma_zeta", cfg.sigma_zeta);
    cfg.sigma_jitter = j.value("sigma_jitter", cfg.sigma_jitter);
    if (j.contains("phase_mode")) {
        const auto mode = j.at("phase_mode").get<std::string>();
        if (mode == "exact_uniform")
            cfg.phase_mode = PhaseMode::exact_uniform;
        else if (mode == "wrapped_gaussian")
            cfg.phase_mode = PhaseMode::wrapped_gaussian;
        else
            throw std::invalid_argument("noise.phase_mode: unknown mode '" + mode + "'");
    }
    return cfg;
}

ChirpJitterConfig chirp_from_json(const json& j) {
    reject_unknown_fields(j, {"alpha", "pulse_width", "overlap_offset"}, "chirp_jitter");
    ChirpJitterConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.pulse_width = j.value("pulse_width", cfg.pulse_width);
    cfg.overlap_offset = j.value("overlap_offset", cfg.overlap_offset);
    return cfg;
}

RunConfig run_config_from_json(const json& j) {
    reject_unknown_fields(j,
                          {"optical", "noise", "chirp_jitter", "sample_count", "seed", "bins",
                           "density_floor", "sigma_zeta_grid", "output_dir"},
                          "config");
    RunConfig cfg;
    cfg.sigma_zeta_grid = default_sigma_zeta_grid();
    if (j.contains("optical")) cfg.optical = optical_from_json(j.at("optical"));
    if (j.contains("noise")) cfg.noise = noise_from_json(j.at("noise"));
    if (j.contains("chirp_jitter") && !j.at("chirp_jitter").is_null())
        cfg.chirp_jitter = chirp_from_json(j.at("chirp_jitter"));
    cfg.sample_count = j.value("sample_count", cfg.sample_count);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.bins = j.value("bins", cfg.bins);
    cfg.density_floor = j.value("density_floor", cfg.density_floor);
    if (j.contains("sigma_zeta_grid"))
        cfg.sigma_zeta_grid = j.at("sigma_zeta_grid").get<std::vector<double>>();
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    return cfg;
}

GammaCurve gamma_curve_from_json(const json& j) {
    GammaCurve curve;
    for (const auto& p : j.at("points")) {
        GammaCurvePoint pt;
        pt.sigma_zeta = p.at("sigma_zeta").get<double>();
        pt.b = p.at("b").get<double>();
        pt.gamma = p.at("gamma").get<double>();
        pt.h_inf = p.value("h_inf", 1.0);
        curve.points.push_back(pt);
    }
    if (j.contains("generation_config")) {
        const auto& g = j.at("generation_config");
        curve.generation_config.optical = optical_from_json(g.at("optical"));
        curve.generation_config.base_noise = noise_from_json(g.at("base_noise"));
        curve.generation_config.sigma_zeta_grid =
            g.at("sigma_zeta_grid").get<std::vector<double>>();
        curve.generation_config.samples_per_point = g.at("samples_per_point").get<std::size_t>();
        curve.generation_config.bin_count = g.at("bin_count").get<std::size_t>();
        curve.generation_config.density_floor = g.at("density_floor").get<double>();
        curve.generation_config.seed = g.at("seed").get<std::uint64_t>();
    }
    curve.density_floor = j.value("density_floor", 1e-5);
    curve.repaired_points = j.value("repaired_points", std::size_t{0});
    curve.truncated = j.value("truncated", false);
    curve.truncated_at_sigma_zeta = j.value("truncated_at_sigma_zeta", 0.0);
    curve.validate();
    return curve;
}

ReductionReport report_from_json(const json& j) {
    ReductionReport rep;
    rep.h_inf = min_entropy_from_json(j.at("h_inf"), "report.h_inf");
    rep.h_inf_q = j.at("h_inf_q").get<double>();
    rep.gamma = gamma_from_json(j.at("gamma"), "report.gamma");
    rep.p_max = j.at("p_max").get<double>();
    rep.broadening_b = j.at("broadening_b").get<double>();
    rep.width_w = j.at("width_w").get<double>();
    rep.peak_left = j.at("peak_left").get<double>();
    rep.peak_right = j.at("peak_right").get<double>();
    rep.v_th = j.at("v_th").get<double>();
    rep.dv_gamma = j.at("dv_gamma").is_null() ? 0.0 : j.at("dv_gamma").get<double>();
    const auto mode = j.value("h_inf_mode", std::string("from_s_min"));
    if (mode == "from_s_min")
        rep.h_inf_mode = HInfMode::from_s_min;
    else if (mode == "unbounded_below")
        rep.h_inf_mode = HInfMode::unbounded_below;
    else
        throw std::invalid_argument("report.h_inf_mode: unknown mode '" + mode + "'");
    return rep;
}

} // namespace qrng::io
