#ifndef HOMSIM_CONFIG_HPP
#define HOMSIM_CONFIG_HPP

/*
 * Experiment configuration: a line-oriented `key = value` format with dotted
 * section prefixes (`fiberA.length_km = 25.3`). Unknown keys are hard
 * errors. Values use interface units (nm, ps, km, mm, ns, s); the resolved
 * config converts to SI on demand.
 */

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "homsim/counting.hpp"
#include "homsim/errors.hpp"
#include "homsim/fiber.hpp"
#include "homsim/interference.hpp"
#include "homsim/source.hpp"

namespace homsim {

enum class RunMode { envelope, fringes, theory };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::envelope: return "envelope";
        case RunMode::fringes: return "fringes";
        case RunMode::theory: return "theory";
    }
    return "?";
}

inline RunMode run_mode_from_string(const std::string& s) {
    if (s == "envelope") return RunMode::envelope;
    if (s == "fringes") return RunMode::fringes;
    if (s == "theory") return RunMode::theory;
    throw config_error("expected one of envelope|fringes|theory, got '" + s + "'",
                       "run.mode");
}

struct FiberConfig {
    double length_km = 25.3;
    double dispersion_ps_nm_km = 17.0;
    double tau2_ps3_km = 0.13;  // dispersion-slope coefficient, ps^3/km
    double thermal_mm_per_K_km = 4.0;
};

// Full experiment description with the reference defaults: a 783 nm CW pump,
// 0.8 nm filter at 1566 nm, two 25.3 km arms, InGaAs detectors at 7%/8%
// efficiency, a 2 ns coincidence window and 50 s integration per point.
struct ExperimentConfig {
    // source
    double pump_wavelength_nm = 783.0;
    double filter_fwhm_nm = 0.8;
    double coherence_time_ps = 4.25;  // 0 disables the override
    // Pair rate reaching BS2; calibrated so accidentals are 20.5% of the
    // coincidence baseline with the detector parameters below.
    double pair_rate_hz = 55.5330372;
    // Pair indistinguishability at BS2; 0.946 reproduces the observed net
    // visibility 47.3% = overlap * 50%.
    double mode_overlap = 0.946;

    // interferometer
    double bs1_transmittance = 0.5;
    double bs2_transmittance = 0.5;
    double n_eff = 1.8;
    double scan_halfspan_mm = 5.5;

    // fibers
    FiberConfig fiber_a{};
    FiberConfig fiber_b{};

    // detectors
    double det_c_efficiency = 0.07;
    DetectorModel::Mode det_c_mode = DetectorModel::Mode::free_running;
    double det_c_dark_rate_hz = 2000.0;
    double det_c_dark_prob_per_ns = 0.0;
    double det_d_efficiency = 0.08;
    DetectorModel::Mode det_d_mode = DetectorModel::Mode::gated;
    double det_d_dark_rate_hz = 0.0;
    double det_d_dark_prob_per_ns = 1.0e-5;

    // counting
    double window_ns = 2.0;
    double integration_s = 50.0;

    // dispersion analysis
    double delay_spread_ps_km = 0.14;
    double cancellation_tol_ps = 0.0;  // 0 = auto (coherence time / 10)

    // run
    std::uint64_t seed = 1;
    int points = 23;
    RunMode mode = RunMode::envelope;
    double drift_blur_mm = 0.0;
    bool allow_long_scan = false;

    SourceSpec source() const {
        SourceSpec s;
        s.pump_wavelength_m = pump_wavelength_nm * 1.0e-9;
        s.filter_fwhm_m = filter_fwhm_nm * 1.0e-9;
        s.pair_rate_hz = pair_rate_hz;
        s.mode_overlap = mode_overlap;
        if (coherence_time_ps > 0.0)
            s.coherence_time_override_s = coherence_time_ps * 1.0e-12;
        return s;
    }

    InterferometerSpec interferometer() const {
        return {bs1_transmittance, bs2_transmittance, n_eff};
    }

    FiberChannel fiber(const FiberConfig& f, std::string label) const {
        return channel_from_dispersion(
            f.length_km, f.dispersion_ps_nm_km, 2.0 * pump_wavelength_nm * 1.0e-9,
            f.tau2_ps3_km * 1.0e-36, 0.0, f.thermal_mm_per_K_km * 1.0e-3,
            std::move(label));
    }
    FiberChannel fiber_channel_a() const { return fiber(fiber_a, "A"); }
    FiberChannel fiber_channel_b() const { return fiber(fiber_b, "B"); }

    CoincidenceSetup coincidence_setup() const {
        CoincidenceSetup s;
        s.det_c.efficiency = det_c_efficiency;
        s.det_c.mode = det_c_mode;
        s.det_c.dark_rate_hz = det_c_dark_rate_hz;
        s.det_c.dark_prob_per_ns = det_c_dark_prob_per_ns;
        s.det_c.label = "C";
        s.det_d.efficiency = det_d_efficiency;
        s.det_d.mode = det_d_mode;
        s.det_d.dark_rate_hz = det_d_dark_rate_hz;
        s.det_d.dark_prob_per_ns = det_d_dark_prob_per_ns;
        s.det_d.label = "D";
        s.window_s = window_ns * 1.0e-9;
        s.integration_time_s = integration_s;
        s.pair_rate_at_bs2_hz = pair_rate_hz;
        return s;
    }

    double cancellation_tolerance_s() const {
        if (cancellation_tol_ps > 0.0) return cancellation_tol_ps * 1.0e-12;
        return coherence_time(source()) / 10.0;
    }

    void validate() const {
        source().validate();
        interferometer().validate();
        fiber_channel_a().validate();
        fiber_channel_b().validate();
        coincidence_setup().validate();
        if (!(scan_halfspan_mm > 0.0))
            throw config_error("must be > 0", "interferometer.scan_halfspan_mm");
        if (!allow_long_scan && 2.0 * scan_halfspan_mm > 11.0 + 1.0e-12)
            throw config_error(
                "scan span exceeds the 11 mm delay-line range; pass "
                "--allow-long-scan to override",
                "interferometer.scan_halfspan_mm");
        if (points < 5)
            throw config_error("at least 5 scan points are required",
                               "run.points");
        if (!(drift_blur_mm >= 0.0))
            throw config_error("must be >= 0", "run.drift_blur_mm");
        if (!(delay_spread_ps_km >= 0.0))
            throw config_error("must be >= 0", "dispersion.delay_spread_ps_km");
        if (!(cancellation_tol_ps >= 0.0))
            throw config_error("must be >= 0", "dispersion.cancellation_tol_ps");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_number(const std::string& value, const std::string& key) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw config_error("expected a number, got '" + value + "'", key);
    }
    if (pos != value.size())
        throw config_error("trailing characters after number in '" + value + "'",
                           key);
    if (!std::isfinite(v))
        throw config_error("value must be finite", key);
    return v;
}

inline std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    if (value.empty() || value[0] == '-')
        throw config_error("expected an unsigned integer, got '" + value + "'",
                           key);
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw config_error("expected an unsigned integer, got '" + value + "'",
                           key);
    }
    if (pos != value.size())
        throw config_error("trailing characters in '" + value + "'", key);
    return v;
}

inline DetectorModel::Mode parse_detector_mode(const std::string& value,
                                               const std::string& key) {
    if (value == "free_running") return DetectorModel::Mode::free_running;
    if (value == "gated") return DetectorModel::Mode::gated;
    throw config_error("expected free_running|gated, got '" + value + "'", key);
}

}  // namespace detail

// Applies one `key = value` assignment; throws config_error on unknown keys
// or malformed values.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    using detail::parse_detector_mode;
    using detail::parse_number;
    using detail::parse_u64;

    const auto num = [&] { return parse_number(value, key); };
    if (key == "source.pump_wavelength_nm") cfg.pump_wavelength_nm = num();
    else if (key == "source.filter_fwhm_nm") cfg.filter_fwhm_nm = num();
    else if (key == "source.coherence_time_ps") cfg.coherence_time_ps = num();
    else if (key == "source.pair_rate_hz") cfg.pair_rate_hz = num();
    else if (key == "source.mode_overlap") cfg.mode_overlap = num();
    else if (key == "interferometer.bs1_transmittance") cfg.bs1_transmittance = num();
    else if (key == "interferometer.bs2_transmittance") cfg.bs2_transmittance = num();
    else if (key == "interferometer.n_eff") cfg.n_eff = num();
    else if (key == "interferometer.scan_halfspan_mm") cfg.scan_halfspan_mm = num();
    else if (key == "fiberA.length_km") cfg.fiber_a.length_km = num();
    else if (key == "fiberA.dispersion_ps_nm_km") cfg.fiber_a.dispersion_ps_nm_km = num();
    else if (key == "fiberA.tau2_ps3_km") cfg.fiber_a.tau2_ps3_km = num();
    else if (key == "fiberA.thermal_mm_K_km") cfg.fiber_a.thermal_mm_per_K_km = num();
    else if (key == "fiberB.length_km") cfg.fiber_b.length_km = num();
    else if (key == "fiberB.dispersion_ps_nm_km") cfg.fiber_b.dispersion_ps_nm_km = num();
    else if (key == "fiberB.tau2_ps3_km") cfg.fiber_b.tau2_ps3_km = num();
    else if (key == "fiberB.thermal_mm_K_km") cfg.fiber_b.thermal_mm_per_K_km = num();
    else if (key == "detectorC.efficiency") cfg.det_c_efficiency = num();
    else if (key == "detectorC.mode") cfg.det_c_mode = parse_detector_mode(value, key);
    else if (key == "detectorC.dark_rate_hz") cfg.det_c_dark_rate_hz = num();
    else if (key == "detectorC.dark_prob_per_ns") cfg.det_c_dark_prob_per_ns = num();
    else if (key == "detectorD.efficiency") cfg.det_d_efficiency = num();
    else if (key == "detectorD.mode") cfg.det_d_mode = parse_detector_mode(value, key);
    else if (key == "detectorD.dark_rate_hz") cfg.det_d_dark_rate_hz = num();
    else if (key == "detectorD.dark_prob_per_ns") cfg.det_d_dark_prob_per_ns = num();
    else if (key == "counting.window_ns") cfg.window_ns = num();
    else if (key == "counting.integration_s") cfg.integration_s = num();
    else if (key == "dispersion.delay_spread_ps_km") cfg.delay_spread_ps_km = num();
    else if (key == "dispersion.cancellation_tol_ps") cfg.cancellation_tol_ps = num();
    else if (key == "run.seed") cfg.seed = parse_u64(value, key);
    else if (key == "run.points") {
        const double v = num();
        if (v != std::floor(v) || v < 1.0 || v > 1.0e6)
            throw config_error("expected a positive integer", key);
        cfg.points = static_cast<int>(v);
    } else if (key == "run.mode") cfg.mode = run_mode_from_string(value);
    else if (key == "run.drift_blur_mm") cfg.drift_blur_mm = num();
    else throw config_error("unknown key", key);
}

// Parses configuration text. Blank lines and `#` comments are allowed;
// duplicate keys are errors.
inline ExperimentConfig parse_config_text(const std::string& text,
                                          ExperimentConfig base = {}) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) +
                               ": expected 'key = value', got '" + stripped + "'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key");
        const auto [it, inserted] = seen.emplace(key, line_no);
        if (!inserted)
            throw config_error("duplicate key (first set on line " +
                                   std::to_string(it->second) + ")",
                               key);
        apply_config_entry(base, key, value);
    }
    return base;
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), base);
}

// Fully resolved `key = value` lines (defaults expanded), in a fixed order.
// Numbers round-trip exactly through 17 significant digits.
inline std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg) {
    const auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const auto mode_str = [](DetectorModel::Mode m) {
        return m == DetectorModel::Mode::free_running
                   ? std::string("free_running")
                   : std::string("gated");
    };
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("source.pump_wavelength_nm", fmt(cfg.pump_wavelength_nm));
    out.emplace_back("source.filter_fwhm_nm", fmt(cfg.filter_fwhm_nm));
    out.emplace_back("source.coherence_time_ps", fmt(cfg.coherence_time_ps));
    out.emplace_back("source.pair_rate_hz", fmt(cfg.pair_rate_hz));
    out.emplace_back("source.mode_overlap", fmt(cfg.mode_overlap));
    out.emplace_back("interferometer.bs1_transmittance", fmt(cfg.bs1_transmittance));
    out.emplace_back("interferometer.bs2_transmittance", fmt(cfg.bs2_transmittance));
    out.emplace_back("interferometer.n_eff", fmt(cfg.n_eff));
    out.emplace_back("interferometer.scan_halfspan_mm", fmt(cfg.scan_halfspan_mm));
    out.emplace_back("fiberA.length_km", fmt(cfg.fiber_a.length_km));
    out.emplace_back("fiberA.dispersion_ps_nm_km", fmt(cfg.fiber_a.dispersion_ps_nm_km));
    out.emplace_back("fiberA.tau2_ps3_km", fmt(cfg.fiber_a.tau2_ps3_km));
    out.emplace_back("fiberA.thermal_mm_K_km", fmt(cfg.fiber_a.thermal_mm_per_K_km));
    out.emplace_back("fiberB.length_km", fmt(cfg.fiber_b.length_km));
    out.emplace_back("fiberB.dispersion_ps_nm_km", fmt(cfg.fiber_b.dispersion_ps_nm_km));
    out.emplace_back("fiberB.tau2_ps3_km", fmt(cfg.fiber_b.tau2_ps3_km));
    out.emplace_back("fiberB.thermal_mm_K_km", fmt(cfg.fiber_b.thermal_mm_per_K_km));
    out.emplace_back("detectorC.efficiency", fmt(cfg.det_c_efficiency));
    out.emplace_back("detectorC.mode", mode_str(cfg.det_c_mode));
    out.emplace_back("detectorC.dark_rate_hz", fmt(cfg.det_c_dark_rate_hz));
    out.emplace_back("detectorC.dark_prob_per_ns", fmt(cfg.det_c_dark_prob_per_ns));
    out.emplace_back("detectorD.efficiency", fmt(cfg.det_d_efficiency));
    out.emplace_back("detectorD.mode", mode_str(cfg.det_d_mode));
    out.emplace_back("detectorD.dark_rate_hz", fmt(cfg.det_d_dark_rate_hz));
    out.emplace_back("detectorD.dark_prob_per_ns", fmt(cfg.det_d_dark_prob_per_ns));
    out.emplace_back("counting.window_ns", fmt(cfg.window_ns));
    out.emplace_back("counting.integration_s", fmt(cfg.integration_s));
    out.emplace_back("dispersion.delay_spread_ps_km", fmt(cfg.delay_spread_ps_km));
    out.emplace_back("dispersion.cancellation_tol_ps", fmt(cfg.cancellation_tol_ps));
    out.emplace_back("run.seed", std::to_string(cfg.seed));
    out.emplace_back("run.points", std::to_string(cfg.points));
    out.emplace_back("run.mode", to_string(cfg.mode));
    out.emplace_back("run.drift_blur_mm", fmt(cfg.drift_blur_mm));
    return out;
}

}  // namespace homsim

#endif  // HOMSIM_CONFIG_HPP
