#ifndef HOMSIM_SCAN_HPP
#define HOMSIM_SCAN_HPP

/*
 * Scan pipeline: arm-stretch grid -> delay -> coincidence probability ->
 * expected rates -> (sampled) counts -> CSV rows -> dip fit and
 * visibilities.
 *
 * Run modes:
 *   envelope  each point draws one uniform fringe phase (thermal fringe
 *             washing) and Poisson-samples the counts; the ensemble mean
 *             follows the averaged envelope
 *   fringes   deterministic phase-resolved curve, Poisson-sampled
 *   theory    noiseless averaged envelope, no sampling
 *
 * All analysis (fit, visibilities) runs on the values after CSV
 * serialization and re-parsing, so an offline re-fit of the written file
 * reproduces the in-run fit bit for bit.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homsim/config.hpp"
#include "homsim/counting.hpp"
#include "homsim/csv.hpp"
#include "homsim/dip_fit.hpp"
#include "homsim/interference.hpp"
#include "homsim/rng.hpp"
#include "homsim/source.hpp"

namespace homsim {

// Immutable per-configuration precomputation, reusable across seeds.
struct ScanContext {
    JointSpectrum spectrum;
    double delta_s = 0.0;   // calibrated closed-form width
    double omega_p = 0.0;   // pump angular frequency
    double overlap = 1.0;
    double coherence_time_s = 0.0;
};

inline ScanContext make_scan_context(const ExperimentConfig& cfg) {
    const SourceSpec src = cfg.source();
    ScanContext ctx;
    ctx.spectrum = make_joint_spectrum(src);
    ctx.delta_s = calibrate_delta(ctx.spectrum);
    ctx.omega_p = src.pump_angular_frequency();
    ctx.overlap = src.mode_overlap;
    ctx.coherence_time_s = coherence_time(src);
    return ctx;
}

namespace detail {

// Gaussian dip factor at arm stretch `dl`, optionally convolved with a
// Gaussian length blur (thermal drift during the integration): amplitude
// shrinks by w/w', width widens to w' = sqrt(w^2 + 2 blur^2).
inline double blurred_dip_factor(double dl_m, double width_m, double blur_m) {
    if (blur_m <= 0.0)
        return std::exp(-dl_m * dl_m / (width_m * width_m));
    const double wide2 = width_m * width_m + 2.0 * blur_m * blur_m;
    return width_m / std::sqrt(wide2) * std::exp(-dl_m * dl_m / wide2);
}

}  // namespace detail

// Model coincidence probability at one scan point.
inline double scan_point_probability(const ExperimentConfig& cfg,
                                     const ScanContext& ctx, double delta_l_m,
                                     double fringe_phase) {
    const double tau = delay_from_stretch(delta_l_m, cfg.n_eff);
    const double width_m = ctx.delta_s * kSpeedOfLight / cfg.n_eff;
    const double dip =
        detail::blurred_dip_factor(delta_l_m, width_m, cfg.drift_blur_mm * 1.0e-3);
    switch (cfg.mode) {
        case RunMode::theory:
            return (2.0 - ctx.overlap * dip) / 4.0;
        case RunMode::envelope:
            return (2.0 - ctx.overlap * dip -
                    ctx.overlap * std::cos(fringe_phase)) /
                   4.0;
        case RunMode::fringes:
            return coincidence_probability_closed(ctx.delta_s, ctx.omega_p, tau,
                                                  ctx.overlap, 0.0);
    }
    return 0.0;
}

struct ScanAnalysis {
    DipFit fit;
    double raw_visibility = 0.0;
    double net_visibility = 0.0;
    double accidental_level = 0.0;  // counts, mean of the accidentals column
    bool visibility_valid = false;
    double fitted_fwhm_m = 0.0;
    double predicted_fwhm_m = 0.0;  // 0 when no config is available
};

// Fit and visibility extraction from parsed CSV rows. Weighting follows the
// data: sampled (integer) counts get inverse-variance Poisson weights,
// theory-mode float counts are fitted unweighted.
inline ScanAnalysis analyze_scan_rows(
    const std::vector<ScanRow>& rows,
    const std::optional<ExperimentConfig>& cfg = std::nullopt) {
    std::vector<DipPoint> pts;
    pts.reserve(rows.size());
    bool all_integral = true;
    double acc_sum = 0.0;
    for (const ScanRow& r : rows) {
        pts.push_back({r.delta_l_mm * 1.0e-3, r.counts});
        all_integral = all_integral && r.counts_integral;
        acc_sum += r.expected_accidentals;
    }
    ScanAnalysis out;
    out.fit = fit_gaussian_dip(
        pts, all_integral ? FitWeighting::poisson : FitWeighting::uniform);
    out.accidental_level = rows.empty() ? 0.0 : acc_sum / rows.size();
    out.fitted_fwhm_m = out.fit.fwhm();
    try {
        const auto [raw, net] =
            visibilities_from_fit(out.fit, out.accidental_level);
        out.raw_visibility = raw;
        out.net_visibility = net;
        out.visibility_valid = true;
    } catch (const degenerate_data_error&) {
        out.visibility_valid = false;
    }
    if (cfg) {
        out.predicted_fwhm_m =
            dip_width_prediction(coherence_time(cfg->source()), cfg->n_eff);
    }
    return out;
}

struct ScanResult {
    ExperimentConfig config;
    std::string csv_text;
    ScanCsv csv;  // the rows as re-parsed from csv_text
    ScanAnalysis analysis;
};

inline ScanResult run_scan(const ExperimentConfig& cfg, const ScanContext& ctx) {
    cfg.validate();
    const CoincidenceSetup setup = cfg.coincidence_setup();
    const double half_m = cfg.scan_halfspan_mm * 1.0e-3;
    const double step_m =
        cfg.points > 1 ? 2.0 * half_m / (cfg.points - 1) : 0.0;

    ScanCsv csv;
    csv.config_echo = config_entries(cfg);
    for (int i = 0; i < cfg.points; ++i) {
        const double dl = -half_m + step_m * i;
        const double tau = delay_from_stretch(dl, cfg.n_eff);
        CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
        const double phase =
            cfg.mode == RunMode::envelope ? rng.next_phase() : 0.0;
        const double p = scan_point_probability(cfg, ctx, dl, phase);
        ScanRow row;
        row.delta_l_mm = dl * 1.0e3;
        row.tau_ps = tau * 1.0e12;
        row.p_model = p;
        if (cfg.mode == RunMode::theory) {
            const Rates r = expected_rates(setup, p);
            row.expected_signal = r.signal_hz * setup.integration_time_s;
            row.expected_accidentals =
                r.accidentals_hz * setup.integration_time_s;
            row.counts = row.expected_signal + row.expected_accidentals;
            row.counts_integral = false;
        } else {
            const CountRecord rec = simulate_point(
                setup, p, derive_seed(cfg.seed, static_cast<std::uint64_t>(i)),
                dl, tau);
            row.expected_signal = rec.expected_signal;
            row.expected_accidentals = rec.expected_accidentals;
            row.counts = static_cast<double>(rec.sampled_total);
            row.counts_integral = true;
        }
        csv.rows.push_back(row);
    }

    ScanResult res;
    res.config = cfg;
    res.csv_text = serialize_scan_csv(csv);
    res.csv = parse_scan_csv(res.csv_text);
    res.analysis = analyze_scan_rows(res.csv.rows, cfg);
    return res;
}

inline ScanResult run_scan(const ExperimentConfig& cfg) {
    return run_scan(cfg, make_scan_context(cfg));
}

// Rebuilds the configuration recorded in a CSV config echo; nullopt when the
// file carries none.
inline std::optional<ExperimentConfig> config_from_echo(const ScanCsv& csv) {
    if (csv.config_echo.empty()) return std::nullopt;
    ExperimentConfig cfg;
    for (const auto& [key, value] : csv.config_echo)
        apply_config_entry(cfg, key, value);
    return cfg;
}

}  // namespace homsim

#endif  // HOMSIM_SCAN_HPP
