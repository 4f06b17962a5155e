#ifndef HOMSIM_ANALYSIS_HPP
#define HOMSIM_ANALYSIS_HPP

/*
 * Dispersion feasibility report for the two-arm link: delay differences
 * across the spectral band for energy-anticorrelated versus independent
 * photon pairs, cancellation verdicts, pulse broadening, the maximum link
 * length before the arm-to-arm delay spread swallows the coherence time,
 * and the thermal stability the fringes would demand.
 */

#include <vector>

#include "homsim/config.hpp"
#include "homsim/fiber.hpp"
#include "homsim/interference.hpp"
#include "homsim/source.hpp"

namespace homsim {

struct DispersionBandRow {
    double detuning_sigma = 0.0;        // photon detuning in units of sigma
    double dtau_anticorrelated_s = 0.0; // w1 = w0 + W, w2 = w0 - W
    double dtau_independent_s = 0.0;    // w1 = w2 = w0 + W
};

struct DispersionReport {
    double sigma_omega_rad_s = 0.0;
    double coherence_time_s = 0.0;
    double tolerance_s = 0.0;
    std::vector<DispersionBandRow> band;
    bool cancelled_anticorrelated = false;
    bool cancelled_independent = false;
    double broadening_a_s = 0.0;
    double broadening_b_s = 0.0;
    double max_link_km = 0.0;
    double thermal_drift_a_m_per_K = 0.0;
    double thermal_drift_b_m_per_K = 0.0;
    double fringe_stability_a_K = 0.0;
    double fringe_stability_b_K = 0.0;
};

inline DispersionReport build_dispersion_report(const ExperimentConfig& cfg,
                                                int band_rows = 13) {
    cfg.validate();
    const SourceSpec src = cfg.source();
    const JointSpectrum js = make_joint_spectrum(src);
    const FiberChannel a = cfg.fiber_channel_a();
    const FiberChannel b = cfg.fiber_channel_b();
    const double omega0 = src.degenerate_center();

    DispersionReport rep;
    rep.sigma_omega_rad_s = js.sigma_omega_rad_s;
    rep.coherence_time_s = coherence_time(src);
    rep.tolerance_s = cfg.cancellation_tolerance_s();

    for (int i = 0; i < band_rows; ++i) {
        const double frac =
            band_rows > 1 ? -3.0 + 6.0 * i / (band_rows - 1) : 0.0;
        const double det = frac * js.sigma_omega_rad_s;
        DispersionBandRow row;
        row.detuning_sigma = frac;
        row.dtau_anticorrelated_s =
            two_path_delay_difference(a, b, omega0 + det, omega0 - det, omega0);
        row.dtau_independent_s =
            two_path_delay_difference(a, b, omega0 + det, omega0 + det, omega0);
        rep.band.push_back(row);
    }

    rep.cancelled_anticorrelated = is_dispersion_cancelled(
        a, b, CorrelationKind::energy_anticorrelated, js.sigma_omega_rad_s,
        rep.tolerance_s);
    rep.cancelled_independent =
        is_dispersion_cancelled(a, b, CorrelationKind::independent,
                                js.sigma_omega_rad_s, rep.tolerance_s);

    rep.broadening_a_s = pulse_broadening(cfg.fiber_a.dispersion_ps_nm_km,
                                          cfg.fiber_a.length_km,
                                          cfg.filter_fwhm_nm);
    rep.broadening_b_s = pulse_broadening(cfg.fiber_b.dispersion_ps_nm_km,
                                          cfg.fiber_b.length_km,
                                          cfg.filter_fwhm_nm);
    rep.max_link_km = max_link_length_km(rep.coherence_time_s,
                                         cfg.delay_spread_ps_km * 1.0e-12);
    rep.thermal_drift_a_m_per_K = thermal_length_drift(a, 1.0);
    rep.thermal_drift_b_m_per_K = thermal_length_drift(b, 1.0);
    rep.fringe_stability_a_K = stability_for_fringe_resolution(
        a, src.pump_wavelength_m, cfg.n_eff);
    rep.fringe_stability_b_K = stability_for_fringe_resolution(
        b, src.pump_wavelength_m, cfg.n_eff);
    return rep;
}

}  // namespace homsim

#endif  // HOMSIM_ANALYSIS_HPP
