#ifndef HOMSIM_FIBER_HPP
#define HOMSIM_FIBER_HPP

/*
 * Chromatic dispersion of a fiber arm as a Taylor group-delay model,
 *
 *   tau(w) = L * ( tau0 + tau1 (w - w0) + 1/2 tau2 (w - w0)^2 ),
 *
 * with per-km coefficients (tau0 = 1/v_g; tau1 is the GVD, related to the
 * dispersion parameter by D = -(w/lambda) tau1; tau2 its slope). The
 * two-path delay difference of a photon pair crossing unequal arms collapses
 * to coefficient differences; for energy-anticorrelated pairs the tau1 terms
 * cancel (dispersion cancellation), leaving only tau2 mismatch.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "homsim/constants.hpp"
#include "homsim/errors.hpp"

namespace homsim {

struct FiberChannel {
    double length_km = 0.0;
    double tau0_s_per_km = 0.0;       // group delay per km at w0
    double tau1_s2_per_km = 0.0;      // s per (rad/s) per km
    double tau2_s3_per_km = 0.0;      // s per (rad/s)^2 per km
    double thermal_m_per_K_km = 0.0;  // length change per kelvin per km
    std::string label;

    void validate() const {
        if (!(length_km >= 0.0) || !std::isfinite(length_km))
            throw invalid_parameter("fiber length must be >= 0");
        if (!(thermal_m_per_K_km >= 0.0) || !std::isfinite(thermal_m_per_K_km))
            throw invalid_parameter("thermal coefficient must be >= 0");
        if (!std::isfinite(tau0_s_per_km) || !std::isfinite(tau1_s2_per_km) ||
            !std::isfinite(tau2_s3_per_km))
            throw invalid_parameter("fiber delay coefficients must be finite");
    }
};

// Spectral correlation of the photon pair entering the two arms.
enum class CorrelationKind {
    energy_anticorrelated,  // w1 + w2 = 2 w0 exactly (shared CW pump)
    independent,            // w1, w2 free (separate sources)
};

// Builds a channel from the conventional dispersion parameter
// D (ps nm^-1 km^-1): tau1 = -D * lambda0 / w0 with w0 = 2 pi c / lambda0.
inline FiberChannel channel_from_dispersion(double length_km, double d_ps_nm_km,
                                            double center_wavelength_m,
                                            double tau2_s3_per_km = 0.0,
                                            double tau0_s_per_km = 0.0,
                                            double thermal_m_per_K_km = 0.0,
                                            std::string label = {}) {
    if (!std::isfinite(d_ps_nm_km) || !std::isfinite(tau2_s3_per_km) ||
        !std::isfinite(tau0_s_per_km))
        throw invalid_parameter("dispersion inputs must be finite");
    if (!(center_wavelength_m > 0.0))
        throw invalid_parameter("center wavelength must be > 0");
    const double d_si_per_km = d_ps_nm_km * 1.0e-3;  // s/m per km
    const double omega0 = kTwoPi * kSpeedOfLight / center_wavelength_m;
    FiberChannel ch;
    ch.length_km = length_km;
    ch.tau0_s_per_km = tau0_s_per_km;
    ch.tau1_s2_per_km = -d_si_per_km * center_wavelength_m / omega0;
    ch.tau2_s3_per_km = tau2_s3_per_km;
    ch.thermal_m_per_K_km = thermal_m_per_K_km;
    ch.label = std::move(label);
    ch.validate();
    return ch;
}

// Inverse of channel_from_dispersion for the tau1 coefficient.
inline double dispersion_parameter_ps_nm_km(const FiberChannel& ch,
                                            double center_wavelength_m) {
    if (!(center_wavelength_m > 0.0))
        throw invalid_parameter("center wavelength must be > 0");
    const double omega0 = kTwoPi * kSpeedOfLight / center_wavelength_m;
    return -(omega0 / center_wavelength_m) * ch.tau1_s2_per_km * 1.0e3;
}

// Total propagation delay at angular frequency `omega`, Taylor-expanded
// around `omega0`.
inline double propagation_delay(const FiberChannel& ch, double omega,
                                double omega0) {
    ch.validate();
    const double u = omega - omega0;
    return ch.length_km *
           (ch.tau0_s_per_km + ch.tau1_s2_per_km * u +
            0.5 * ch.tau2_s3_per_km * u * u);
}

// Delay difference between the two indistinguishable detection alternatives
// of a photon pair (w1 via A, w2 via B) versus (w1 via B, w2 via A),
// evaluated term by term from the four propagation delays.
inline double two_path_delay_difference(const FiberChannel& a,
                                        const FiberChannel& b, double omega1,
                                        double omega2, double omega0) {
    return (propagation_delay(a, omega1, omega0) -
            propagation_delay(b, omega2, omega0)) -
           (propagation_delay(b, omega1, omega0) -
            propagation_delay(a, omega2, omega0));
}

// Same quantity grouped by coefficient differences,
//   2 dT0 + dT1 (u1 + u2) + 1/2 dT2 (u1^2 + u2^2),  dTi = L_A tauA_i - L_B tauB_i,
// algebraically identical to the direct evaluation. The dT1 term vanishes
// for energy-anticorrelated pairs (u1 + u2 = 0): dispersion cancellation.
inline double two_path_delay_difference_expanded(const FiberChannel& a,
                                                 const FiberChannel& b,
                                                 double omega1, double omega2,
                                                 double omega0) {
    a.validate();
    b.validate();
    const double d0 = a.length_km * a.tau0_s_per_km - b.length_km * b.tau0_s_per_km;
    const double d1 = a.length_km * a.tau1_s2_per_km - b.length_km * b.tau1_s2_per_km;
    const double d2 = a.length_km * a.tau2_s3_per_km - b.length_km * b.tau2_s3_per_km;
    const double u1 = omega1 - omega0;
    const double u2 = omega2 - omega0;
    return 2.0 * d0 + d1 * (u1 + u2) + 0.5 * d2 * (u1 * u1 + u2 * u2);
}

// True iff |delay difference| stays within `tolerance_s` over the +-3 sigma
// spectral support, under the stated correlation. The difference is
// separable and quadratic per photon, so the extremum is found exactly from
// endpoint and stationary candidates.
inline bool is_dispersion_cancelled(const FiberChannel& a, const FiberChannel& b,
                                    CorrelationKind kind, double sigma_omega,
                                    double tolerance_s) {
    a.validate();
    b.validate();
    if (!(tolerance_s > 0.0))
        throw invalid_parameter("tolerance must be > 0");
    if (!(sigma_omega > 0.0))
        throw invalid_parameter("sigma_omega must be > 0");
    const double d0 = a.length_km * a.tau0_s_per_km - b.length_km * b.tau0_s_per_km;
    const double d1 = a.length_km * a.tau1_s2_per_km - b.length_km * b.tau1_s2_per_km;
    const double d2 = a.length_km * a.tau2_s3_per_km - b.length_km * b.tau2_s3_per_km;
    const double edge = 3.0 * sigma_omega;

    double max_abs = 0.0;
    if (kind == CorrelationKind::energy_anticorrelated) {
        // u2 = -u1: delta = 2 d0 + d2 u^2; candidates u in {0, +-edge}.
        for (double u : {0.0, edge}) {
            const double v = 2.0 * d0 + d2 * u * u;
            max_abs = std::max(max_abs, std::fabs(v));
        }
    } else {
        // Per-photon contribution g(u) = d1 u + d2 u^2 / 2 over [-edge, edge].
        double cands[3] = {-edge, edge, 0.0};
        int n_cands = 2;
        if (d2 != 0.0) {
            const double stationary = -d1 / d2;
            if (std::fabs(stationary) < edge) cands[n_cands++] = stationary;
        }
        auto g = [&](double u) { return d1 * u + 0.5 * d2 * u * u; };
        double gmin = g(cands[0]), gmax = g(cands[0]);
        for (int i = 1; i < n_cands; ++i) {
            gmin = std::min(gmin, g(cands[i]));
            gmax = std::max(gmax, g(cands[i]));
        }
        max_abs = std::max(std::fabs(2.0 * d0 + 2.0 * gmin),
                           std::fabs(2.0 * d0 + 2.0 * gmax));
    }
    return max_abs <= tolerance_s;
}

// Transform-limited broadening of a pulse of spectral width `fwhm_nm` after
// `length_km` of fiber with dispersion `d_ps_nm_km`; returns seconds.
inline double pulse_broadening(double d_ps_nm_km, double length_km,
                               double fwhm_nm) {
    if (!(d_ps_nm_km >= 0.0) || !(length_km >= 0.0) || !(fwhm_nm >= 0.0))
        throw invalid_parameter("pulse broadening inputs must be >= 0");
    return d_ps_nm_km * length_km * fwhm_nm * 1.0e-12;
}

// Longest link for which the arm-to-arm delay spread stays below the photon
// coherence time; +infinity when the spread vanishes.
inline double max_link_length_km(double coherence_time_s,
                                 double delay_spread_s_per_km) {
    if (!(coherence_time_s > 0.0))
        throw invalid_parameter("coherence time must be > 0");
    if (!(delay_spread_s_per_km >= 0.0))
        throw invalid_parameter("delay spread must be >= 0");
    if (delay_spread_s_per_km == 0.0)
        return std::numeric_limits<double>::infinity();
    return coherence_time_s / delay_spread_s_per_km;
}

// Fiber length change for a temperature excursion `delta_kelvin`.
inline double thermal_length_drift(const FiberChannel& ch, double delta_kelvin) {
    ch.validate();
    return ch.thermal_m_per_K_km * ch.length_km * delta_kelvin;
}

// Temperature excursion that drifts the arm length by one two-photon fringe
// period (lambda_p / n_eff); +infinity when the channel does not respond to
// temperature.
inline double stability_for_fringe_resolution(const FiberChannel& ch,
                                              double pump_wavelength_m,
                                              double n_eff) {
    ch.validate();
    if (!(pump_wavelength_m > 0.0))
        throw invalid_parameter("pump wavelength must be > 0");
    if (!(n_eff > 1.0))
        throw invalid_parameter("effective group index must exceed 1");
    const double response_m_per_K = ch.thermal_m_per_K_km * ch.length_km;
    if (response_m_per_K == 0.0)
        return std::numeric_limits<double>::infinity();
    return (pump_wavelength_m / n_eff) / response_m_per_K;
}

}  // namespace homsim

#endif  // HOMSIM_FIBER_HPP
