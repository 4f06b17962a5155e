#ifndef HOMSIM_INTERFERENCE_HPP
#define HOMSIM_INTERFERENCE_HPP

/*
 * Two-photon interference in a fiber Mach-Zehnder interferometer.
 *
 * A degenerate photon pair enters one port of BS1, the two arms acquire a
 * relative delay tau, and the modes recombine on BS2 with outputs c and d.
 * For a pair at frequencies w0 +/- W the single-photon transfer
 * probabilities into the outputs are MZ fringes in (w tau + phi); the joint
 * outcome weights are their products, and integrating over the spectral
 * density |f(W)|^2 gives, for 50/50 splitters,
 *
 *   P_cd(tau) = ( 2 - exp(-tau^2/delta^2) - cos(tau w_p + phi) ) / 4
 *
 * i.e. a Gaussian photon-bunching dip (width set by the coherence time)
 * superposed with a two-photon fringe at the pump frequency w_p = 2 w0.
 * The fringe term averages away under phase drift, leaving the envelope
 * (2 - exp(-tau^2/delta^2))/4:  floor 1/4, plateau 1/2, visibility 50%.
 *
 * The spectral integral is evaluated numerically (trapezoid over the
 * Gaussian support, spectrally accurate) and serves as the reference for the
 * closed form; `calibrate_delta` ties the closed form's width parameter to
 * the spectrum by least squares against that reference.
 */

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "homsim/constants.hpp"
#include "homsim/errors.hpp"
#include "homsim/source.hpp"

namespace homsim {

// Beam-splitter pair and delay-line geometry. Transmittances are in power;
// both default to an exact 50/50 split. `n_eff` converts mechanical stretch
// of the fiber arm into optical delay.
struct InterferometerSpec {
    double bs1_transmittance = 0.5;
    double bs2_transmittance = 0.5;
    double n_eff = 1.8;  // group index of the stretched arm

    void validate() const {
        if (!(bs1_transmittance >= 0.0 && bs1_transmittance <= 1.0))
            throw invalid_parameter("bs1 transmittance must lie in [0,1]");
        if (!(bs2_transmittance >= 0.0 && bs2_transmittance <= 1.0))
            throw invalid_parameter("bs2 transmittance must lie in [0,1]");
        if (!(n_eff > 1.0))
            throw invalid_parameter("effective group index must exceed 1");
    }
};

// Classification of a detected pair over the two BS2 outputs.
struct OutcomeProbabilities {
    double cd = 0.0;  // one photon in each output (coincidence)
    double cc = 0.0;  // both photons in c
    double dd = 0.0;  // both photons in d

    double sum() const { return cd + cc + dd; }
};

namespace detail {

// Trapezoid quadrature over the spectral support. With Gaussian decay the
// trapezoid rule is spectrally accurate; 8 sigma of support and 16 nodes per
// sigma push both truncation and discretization error below 1e-13.
inline constexpr double kQuadratureSupportSigmas = 8.0;
inline constexpr std::size_t kQuadratureNodes = 257;

// Single-photon MZ transfer probabilities |A_c|^2, |A_d|^2 for a photon of
// phase angle theta = w*tau + phi, with power transmittances t1, t2.
struct ModeSplit {
    double into_c;
    double into_d;
};

inline ModeSplit mz_transfer(double theta, double t1, double t2) {
    const double r1 = 1.0 - t1, r2 = 1.0 - t2;
    const double cross = 2.0 * std::sqrt(r1 * r2 * t1 * t2) * std::cos(theta);
    return {r1 * r2 + t1 * t2 - cross, r1 * t2 + t1 * r2 + cross};
}

// Joint outcome weights for the pair (w0+W, w0-W), pointwise in W. For a
// lossless splitter pair they sum to 1 identically. `overlap` mixes the
// interfering outcome with fully incoherent routing of the same pair.
inline OutcomeProbabilities pair_weights(double omega_plus_theta,
                                         double omega_minus_theta, double t1,
                                         double t2, double overlap) {
    const ModeSplit p = mz_transfer(omega_plus_theta, t1, t2);
    const ModeSplit m = mz_transfer(omega_minus_theta, t1, t2);
    OutcomeProbabilities w;
    w.cd = p.into_c * m.into_d + m.into_c * p.into_d;
    w.cc = p.into_c * m.into_c;
    w.dd = p.into_d * m.into_d;
    if (overlap < 1.0) {
        const double r1 = 1.0 - t1, r2 = 1.0 - t2;
        const double qc = r1 * r2 + t1 * t2;  // incoherent routing into c
        const double qd = r1 * t2 + t1 * r2;
        const double q = 1.0 - overlap;
        w.cd = overlap * w.cd + q * 2.0 * qc * qd;
        w.cc = overlap * w.cc + q * qc * qc;
        w.dd = overlap * w.dd + q * qd * qd;
    }
    return w;
}

inline void check_interference_inputs(const JointSpectrum& js,
                                      const InterferometerSpec& spec,
                                      double tau, double overlap) {
    js.validate();
    spec.validate();
    if (!(overlap >= 0.0 && overlap <= 1.0))
        throw invalid_parameter("mode overlap must lie in [0,1]");
    if (!std::isfinite(tau))
        throw invalid_parameter("tau must be finite");
    if (std::fabs(tau) > kDetectorResolutionGuard)
        throw model_domain_error(
            "path delay exceeds the detector-resolution guard (1 ns); "
            "the spectral interference model does not apply");
}

}  // namespace detail

// Full outcome distribution {cd, cc, dd} for relative arm delay `tau` and an
// additional slow interferometer phase `phase` (drift beyond the
// deterministic w*tau). Probabilities sum to 1 for lossless splitters.
inline OutcomeProbabilities evolve_state(const JointSpectrum& js,
                                         const InterferometerSpec& spec,
                                         double tau, double overlap = 1.0,
                                         double phase = 0.0) {
    detail::check_interference_inputs(js, spec, tau, overlap);
    const double s = js.sigma_omega_rad_s;
    const double half = detail::kQuadratureSupportSigmas * s;
    const double step = 2.0 * half / (detail::kQuadratureNodes - 1);
    const double t1 = spec.bs1_transmittance, t2 = spec.bs2_transmittance;

    OutcomeProbabilities acc;
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < detail::kQuadratureNodes; ++i) {
        const double omega_det = -half + step * i;  // detuning W
        double wq = js.intensity(omega_det) * step;
        if (i == 0 || i + 1 == detail::kQuadratureNodes) wq *= 0.5;
        const double theta_plus = (js.center_rad_s + omega_det) * tau + phase;
        const double theta_minus = (js.center_rad_s - omega_det) * tau + phase;
        const OutcomeProbabilities w =
            detail::pair_weights(theta_plus, theta_minus, t1, t2, overlap);
        acc.cd += wq * w.cd;
        acc.cc += wq * w.cc;
        acc.dd += wq * w.dd;
        weight_sum += wq;
    }
    // Remove the residual quadrature normalization error so unitarity holds
    // to full precision.
    acc.cd /= weight_sum;
    acc.cc /= weight_sum;
    acc.dd /= weight_sum;
    return acc;
}

// Coincidence probability by direct spectral integration. This is the
// reference path the closed form is checked against.
inline double coincidence_probability_exact(const JointSpectrum& js,
                                            const InterferometerSpec& spec,
                                            double tau, double overlap = 1.0,
                                            double phase = 0.0) {
    return evolve_state(js, spec, tau, overlap, phase).cd;
}

// Phase-averaged coincidence probability from the spectral integral. The
// integrand carries only harmonics 0, +-1, +-2 in the drift phase, so a
// 16-node uniform phase grid averages it exactly.
inline double coincidence_envelope_exact(const JointSpectrum& js,
                                         const InterferometerSpec& spec,
                                         double tau, double overlap = 1.0) {
    constexpr int kPhases = 16;
    double acc = 0.0;
    for (int i = 0; i < kPhases; ++i)
        acc += coincidence_probability_exact(js, spec, tau, overlap,
                                             kTwoPi * i / kPhases);
    return acc / kPhases;
}

// Closed-form coincidence probability for 50/50 splitters,
//   P(tau) = (2 - ov * exp(-tau^2/delta^2) - ov * cos(tau w_p + phase)) / 4,
// normalized so distinguishable photons give the splitter value 1/2.
inline double coincidence_probability_closed(double delta_s, double omega_p,
                                             double tau, double overlap = 1.0,
                                             double phase = 0.0) {
    if (!(delta_s > 0.0) || !std::isfinite(delta_s))
        throw invalid_parameter("delta must be > 0");
    if (!(overlap >= 0.0 && overlap <= 1.0))
        throw invalid_parameter("mode overlap must lie in [0,1]");
    const double dip = std::exp(-tau * tau / (delta_s * delta_s));
    return (2.0 - overlap * dip - overlap * std::cos(tau * omega_p + phase)) /
           4.0;
}

// Expectation of the closed form under a uniformly random fringe phase:
//   (2 - ov * exp(-tau^2/delta^2)) / 4.
inline double averaged_envelope(double delta_s, double tau,
                                double overlap = 1.0) {
    if (!(delta_s > 0.0) || !std::isfinite(delta_s))
        throw invalid_parameter("delta must be > 0");
    if (!(overlap >= 0.0 && overlap <= 1.0))
        throw invalid_parameter("mode overlap must lie in [0,1]");
    return (2.0 - overlap * std::exp(-tau * tau / (delta_s * delta_s))) / 4.0;
}

// Interference visibility (baseline - minimum) / baseline.
inline double visibility(double baseline, double minimum) {
    if (!(baseline > 0.0))
        throw invalid_parameter("baseline must be > 0");
    if (!(minimum >= 0.0 && minimum <= baseline))
        throw invalid_parameter("minimum must lie in [0, baseline]");
    return (baseline - minimum) / baseline;
}

// Optical delay produced by mechanically stretching one fiber arm by
// `delta_l_m`: tau = n_eff * dL / c.
inline double delay_from_stretch(double delta_l_m, double n_eff) {
    if (!(n_eff > 1.0))
        throw invalid_parameter("effective group index must exceed 1");
    return n_eff * delta_l_m / kSpeedOfLight;
}

// Arm-stretch period of one two-photon fringe: dL such that
// delay_from_stretch(dL) * w_p = 2 pi, i.e. lambda_p / n_eff.
inline double fringe_period_stretch(double pump_wavelength_m, double n_eff) {
    if (!(pump_wavelength_m > 0.0))
        throw invalid_parameter("pump wavelength must be > 0");
    if (!(n_eff > 1.0))
        throw invalid_parameter("effective group index must exceed 1");
    return pump_wavelength_m / n_eff;
}

// One sample of the coincidence curve, carrying the three model routes.
struct CoincidenceCurvePoint {
    double tau_s = 0.0;
    double p_exact = 0.0;
    double p_closed = 0.0;
    double p_envelope = 0.0;
};

// Evaluates exact, closed-form and envelope probabilities on a delay grid.
inline std::vector<CoincidenceCurvePoint> coincidence_curve(
    const JointSpectrum& js, const InterferometerSpec& spec, double omega_p,
    double delta_s, double tau_min, double tau_max, std::size_t points,
    double overlap = 1.0) {
    if (points < 2) throw invalid_parameter("curve needs at least 2 points");
    std::vector<CoincidenceCurvePoint> curve;
    curve.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        CoincidenceCurvePoint p;
        p.tau_s = tau_min + (tau_max - tau_min) * i / (points - 1);
        p.p_exact = coincidence_probability_exact(js, spec, p.tau_s, overlap);
        p.p_closed =
            coincidence_probability_closed(delta_s, omega_p, p.tau_s, overlap);
        p.p_envelope = averaged_envelope(delta_s, p.tau_s, overlap);
        curve.push_back(p);
    }
    return curve;
}

// Spectral fringe factor g(tau) = integral |f(W)|^2 cos(2 W tau) dW,
// the exact-dip profile the closed form's Gaussian approximates.
inline double spectral_fringe_factor(const JointSpectrum& js, double tau) {
    js.validate();
    const double s = js.sigma_omega_rad_s;
    const double half = detail::kQuadratureSupportSigmas * s;
    const double step = 2.0 * half / (detail::kQuadratureNodes - 1);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < detail::kQuadratureNodes; ++i) {
        const double omega_det = -half + step * i;
        double wq = js.intensity(omega_det);
        if (i == 0 || i + 1 == detail::kQuadratureNodes) wq *= 0.5;
        num += wq * std::cos(2.0 * omega_det * tau);
        den += wq;
    }
    return num / den;
}

// Width parameter of the closed form, defined operationally as the least
// squares fit of exp(-tau^2/delta^2) to the exact spectral fringe factor on
// a grid spanning +-5 delta. Compute once per spectrum and reuse; the result
// equals 1/(sqrt(2) sigma_omega) up to solver precision for a Gaussian
// spectrum.
inline double calibrate_delta(const JointSpectrum& js) {
    js.validate();
    const double delta0 = 1.0 / (std::sqrt(2.0) * js.sigma_omega_rad_s);
    constexpr std::size_t kGrid = 501;
    std::array<double, kGrid> taus{}, target{};
    for (std::size_t i = 0; i < kGrid; ++i) {
        taus[i] = -5.0 * delta0 + 10.0 * delta0 * i / (kGrid - 1);
        target[i] = spectral_fringe_factor(js, taus[i]);
    }
    double delta = delta0;
    for (int iter = 0; iter < 60; ++iter) {
        double jtj = 0.0, jtr = 0.0;
        for (std::size_t i = 0; i < kGrid; ++i) {
            const double t2 = taus[i] * taus[i];
            const double e = std::exp(-t2 / (delta * delta));
            const double r = e - target[i];
            const double j = e * 2.0 * t2 / (delta * delta * delta);
            jtj += j * j;
            jtr += j * r;
        }
        if (jtj == 0.0) break;
        const double step = -jtr / jtj;
        delta += step;
        if (std::fabs(step) <= 1.0e-14 * delta) break;
    }
    return delta;
}

}  // namespace homsim

#endif  // HOMSIM_INTERFERENCE_HPP
