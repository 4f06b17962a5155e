#ifndef HOMSIM_SOURCE_HPP
#define HOMSIM_SOURCE_HPP

#include <cmath>
#include <optional>

#include "homsim/constants.hpp"
#include "homsim/errors.hpp"

namespace homsim {

// Filtered degenerate photon-pair source pumped by a zero-linewidth CW laser.
// Signal and idler are emitted around the degeneracy point w0 = w_pump / 2
// and spectrally narrowed by a band-pass filter of FWHM `filter_fwhm_m`.
// All frequencies are angular (rad/s) internally; wavelengths only appear at
// the interface.
struct SourceSpec {
    double pump_wavelength_m = 783.0e-9;
    double filter_fwhm_m = 0.8e-9;
    double pair_rate_hz = 0.0;    // pairs/s delivered into the interferometer
    double mode_overlap = 1.0;    // polarization/spatial indistinguishability
    // When set, coherence_time() reports this value instead of the
    // Fourier-limited K/dnu estimate.
    std::optional<double> coherence_time_override_s{};

    double pump_angular_frequency() const {
        return kTwoPi * kSpeedOfLight / pump_wavelength_m;
    }
    // Degeneracy point, exactly half the pump frequency.
    double degenerate_center() const { return 0.5 * pump_angular_frequency(); }
    double center_wavelength() const { return 2.0 * pump_wavelength_m; }

    void validate() const {
        if (!(pump_wavelength_m > 0.0) || !std::isfinite(pump_wavelength_m))
            throw invalid_parameter("pump wavelength must be > 0");
        if (!(filter_fwhm_m > 0.0) || !std::isfinite(filter_fwhm_m))
            throw invalid_parameter("filter FWHM must be > 0");
        if (!(pair_rate_hz >= 0.0) || !std::isfinite(pair_rate_hz))
            throw invalid_parameter("pair rate must be >= 0");
        if (!(mode_overlap >= 0.0 && mode_overlap <= 1.0))
            throw invalid_parameter("mode overlap must lie in [0,1]");
        if (coherence_time_override_s && !(*coherence_time_override_s > 0.0))
            throw invalid_parameter("coherence time override must be > 0");
    }
};

// Two-photon spectral amplitude under exact CW energy anticorrelation
// (w + w' = w_pump identically), reduced to a single detuning variable
// W = w - w0. The marginal amplitude f(W) is Gaussian and normalized,
//
//   |f(W)|^2 = exp(-W^2 / (2 s^2)) / (s sqrt(2 pi)),   s = sigma_omega,
//
// so the marginal intensity FWHM equals kFwhmPerSigma * sigma_omega.
struct JointSpectrum {
    double center_rad_s = 0.0;       // w0 = w_pump / 2
    double sigma_omega_rad_s = 0.0;  // std of the marginal intensity, rad/s
    double squared_norm = 1.0;       // integral of |f|^2; 1 for a valid state

    double intensity(double detuning_rad_s) const {
        const double s = sigma_omega_rad_s;
        return squared_norm *
               std::exp(-0.5 * detuning_rad_s * detuning_rad_s / (s * s)) /
               (s * std::sqrt(kTwoPi));
    }

    double intensity_fwhm_rad_s() const {
        return kFwhmPerSigma * sigma_omega_rad_s;
    }

    void validate() const {
        if (!(sigma_omega_rad_s > 0.0) || !std::isfinite(sigma_omega_rad_s))
            throw invalid_parameter("sigma_omega must be > 0");
        if (!(center_rad_s > 0.0) || !std::isfinite(center_rad_s))
            throw invalid_parameter("spectrum center must be > 0");
        if (std::fabs(squared_norm - 1.0) > 1.0e-9)
            throw invalid_parameter("joint spectrum is not normalized");
    }
};

// FWHM bandwidth conversion between wavelength and optical frequency,
// dnu = c * dlambda / lambda^2.
inline double bandwidth_wavelength_to_frequency(double fwhm_wavelength_m,
                                                double center_wavelength_m) {
    if (!(fwhm_wavelength_m > 0.0) || !(center_wavelength_m > 0.0))
        throw invalid_parameter("bandwidth conversion requires positive inputs");
    return kSpeedOfLight * fwhm_wavelength_m /
           (center_wavelength_m * center_wavelength_m);
}

inline double bandwidth_frequency_to_wavelength(double fwhm_hz,
                                                double center_wavelength_m) {
    if (!(fwhm_hz > 0.0) || !(center_wavelength_m > 0.0))
        throw invalid_parameter("bandwidth conversion requires positive inputs");
    return center_wavelength_m * center_wavelength_m * fwhm_hz / kSpeedOfLight;
}

// Fourier-limited FWHM coherence time. Honors the explicit override when the
// spec carries one; otherwise K / dnu with the Gaussian time-bandwidth
// product.
inline double coherence_time(const SourceSpec& spec) {
    spec.validate();
    if (spec.coherence_time_override_s) return *spec.coherence_time_override_s;
    const double fwhm_hz = bandwidth_wavelength_to_frequency(
        spec.filter_fwhm_m, spec.center_wavelength());
    return kGaussianTimeBandwidth / fwhm_hz;
}

// FWHM coherence length in air for a given coherence time.
inline double coherence_length_air(double coherence_time_s) {
    if (!(coherence_time_s >= 0.0))
        throw invalid_parameter("coherence time must be >= 0");
    return kSpeedOfLight * coherence_time_s;
}

// Builds the Gaussian joint spectrum whose marginal intensity FWHM equals the
// filter's frequency FWHM.
inline JointSpectrum make_joint_spectrum(const SourceSpec& spec) {
    spec.validate();
    const double fwhm_hz = bandwidth_wavelength_to_frequency(
        spec.filter_fwhm_m, spec.center_wavelength());
    JointSpectrum js;
    js.center_rad_s = spec.degenerate_center();
    js.sigma_omega_rad_s = kTwoPi * fwhm_hz / kFwhmPerSigma;
    js.squared_norm = 1.0;
    return js;
}

}  // namespace homsim

#endif  // HOMSIM_SOURCE_HPP
