#ifndef HOMSIM_CONSTANTS_HPP
#define HOMSIM_CONSTANTS_HPP

namespace homsim {

// Speed of light in vacuum, m/s (exact).
inline constexpr double kSpeedOfLight = 299792458.0;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// FWHM = kFwhmPerSigma * sigma for a Gaussian profile.
inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2*sqrt(2*ln 2)

// Fourier-limited FWHM time-bandwidth product for a Gaussian pulse,
// dt_FWHM * dnu_FWHM = K.
inline constexpr double kGaussianTimeBandwidth = 0.441;

// Single-photon detectors do not resolve arrival-time differences finer
// than about a nanosecond; the spectral interference model is only valid
// for path delays well below this scale.
inline constexpr double kDetectorResolutionGuard = 1.0e-9;  // s

}  // namespace homsim

#endif  // HOMSIM_CONSTANTS_HPP
