#ifndef HOMSIM_COUNTING_HPP
#define HOMSIM_COUNTING_HPP

/*
 * Detection chain: coincidence probabilities -> measured count records.
 *
 * Detector C runs free and triggers detector D, which opens a gate of one
 * coincidence-window length. Signal coincidences are pairs surviving both
 * efficiencies; accidentals are C firings (true singles plus dark counts)
 * multiplied by the probability that D fires on something unrelated within
 * the window (uncorrelated photon flux or a gated dark event). Counts over
 * the integration time are Poisson-sampled with a counter-based generator,
 * so records are reproducible from (inputs, seed) alone.
 */

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "homsim/dip_fit.hpp"
#include "homsim/errors.hpp"
#include "homsim/rng.hpp"

namespace homsim {

struct DetectorModel {
    enum class Mode { free_running, gated };

    double efficiency = 0.0;
    Mode mode = Mode::free_running;
    double dark_rate_hz = 0.0;       // free-running dark counts per second
    double dark_prob_per_ns = 0.0;   // gated false-fire probability per ns
    std::string label;

    static DetectorModel free_running(double efficiency, double dark_rate_hz,
                                      std::string label = {}) {
        DetectorModel d;
        d.efficiency = efficiency;
        d.mode = Mode::free_running;
        d.dark_rate_hz = dark_rate_hz;
        d.label = std::move(label);
        d.validate();
        return d;
    }

    static DetectorModel gated(double efficiency, double dark_prob_per_ns,
                               std::string label = {}) {
        DetectorModel d;
        d.efficiency = efficiency;
        d.mode = Mode::gated;
        d.dark_prob_per_ns = dark_prob_per_ns;
        d.label = std::move(label);
        d.validate();
        return d;
    }

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0))
            throw invalid_parameter("detector efficiency must lie in [0,1]");
        if (!(dark_rate_hz >= 0.0) || !(dark_prob_per_ns >= 0.0))
            throw invalid_parameter("dark parameters must be >= 0");
    }
};

struct CoincidenceSetup {
    DetectorModel det_c;  // trigger detector
    DetectorModel det_d;  // gated partner
    double window_s = 2.0e-9;
    double integration_time_s = 50.0;
    double pair_rate_at_bs2_hz = 0.0;  // pairs/s after all losses

    void validate() const {
        det_c.validate();
        det_d.validate();
        if (!(window_s > 0.0))
            throw invalid_parameter("coincidence window must be > 0");
        if (!(integration_time_s > 0.0))
            throw invalid_parameter("integration time must be > 0");
        if (!(pair_rate_at_bs2_hz >= 0.0))
            throw invalid_parameter("pair rate must be >= 0");
    }
};

struct CountRecord {
    double delta_l_m = 0.0;
    double tau_s = 0.0;
    double expected_signal = 0.0;       // counts over the integration time
    double expected_accidentals = 0.0;  // counts over the integration time
    std::uint64_t sampled_total = 0;
    std::uint64_t seed = 0;
};

struct Rates {
    double signal_hz = 0.0;
    double accidentals_hz = 0.0;
};

namespace detail {

// Free firing rate of the trigger detector. A gated detector cannot fire on
// darks without a gate, so only its photon singles contribute.
inline double trigger_rate_hz(const DetectorModel& det, double photon_flux_hz) {
    double rate = det.efficiency * photon_flux_hz;
    if (det.mode == DetectorModel::Mode::free_running) rate += det.dark_rate_hz;
    return rate;
}

// Probability that the partner detector fires on something unrelated within
// one coincidence window.
inline double false_fire_probability(const DetectorModel& det,
                                     double photon_flux_hz, double window_s) {
    double p = det.efficiency * photon_flux_hz * window_s;
    if (det.mode == DetectorModel::Mode::gated)
        p += det.dark_prob_per_ns * (window_s * 1.0e9);
    else
        p += det.dark_rate_hz * window_s;
    return p;
}

}  // namespace detail

// Deterministic (signal, accidental) coincidence rates for a given
// coincidence probability.
inline Rates expected_rates(const CoincidenceSetup& setup, double p_coinc) {
    setup.validate();
    if (!(p_coinc >= 0.0 && p_coinc <= 1.0))
        throw invalid_parameter("coincidence probability must lie in [0,1]");
    const double pair_rate = setup.pair_rate_at_bs2_hz;
    Rates r;
    r.signal_hz =
        pair_rate * setup.det_c.efficiency * setup.det_d.efficiency * p_coinc;
    // Each pair delivers on average one photon toward each output, so the
    // uncorrelated photon flux seen by either detector equals the pair rate.
    r.accidentals_hz =
        detail::trigger_rate_hz(setup.det_c, pair_rate) *
        detail::false_fire_probability(setup.det_d, pair_rate, setup.window_s);
    return r;
}

// One simulated scan point: Poisson-sampled total counts with mean
// (signal + accidentals) * integration time. Identical (inputs, seed) give
// identical records on every run.
inline CountRecord simulate_point(const CoincidenceSetup& setup, double p_coinc,
                                  std::uint64_t seed, double delta_l_m = 0.0,
                                  double tau_s = 0.0) {
    const Rates r = expected_rates(setup, p_coinc);
    CountRecord rec;
    rec.delta_l_m = delta_l_m;
    rec.tau_s = tau_s;
    rec.expected_signal = r.signal_hz * setup.integration_time_s;
    rec.expected_accidentals = r.accidentals_hz * setup.integration_time_s;
    rec.seed = seed;
    CounterRng rng(seed);
    rec.sampled_total =
        rng.next_poisson(rec.expected_signal + rec.expected_accidentals);
    return rec;
}

inline std::vector<DipPoint> to_dip_points(const std::vector<CountRecord>& recs) {
    std::vector<DipPoint> pts;
    pts.reserve(recs.size());
    for (const CountRecord& r : recs)
        pts.push_back({r.delta_l_m, static_cast<double>(r.sampled_total)});
    return pts;
}

// Raw visibility of a recorded scan: depth/baseline of the fitted dip.
inline double raw_visibility(const std::vector<CountRecord>& recs) {
    const DipFit fit = fit_gaussian_dip(to_dip_points(recs));
    return visibilities_from_fit(fit, 0.0).first;
}

// Net visibility: accidentals subtracted from the baseline first.
inline double net_visibility(const std::vector<CountRecord>& recs,
                             double accidental_level) {
    const DipFit fit = fit_gaussian_dip(to_dip_points(recs));
    return visibilities_from_fit(fit, accidental_level).second;
}

}  // namespace homsim

#endif  // HOMSIM_COUNTING_HPP
