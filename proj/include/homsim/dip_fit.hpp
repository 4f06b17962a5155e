#ifndef HOMSIM_DIP_FIT_HPP
#define HOMSIM_DIP_FIT_HPP

/*
 * Nonlinear least-squares fit of the Gaussian bunching dip
 *
 *   C(x) = B - A exp( -(x - x0)^2 / w^2 )
 *
 * to (arm stretch, counts) data: damped Gauss-Newton (Levenberg-Marquardt)
 * with the analytic Jacobian, inverse-variance Poisson weighting by default.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "homsim/constants.hpp"
#include "homsim/errors.hpp"

namespace homsim {

struct DipPoint {
    double x = 0.0;  // arm stretch, m
    double y = 0.0;  // counts
};

struct DipParams {
    double baseline = 0.0;  // B, counts
    double depth = 0.0;     // A, counts
    double center = 0.0;    // x0, m
    double width = 0.0;     // w, Gaussian e^-1 half-width, m
};

struct DipFit {
    DipParams params;
    double residual_norm = 0.0;  // sqrt of the weighted squared residual sum
    bool converged = false;
    int iterations = 0;
    std::array<double, 4> covariance_diag{};  // var estimates (B, A, x0, w)

    // FWHM of the fitted dip, 2 sqrt(ln 2) w.
    double fwhm() const {
        return 2.0 * std::sqrt(std::numbers::ln2) * params.width;
    }
};

enum class FitWeighting {
    poisson,  // 1 / max(counts, 1)
    uniform,  // unweighted; for noiseless theory curves
};

inline double dip_model(const DipParams& p, double x) {
    const double dx = x - p.center;
    return p.baseline - p.depth * std::exp(-dx * dx / (p.width * p.width));
}

// d model / d (B, A, x0, w) at x.
inline std::array<double, 4> dip_model_jacobian(const DipParams& p, double x) {
    const double dx = x - p.center;
    const double w2 = p.width * p.width;
    const double e = std::exp(-dx * dx / w2);
    return {1.0, -e, -p.depth * e * 2.0 * dx / w2,
            -p.depth * e * 2.0 * dx * dx / (w2 * p.width)};
}

// Derivative-free seeding: baseline from the outer fifth of the scan, depth
// from the sample minimum, width from the span of points below half depth.
inline DipParams initial_dip_guess(std::vector<DipPoint> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const DipPoint& a, const DipPoint& b) { return a.x < b.x; });
    const std::size_t n = pts.size();
    const std::size_t k =
        std::max<std::size_t>(1, static_cast<std::size_t>(0.1 * n + 0.5));
    double outer = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        outer += pts[i].y + pts[n - 1 - i].y;
    DipParams g;
    g.baseline = outer / (2.0 * k);
    std::size_t imin = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (pts[i].y < pts[imin].y) imin = i;
    g.depth = std::max(g.baseline - pts[imin].y, 0.0);
    g.center = pts[imin].x;
    const double span = pts[n - 1].x - pts[0].x;
    const double half_level = g.baseline - 0.5 * g.depth;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const DipPoint& p : pts) {
        if (p.y < half_level) {
            if (!any) {
                lo = hi = p.x;
                any = true;
            } else {
                lo = std::min(lo, p.x);
                hi = std::max(hi, p.x);
            }
        }
    }
    g.width = any && hi > lo ? 0.5 * (hi - lo) : 0.25 * span;
    if (!(g.width > 0.0)) g.width = 0.25 * span;
    if (g.depth <= 0.0) g.depth = std::max(1.0e-6 * std::fabs(g.baseline), 1.0e-9);
    return g;
}

namespace detail {

// Gaussian elimination with partial pivoting for the 4x4 normal equations;
// false on (near-)singular systems.
inline bool solve4(std::array<std::array<double, 4>, 4> m,
                   std::array<double, 4> rhs, std::array<double, 4>& out) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
        if (std::fabs(m[piv][col]) < 1.0e-300) return false;
        std::swap(m[piv], m[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < 4; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < 4; ++c) s -= m[r][c] * out[c];
        out[r] = s / m[r][r];
    }
    return true;
}

inline double weighted_cost(const std::vector<DipPoint>& pts,
                            const std::vector<double>& wts,
                            const DipParams& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = dip_model(p, pts[i].x) - pts[i].y;
        s += wts[i] * r * r;
    }
    return s;
}

}  // namespace detail

inline DipFit fit_gaussian_dip(const std::vector<DipPoint>& pts,
                               const std::vector<double>& weights) {
    if (pts.size() < 5)
        throw degenerate_data_error("dip fit requires at least 5 points");
    if (weights.size() != pts.size())
        throw invalid_parameter("weights must match points");
    double xmin = pts[0].x, xmax = pts[0].x;
    for (const DipPoint& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw invalid_parameter("dip fit inputs must be finite");
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
    }
    if (!(xmax > xmin))
        throw degenerate_data_error("dip fit requires distinct stretch values");
    for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w))
            throw invalid_parameter("weights must be finite and >= 0");

    DipParams p = initial_dip_guess(pts);
    double cost = detail::weighted_cost(pts, weights, p);
    double lambda = 1.0e-3;
    double gradient_scale = -1.0;

    DipFit fit;
    const int kMaxIterations = 200;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        std::array<std::array<double, 4>, 4> h{};
        std::array<double, 4> g{};
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::array<double, 4> j = dip_model_jacobian(p, pts[i].x);
            const double r = dip_model(p, pts[i].x) - pts[i].y;
            const double wt = weights[i];
            for (int a = 0; a < 4; ++a) {
                g[a] += wt * j[a] * r;
                for (int b = a; b < 4; ++b) h[a][b] += wt * j[a] * j[b];
            }
        }
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < a; ++b) h[a][b] = h[b][a];

        double gnorm = 0.0;
        for (double v : g) gnorm = std::max(gnorm, std::fabs(v));
        if (gradient_scale < 0.0) gradient_scale = std::max(1.0, gnorm);
        if (gnorm <= 1.0e-10 * gradient_scale) {
            fit.converged = true;
            break;
        }

        bool stepped = false;
        for (int tries = 0; tries < 60; ++tries) {
            std::array<std::array<double, 4>, 4> damped = h;
            for (int a = 0; a < 4; ++a)
                damped[a][a] += lambda * std::max(h[a][a], 1.0e-12);
            std::array<double, 4> step{};
            std::array<double, 4> neg_g = {-g[0], -g[1], -g[2], -g[3]};
            if (detail::solve4(damped, neg_g, step)) {
                DipParams trial = p;
                trial.baseline += step[0];
                trial.depth += step[1];
                trial.center += step[2];
                trial.width += step[3];
                if (trial.width != 0.0) {
                    const double trial_cost =
                        detail::weighted_cost(pts, weights, trial);
                    if (trial_cost < cost) {
                        p = trial;
                        cost = trial_cost;
                        lambda = std::max(lambda / 3.0, 1.0e-14);
                        stepped = true;
                        break;
                    }
                }
            }
            lambda *= 3.0;
            if (lambda > 1.0e15) break;
        }
        if (!stepped) {
            // No descent direction left: the gradient criterion decides.
            fit.converged = gnorm <= 1.0e-8 * gradient_scale;
            break;
        }
    }
    fit.iterations = iter;

    // Canonical orientation: width positive (the model is even in w).
    if (p.width < 0.0) p.width = -p.width;
    fit.params = p;
    fit.residual_norm = std::sqrt(cost);

    // Diagonal covariance estimate from the normal equations at the solution.
    std::array<std::array<double, 4>, 4> h{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::array<double, 4> j = dip_model_jacobian(p, pts[i].x);
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) h[a][b] += weights[i] * j[a] * j[b];
    }
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < a; ++b) h[a][b] = h[b][a];
    const double dof = std::max<double>(pts.size() - 4, 1);
    const double scale = cost / dof;
    for (int col = 0; col < 4; ++col) {
        std::array<double, 4> e{};
        e[col] = 1.0;
        std::array<double, 4> sol{};
        if (detail::solve4(h, e, sol))
            fit.covariance_diag[col] = scale * sol[col];
        else
            fit.covariance_diag[col] = std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

inline DipFit fit_gaussian_dip(const std::vector<DipPoint>& pts,
                               FitWeighting weighting = FitWeighting::poisson) {
    std::vector<double> wts(pts.size(), 1.0);
    if (weighting == FitWeighting::poisson)
        for (std::size_t i = 0; i < pts.size(); ++i)
            wts[i] = 1.0 / std::max(pts[i].y, 1.0);
    return fit_gaussian_dip(pts, wts);
}

// Expected dip FWHM in arm stretch: the convolution of the two Gaussian
// wave-packets widens the FWHM by sqrt(2); the group index converts delay
// into mechanical stretch.
inline double dip_width_prediction(double coherence_time_s, double n_eff) {
    if (!(coherence_time_s > 0.0))
        throw invalid_parameter("coherence time must be > 0");
    if (!(n_eff >= 1.0))
        throw invalid_parameter("group index must be >= 1");
    return std::sqrt(2.0) * coherence_time_s * kSpeedOfLight / n_eff;
}

// (raw, net) visibility from a fit: raw = A/B, net = A/(B - accidentals).
inline std::pair<double, double> visibilities_from_fit(const DipFit& fit,
                                                       double accidental_level) {
    const double b = fit.params.baseline;
    const double a = fit.params.depth;
    if (!(b > 0.0)) throw degenerate_data_error("fitted baseline must be > 0");
    if (!(accidental_level >= 0.0))
        throw invalid_parameter("accidental level must be >= 0");
    if (accidental_level >= b)
        throw degenerate_data_error(
            "accidental level at or above the fitted baseline");
    return {a / b, a / (b - accidental_level)};
}

}  // namespace homsim

#endif  // HOMSIM_DIP_FIT_HPP
