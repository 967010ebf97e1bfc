#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "weqsim/config.hpp"
#include "weqsim/numerics.hpp"
#include "weqsim/wavepacket.hpp"

namespace weqsim {

/// The lambda coefficients and rms width of the non-Gaussian packet.
struct WidthBreakdown {
    double lambda0, lambda2, lambda4; // CGS, g^2 cm^4
    double sigma_ng;                  // cm
};

inline WidthBreakdown sigma_ng(double t, const PacketParams& p, const PhysicalConstants& c) {
    const double m = p.mass_g(c);
    const double s0 = p.sigma0;
    const double tau = c.hbar * t / (2.0 * m * s0 * s0);
    const double sg = s0 * std::sqrt(1.0 + tau * tau);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double e8 = std::exp(pi2 / 8.0);
    const double e4 = std::exp(pi2 / 4.0);
    const double e16 = std::exp(pi2 / 16.0);
    const double ms = m * s0, msg = m * s0 * sg;
    const double hbt = c.hbar * t;
    WidthBreakdown w;
    w.lambda0 = 64.0 * e4 * msg * msg;
    w.lambda2 = 8.0 * e8 * pi2 * ms * ms * s0 * s0 * (1.0 - 2.0 * e16) +
                64.0 * e8 * msg * msg * (e8 - 1.0) + 2.0 * e4 * pi2 * hbt * hbt;
    w.lambda4 = (e8 - 1.0) * (16.0 * msg * msg * (e8 - 1.0) +
                              4.0 * pi2 * ms * ms * s0 * s0 + e8 * pi2 * hbt * hbt);
    const double a2 = p.alpha * p.alpha;
    w.sigma_ng = std::sqrt(w.lambda0 + w.lambda2 * a2 + w.lambda4 * a2 * a2) /
                 (4.0 * ms * (2.0 * e8 + a2 * (e8 - 1.0)));
    return w;
}

/// Width of the packet at time t under the configured cutoff convention.
inline double sigma_t(double t, const PacketParams& p, const PhysicalConstants& c,
                      SigmaModel model) {
    if (model == SigmaModel::gaussian) return Wavepacket(p, c).sigma_gaussian(t);
    return sigma_ng(t, p, c).sigma_ng;
}

/// Position expectation value: z0 + u t - g t^2 / 2. Mass never enters.
inline double mean_z(double t, const PacketParams& p, const PhysicalConstants& c) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double z0 = std::numbers::pi * p.alpha * p.sigma0 * std::exp(-pi2 / 32.0) /
                      (2.0 + p.alpha * p.alpha * (1.0 - std::exp(-pi2 / 8.0)));
    return z0 + p.u * t - 0.5 * c.g * t * t;
}

/// Momentum expectation value m (u - g t), g cm/s.
inline double mean_p(double t, const PacketParams& p, const PhysicalConstants& c) {
    return p.mass_g(c) * (p.u - c.g * t);
}

/// Location of the density maximum. Grid-scans 513 points over
/// mean +- 4 sigma_NG to select the global bracket (the density ripples for
/// alpha near 1), then refines with maximize_bracketed. Retries once at
/// +- 8 sigma_NG on bracket failure.
inline double z_peak(double t, const PacketParams& p, const PhysicalConstants& c,
                     double x_tol = 1e-9) {
    const Wavepacket wp(p, c);
    const double center = mean_z(t, p, c);
    const double width = sigma_ng(t, p, c).sigma_ng;
    auto attempt = [&](double half) {
        const double lo = center - half, hi = center + half;
        constexpr int n = 513;
        double best_x = lo, best_v = -1.0;
        for (int i = 0; i < n; ++i) {
            const double x = lo + (hi - lo) * i / (n - 1);
            const double v = wp.density(x, t);
            if (v > best_v) { best_v = v; best_x = x; }
        }
        const double step = (hi - lo) / (n - 1);
        const double a = std::max(lo, best_x - step);
        const double b = std::min(hi, best_x + step);
        return maximize_bracketed([&](double z) { return wp.density(z, t); }, a, b, x_tol);
    };
    try {
        return attempt(4.0 * width);
    } catch (const bracket_error&) {
        return attempt(8.0 * width);
    }
}

struct DetectionProbability {
    double value;      // in [0, 1]
    double center;     // cm
    double half_width; // epsilon, cm
    double at_time;    // s
};

/// Probability of finding the particle within [center - eps, center + eps].
inline DetectionProbability detection_probability(double center, double epsilon, double t,
                                                  const PacketParams& p,
                                                  const PhysicalConstants& c) {
    if (!(epsilon > 0.0)) throw validation_error("epsilon", "must be > 0 cm");
    const Wavepacket wp(p, c);
    const QuadratureResult r =
        integrate_adaptive([&](double z) { return wp.density(z, t); }, center - epsilon,
                           center + epsilon, 1e-12, 1e-9);
    DetectionProbability d;
    d.value = std::clamp(r.value, 0.0, 1.0);
    d.center = center;
    d.half_width = epsilon;
    d.at_time = t;
    return d;
}

/// Self-consistent cutoff of the arrival-time integrals:
/// T = sqrt(2 (|Z| + 3 sigma(T)) / g), solved by fixed-point iteration from
/// the classical fall time.
inline double arrival_cutoff_T(double Z, const PacketParams& p, const PhysicalConstants& c,
                               SigmaModel model = SigmaModel::non_gaussian) {
    if (!(Z < 0.0)) throw validation_error("detector_z", "detector must sit below the release point");
    const double absz = std::fabs(Z);
    auto gmap = [&](double T) {
        return std::sqrt(2.0 * (absz + 3.0 * sigma_t(T, p, c, model)) / c.g);
    };
    return fixed_point(gmap, std::sqrt(2.0 * absz / c.g), 1e-10, 400);
}

struct ArrivalTimeResult {
    double tau_mean;    // s
    double cutoff_T;    // s
    double sigma_at_T;  // cm
    double numerator;   // integral |J| t dt
    double denominator; // integral |J| dt
    int zero_crossings_of_J;
};

/// Mean arrival time at the detector z = Z for the free-fall scenario,
///   tau = Int_0^T |J(Z,t)| t dt / Int_0^T |J(Z,t)| dt.
/// |J| has derivative kinks at the zeros of J, so the integrals run
/// piecewise between sign changes located by a T/2048 scan plus bisection.
inline ArrivalTimeResult mean_arrival_time(double Z, const PacketParams& p,
                                           const PhysicalConstants& c,
                                           SigmaModel model = SigmaModel::non_gaussian) {
    if (p.u != 0.0) throw validation_error("u", "arrival-time scenario requires u = 0");
    if (!(Z < 0.0)) throw validation_error("detector_z", "detector must sit below the release point");
    const Wavepacket wp(p, c);
    const double T = arrival_cutoff_T(Z, p, c, model);

    constexpr int scan_n = 2048;
    std::vector<double> cuts;
    cuts.push_back(0.0);
    double prev_t = T / scan_n;
    double prev_j = wp.current(Z, prev_t);
    for (int i = 2; i <= scan_n; ++i) {
        const double ti = T * i / scan_n;
        const double ji = wp.current(Z, ti);
        if (prev_j != 0.0 && ji != 0.0 && std::signbit(prev_j) != std::signbit(ji)) {
            double a = prev_t, b = ti, ja = prev_j;
            while (b - a > 1e-10 * T) {
                const double mid = 0.5 * (a + b);
                const double jm = wp.current(Z, mid);
                if (jm == 0.0) { a = b = mid; break; }
                if (std::signbit(jm) == std::signbit(ja)) { a = mid; ja = jm; }
                else b = mid;
            }
            cuts.push_back(0.5 * (a + b));
        }
        prev_t = ti;
        prev_j = ji;
    }
    cuts.push_back(T);
    const int zero_crossings = static_cast<int>(cuts.size()) - 2;

    const double panel_abs = 1e-13 / static_cast<double>(cuts.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (!(b > a)) continue;
        den += integrate_adaptive([&](double tt) { return std::fabs(wp.current(Z, tt)); },
                                  a, b, panel_abs, 1e-9).value;
        num += integrate_adaptive([&](double tt) { return std::fabs(wp.current(Z, tt)) * tt; },
                                  a, b, panel_abs * T, 1e-9).value;
    }
    if (!(den > 1e-300))
        throw validation_error("mean_arrival_time", "degenerate scenario: no current reaches the detector");

    ArrivalTimeResult r;
    r.tau_mean = num / den;
    r.cutoff_T = T;
    r.sigma_at_T = sigma_t(T, p, c, model);
    r.numerator = num;
    r.denominator = den;
    r.zero_crossings_of_J = zero_crossings;
    return r;
}

} // namespace weqsim
