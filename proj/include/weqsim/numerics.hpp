#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "weqsim/errors.hpp"

namespace weqsim {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights (QUADPACK dqk15).
inline constexpr double gk15_xgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk15_wgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk15_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    double fv[15];
    const double fc = f(center);
    double resg = gk15_wg[3] * fc;
    double resk = gk15_wgk[7] * fc;
    double resabs = gk15_wgk[7] * std::fabs(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = hlgth * gk15_xgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv[j] = f1;
        fv[7 + j] = f2;
        resk += gk15_wgk[j] * (f1 + f2);
        resabs += gk15_wgk[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) resg += gk15_wg[j / 2] * (f1 + f2);
    }
    const double reskh = resk * 0.5;
    double resasc = gk15_wgk[7] * std::fabs(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk15_wgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[7 + j] - reskh));
    resasc *= std::fabs(hlgth);
    resabs *= std::fabs(hlgth);
    double err = std::fabs((resk - resg) * hlgth);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    err = std::max(err, 50.0 * epmach * resabs);
    return Panel{a, b, resk * hlgth, err};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod 15 quadrature over a finite interval.
/// Refines the worst panel first until the summed error estimate meets
/// max(abs_tol, rel_tol * |integral|).
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                    double rel_tol, long max_evals = 2'000'000) {
    if (!(a < b)) throw validation_error("integrate_adaptive", "need a < b");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw validation_error("integrate_adaptive", "tolerances must be > 0");

    std::priority_queue<detail::Panel> panels;
    detail::Panel first = detail::gk15(f, a, b);
    long evals = 15;
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
        if (evals + 30 > max_evals || panels.empty())
            throw convergence_error("quadrature budget exhausted", total, total_err);
        detail::Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b))
            throw convergence_error("quadrature interval exhausted", total, total_err);
        detail::Panel left = detail::gk15(f, worst.a, mid);
        detail::Panel right = detail::gk15(f, mid, worst.b);
        evals += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        if (!std::isfinite(total))
            throw convergence_error("non-finite integrand", total, total_err);
        panels.push(left);
        panels.push(right);
    }
    return QuadratureResult{total, total_err, evals};
}

/// Location of the maximum of a unimodal f on [lo, hi]: golden-section down
/// to x_tol, then a derivative-bracketing refinement (bisection on a 5-point
/// finite-difference derivative) that typically lands well below x_tol.
/// Reports bracket failure when an endpoint beats the interior optimum.
template <class F>
double maximize_bracketed(F&& f, double lo, double hi, double x_tol) {
    if (!(lo < hi)) throw validation_error("maximize_bracketed", "need lo < hi");
    if (!(x_tol > 0.0)) throw validation_error("maximize_bracketed", "x_tol must be > 0");
    const double width0 = hi - lo;
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2; f1 = f2;
            x2 = a + invphi * (b - a); f2 = f(x2);
        } else {
            b = x2;
            x2 = x1; f2 = f1;
            x1 = b - invphi * (b - a); f1 = f(x1);
        }
    }
    double best = 0.5 * (a + b);

    // Refinement: bisect the sign change of f' estimated by 5-point central
    // differences. The step is tied to the original bracket width, which is
    // the natural length scale of f's variation.
    const double h = width0 * 1e-5;
    auto deriv = [&](double x) {
        return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    };
    double ra = best - 2 * h, rb = best + 2 * h;
    if (ra >= lo && rb <= hi) {
        double da = deriv(ra), db = deriv(rb);
        if (da > 0.0 && db < 0.0) {
            for (int it = 0; it < 200 && rb - ra > 1e-13 * std::max(1.0, std::fabs(best)); ++it) {
                const double mid = 0.5 * (ra + rb);
                if (deriv(mid) > 0.0) ra = mid;
                else rb = mid;
            }
            best = 0.5 * (ra + rb);
        }
    }

    const double fbest = f(best);
    if (f(lo) > fbest || f(hi) > fbest)
        throw bracket_error("maximize_bracketed: endpoint exceeds interior optimum, widen the bracket");
    return best;
}

/// Plain fixed-point iteration x <- gmap(x), for contraction maps.
template <class G>
double fixed_point(G&& gmap, double x0, double rel_tol, int max_iter = 200) {
    if (!(x0 > 0.0)) throw validation_error("fixed_point", "x0 must be > 0");
    double x = x0;
    double residual = std::numeric_limits<double>::infinity();
    for (int i = 0; i < max_iter; ++i) {
        const double gx = gmap(x);
        residual = std::fabs(gx - x);
        x = gx;
        if (residual <= rel_tol * std::fabs(x)) return x;
    }
    throw convergence_error("fixed_point did not converge", x, residual);
}

struct OdeSolution {
    std::vector<std::pair<double, double>> samples; // (t, state)
    long accepted_steps = 0;
    long rejected_steps = 0;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_e[7] = {
    35.0 / 384 - 5179.0 / 57600, 0.0, 500.0 / 1113 - 7571.0 / 16695,
    125.0 / 192 - 393.0 / 640, -2187.0 / 6784 + 92097.0 / 339200,
    11.0 / 84 - 187.0 / 2100, -1.0 / 40};
// Quartic dense-output polynomial (Shampine's interpolant for DOPRI5).
inline constexpr double dp_p[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0},
};

} // namespace detail

/// Embedded Dormand-Prince 5(4) with PI step control and quartic dense
/// output at the requested times (which must be increasing and span
/// [t0, t1]; pass an empty list to sample at the accepted steps).
template <class Field>
OdeSolution ode_solve(Field&& field, double y0, double t0, double t1, double rel_tol,
                      double abs_tol, const std::vector<double>& t_eval = {},
                      long max_steps = 10'000'000) {
    if (!(t0 < t1)) throw validation_error("ode_solve", "need t0 < t1");
    for (std::size_t i = 1; i < t_eval.size(); ++i)
        if (!(t_eval[i] > t_eval[i - 1]))
            throw validation_error("ode_solve", "t_eval must be strictly increasing");
    if (!t_eval.empty() && (t_eval.front() < t0 || t_eval.back() > t1))
        throw validation_error("ode_solve", "t_eval must lie within [t0, t1]");

    OdeSolution sol;
    double t = t0, y = y0;
    double k[7];
    k[0] = field(t, y);
    double h = (t1 - t0) * 1e-3;
    std::size_t next_eval = 0;
    auto emit = [&](double te, double ye) { sol.samples.emplace_back(te, ye); };
    if (t_eval.empty()) emit(t0, y0);
    else if (next_eval < t_eval.size() && t_eval[next_eval] == t0) { emit(t0, y0); ++next_eval; }

    double err_prev = 1.0;
    for (long step = 0; step < max_steps; ++step) {
        if (t >= t1) break;
        h = std::min(h, t1 - t);
        const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::fabs(t), std::fabs(t1 - t0));
        if (h < h_floor)
            throw singularity_error("ode_solve: step size underflow", t);
        for (int s = 1; s < 7; ++s) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += detail::dp_a[s][j] * k[j];
            k[s] = field(t + detail::dp_c[s] * h, y + h * acc);
        }
        double y1 = y;
        for (int j = 0; j < 6; ++j) y1 += h * detail::dp_a[6][j] * k[j];
        double err = 0.0;
        for (int j = 0; j < 7; ++j) err += detail::dp_e[j] * k[j];
        err = std::fabs(h * err);
        const double tol = abs_tol + rel_tol * std::max(std::fabs(y), std::fabs(y1));
        const double err_norm = err / tol;
        if (!std::isfinite(y1) || !std::isfinite(err))
            throw singularity_error("ode_solve: non-finite state", t);
        if (err_norm <= 1.0) {
            // dense output over [t, t+h]
            while (next_eval < t_eval.size() && t_eval[next_eval] <= t + h) {
                const double theta = (t_eval[next_eval] - t) / h;
                double acc = 0.0;
                for (int j = 0; j < 7; ++j) {
                    double pj = 0.0, tp = theta;
                    for (int q = 0; q < 4; ++q) { pj += detail::dp_p[j][q] * tp; tp *= theta; }
                    acc += k[j] * pj;
                }
                emit(t_eval[next_eval], y + h * acc);
                ++next_eval;
            }
            t += h;
            y = y1;
            k[0] = k[6]; // FSAL
            ++sol.accepted_steps;
            if (t_eval.empty()) emit(t, y);
            // PI controller
            const double fac = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.7 / 5.0) *
                               std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0);
            h *= std::clamp(fac, 0.2, 10.0);
            err_prev = std::max(err_norm, 1e-10);
        } else {
            ++sol.rejected_steps;
            h *= std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 1.0);
        }
        if (step + 1 == max_steps)
            throw convergence_error("ode_solve: step budget exhausted", y, err);
    }
    if (!t_eval.empty() && next_eval < t_eval.size()) {
        // t landed exactly on t1; flush any remaining request at the endpoint
        while (next_eval < t_eval.size() && t_eval[next_eval] >= t1) {
            sol.samples.emplace_back(t_eval[next_eval], y);
            ++next_eval;
        }
    }
    return sol;
}

/// Central finite differences with two Richardson extrapolation levels.
/// `scale` should be the length scale over which f varies (default 1 for
/// well-scaled functions); relative accuracy ~1e-8 or better for smooth f.
template <class F>
double derivative_fd(F&& f, double x, int order, double scale = 1.0) {
    auto snapped = [&](double h) {
        volatile double xp = x + h;
        return xp - x;
    };
    if (order == 1) {
        auto d = [&](double h) { return (f(x + h) - f(x - h)) / (2 * h); };
        double h = snapped(scale * 1e-2);
        const double d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
        const double r1 = (4 * d2 - d1) / 3;
        const double r2 = (4 * d3 - d2) / 3;
        return (16 * r2 - r1) / 15;
    }
    if (order == 2) {
        auto s = [&](double h) { return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h); };
        double h = snapped(scale * 2e-2);
        const double s1 = s(h), s2 = s(h / 2), s3 = s(h / 4);
        const double r1 = (4 * s2 - s1) / 3;
        const double r2 = (4 * s3 - s2) / 3;
        return (16 * r2 - r1) / 15;
    }
    throw validation_error("derivative_fd", "order must be 1 or 2");
}

} // namespace weqsim
