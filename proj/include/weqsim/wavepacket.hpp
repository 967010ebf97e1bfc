#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "weqsim/constants.hpp"
#include "weqsim/packet.hpp"

namespace weqsim {

using complex = std::complex<double>;

/// Additive decomposition of the probability density: the Gaussian base
/// term, two alpha-linear interference terms and three alpha^2 terms, each
/// kept as (log magnitude, trig factor) so the recombination never forms
/// the overflowing intermediate exponentials of the printed expansion.
struct DensityTerms {
    struct Term {
        double log_magnitude; // combined exponent, always <= 0
        double factor;        // weight times sign/phase factor
    };
    double prefactor = 0.0; // N^2 sigma0 / sigma_G, cm^-1
    std::array<Term, 6> terms{};

    double combine() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::exp(t.log_magnitude) * t.factor;
        return prefactor * s;
    }
};

/// Closed-form state evolved in the linear gravitational potential V = mgz:
/// initial wave function, propagator, evolved wave function, density,
/// Gaussian width and probability current. All member evaluations are pure.
class Wavepacket {
public:
    Wavepacket(PacketParams params, PhysicalConstants constants = {})
        : p_(params), c_(constants) {
        p_.validate();
        c_.validate();
        m_ = p_.mass_g(c_);
        k0_ = p_.k0(c_);
        beta_ = p_.beta();
        const double pi = std::numbers::pi;
        norm_ = 1.0 / std::sqrt(std::sqrt(2.0 * pi) * p_.sigma0 *
                                (1.0 + 0.5 * p_.alpha * p_.alpha * (1.0 - std::exp(-pi * pi / 8.0))));
    }

    const PacketParams& params() const { return p_; }
    const PhysicalConstants& constants() const { return c_; }
    double mass() const { return m_; }
    double k0() const { return k0_; }

    /// Normalization factor N, cm^(-1/2).
    double normalization() const { return norm_; }

    complex psi_initial(double z) const {
        const double s0 = p_.sigma0;
        const double envelope = (1.0 + p_.alpha * std::sin(beta_ * z)) *
                                std::exp(-z * z / (4.0 * s0 * s0));
        return norm_ * envelope * std::exp(complex(0.0, k0_ * z));
    }

    /// Propagator of the linear potential, G(z,t|y,0). Singular at t = 0.
    complex propagator(double z, double t, double y) const {
        if (!(t > 0.0)) throw std::domain_error("propagator: t must be > 0");
        const double hb = c_.hbar, g = c_.g;
        const complex pref = std::sqrt(m_ / (complex(0.0, 1.0) * 2.0 * std::numbers::pi * hb * t));
        const double phase = m_ / (2.0 * hb * t) * (z - y) * (z - y) -
                             m_ * g * t / (2.0 * hb) * (z + y) -
                             m_ * g * g * t * t * t / (24.0 * hb);
        return pref * std::exp(complex(0.0, phase));
    }

    double sigma_gaussian(double t) const {
        const double tau = c_.hbar * t / (2.0 * m_ * p_.sigma0 * p_.sigma0);
        return p_.sigma0 * std::sqrt(1.0 + tau * tau);
    }

    /// Evolved wave function. Evaluated in a regrouped form of the
    /// closed-form solution in which the three interference terms share the
    /// Gaussian factor, so their relative phases stay small and the
    /// expression is regular for every t >= 0.
    complex psi(double z, double t) const {
        if (t == 0.0) return psi_initial(z);
        const double hb = c_.hbar, g = c_.g, s0 = p_.sigma0, al = p_.alpha;
        const double tau = hb * t / (2.0 * m_ * s0 * s0);
        const double one_tau2 = 1.0 + tau * tau;
        const complex w = complex(1.0, -tau) / one_tau2; // sigma0 / s_t
        const double xi = z - p_.u * t + 0.5 * g * t * t;
        const double d = std::numbers::pi * hb * t / (4.0 * m_ * s0);
        const complex cc = (m_ / (2.0 * hb * t)) * complex(tau, 1.0) / one_tau2;
        const complex cd = cc * d;
        const double phi = m_ / (2.0 * hb * t) *
                           (z * z - g * t * t * z - g * g * t * t * t * t / 12.0);
        const complex half_i_alpha(0.0, -0.5 * al); // alpha / (2 i)
        const complex bracket = 1.0 + half_i_alpha * std::exp(2.0 * cd * xi - cd * d) -
                                half_i_alpha * std::exp(-2.0 * cd * xi - cd * d);
        return norm_ * std::sqrt(w) * std::exp(complex(0.0, phi)) *
               std::exp(-cc * (xi * xi)) * bracket;
    }

    /// The exponents E1..E6 and phases A1..A3 of the density expansion,
    /// in the reduced variables xi = z - ut + gt^2/2 and d (the sideband
    /// separation of the interference terms).
    struct Exponents {
        double sigma_g, xi, d;
        double e1, e2, e3, e4, e5, e6;
        double a1, a2, a3;
    };

    Exponents exponents(double z, double t) const {
        const double hb = c_.hbar, s0 = p_.sigma0;
        const double sg = sigma_gaussian(t);
        const double sg2 = sg * sg;
        const double xi = z - p_.u * t + 0.5 * c_.g * t * t;
        const double d = std::numbers::pi * hb * t / (4.0 * m_ * s0);
        Exponents e;
        e.sigma_g = sg;
        e.xi = xi;
        e.d = d;
        e.e1 = -(xi + d) * (xi + d) / (2.0 * sg2);
        e.e2 = (d * d + 2.0 * d * xi) / (2.0 * sg2);
        e.e3 = (d * d + 6.0 * d * xi) / (4.0 * sg2);
        e.e4 = (d * d + 2.0 * d * xi) / (4.0 * sg2);
        e.e5 = 2.0 * d * xi / sg2;
        e.e6 = d * xi / sg2;
        const double pis0 = std::numbers::pi * s0;
        e.a1 = pis0 * (xi - 0.5 * d) / (4.0 * sg2);
        e.a2 = pis0 * (xi + 0.5 * d) / (4.0 * sg2);
        e.a3 = pis0 * xi / (2.0 * sg2);
        return e;
    }

    DensityTerms density_terms(double z, double t) const {
        const auto e = exponents(z, t);
        const double al = p_.alpha;
        DensityTerms d;
        d.prefactor = norm_ * norm_ * p_.sigma0 / e.sigma_g;
        d.terms = {{
            {e.e1 + e.e2, 1.0},
            {e.e1 + e.e3, al * std::sin(e.a1)},
            {e.e1 + e.e4, al * std::sin(e.a2)},
            {e.e1, 0.25 * al * al},
            {e.e1 + e.e5, 0.25 * al * al},
            {e.e1 + e.e6, -0.5 * al * al * std::cos(e.a3)},
        }};
        return d;
    }

    /// Probability density, cm^-1. Overflow-safe for arbitrary |z|.
    double density(double z, double t) const {
        const double rho = density_terms(z, t).combine();
        return rho > 0.0 ? rho : 0.0; // clip roundoff-negative tails
    }

    /// Probability current J = (hbar/m) Im(psi* dpsi/dz), s^-1, from the
    /// closed-form eta expansion with the same combined exponents.
    double current(double z, double t) const {
        double b_rho, b_cur;
        brackets(z, t, 0.0, b_rho, b_cur);
        const double sg = sigma_gaussian(t);
        return norm_ * norm_ / (32.0 * m_ * m_ * p_.sigma0 * sg * sg * sg) * b_cur;
    }

    /// Bohmian guidance velocity J/rho, cm/s, computed from the shared
    /// bracket sums with a common exponent shift so the ratio survives far
    /// into the tails where rho and J individually underflow.
    double velocity(double z, double t) const {
        double b_rho, b_cur;
        const double shift = max_exponent(z, t);
        brackets(z, t, shift, b_rho, b_cur);
        const double sg = sigma_gaussian(t);
        const double s0 = p_.sigma0;
        return b_cur / (32.0 * m_ * m_ * s0 * s0 * sg * sg * b_rho);
    }

    /// log(rho(z,t) / (N^2 sigma0/sigma_G)): the density relative to its
    /// natural scale, in log space. Used for node-threshold checks.
    double log_relative_density(double z, double t) const {
        double b_rho, b_cur;
        const double shift = max_exponent(z, t);
        brackets(z, t, shift, b_rho, b_cur);
        if (!(b_rho > 0.0)) return -std::numeric_limits<double>::infinity();
        return shift + std::log(b_rho);
    }

private:
    double max_exponent(double z, double t) const {
        const auto e = exponents(z, t);
        double m = e.e1 + e.e2;
        m = std::max(m, e.e1 + e.e3);
        m = std::max(m, e.e1 + e.e4);
        m = std::max(m, e.e1);
        m = std::max(m, e.e1 + e.e5);
        m = std::max(m, e.e1 + e.e6);
        return m;
    }

    // Density bracket (rho without N^2 sigma0/sigma_G) and current bracket
    // (eta sum with e^{E1} folded in), both shifted by e^{-shift}.
    void brackets(double z, double t, double shift, double& b_rho, double& b_cur) const {
        const auto e = exponents(z, t);
        const double hb = c_.hbar, s0 = p_.sigma0, al = p_.alpha;
        const double t12 = std::exp(e.e1 + e.e2 - shift);
        const double t13 = std::exp(e.e1 + e.e3 - shift);
        const double t14 = std::exp(e.e1 + e.e4 - shift);
        const double t10 = std::exp(e.e1 - shift);
        const double t15 = std::exp(e.e1 + e.e5 - shift);
        const double t16 = std::exp(e.e1 + e.e6 - shift);
        const double s1 = std::sin(e.a1), c1 = std::cos(e.a1);
        const double s2 = std::sin(e.a2), c2 = std::cos(e.a2);
        const double s3 = std::sin(e.a3), c3 = std::cos(e.a3);

        b_rho = t12 + al * (t13 * s1 + t14 * s2) +
                0.25 * al * al * (t10 + t15 - 2.0 * t16 * c3);

        const double drift = hb * hb * t * (z - 0.5 * c_.g * t * t) +
                             4.0 * m_ * m_ * s0 * s0 * s0 * s0 * (p_.u - c_.g * t);
        const double pi = std::numbers::pi;
        const double eta0 = 8.0 * drift * t12;
        const double eta1 = 8.0 * drift * (t13 * s1 + t14 * s2) -
                            2.0 * pi * hb * hb * t * s0 * (t13 * c1 + t14 * c2) +
                            4.0 * pi * m_ * hb * s0 * s0 * s0 * (t13 * s1 - t14 * s2);
        const double eta2 = 2.0 * drift * (t10 + t15 - 2.0 * t16 * c3) -
                            2.0 * pi * hb * hb * t * s0 * t16 * s3 +
                            2.0 * pi * m_ * hb * s0 * s0 * s0 * (t15 - t10);
        b_cur = eta0 + al * eta1 + al * al * eta2;
    }

    PacketParams p_;
    PhysicalConstants c_;
    double m_, k0_, beta_, norm_;
};

/// Normalization factor of the initial state as a free function.
inline double normalization(double alpha, double sigma0) {
    return Wavepacket(PacketParams{alpha, sigma0, 0.0, 1.0}).normalization();
}

} // namespace weqsim
