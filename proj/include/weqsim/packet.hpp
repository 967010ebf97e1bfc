#pragma once

#include <cmath>
#include <numbers>

#include "weqsim/constants.hpp"
#include "weqsim/errors.hpp"

namespace weqsim {

/// The five physical inputs of the initial state
///   psi(z,0) = N [1 + alpha sin(pi z / 4 sigma0)] exp(-z^2/4 sigma0^2 + i k0 z)
/// with the initial mean position fixed at the origin. User-facing mass is
/// in amu; k0 = m u / hbar is derived.
struct PacketParams {
    double alpha = 0.0;    // non-Gaussianity, dimensionless in [0, 1]
    double sigma0 = 1e-3;  // initial width parameter, cm
    double u = 0.0;        // initial group velocity, cm/s
    double mass_amu = 100.0;

    void validate() const {
        if (!(alpha >= 0.0 && alpha <= 1.0))
            throw validation_error("alpha", "must be in [0, 1]");
        if (!(sigma0 > 0.0)) throw validation_error("sigma0", "must be > 0 cm");
        if (!(mass_amu > 0.0)) throw validation_error("mass", "must be > 0 amu");
        if (!std::isfinite(u)) throw validation_error("u", "must be finite");
    }

    double mass_g(const PhysicalConstants& c) const { return amu_to_grams(mass_amu, c); }
    double k0(const PhysicalConstants& c) const { return mass_g(c) * u / c.hbar; }
    double beta() const { return std::numbers::pi / (4.0 * sigma0); }
};

} // namespace weqsim
