#pragma once

#include <string>

#include "weqsim/errors.hpp"

namespace weqsim {

inline constexpr const char* version_string = "weqsim 1.0.0";

/// Physical constants in CGS. Everything downstream works in cm, s, g, erg.
///
/// g defaults to 980.7 cm/s^2, not the standard 980.665: the reference
/// tables were generated with 9.807 m/s^2 (their free-fall term is exactly
/// 1961.4 cm at u = 1e3 cm/s, t = 2 s). Configurable for sensitivity runs.
struct PhysicalConstants {
    double hbar = 1.054571817e-27;          // erg s
    double g = 980.7;                       // cm/s^2
    double amu_in_grams = 1.66053906660e-24; // g

    void validate() const {
        if (!(hbar > 0.0)) throw validation_error("hbar", "must be > 0");
        if (!(g > 0.0)) throw validation_error("g", "must be > 0");
        if (!(amu_in_grams > 0.0)) throw validation_error("amu_in_grams", "must be > 0");
    }
};

inline double amu_to_grams(double mass_amu, const PhysicalConstants& c = {}) {
    if (!(mass_amu > 0.0)) throw validation_error("mass", "must be > 0 amu");
    return mass_amu * c.amu_in_grams;
}

} // namespace weqsim
