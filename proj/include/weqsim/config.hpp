#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "weqsim/constants.hpp"
#include "weqsim/errors.hpp"
#include "weqsim/packet.hpp"

namespace weqsim {

enum class SigmaModel { non_gaussian, gaussian };

/// One experiment: packet + constants + scenario knobs. Every numeric field
/// is CGS. Produced by load_config(); immutable after validation.
struct ExperimentConfig {
    PacketParams packet;
    PhysicalConstants constants;

    double epsilon = -1.0;          // detector half-width, cm; <0 means "sigma0"
    double detector_z = -1.0;       // arrival-time detector location Z, cm
    double t = 1.0;                 // single evaluation time, s
    std::vector<double> times = {0.5, 1.0, 2.0};
    double z_min = 0.0, z_max = 0.0; // density grid; equal means auto (mean +- 5 sigma)
    int z_count = 401;
    std::vector<double> masses = {};  // sweep grid, amu; empty means command default
    std::vector<double> alphas = {0.0, 0.5, 1.0};
    double t_end = -1.0;            // trajectory span, s; <0 means free-fall time to detector_z
    int n_samples = 201;
    std::vector<double> offsets = {0.0, -2.0, 2.0}; // trajectory starts, units of sigma0
    int n_particles = 2000;
    unsigned long long seed = 12345;
    SigmaModel sigma_t_model = SigmaModel::non_gaussian;
    int wigner_z_count = 21;
    int wigner_p_count = 41;

    double effective_epsilon() const { return epsilon > 0.0 ? epsilon : packet.sigma0; }
    double effective_t_end() const {
        return t_end > 0.0 ? t_end : std::sqrt(2.0 * std::fabs(detector_z) / constants.g);
    }

    void validate() const {
        packet.validate();
        constants.validate();
        if (epsilon != -1.0 && !(epsilon > 0.0))
            throw validation_error("epsilon", "must be > 0 cm");
        if (!(detector_z < 0.0))
            throw validation_error("detector_z", "must be below the release point (Z < 0)");
        if (!(t >= 0.0)) throw validation_error("t", "must be >= 0 s");
        require_increasing("times", times);
        if (!times.empty() && times.front() < 0.0)
            throw validation_error("times", "must be >= 0 s");
        if (z_min != z_max && !(z_min < z_max))
            throw validation_error("z_min", "grid must satisfy z_min < z_max");
        if (z_count < 2) throw validation_error("z_count", "need at least 2 grid points");
        require_increasing("masses", masses);
        if (!masses.empty() && masses.front() <= 0.0)
            throw validation_error("masses", "must be > 0 amu");
        require_increasing("alphas", alphas);
        if (!alphas.empty() && (alphas.front() < 0.0 || alphas.back() > 1.0))
            throw validation_error("alphas", "must lie in [0, 1]");
        if (t_end != -1.0 && !(t_end > 0.0))
            throw validation_error("t_end", "must be > 0 s");
        if (n_samples < 2) throw validation_error("n_samples", "need at least 2");
        if (offsets.empty()) throw validation_error("offsets", "need at least one offset");
        if (n_particles < 100) throw validation_error("n_particles", "need at least 100");
        if (wigner_z_count < 2 || wigner_p_count < 2)
            throw validation_error("wigner_z_count", "wigner grid needs at least 2x2 points");
    }

    bool operator==(const ExperimentConfig&) const = default;

private:
    static void require_increasing(const char* key, const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] > v[i - 1]))
                throw validation_error(key, "grid must be strictly increasing");
    }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(const std::string& key, std::string_view s) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw validation_error(key, "cannot parse number '" + std::string(s) + "'");
    return v;
}

inline unsigned long long parse_u64(const std::string& key, std::string_view s) {
    s = trim(s);
    unsigned long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw validation_error(key, "cannot parse integer '" + std::string(s) + "'");
    return v;
}

inline int parse_int(const std::string& key, std::string_view s) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw validation_error(key, "cannot parse integer '" + std::string(s) + "'");
    return v;
}

/// Lists are colon-separated values ("0.5:1:2") or linspace(lo,hi,n) /
/// logspace(lo,hi,n). Commas are taken by the pair separator.
inline std::vector<double> parse_list(const std::string& key, std::string_view s) {
    s = trim(s);
    for (const char* fn : {"linspace", "logspace"}) {
        std::string_view name(fn);
        if (s.substr(0, name.size()) == name) {
            std::string_view rest = trim(s.substr(name.size()));
            if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')')
                throw validation_error(key, "expected " + std::string(fn) + "(lo,hi,n)");
            rest = rest.substr(1, rest.size() - 2);
            std::array<std::string_view, 3> parts;
            std::size_t n = 0, pos = 0;
            while (n < 3) {
                std::size_t c = rest.find(',', pos);
                parts[n++] = rest.substr(pos, c == std::string_view::npos ? c : c - pos);
                if (c == std::string_view::npos) break;
                pos = c + 1;
            }
            if (n != 3) throw validation_error(key, "expected three arguments");
            double lo = parse_number(key, parts[0]);
            double hi = parse_number(key, parts[1]);
            int count = parse_int(key, parts[2]);
            if (count < 2) throw validation_error(key, "need at least 2 points");
            bool log = (name == "logspace");
            if (log && !(lo > 0.0 && hi > 0.0))
                throw validation_error(key, "logspace needs positive endpoints");
            std::vector<double> out(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i) {
                double f = static_cast<double>(i) / (count - 1);
                out[static_cast<std::size_t>(i)] =
                    log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
            }
            return out;
        }
    }
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t c = s.find(':', pos);
        std::string_view item = s.substr(pos, c == std::string_view::npos ? c : c - pos);
        out.push_back(parse_number(key, item));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ':';
        out += format_double(v[i]);
    }
    return out;
}

} // namespace detail

struct ConfigKeyDoc {
    const char* key;
    const char* doc;
};

/// Documented configuration keys; surfaced verbatim in the CLI help.
inline constexpr std::array<ConfigKeyDoc, 23> config_key_docs = {{
    {"alpha", "non-Gaussianity parameter, in [0,1] (default 0)"},
    {"sigma0", "initial width sigma0 in cm (default 1e-3)"},
    {"u", "initial group velocity in cm/s (default 0)"},
    {"mass", "particle mass in amu (default 100)"},
    {"hbar", "Planck constant / 2pi in erg s (default 1.054571817e-27)"},
    {"g", "gravitational acceleration in cm/s^2 (default 980.7)"},
    {"amu_in_grams", "amu-to-gram conversion (default 1.66053906660e-24)"},
    {"epsilon", "detector half-width in cm (default: sigma0)"},
    {"detector_z", "arrival-time detector location Z < 0 in cm (default -1)"},
    {"t", "single evaluation time in s (default 1)"},
    {"times", "time list in s, colon separated or linspace/logspace (default 0.5:1:2)"},
    {"z_min", "density grid lower edge in cm (default: auto, mean - 5 sigma)"},
    {"z_max", "density grid upper edge in cm (default: auto, mean + 5 sigma)"},
    {"z_count", "density grid point count (default 401)"},
    {"masses", "mass sweep grid in amu (default: per command)"},
    {"alphas", "alpha sweep grid (default 0:0.5:1)"},
    {"t_end", "trajectory time span in s (default: free-fall time to detector_z)"},
    {"n_samples", "trajectory output samples (default 201)"},
    {"offsets", "trajectory start offsets in units of sigma0 (default 0:-2:2)"},
    {"n_particles", "equivariance ensemble size (default 2000)"},
    {"seed", "ensemble RNG seed (default 12345)"},
    {"sigma_t_model", "width entering the arrival cutoff: ng or gaussian (default ng)"},
    {"wigner_z_count", "wigner output grid z points (default 21; p points via wigner_p_count, default 41)"},
}};

/// Apply one key = value assignment. Used by both the file parser and the
/// CLI --set flag.
inline void apply_config_entry(ExperimentConfig& cfg, std::string_view key_sv,
                               std::string_view value) {
    using namespace detail;
    std::string key(trim(key_sv));
    value = trim(value);
    if (key == "alpha") cfg.packet.alpha = parse_number(key, value);
    else if (key == "sigma0") cfg.packet.sigma0 = parse_number(key, value);
    else if (key == "u") cfg.packet.u = parse_number(key, value);
    else if (key == "mass") cfg.packet.mass_amu = parse_number(key, value);
    else if (key == "hbar") cfg.constants.hbar = parse_number(key, value);
    else if (key == "g") cfg.constants.g = parse_number(key, value);
    else if (key == "amu_in_grams") cfg.constants.amu_in_grams = parse_number(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_number(key, value);
    else if (key == "detector_z") cfg.detector_z = parse_number(key, value);
    else if (key == "t") cfg.t = parse_number(key, value);
    else if (key == "times") cfg.times = parse_list(key, value);
    else if (key == "z_min") cfg.z_min = parse_number(key, value);
    else if (key == "z_max") cfg.z_max = parse_number(key, value);
    else if (key == "z_count") cfg.z_count = parse_int(key, value);
    else if (key == "masses") cfg.masses = parse_list(key, value);
    else if (key == "alphas") cfg.alphas = parse_list(key, value);
    else if (key == "t_end") cfg.t_end = parse_number(key, value);
    else if (key == "n_samples") cfg.n_samples = parse_int(key, value);
    else if (key == "offsets") cfg.offsets = parse_list(key, value);
    else if (key == "n_particles") cfg.n_particles = parse_int(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "sigma_t_model") {
        if (value == "ng") cfg.sigma_t_model = SigmaModel::non_gaussian;
        else if (value == "gaussian") cfg.sigma_t_model = SigmaModel::gaussian;
        else throw validation_error(key, "expected 'ng' or 'gaussian'");
    }
    else if (key == "wigner_z_count") cfg.wigner_z_count = parse_int(key, value);
    else if (key == "wigner_p_count") cfg.wigner_p_count = parse_int(key, value);
    else throw validation_error(key, "unknown configuration key");
}

/// Parse a configuration document: one `key = value` pair per line, '#'
/// comments; commas also separate pairs so inline documents work.
inline ExperimentConfig load_config(std::string_view text) {
    ExperimentConfig cfg;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        if (std::size_t hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        std::size_t p2 = 0;
        while (p2 <= line.size()) {
            std::size_t comma = line.find(',', p2);
            std::string_view pair = line.substr(p2, comma == std::string_view::npos ? comma : comma - p2);
            if (!detail::trim(pair).empty()) {
                std::size_t eq = pair.find('=');
                if (eq == std::string_view::npos)
                    throw validation_error(std::string(detail::trim(pair)), "expected key = value");
                apply_config_entry(cfg, pair.substr(0, eq), pair.substr(eq + 1));
            }
            if (comma == std::string_view::npos) break;
            p2 = comma + 1;
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    cfg.validate();
    return cfg;
}

/// Emit a document that load_config() parses back to an equal configuration.
inline std::string serialize(const ExperimentConfig& cfg) {
    using detail::format_double;
    using detail::format_list;
    std::string out;
    auto kv = [&out](const char* k, const std::string& v) {
        out += k; out += " = "; out += v; out += '\n';
    };
    kv("alpha", format_double(cfg.packet.alpha));
    kv("sigma0", format_double(cfg.packet.sigma0));
    kv("u", format_double(cfg.packet.u));
    kv("mass", format_double(cfg.packet.mass_amu));
    kv("hbar", format_double(cfg.constants.hbar));
    kv("g", format_double(cfg.constants.g));
    kv("amu_in_grams", format_double(cfg.constants.amu_in_grams));
    kv("epsilon", format_double(cfg.epsilon));
    kv("detector_z", format_double(cfg.detector_z));
    kv("t", format_double(cfg.t));
    kv("times", format_list(cfg.times));
    kv("z_min", format_double(cfg.z_min));
    kv("z_max", format_double(cfg.z_max));
    kv("z_count", std::to_string(cfg.z_count));
    if (!cfg.masses.empty()) kv("masses", format_list(cfg.masses));
    kv("alphas", format_list(cfg.alphas));
    kv("t_end", format_double(cfg.t_end));
    kv("n_samples", std::to_string(cfg.n_samples));
    kv("offsets", format_list(cfg.offsets));
    kv("n_particles", std::to_string(cfg.n_particles));
    kv("seed", std::to_string(cfg.seed));
    kv("sigma_t_model", cfg.sigma_t_model == SigmaModel::non_gaussian ? "ng" : "gaussian");
    kv("wigner_z_count", std::to_string(cfg.wigner_z_count));
    kv("wigner_p_count", std::to_string(cfg.wigner_p_count));
    return out;
}

} // namespace weqsim
