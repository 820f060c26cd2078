#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "types.hpp"

namespace twoatom {

/// Two emitters on the x axis at -r/2 and +r/2. Rates in units of gamma1,
/// separation in wavelengths.
struct AtomPairConfig {
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double delta = 0.0;        // (w2 - w1) / 2
    double separation = 0.0;   // r12 / lambda
    double dipole_angle = pi / 2;  // angle between dipole and r12
};

enum class WaveType { running, standing };

struct DriveField {
    double rabi = 0.0;
    double detuning = 0.0;           // w_L - w_0
    double propagation_angle = pi / 2;  // angle between k_L and r12
    WaveType wave_type = WaveType::running;
    double phase = 0.0;
};

struct SqueezedReservoir {
    double n_photons = 0.0;
    double m_magnitude = 0.0;
    double squeeze_phase = 0.0;
    double matching = 1.0;       // |D|^2
    double solid_angle = pi;     // theta_s
    double carrier_offset = 0.0; // w_s - w_0
};

enum class SqueezeClass { vacuum, classical, quantum, invalid };

inline const char* to_string(SqueezeClass c) {
    switch (c) {
        case SqueezeClass::vacuum: return "vacuum";
        case SqueezeClass::classical: return "classical";
        case SqueezeClass::quantum: return "quantum";
        case SqueezeClass::invalid: return "invalid";
    }
    return "?";
}

inline void validate(const AtomPairConfig& p) {
    if (!(p.gamma1 > 0)) throw ValidationError("invariant violated: gamma1 > 0");
    if (!(p.gamma2 > 0)) throw ValidationError("invariant violated: gamma2 > 0");
    if (!(p.separation >= 0)) throw ValidationError("invariant violated: separation >= 0");
    if (!(p.dipole_angle >= 0 && p.dipole_angle <= pi / 2 + 1e-12))
        throw ValidationError("invariant violated: dipole_angle in [0, pi/2]");
    if (!std::isfinite(p.delta)) throw ValidationError("invariant violated: delta finite");
}

inline void validate(const DriveField& d) {
    if (!(d.rabi >= 0)) throw ValidationError("invariant violated: rabi >= 0");
    if (!std::isfinite(d.detuning) || !std::isfinite(d.propagation_angle) || !std::isfinite(d.phase))
        throw ValidationError("invariant violated: drive parameters finite");
}

inline void validate(const SqueezedReservoir& r) {
    if (!(r.n_photons >= 0)) throw ValidationError("invariant violated: n_photons >= 0");
    if (!(r.m_magnitude >= 0)) throw ValidationError("invariant violated: m_magnitude >= 0");
    double bound = r.n_photons * (r.n_photons + 1);
    if (r.m_magnitude * r.m_magnitude > bound * (1 + 1e-12) + 1e-300)
        throw ValidationError("invariant violated: m_magnitude^2 <= n_photons*(n_photons+1)");
    if (!(r.matching >= 0 && r.matching <= 1))
        throw ValidationError("invariant violated: 0 <= matching <= 1");
    if (!(r.solid_angle > 0 && r.solid_angle <= pi))
        throw ValidationError("invariant violated: solid_angle in (0, pi]");
}

inline double wave_number_distance(const AtomPairConfig& p) { return 2 * pi * p.separation; }

namespace detail {

// (x cos x - sin x) / x^3, with a series near 0
inline double near_field_term(double x) {
    if (std::abs(x) < 0.05) {
        double x2 = x * x;
        return -1.0 / 3 + x2 / 30 - x2 * x2 / 840 + x2 * x2 * x2 / 45360;
    }
    return std::cos(x) / (x * x) - std::sin(x) / (x * x * x);
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1 - x * x / 6;
    return std::sin(x) / x;
}

}  // namespace detail

/// Normalised collective damping F(k r) for a given cos^2 of the dipole angle.
inline double damping_profile(double x, double cos2) {
    return 1.5 * ((1 - cos2) * detail::sinc(x) + (1 - 3 * cos2) * detail::near_field_term(x));
}

inline double collective_damping(const AtomPairConfig& p) {
    validate(p);
    double g = std::sqrt(p.gamma1 * p.gamma2);
    if (p.separation == 0.0) return g;
    double c = std::cos(p.dipole_angle);
    return g * damping_profile(wave_number_distance(p), c * c);
}

inline double dipole_dipole_shift(const AtomPairConfig& p) {
    validate(p);
    if (p.separation == 0.0) throw DomainError("dipole-dipole shift diverges at separation 0");
    double x = wave_number_distance(p);
    double c = std::cos(p.dipole_angle);
    double c2 = c * c;
    double far = -(1 - c2) * std::cos(x) / x;
    double near = (1 - 3 * c2) * (std::sin(x) / (x * x) + std::cos(x) / (x * x * x));
    return 0.75 * std::sqrt(p.gamma1 * p.gamma2) * (far + near);
}

/// Quasistatic small-separation form of the dipole-dipole shift.
inline double dipole_dipole_shift_quasistatic(const AtomPairConfig& p) {
    double x = wave_number_distance(p);
    double c = std::cos(p.dipole_angle);
    return 3 * std::sqrt(p.gamma1 * p.gamma2) / (4 * x * x * x) * (1 - 3 * c * c);
}

/// Gamma12 and Omega12 as used by the generators. At zero separation the
/// static shift is dropped (small-sample Dicke model).
struct PairCouplings {
    double gamma12 = 0.0;
    double omega12 = 0.0;
};

inline PairCouplings pair_couplings(const AtomPairConfig& p) {
    PairCouplings c;
    c.gamma12 = collective_damping(p);
    c.omega12 = p.separation == 0.0 ? 0.0 : dipole_dipole_shift(p);
    return c;
}

/// Phase k_L . r_i for each atom (positions -r/2, +r/2 on the axis).
inline std::pair<double, double> drive_phases(const DriveField& d, const AtomPairConfig& p) {
    double c = std::cos(d.propagation_angle);
    if (std::abs(c) < 1e-15) c = 0.0;  // cos(pi/2) is not exactly zero in floating point
    double half = 0.5 * wave_number_distance(p) * c;
    return {-half, half};
}

inline std::pair<cplx, cplx> rabi_at_atoms(const DriveField& d, const AtomPairConfig& p) {
    validate(d);
    validate(p);
    auto [k1, k2] = drive_phases(d, p);
    if (d.wave_type == WaveType::running)
        return {d.rabi * std::exp(I * (k1 + d.phase)), d.rabi * std::exp(I * (k2 + d.phase))};
    return {cplx(d.rabi * std::cos(k1 + d.phase)), cplx(d.rabi * std::cos(k2 + d.phase))};
}

/// Angular matching factor v(theta_s) of the squeezed modes.
inline double solid_angle_factor(double theta_s) {
    double c = std::cos(theta_s);
    return 0.5 * (1 - 0.25 * (3 + c * c) * c);
}

/// Gaussian-beam mode overlap D for waist parameter W0, focus z_f (in
/// wavelengths) and mode direction theta_k.
inline cplx gaussian_overlap(double w0, double z_f, double theta_k) {
    double s = std::sin(theta_k);
    return std::exp(-w0 * s * s - I * (2 * pi * z_f * std::cos(theta_k)));
}

inline double gaussian_matching(double w0, double z_f, double theta_k) {
    return std::norm(gaussian_overlap(w0, z_f, theta_k));
}

struct EffectiveSqueezing {
    double n = 0.0;
    double m = 0.0;
};

inline EffectiveSqueezing effective_squeezing(const SqueezedReservoir& r) {
    validate(r);
    double f = r.matching * solid_angle_factor(r.solid_angle);
    return {r.n_photons * f, r.m_magnitude * f};
}

inline SqueezeClass classify_squeezing(double n, double m) {
    if (n < 0 || m < 0) return SqueezeClass::invalid;
    if (n == 0 && m == 0) return SqueezeClass::vacuum;
    constexpr double tol = 1e-12;
    if (m <= n * (1 + tol)) return SqueezeClass::classical;
    if (m * m <= n * (n + 1) * (1 + tol)) return SqueezeClass::quantum;
    return SqueezeClass::invalid;
}

}  // namespace twoatom
