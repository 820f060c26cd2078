#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "collective_basis.hpp"
#include "density_matrix.hpp"
#include "operators.hpp"

// Closed-form results transcribed for use as test oracles. Rates are in the
// same units as the engine; Gamma is the single-atom rate of identical atoms.
namespace twoatom::oracle {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Parameters shared by all formulas; each formula reads the subset it needs.
struct Params {
    double gamma = 1.0;
    double gamma1 = 1.0, gamma2 = 1.0;
    double gamma12 = 0.0;
    double omega12 = 0.0;
    double delta = 0.0;      // (w2 - w1) / 2
    double rabi = 0.0;
    double detuning = 0.0;   // Delta_L
    double n = 0.0;          // effective N
    double m = 0.0;          // effective |M|
    double a = 0.0;          // Gamma12 / Gamma
    double t = 0.0;          // start time of two-time correlators
    double kr1 = 0.0;        // k R1 . r12
    double kr2 = 0.0;        // k R2 . r12
};

/// How far inside its validity regime a formula is evaluated. `margin` is the
/// smallest ratio among the strong inequalities the formula assumes.
struct Validity {
    double margin = std::numeric_limits<double>::infinity();
    std::string condition = "exact";

    bool deep(double factor = 10.0) const { return margin >= factor; }
};

inline Validity ratio_validity(double big, double small, std::string what) {
    double r = small == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(big) / std::abs(small);
    return {r, std::move(what)};
}

inline Validity weaker(Validity a, const Validity& b) {
    if (b.margin < a.margin) return b;
    return a;
}

// ---------------------------------------------------------------- steady states

enum class SteadyFormula {
    driven_extended,        // resonant drive, Gamma12 != Gamma
    driven_dicke,           // resonant drive, Dicke model
    driven_collective,      // collective-state populations and coherences
    squeezed_dicke,
    squeezed_dicke_classical,
    squeezed_dicke_quantum,
    squeezed_extended,
    squeezed_nonidentical,  // secular, squeezing at the mean frequency
};

inline SteadyFormula steady_formula_from_string(const std::string& s) {
    if (s == "driven_extended") return SteadyFormula::driven_extended;
    if (s == "driven_dicke") return SteadyFormula::driven_dicke;
    if (s == "driven_collective") return SteadyFormula::driven_collective;
    if (s == "squeezed_dicke") return SteadyFormula::squeezed_dicke;
    if (s == "squeezed_dicke_classical") return SteadyFormula::squeezed_dicke_classical;
    if (s == "squeezed_dicke_quantum") return SteadyFormula::squeezed_dicke_quantum;
    if (s == "squeezed_extended") return SteadyFormula::squeezed_extended;
    if (s == "squeezed_nonidentical") return SteadyFormula::squeezed_nonidentical;
    throw ValidationError("unknown steady-state scenario: " + s);
}

/// Fields not produced by a formula stay NaN.
struct SteadyRecord {
    double s11 = nan;  // <S1+ S1-> = <S2+ S2->
    double s12 = nan;  // <S1+ S2-> = <S2+ S1->
    double rho_gg = nan, rho_ss = nan, rho_aa = nan, rho_ee = nan;
    double rho_u = nan;
    cplx rho_es{nan, nan}, rho_sg{nan, nan}, rho_eg{nan, nan};
};

inline SteadyRecord driven_extended(const Params& p) {
    double g = p.gamma, o2 = p.rabi * p.rabi;
    double d = o2 * o2 + (o2 + p.omega12 * p.omega12) * g * g + 0.25 * g * g * std::pow(g + p.gamma12, 2);
    SteadyRecord r;
    r.s11 = (2 * o2 * o2 + g * g * o2) / (4 * d);
    r.s12 = g * g * o2 / (4 * d);
    return r;
}

inline SteadyRecord driven_dicke(const Params& p) {
    double g = p.gamma, o2 = p.rabi * p.rabi;
    double d = 3 * o2 * o2 + 4 * g * g * o2 + 4 * g * g * g * g;
    SteadyRecord r;
    r.s11 = (3 * o2 * o2 + 2 * o2 * g * g) / (2 * d);
    r.s12 = (o2 * o2 + 2 * o2 * g * g) / (2 * d);
    return r;
}

/// Collective-state steady state of the resonantly placed pair. The sg
/// coherence uses the bracket Omega~^2 (Gamma + 2i Delta_L); the printed
/// Gamma Omega~ (Omega~ + 2i Delta_L) does not solve the master equation.
/// Phases follow the printed convention (see engine_gauge).
inline SteadyRecord driven_collective(const Params& p) {
    double g = p.gamma, dl = p.detuning;
    double ot = p.rabi / std::numbers::sqrt2;
    double ot2 = ot * ot;
    double l = g * g + 4 * dl * dl;
    cplx shift(0.5 * (g + p.gamma12), dl - p.omega12);
    double z = 4 * ot2 * ot2 + l * (2 * ot2 + std::norm(shift));
    SteadyRecord r;
    r.rho_ee = r.rho_aa = ot2 * ot2 / z;
    r.rho_ss = (ot2 * l + ot2 * ot2) / z;
    r.rho_gg = 1 - r.rho_ee - r.rho_aa - r.rho_ss;
    r.rho_es = I * ot2 * ot * cplx(g, 2 * dl) / z;
    r.rho_sg = -I * ot * (ot2 * cplx(g, 2 * dl) + l * shift) / z;
    r.rho_eg = ot2 * cplx(g, 2 * dl) * shift / z;
    return r;
}

/// Maps the printed phase convention to the engine's: the two conventions
/// differ by the sign of |g>.
inline SteadyRecord engine_gauge(SteadyRecord r) {
    r.rho_sg = -r.rho_sg;
    r.rho_eg = -r.rho_eg;
    return r;
}

inline SteadyRecord squeezed_dicke(const Params& p) {
    double n = p.n, m2 = p.m * p.m;
    double den = 3 * n * n + 3 * n + 1 - 3 * m2;
    SteadyRecord r;
    r.rho_ee = (n * n * (2 * n + 1) - (2 * n - 1) * m2) / ((2 * n + 1) * den);
    r.rho_ss = (n * (n + 1) - m2) / den;
    r.rho_u = 2 * p.m / ((2 * n + 1) * den);
    r.rho_aa = 0.0;
    r.rho_gg = 1 - r.rho_ee - r.rho_ss;
    return r;
}

inline SteadyRecord squeezed_dicke_classical(const Params& p) {
    double n = p.n;
    SteadyRecord r;
    r.rho_ss = n / (3 * n + 1);
    r.rho_ee = 2 * n * n / ((2 * n + 1) * (3 * n + 1));
    return r;
}

inline SteadyRecord squeezed_dicke_quantum(const Params& p) {
    SteadyRecord r;
    r.rho_ss = 0.0;
    r.rho_ee = p.n / (2 * p.n + 1);
    return r;
}

inline SteadyRecord squeezed_extended(const Params& p) {
    double n = p.n, m2 = p.m * p.m, a = p.a;
    double q = 2 * n + 1, q2 = q * q;
    double g = q2 * (q2 * q2 + 4 * m2 * (a * a - q2));
    double base = n * (n + 1) / q2;
    SteadyRecord r;
    r.rho_ee = n * n / q2 + a * a * m2 * (4 * n + 1) / g;
    r.rho_ss = base - a * m2 * (2 * q2 - a) / g;
    r.rho_aa = base + a * m2 * (2 * q2 + a) / g;
    r.rho_u = 2 * a * q2 * q * p.m / g;
    r.rho_gg = 1 - r.rho_ee - r.rho_ss - r.rho_aa;
    return r;
}

inline SteadyRecord squeezed_nonidentical(const Params& p) {
    double q = 2 * p.n + 1;
    double k = q * q - 4 * p.a * p.a * p.m * p.m;
    SteadyRecord r;
    r.rho_ee = 0.25 * ((2 * p.n - 1) / q + 1 / k);
    r.rho_ss = r.rho_aa = 0.25 * (1 - 1 / k);
    r.rho_u = 2 * p.a * p.m / (q * k);
    r.rho_gg = 1 - r.rho_ee - r.rho_ss - r.rho_aa;
    return r;
}

inline SteadyRecord analytic_steady(SteadyFormula f, const Params& p) {
    switch (f) {
        case SteadyFormula::driven_extended: return driven_extended(p);
        case SteadyFormula::driven_dicke: return driven_dicke(p);
        case SteadyFormula::driven_collective: return driven_collective(p);
        case SteadyFormula::squeezed_dicke: return squeezed_dicke(p);
        case SteadyFormula::squeezed_dicke_classical: return squeezed_dicke_classical(p);
        case SteadyFormula::squeezed_dicke_quantum: return squeezed_dicke_quantum(p);
        case SteadyFormula::squeezed_extended: return squeezed_extended(p);
        case SteadyFormula::squeezed_nonidentical: return squeezed_nonidentical(p);
    }
    throw ValidationError("unknown steady-state scenario");
}

inline Validity validity(SteadyFormula f, const Params& p) {
    switch (f) {
        case SteadyFormula::driven_extended:
            return p.detuning == 0.0 ? Validity{} : Validity{0.0, "requires Delta_L = 0"};
        case SteadyFormula::squeezed_nonidentical:
            return ratio_validity(p.delta, p.gamma, "Delta >> Gamma");
        default: return {};
    }
}

// ------------------------------------------------------------------ intensities

enum class IntensityFormula {
    beats_detuned,            // I(t), equal rates, Omega12 >> Delta
    beats_unequal_damping,    // I(t), Delta = 0, Omega12 >> Gamma_i
    symmetric_population,     // rho_ss(t) from rho_ss(0) = 1/2
    antisymmetric_population, // rho_aa(t) from rho_aa(0) = 1/2
    selective_excitation,     // P_s(t) under in-phase drive
};

inline double beats_detuned(const Params& p, double t) {
    double w = std::hypot(p.omega12, p.delta);
    double g = p.gamma, g12 = p.gamma12;
    return std::exp(-g * t) *
           (p.delta / (2 * p.omega12) * g12 * std::cos(2 * w * t) + g * std::cosh(g12 * t) - g12 * std::sinh(g12 * t));
}

inline double beats_unequal_damping(const Params& p, double t) {
    double g1 = p.gamma1, g2 = p.gamma2, g12 = p.gamma12;
    return std::exp(-0.5 * (g1 + g2) * t) * (0.5 * (g1 - g2) * std::cos(2 * p.omega12 * t) +
                                            0.5 * (g1 + g2) * std::cosh(g12 * t) - g12 * std::sinh(g12 * t));
}

inline double analytic_intensity(IntensityFormula f, const Params& p, double t) {
    switch (f) {
        case IntensityFormula::beats_detuned: return beats_detuned(p, t);
        case IntensityFormula::beats_unequal_damping: return beats_unequal_damping(p, t);
        case IntensityFormula::symmetric_population: return 0.5 * std::exp(-(p.gamma + p.gamma12) * t);
        case IntensityFormula::antisymmetric_population: return 0.5 * std::exp(-(p.gamma - p.gamma12) * t);
        case IntensityFormula::selective_excitation: {
            double s = std::sin(p.rabi * t / std::numbers::sqrt2);
            return s * s;
        }
    }
    throw ValidationError("unknown intensity scenario");
}

inline Validity validity(IntensityFormula f, const Params& p) {
    switch (f) {
        case IntensityFormula::beats_detuned: return ratio_validity(p.omega12, p.delta, "Omega12 >> Delta");
        case IntensityFormula::beats_unequal_damping:
            return ratio_validity(p.omega12, std::max(p.gamma1, p.gamma2), "Omega12 >> Gamma_i");
        case IntensityFormula::selective_excitation: {
            auto v = ratio_validity(p.omega12, p.gamma, "Omega12 >> Gamma");
            return weaker(v, ratio_validity(p.omega12, p.rabi, "Omega12 >> Omega"));
        }
        default: return {};
    }
}

// ----------------------------------------------------------------- correlations

enum class G2Formula {
    dicke_strong,          // g2(tau), resonant strong drive
    steady_zero_delay,     // g2(0) from U and W, in-phase drive
    weak_drive_detuned,    // g2(0), single detector, Delta_L = Omega12
    two_time_identical,    // G2(t, t + tau) from |e1 e2>, identical atoms
    two_time_independent,  // same, Gamma12 = Omega12 = 0
    two_time_nonidentical, // same, nonidentical independent atoms
};

inline double dicke_strong(const Params& p, double tau) {
    double g = p.gamma, o = p.rabi;
    return 1 + std::exp(-1.5 * g * tau) / 32 + 3.0 / 32 * std::exp(-2.5 * g * tau) * std::cos(2 * o * tau) -
           0.375 * std::exp(-0.75 * g * tau) * std::cos(o * tau);
}

struct UW {
    double u, w;
};

inline UW steady_u_w(const Params& p) {
    double g = p.gamma, dl = p.detuning, o2 = p.rabi * p.rabi;
    double l = g * g + 4 * dl * dl;
    double u = (o2 * o2 + l * o2 + l * (0.25 * std::pow(g + p.gamma12, 2) + std::pow(dl - p.omega12, 2))) /
               std::pow(l + 2 * o2, 2);
    return {u, l / (l + 2 * o2)};
}

/// g2(0) from the normalised correlations U, W and detector phases kr1, kr2.
inline double zero_delay_from_u_w(double u, double w, double kr1, double kr2) {
    return 2 * u * (1 + std::cos(kr1 - kr2)) / ((1 + w * std::cos(kr1)) * (1 + w * std::cos(kr2)));
}

inline double weak_drive_detuned(const Params& p) {
    return std::pow(p.gamma + p.gamma12, 2) / (4 * p.detuning * p.detuning);
}

inline double two_time_identical(const Params& p, double tau) {
    double c1 = std::cos(p.kr1), c2 = std::cos(p.kr2), s1 = std::sin(p.kr1), s2 = std::sin(p.kr2);
    double g12 = p.gamma12;
    return 0.5 * p.gamma * p.gamma * std::exp(-p.gamma * (2 * p.t + tau)) *
           ((1 + c1 * c2) * std::cosh(g12 * tau) - (c1 + c2) * std::sinh(g12 * tau) +
            s1 * s2 * std::cos(2 * p.omega12 * tau));
}

inline double two_time_independent(const Params& p, double tau) {
    return 0.5 * p.gamma * p.gamma * std::exp(-p.gamma * (2 * p.t + tau)) * (1 + std::cos(p.kr1 - p.kr2));
}

/// Gamma is the mean of the two rates in the exponent; the prefactor is
/// Gamma1 Gamma2, which is what the regression gives for unequal rates.
inline double two_time_nonidentical(const Params& p, double tau) {
    double g = 0.5 * (p.gamma1 + p.gamma2);
    return 0.5 * p.gamma1 * p.gamma2 * std::exp(-g * (2 * p.t + tau)) *
           (std::cosh(0.5 * (p.gamma2 - p.gamma1) * tau) + std::cos(p.kr1 - p.kr2 - 2 * p.delta * tau));
}

inline double analytic_g2(G2Formula f, const Params& p, double tau) {
    switch (f) {
        case G2Formula::dicke_strong: return dicke_strong(p, tau);
        case G2Formula::steady_zero_delay: {
            auto uw = steady_u_w(p);
            return zero_delay_from_u_w(uw.u, uw.w, p.kr1, p.kr2);
        }
        case G2Formula::weak_drive_detuned: return weak_drive_detuned(p);
        case G2Formula::two_time_identical: return two_time_identical(p, tau);
        case G2Formula::two_time_independent: return two_time_independent(p, tau);
        case G2Formula::two_time_nonidentical: return two_time_nonidentical(p, tau);
    }
    throw ValidationError("unknown correlation scenario");
}

inline Validity validity(G2Formula f, const Params& p) {
    switch (f) {
        case G2Formula::dicke_strong: return ratio_validity(p.rabi, p.gamma, "Omega >> Gamma");
        case G2Formula::weak_drive_detuned: {
            auto v = ratio_validity(p.gamma, p.rabi, "Omega << Gamma");
            return weaker(v, ratio_validity(p.detuning, p.gamma, "Delta_L = Omega12 >> Gamma"));
        }
        default: return {};
    }
}

// -------------------------------------------------------------------- variances

enum class VarianceFormula {
    dicke_in_phase,        // F_{theta=0}(t), resonant Dicke transient from ground
    dicke_out_of_phase,    // F_{theta=pi/2}(t)
    two_photon_resonance,  // steady F_alpha near Delta_L = 0, argument is alpha
};

inline double dicke_in_phase(const Params& p, double t) {
    double g = p.gamma, o = p.rabi;
    double s = std::sin(o * t);
    return 1.0 / 3 - 0.125 * std::exp(-2.5 * g * t) * std::cos(2 * o * t) + std::exp(-1.5 * g * t) / 24 -
           0.5 * std::exp(-1.5 * g * t) * s * s - 0.25 * std::exp(-0.75 * g * t) * std::cos(o * t);
}

inline double dicke_out_of_phase(const Params& p, double t) {
    return 1.0 / 3 - std::exp(-1.5 * p.gamma * t) / 12 - 0.25 * std::exp(-0.75 * p.gamma * t) * std::cos(p.rabi * t);
}

inline double two_photon_resonance(const Params& p, double alpha) {
    double g = p.gamma, dl = p.detuning;
    double l = g * g + 4 * dl * dl;
    return p.rabi * p.rabi / p.omega12 * (dl / l * std::cos(2 * alpha) + g / l * std::sin(2 * alpha));
}

inline double analytic_variance(VarianceFormula f, const Params& p, double t_or_alpha) {
    switch (f) {
        case VarianceFormula::dicke_in_phase: return dicke_in_phase(p, t_or_alpha);
        case VarianceFormula::dicke_out_of_phase: return dicke_out_of_phase(p, t_or_alpha);
        case VarianceFormula::two_photon_resonance: return two_photon_resonance(p, t_or_alpha);
    }
    throw ValidationError("unknown variance scenario");
}

inline Validity validity(VarianceFormula f, const Params& p) {
    switch (f) {
        case VarianceFormula::two_photon_resonance: {
            auto v = ratio_validity(p.omega12, p.rabi, "Omega12 >> Omega");
            return weaker(v, ratio_validity(p.rabi, p.gamma, "Omega >> Gamma"));
        }
        default: return ratio_validity(p.rabi, p.gamma, "Omega >> Gamma");
    }
}

// ------------------------------------------------------------------- visibility

enum class VisibilityFormula { driven, squeezed };

inline double visibility_driven(const Params& p) {
    double l = p.gamma * p.gamma + 4 * p.detuning * p.detuning;
    return l / (l + 2 * p.rabi * p.rabi);
}

inline double visibility_squeezed(const Params& p) {
    double n = p.n, m2 = p.m * p.m, a = p.a, q = 2 * n + 1;
    return -2 * a * m2 / (n * q * q * q + 2 * m2 * (a * a + q - q * q));
}

inline double analytic_visibility(VisibilityFormula f, const Params& p) {
    switch (f) {
        case VisibilityFormula::driven: return visibility_driven(p);
        case VisibilityFormula::squeezed: return visibility_squeezed(p);
    }
    throw ValidationError("unknown visibility scenario");
}

// ------------------------------------------------------------ entangled states

/// Diagonal form of a g-e block-structured density matrix. States are given in
/// the product basis; index 2 is |s>, index 3 is |a>.
struct EntangledDecomposition {
    std::array<Vec4, 4> states;
    std::array<double, 4> populations{};
    bool block_structured = true;
    std::string warning;
};

inline EntangledDecomposition entangled_eigenstates(const DensityMatrix4& rho) {
    using namespace level;
    Mat4 u = dicke_basis().unitary();
    Mat4 c = u.adjoint() * rho.matrix() * u;
    EntangledDecomposition d;
    double off = 0.0;
    for (int i : {g, e})
        for (int j : {s, a}) off = std::max({off, std::abs(c(i, j)), std::abs(c(j, i))});
    off = std::max(off, std::abs(c(s, a)));
    if (off > 1e-10) {
        d.block_structured = false;
        d.warning = "density matrix is not g-e block structured; states from full diagonalisation";
        Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho.matrix() + rho.matrix().adjoint()));
        for (int k = 0; k < 4; ++k) {
            d.states[k] = es.eigenvectors().col(3 - k);
            d.populations[k] = es.eigenvalues()(3 - k);
        }
        return d;
    }
    double gg = c(g, g).real(), ee = c(e, e).real();
    cplx eg = c(e, g);
    double root = std::sqrt((gg - ee) * (gg - ee) + 4 * std::norm(eg));
    double p1 = 0.5 * (gg + ee) + 0.5 * root;
    double p2 = 0.5 * (gg + ee) - 0.5 * root;
    Vec4 v1 = Vec4::Zero(), v2 = Vec4::Zero();
    v1(g) = p1 - ee;
    v1(e) = eg;
    if (v1.norm() < 1e-14) {
        v1(g) = 0.0;
        v1(e) = 1.0;
    }
    v1.normalize();
    v2(g) = -std::conj(v1(e));
    v2(e) = std::conj(v1(g));
    d.states[0] = u * v1;
    d.states[1] = u * v2;
    d.states[2] = u.col(s);
    d.states[3] = u.col(a);
    d.populations = {p1, p2, c(s, s).real(), c(a, a).real()};
    return d;
}

/// Pure two-photon entangled state in the product basis.
inline Vec4 tpe_state(double n) {
    Vec4 v = Vec4::Zero();
    v(0) = std::sqrt(n + 1);
    v(3) = std::sqrt(n);
    return v / std::sqrt(2 * n + 1);
}

/// || (mu S^- + nu S^+) psi || with mu = sqrt(N + 1) and nu = -sqrt(N) e^{i phi_s}.
/// The sign of nu makes the annihilator consistent with tpe_state for
/// phi_s = 0.
inline double annihilation_residual(double n, double squeeze_phase, const Vec4& psi) {
    cplx nu = -std::sqrt(n) * std::exp(I * squeeze_phase);
    Mat4 op = std::sqrt(n + 1) * (ops::lower1() + ops::lower2()) + nu * (ops::raise1() + ops::raise2());
    return (op * psi).norm();
}

/// k R . r12 for a direction at angle theta from the axis r2 - r1.
inline double projected_phase(double separation, double theta) { return -2 * pi * separation * std::cos(theta); }

}  // namespace twoatom::oracle
