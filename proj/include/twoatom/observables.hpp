#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "liouvillian.hpp"

namespace twoatom {

/// Observation directions relative to the interatomic axis (theta1, theta2)
/// and the dipole-observation angle phi entering sin^2(phi).
struct DetectionGeometry {
    double theta1 = pi / 2;
    double theta2 = pi / 2;
    double phi = pi / 2;
};

inline void validate(const DetectionGeometry& g) {
    for (double a : {g.theta1, g.theta2, g.phi})
        if (!(a >= 0 && a <= pi)) throw ValidationError("invariant violated: detection angles in [0, pi]");
}

/// A scalar that may be undefined (vanishing normalisation).
struct MaybeValue {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool defined = false;
};

/// sum_ij Gamma_ij S_i^+ S_j^-
inline Mat4 emission_operator(const AtomPairConfig& pair) {
    using namespace ops;
    double g12 = collective_damping(pair);
    return pair.gamma1 * number(0) + pair.gamma2 * number(1) + g12 * (raise1() * lower2() + raise2() * lower1());
}

inline double expectation(const Mat4& op, const Mat4& rho) { return (op * rho).trace().real(); }

/// <S_i^+ S_j^->, atoms indexed 0 and 1.
inline cplx dipole_correlation(const DensityMatrix4& rho, int i, int j) {
    return (ops::raise(i) * ops::lower(j) * rho.matrix()).trace();
}

inline double total_intensity(const DensityMatrix4& rho, const AtomPairConfig& pair) {
    return expectation(emission_operator(pair), rho.matrix());
}

/// Positive-frequency far-field amplitude sum_j sqrt(Gamma_j) exp(-i k R.r_j) S_j^-
/// for a direction at angle theta from the axis r2 - r1.
inline Mat4 field_operator(const AtomPairConfig& pair, double theta) {
    double half = 0.5 * wave_number_distance(pair) * std::cos(theta);
    return std::sqrt(pair.gamma1) * std::exp(I * half) * ops::lower1() +
           std::sqrt(pair.gamma2) * std::exp(-I * half) * ops::lower2();
}

inline double angular_intensity(const DensityMatrix4& rho, const AtomPairConfig& pair, const DetectionGeometry& geo) {
    validate(geo);
    Mat4 e = field_operator(pair, geo.theta1);
    double s = std::sin(geo.phi);
    return s * s * expectation(e.adjoint() * e, rho.matrix());
}

/// Intensity along an arbitrary unit direction, with the dipole in the x-z
/// plane at dipole_angle from the axis (x).
inline double angular_intensity(const DensityMatrix4& rho, const AtomPairConfig& pair, const Eigen::Vector3d& dir) {
    Eigen::Vector3d n = dir.normalized();
    Eigen::Vector3d mu(std::cos(pair.dipole_angle), 0.0, std::sin(pair.dipole_angle));
    double c = n.dot(mu);
    Mat4 e = field_operator(pair, std::acos(std::clamp(n.x(), -1.0, 1.0)));
    return (1 - c * c) * expectation(e.adjoint() * e, rho.matrix());
}

namespace detail {

inline double first_order(const Mat4& rho, const Mat4& e, double phi) {
    double s = std::sin(phi);
    return s * s * expectation(e.adjoint() * e, rho);
}

inline bool negligible(double x) { return !(std::abs(x) > 1e-14); }

}  // namespace detail

inline MaybeValue g2_zero(const DensityMatrix4& rho, const AtomPairConfig& pair, const DetectionGeometry& geo) {
    validate(geo);
    Mat4 e1 = field_operator(pair, geo.theta1), e2 = field_operator(pair, geo.theta2);
    double g1a = expectation(e1.adjoint() * e1, rho.matrix());
    double g1b = expectation(e2.adjoint() * e2, rho.matrix());
    if (detail::negligible(g1a) || detail::negligible(g1b)) return {};
    double g2 = expectation(e1.adjoint() * e2.adjoint() * e2 * e1, rho.matrix());
    return {g2 / (g1a * g1b), true};
}

struct CorrelationSeries {
    std::vector<double> tau;
    std::vector<double> values;
    bool defined = true;

    std::string to_csv() const {
        std::string out = "tau,value\n";
        char buf[64];
        for (std::size_t i = 0; i < tau.size(); ++i) {
            auto r = std::to_chars(buf, buf + sizeof buf, tau[i], std::chars_format::general, 12);
            out.append(buf, r.ptr);
            out += ',';
            r = std::to_chars(buf, buf + sizeof buf, values[i], std::chars_format::general, 12);
            out.append(buf, r.ptr);
            out += '\n';
        }
        return out;
    }
};

namespace detail {

// Propagates X over tau >= 0, prepending tau = 0 when needed.
inline std::vector<Vec16> regress(const Mat16& l, const Mat4& x0, const std::vector<double>& taus,
                                  const IntegratorOptions& opt) {
    if (taus.empty()) return {};
    if (taus.front() < 0) throw ValidationError("delay grid must be non-negative");
    std::vector<double> grid = taus;
    bool pad = taus.front() > 0;
    if (pad) grid.insert(grid.begin(), 0.0);
    auto raw = propagate(l, ops::vec(x0), grid, opt);
    if (pad) raw.erase(raw.begin());
    return raw;
}

}  // namespace detail

/// Unnormalised G2(R1, t; R2, t + tau) from the state at time t, via the
/// regression theorem.
inline std::vector<double> two_time_intensity_correlation(const Generator16& l, const DensityMatrix4& rho_t,
                                                          const AtomPairConfig& pair, const DetectionGeometry& geo,
                                                          const std::vector<double>& taus,
                                                          const IntegratorOptions& opt = {}) {
    validate(geo);
    Mat4 e1 = field_operator(pair, geo.theta1), e2 = field_operator(pair, geo.theta2);
    double u = std::pow(std::sin(geo.phi), 4);
    auto raw = detail::regress(l.matrix, e1 * rho_t.matrix() * e1.adjoint(), taus, opt);
    Mat4 n2 = e2.adjoint() * e2;
    std::vector<double> out;
    out.reserve(raw.size());
    for (auto& v : raw) out.push_back(u * expectation(n2, ops::unvec(v)));
    return out;
}

inline CorrelationSeries g2_tau(const Generator16& l, const DensityMatrix4& rho_ss, const AtomPairConfig& pair,
                                const DetectionGeometry& geo, const std::vector<double>& taus,
                                const IntegratorOptions& opt = {}) {
    validate(geo);
    for (std::size_t i = 1; i < taus.size(); ++i)
        if (!(taus[i] > taus[i - 1])) throw ValidationError("delay grid must be strictly increasing");
    CorrelationSeries s;
    s.tau = taus;
    Mat4 e1 = field_operator(pair, geo.theta1), e2 = field_operator(pair, geo.theta2);
    double norm = detail::first_order(rho_ss.matrix(), e1, geo.phi) * detail::first_order(rho_ss.matrix(), e2, geo.phi);
    if (detail::negligible(norm)) {
        s.defined = false;
        s.values.assign(taus.size(), std::numeric_limits<double>::quiet_NaN());
        return s;
    }
    auto g2 = two_time_intensity_correlation(l, rho_ss, pair, geo, taus, opt);
    for (double v : g2) s.values.push_back(std::max(0.0, v / norm));
    return s;
}

inline double mandel_q(double g2_zero_value, double q_efficiency, double t_window) {
    if (!(g2_zero_value >= 0)) throw ValidationError("g2 must be non-negative");
    if (!(q_efficiency > 0 && q_efficiency <= 1)) throw ValidationError("efficiency must lie in (0, 1]");
    if (!(t_window > 0)) throw ValidationError("counting window must be positive");
    return q_efficiency * t_window * (g2_zero_value - 1);
}

/// Normally ordered quadrature variance per atom in collective-state form,
/// observation perpendicular to the axis and quadrature frequency at the laser.
inline double quadrature_variance(const DensityMatrix4& rho, const AtomPairConfig& pair, double alpha,
                                  const DetectionGeometry& geo) {
    validate(geo);
    if (std::abs(geo.theta1 - pi / 2) > 1e-12)
        throw DomainError("quadrature variance is defined only for observation perpendicular to the axis");
    if (pair.gamma1 != pair.gamma2) throw DomainError("quadrature variance requires identical atoms");
    using namespace level;
    Mat4 c = collective_elements(rho.matrix());
    cplx ph = std::exp(I * alpha);
    cplx one = (c(e, s) + c(s, g)) * ph + (c(s, e) + c(g, s)) * std::conj(ph);
    cplx val = 2.0 * c(e, e) + 2.0 * c(s, s) + c(e, g) * ph * ph + c(g, e) * std::conj(ph * ph) - one * one;
    return 0.25 * val.real();
}

inline MaybeValue visibility(const DensityMatrix4& rho) {
    using namespace level;
    Mat4 c = collective_elements(rho.matrix());
    double den = (c(s, s) + c(a, a) + 2.0 * c(e, e)).real();
    if (detail::negligible(den)) return {};
    return {(c(s, s) - c(a, a)).real() / den, true};
}

inline double purity(const DensityMatrix4& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

inline double total_spin_squared(const DensityMatrix4& rho) {
    return 2 - 2 * collective_elements(rho.matrix())(level::a, level::a).real();
}

/// rho_u = rho_eg exp(-i phi_s) + c.c.
inline double two_photon_coherence(const DensityMatrix4& rho, double squeeze_phase) {
    cplx eg = collective_elements(rho.matrix())(level::e, level::g);
    return 2 * (eg * std::exp(-I * squeeze_phase)).real();
}

struct FieldVariances {
    double incident = 0.0;
    double emitted = 0.0;
};

/// Incident and emitted normally ordered variances at theta = pi/2, E0 = 1.
inline FieldVariances field_variance_mapping(const SqueezedReservoir& res, const DensityMatrix4& rho_ss) {
    auto eff = effective_squeezing(res);
    using namespace level;
    Mat4 c = collective_elements(rho_ss.matrix());
    double rho_u = two_photon_coherence(rho_ss, res.squeeze_phase);
    FieldVariances f;
    f.incident = 2 * (eff.n - eff.m);
    f.emitted = 2 * c(s, s).real() + 2 * c(e, e).real() + std::abs(rho_u) * std::cos(pi);
    return f;
}

}  // namespace twoatom
