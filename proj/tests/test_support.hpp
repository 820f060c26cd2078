#pragma once

#include <gtest/gtest.h>

#include <random>

#include "twoatom/runner.hpp"

namespace twoatom::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline Vec4 random_vector() {
    std::normal_distribution<double> n;
    Vec4 v;
    for (int i = 0; i < 4; ++i) v(i) = cplx(n(rng()), n(rng()));
    return v;
}

inline DensityMatrix4 random_state() {
    Mat4 a = Mat4::Zero();
    for (int k = 0; k < 4; ++k) {
        Vec4 v = random_vector();
        a += uniform(0, 1) * v * v.adjoint();
    }
    return DensityMatrix4(a / a.trace().real());
}

inline AtomPairConfig random_pair(bool identical = false) {
    AtomPairConfig p;
    p.gamma2 = identical ? 1.0 : uniform(0.3, 3.0);
    p.delta = identical ? 0.0 : uniform(-3, 3);
    p.separation = uniform(0.03, 1.5);
    p.dipole_angle = uniform(0, pi / 2);
    return p;
}

inline DriveField random_drive() {
    DriveField d;
    d.rabi = uniform(0, 5);
    d.detuning = uniform(-5, 5);
    d.propagation_angle = uniform(0, pi);
    d.wave_type = uniform(0, 1) < 0.5 ? WaveType::running : WaveType::standing;
    d.phase = uniform(-pi, pi);
    return d;
}

template <typename M>
inline double max_abs(const Eigen::MatrixBase<M>& m) { return m.cwiseAbs().maxCoeff(); }

inline Vec4 ket(int k) {
    Vec4 v = Vec4::Zero();
    v(k) = 1.0;
    return v;
}

inline Vec4 symmetric_ket() { return (ket(1) + ket(2)) / std::numbers::sqrt2; }
inline Vec4 antisymmetric_ket() { return (ket(1) - ket(2)) / std::numbers::sqrt2; }

/// Brute-force exp(L t) vec(rho0) as an oracle for the adaptive integrator.
inline Mat4 exact_evolution(const Generator16& l, const Mat4& rho0, double t) {
    Mat16 e = (l.matrix * t).exp();
    return ops::unvec(e * ops::vec(rho0));
}

}  // namespace twoatom::testing
