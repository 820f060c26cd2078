#pragma once

#include <array>
#include <cmath>

#include "coupling_geometry.hpp"
#include "density_matrix.hpp"

namespace twoatom {

/// Eigenbasis of the dipole-coupled pair. Energies are ordered
/// (E_g, E_s', E_a', E_e) in the frame rotating at the mean transition
/// frequency, so the outer levels sit at -w0 and +w0 shifted to zero.
struct CollectiveBasis {
    double alpha = 1 / std::numbers::sqrt2;
    double beta = 1 / std::numbers::sqrt2;
    double w = 0.0;
    std::array<double, 4> energies{};

    /// Columns are |g>, |s'>, |a'>, |e> in the product basis.
    Mat4 unitary() const {
        Mat4 u = Mat4::Zero();
        u(0, 0) = 1.0;
        u(1, 1) = beta;
        u(2, 1) = alpha;
        u(1, 2) = alpha;
        u(2, 2) = -beta;
        u(3, 3) = 1.0;
        return u;
    }
};

/// Symmetric-identical basis |g>, |s>, |a>, |e>.
inline CollectiveBasis dicke_basis() { return {}; }

/// Middle 2x2 block of the pair Hamiltonian in the product basis.
inline Eigen::Matrix2d intermediate_block(double delta, double omega12) {
    Eigen::Matrix2d h;
    h << -delta, omega12, omega12, delta;
    return h;
}

inline CollectiveBasis build_basis(const AtomPairConfig& pair) {
    double o12 = dipole_dipole_shift(pair);
    double delta = pair.delta;
    CollectiveBasis b;
    b.w = std::hypot(o12, delta);
    double d = delta + b.w;
    double norm = std::hypot(d, o12);
    if (norm == 0.0) {
        // uncoupled atoms with delta <= 0: |s'> is |e1 g2>
        b.alpha = delta == 0.0 ? 1 / std::numbers::sqrt2 : 0.0;
        b.beta = delta == 0.0 ? 1 / std::numbers::sqrt2 : 1.0;
    } else {
        b.alpha = d / norm;
        b.beta = o12 / norm;
    }
    b.energies = {0.0, b.w, -b.w, 0.0};
    return b;
}

/// Complex superposition coefficients (u, v) for S_s = u S1 + v S2.
struct SuperpositionCoeffs {
    cplx u{1 / std::numbers::sqrt2, 0.0};
    cplx v{1 / std::numbers::sqrt2, 0.0};

    bool normalized(double tol = 1e-12) const { return std::abs(std::norm(u) + std::norm(v) - 1) < tol; }
};

inline SuperpositionCoeffs rate_weighted_coeffs(const AtomPairConfig& p) {
    double s = p.gamma1 + p.gamma2;
    return {std::sqrt(p.gamma1 / s), std::sqrt(p.gamma2 / s)};
}

inline SuperpositionCoeffs running_wave_coeffs(double k_dot_r1, double k_dot_r2) {
    return {std::exp(I * k_dot_r1) / std::numbers::sqrt2, std::exp(I * k_dot_r2) / std::numbers::sqrt2};
}

inline SuperpositionCoeffs standing_wave_coeffs(double k_dot_r1, double k_dot_r2) {
    double c1 = std::cos(k_dot_r1), c2 = std::cos(k_dot_r2);
    double n = std::hypot(c1, c2);
    return {c1 / n, c2 / n};
}

struct SuperpositionRates {
    cplx ss, aa, as, sa;
};

inline SuperpositionRates superposition_rates(const SuperpositionCoeffs& c, const AtomPairConfig& p) {
    if (!c.normalized()) throw ValidationError("superposition coefficients are not normalised");
    double g1 = p.gamma1, g2 = p.gamma2, g12 = collective_damping(p);
    cplx u = c.u, v = c.v;
    double nu = std::norm(u), nv = std::norm(v);
    cplx cross = u * std::conj(v) + std::conj(u) * v;
    SuperpositionRates r;
    r.ss = nu * g1 + nv * g2 + cross * g12;
    r.aa = nv * g1 + nu * g2 - cross * g12;
    r.as = u * std::conj(v) * g1 - std::conj(u) * v * g2 - (nu - nv) * g12;
    r.sa = std::conj(u) * v * g1 - u * std::conj(v) * g2 - (nu - nv) * g12;
    return r;
}

struct CoherentCouplings {
    cplx delta_prime;
    cplx delta_c;
};

inline CoherentCouplings coherent_couplings(const SuperpositionCoeffs& c, const AtomPairConfig& p,
                                            const DriveField& d) {
    if (!c.normalized()) throw ValidationError("superposition coefficients are not normalised");
    double o12 = dipole_dipole_shift(p);
    cplx u = c.u, v = c.v;
    CoherentCouplings k;
    k.delta_prime = (v * std::conj(u) + std::conj(v) * u) * o12;
    k.delta_c = (std::norm(u) - std::norm(v)) * o12 + (std::conj(v) * u - v * std::conj(u)) * d.detuning;
    return k;
}

enum class BasisDirection { to_collective, to_product };

inline DensityMatrix4 basis_transform(BasisDirection dir, const DensityMatrix4& rho, const CollectiveBasis& b) {
    DensityMatrix4::check(rho.matrix());
    Mat4 u = b.unitary();
    Mat4 out = dir == BasisDirection::to_collective ? Mat4(u.adjoint() * rho.matrix() * u)
                                                    : Mat4(u * rho.matrix() * u.adjoint());
    return DensityMatrix4::unchecked(out);
}

/// Density matrix elements in the symmetric basis |g>, |s>, |a>, |e>.
inline Mat4 collective_elements(const Mat4& rho) {
    Mat4 u = dicke_basis().unitary();
    return u.adjoint() * rho * u;
}

namespace level {
inline constexpr int g = 0, s = 1, a = 2, e = 3;
}

}  // namespace twoatom
