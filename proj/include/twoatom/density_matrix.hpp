#pragma once

#include <Eigen/Eigenvalues>
#include <string>

#include "types.hpp"

namespace twoatom {

struct StateTolerance {
    double hermitian = 1e-10;
    double trace = 1e-10;
    double eigenvalue = 1e-8;
};

/// 4x4 density matrix in the product basis. The constructor validates.
class DensityMatrix4 {
public:
    DensityMatrix4() : m_(Mat4::Zero()) { m_(0, 0) = 1.0; }
    explicit DensityMatrix4(const Mat4& m, const StateTolerance& tol = {}) : m_(m) { check(m_, tol); }

    static DensityMatrix4 unchecked(const Mat4& m) {
        DensityMatrix4 r;
        r.m_ = m;
        return r;
    }

    static DensityMatrix4 pure(const Vec4& psi) {
        Vec4 n = psi / psi.norm();
        return DensityMatrix4(n * n.adjoint());
    }

    static DensityMatrix4 basis(int k) {
        Vec4 v = Vec4::Zero();
        v(k) = 1.0;
        return pure(v);
    }

    const Mat4& matrix() const { return m_; }
    cplx operator()(int i, int j) const { return m_(i, j); }

    static void check(const Mat4& m, const StateTolerance& tol = {}) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian)
            throw ValidationError("density matrix is not Hermitian");
        if (std::abs(m.trace() - 1.0) > tol.trace)
            throw ValidationError("density matrix trace differs from 1");
        Mat4 h = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat4> es(h, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol.eigenvalue)
            throw ValidationError("density matrix has a negative eigenvalue");
    }

private:
    Mat4 m_;
};

}  // namespace twoatom
