#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace twoatom {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;
using Mat16 = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

// Physically meaningless input (e.g. the divergent dipole shift at r = 0).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A state or parameter record breaks one of its invariants.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Linear algebra or integration did not converge.
struct NumericalError : std::runtime_error {
    double last_time = 0.0;
    explicit NumericalError(const std::string& what, double t = 0.0)
        : std::runtime_error(what), last_time(t) {}
};

}  // namespace twoatom
