#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "types.hpp"

namespace twoatom {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-14;
    long max_steps = 50'000'000;
};

/// Adaptive Dormand-Prince 5(4) stepping that lands on every requested time.
/// `rhs(t, y, dydt)` fills the derivative. Returns y at each grid time.
template <class Vec, class Rhs>
std::vector<Vec> dormand_prince(Rhs&& rhs, const Vec& y0, const std::vector<double>& grid,
                                const IntegratorOptions& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    // difference between 5th and embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<Vec> out;
    out.reserve(grid.size());
    if (grid.empty()) return out;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ValidationError("time grid must be strictly increasing");

    Vec y = y0, k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    double t = grid.front();
    out.push_back(y);
    double h = opt.initial_step;
    long steps = 0;
    rhs(t, y, k1);
    for (std::size_t gi = 1; gi < grid.size(); ++gi) {
        double target = grid[gi];
        while (t < target) {
            if (++steps > opt.max_steps) throw NumericalError("integration step budget exceeded", t);
            bool last = t + h >= target;
            double step = last ? target - t : h;
            tmp = y + step * (a21 * k1);
            rhs(t + c2 * step, tmp, k2);
            tmp = y + step * (a31 * k1 + a32 * k2);
            rhs(t + c3 * step, tmp, k3);
            tmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * step, tmp, k4);
            tmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * step, tmp, k5);
            tmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + step, tmp, k6);
            ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + step, ynew, k7);
            Vec err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double en = 0.0;
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
                en = std::max(en, std::abs(err(i)) / sc);
            }
            if (!std::isfinite(en)) throw NumericalError("non-finite state during integration", t);
            if (en <= 1.0) {
                t = last ? target : t + step;
                y = ynew;
                k1 = k7;
            }
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (en > 1.0) fac = std::min(fac, 1.0);
            h = (last && en <= 1.0) ? std::max(h, step * fac) : step * fac;
            if (h < opt.min_step) throw NumericalError("integration step size underflow", t);
        }
        out.push_back(y);
    }
    return out;
}

}  // namespace twoatom
