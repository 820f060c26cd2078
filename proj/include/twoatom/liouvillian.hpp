#pragma once

#include <Eigen/SVD>
#include <string>
#include <vector>

#include "collective_basis.hpp"
#include "coupling_geometry.hpp"
#include "density_matrix.hpp"
#include "integrator.hpp"
#include "operators.hpp"

namespace twoatom {

enum class Scenario { vacuum_drive, squeezed, dicke_dressed, bad_cavity };

inline const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::vacuum_drive: return "vacuum_drive";
        case Scenario::squeezed: return "squeezed";
        case Scenario::dicke_dressed: return "dicke_dressed";
        case Scenario::bad_cavity: return "bad_cavity";
    }
    return "?";
}

/// Column-stacked Liouvillian, d vec(rho)/dt = matrix * vec(rho).
struct Generator16 {
    Mat16 matrix = Mat16::Zero();
    Scenario scenario = Scenario::vacuum_drive;
    std::string note;

    Mat4 apply(const Mat4& rho) const { return ops::unvec(matrix * ops::vec(rho)); }

    /// Norm of the trace functional composed with the generator.
    double trace_defect() const {
        Vec16 tr = ops::vec(Mat4::Identity());
        return (tr.transpose() * matrix).norm();
    }
};

namespace detail {

inline Mat16 pair_dissipator(double g1, double g2, double g12, const Mat4& l1, const Mat4& l2, cplx scale = 1.0) {
    const Mat4 low[2] = {l1, l2};
    const double g[2][2] = {{g1, g12}, {g12, g2}};
    Mat16 d = Mat16::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (g[i][j] != 0.0) d += ops::dissipator(scale * g[i][j], low[j], low[i].adjoint());
    return d;
}

// Free pair Hamiltonian in a frame rotating at w0 + frame_offset.
inline Mat4 pair_hamiltonian(const AtomPairConfig& p, double omega12, double frame_offset) {
    using namespace ops;
    Mat4 h = (-p.delta - frame_offset) * number(0) + (p.delta - frame_offset) * number(1);
    h += omega12 * (raise1() * lower2() + raise2() * lower1());
    return h;
}

}  // namespace detail

inline Mat4 drive_hamiltonian(const DriveField& d, const AtomPairConfig& p) {
    auto [o1, o2] = rabi_at_atoms(d, p);
    Mat4 h = -0.5 * (o1 * ops::raise1() + o2 * ops::raise2());
    return h + Mat4(h.adjoint());
}

inline Generator16 build_vacuum_drive(const AtomPairConfig& pair, const DriveField& drive) {
    validate(pair);
    validate(drive);
    auto c = pair_couplings(pair);
    Mat4 h = detail::pair_hamiltonian(pair, c.omega12, drive.detuning) + drive_hamiltonian(drive, pair);
    Generator16 g;
    g.scenario = Scenario::vacuum_drive;
    g.matrix = ops::commutator(h) +
               detail::pair_dissipator(pair.gamma1, pair.gamma2, c.gamma12, ops::lower1(), ops::lower2());
    if (pair.separation == 0.0) g.note = "small-sample limit: dipole-dipole shift omitted";
    return g;
}

inline Generator16 build_squeezed(const AtomPairConfig& pair, const SqueezedReservoir& res) {
    validate(pair);
    auto eff = effective_squeezing(res);
    if (classify_squeezing(eff.n, eff.m) == SqueezeClass::invalid)
        throw ValidationError("squeezing parameters violate |M|^2 <= N(N+1)");
    auto c = pair_couplings(pair);
    cplx m = eff.m * std::exp(I * res.squeeze_phase);
    const Mat4 l1 = ops::lower1(), l2 = ops::lower2();
    const Mat4 r1 = ops::raise1(), r2 = ops::raise2();
    Generator16 g;
    g.scenario = Scenario::squeezed;
    g.matrix = ops::commutator(detail::pair_hamiltonian(pair, c.omega12, res.carrier_offset));
    g.matrix += detail::pair_dissipator(pair.gamma1, pair.gamma2, c.gamma12, l1, l2, eff.n + 1);
    g.matrix += detail::pair_dissipator(pair.gamma1, pair.gamma2, c.gamma12, r1, r2, eff.n);
    // two-photon correlation terms; only the cross terms survive since (S_i^+)^2 = 0
    const Mat4 up[2] = {r1, r2}, down[2] = {l1, l2};
    const double rate[2][2] = {{pair.gamma1, c.gamma12}, {c.gamma12, pair.gamma2}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            g.matrix -= ops::dissipator(rate[i][j] * m, up[j], up[i]);
            g.matrix -= ops::dissipator(rate[i][j] * std::conj(m), down[j], down[i]);
        }
    return g;
}

/// Collective spin-1 operators of the dressed-atom picture.
struct DressedOperators {
    Mat4 rz, rplus, rminus;
};

inline DressedOperators dressed_operators() {
    Mat4 sp = ops::collective_raise(), sm = ops::collective_lower();
    Mat4 sx = 0.5 * (sp + sm);
    Mat4 sy = (sp - sm) / (2.0 * I);
    Mat4 sz = 0.5 * (sp * sm - sm * sp);
    return {sx, sy + I * sz, sy - I * sz};
}

/// Secular dressed-state generator of the resonantly driven small-sample
/// model, valid for rabi >> gamma.
inline Generator16 build_dicke_dressed(const DriveField& drive, double gamma = 1.0) {
    validate(drive);
    auto r = dressed_operators();
    Generator16 g;
    g.scenario = Scenario::dicke_dressed;
    g.matrix = ops::commutator(-drive.rabi * r.rz) + ops::lindblad(gamma, r.rz) + ops::lindblad(gamma / 4, r.rminus) +
               ops::lindblad(gamma / 4, r.rplus);
    g.note = drive.rabi >= 10 * gamma ? "strong-field regime" : "outside strong-field regime (rabi < 10 gamma)";
    return g;
}

inline Generator16 build_bad_cavity(const AtomPairConfig& pair, double g, double gamma_c, double omega_drive) {
    validate(pair);
    if (!(gamma_c > 0)) throw DomainError("cavity damping gamma_c must be positive");
    double eta = omega_drive / gamma_c;
    Mat4 sp = ops::collective_raise(), sm = ops::collective_lower();
    Mat4 h = detail::pair_hamiltonian(pair, 0.0, 0.0) - 0.5 * g * eta * (sp + sm);
    Generator16 gen;
    gen.scenario = Scenario::bad_cavity;
    gen.matrix = ops::commutator(h) + ops::lindblad(pair.gamma1, ops::lower1()) +
                 ops::lindblad(pair.gamma2, ops::lower2()) + ops::lindblad(g * g / gamma_c, sm);
    bool regime = gamma_c >= 10 * g && g >= 10 * std::max(pair.gamma1, pair.gamma2);
    gen.note = regime ? "bad-cavity regime" : "outside bad-cavity regime gamma_c >> g >> gamma";
    return gen;
}

struct EvolutionSeries {
    std::vector<double> times;
    std::vector<DensityMatrix4> states;
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

/// Raw vectorised propagation without state validation (also used for the
/// non-physical operators of the regression theorem).
inline std::vector<Vec16> propagate(const Mat16& l, const Vec16& v0, const std::vector<double>& grid,
                                    const IntegratorOptions& opt = {}) {
    auto rhs = [&l](double, const Vec16& y, Vec16& dy) { dy.noalias() = l * y; };
    return dormand_prince<Vec16>(rhs, v0, grid, opt);
}

inline EvolutionSeries evolve(const Generator16& l, const DensityMatrix4& rho0, const std::vector<double>& grid,
                              const IntegratorOptions& opt = {}) {
    DensityMatrix4::check(rho0.matrix());
    auto raw = propagate(l.matrix, ops::vec(rho0.matrix()), grid, opt);
    EvolutionSeries s;
    s.times = grid;
    s.states.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            s.states.emplace_back(ops::unvec(raw[i]));
        } catch (const ValidationError& e) {
            throw NumericalError(std::string("evolved state invalid: ") + e.what(), i ? grid[i - 1] : grid[0]);
        }
    }
    return s;
}

struct SteadyState {
    DensityMatrix4 state;
    bool degenerate = false;
    int null_dimension = 1;
};

inline Mat4 hermitian_unit_trace(const Mat4& m) {
    Mat4 h = 0.5 * (m + m.adjoint());
    return h / h.trace().real();
}

/// Null space of the generator via SVD. When the null space is degenerate the
/// state returned is the long-time limit reached from the ground state,
/// obtained from the conserved quantities (left null vectors).
inline SteadyState steady_state(const Generator16& l, double threshold = 1e-8) {
    if (l.trace_defect() > 1e-10 * std::max(1.0, l.matrix.norm()))
        throw ValidationError("generator is not trace preserving");
    Eigen::JacobiSVD<Mat16> svd(l.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double top = sv(0);
    int k = 0;
    for (int i = 15; i >= 0 && sv(i) <= threshold * top; --i) ++k;
    if (k == 0) throw NumericalError("no null vector of the generator within tolerance");
    SteadyState out;
    out.null_dimension = k;
    out.degenerate = k > 1;
    if (k == 1) {
        out.state = DensityMatrix4(hermitian_unit_trace(ops::unvec(svd.matrixV().col(15))));
        return out;
    }
    Eigen::MatrixXcd right = svd.matrixV().rightCols(k);
    Eigen::MatrixXcd left = svd.matrixU().rightCols(k);
    Vec16 ground = ops::vec(DensityMatrix4::basis(0).matrix());
    Eigen::VectorXcd coeff = (left.adjoint() * right).fullPivLu().solve(left.adjoint() * ground);
    Vec16 limit = right * coeff;
    out.state = DensityMatrix4(hermitian_unit_trace(ops::unvec(limit)));
    return out;
}

}  // namespace twoatom
