#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "observables.hpp"

namespace twoatom {

/// Non-Hermitian no-jump Hamiltonian H - (i/2) K with K = sum_ij G_ij S_i^+ S_j^-.
struct ConditionalHamiltonian {
    Mat4 matrix = Mat4::Zero();
    Mat4 decay = Mat4::Zero();  // K
    cplx c12{0.0, 0.0};         // Gamma12 + 2i Omega12
};

inline ConditionalHamiltonian conditional_hamiltonian(const AtomPairConfig& pair, const DriveField& drive) {
    validate(pair);
    auto c = pair_couplings(pair);
    ConditionalHamiltonian hc;
    hc.c12 = cplx(c.gamma12, 2 * c.omega12);
    hc.decay = emission_operator(pair);
    using namespace ops;
    Mat4 diag = (-pair.delta - drive.detuning) * number(0) + (pair.delta - drive.detuning) * number(1);
    hc.matrix = diag + drive_hamiltonian(drive, pair) - 0.5 * I * (pair.gamma1 * number(0) + pair.gamma2 * number(1));
    hc.matrix += hc.c12 / (2.0 * I) * (raise1() * lower2() + raise2() * lower1());
    return hc;
}

struct ResetResult {
    Mat4 matrix;
    double rate = 0.0;
};

inline ResetResult reset_state(const DensityMatrix4& rho, const AtomPairConfig& pair) {
    double g12 = collective_damping(pair);
    const Mat4 low[2] = {ops::lower1(), ops::lower2()};
    const double g[2][2] = {{pair.gamma1, g12}, {g12, pair.gamma2}};
    ResetResult r;
    r.matrix = Mat4::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.matrix += g[i][j] * low[j] * rho.matrix() * low[i].adjoint();
    r.rate = r.matrix.trace().real();
    return r;
}

/// Jump operators from diagonalising the 2x2 damping matrix.
inline std::vector<Mat4> jump_channels(const AtomPairConfig& pair) {
    double g12 = collective_damping(pair);
    Eigen::Matrix2d g;
    g << pair.gamma1, g12, g12, pair.gamma2;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(g);
    std::vector<Mat4> out;
    for (int k = 1; k >= 0; --k) {
        double lam = std::max(0.0, es.eigenvalues()(k));
        if (lam == 0.0) continue;
        auto w = es.eigenvectors().col(k);
        out.push_back(std::sqrt(lam) * (w(0) * ops::lower1() + w(1) * ops::lower2()));
    }
    return out;
}

/// exp(-i H_c t) through the eigendecomposition of H_c, or a dense matrix
/// exponential when H_c is defective.
class NoJumpPropagator {
public:
    explicit NoJumpPropagator(const ConditionalHamiltonian& hc) : hc_(hc) {
        Eigen::ComplexEigenSolver<Mat4> es(hc.matrix);
        v_ = es.eigenvectors();
        lambda_ = es.eigenvalues();
        Eigen::FullPivLU<Mat4> lu(v_);
        defective_ = !lu.isInvertible() || lu.rcond() < 1e-10;
        if (!defective_) vinv_ = lu.inverse();
    }

    bool defective() const { return defective_; }

    const Vec4& eigenvalues() const { return lambda_; }

    Vec4 coefficients(const Vec4& psi) const { return defective_ ? psi : Vec4(vinv_ * psi); }

    Vec4 state(const Vec4& coeff, double t) const {
        if (defective_) return Mat4((-I * t * hc_.matrix).exp()) * coeff;
        Vec4 e;
        for (int k = 0; k < 4; ++k) e(k) = coeff(k) * std::exp(-I * lambda_(k) * t);
        return v_ * e;
    }

    Vec4 evolve(const Vec4& psi, double t) const { return state(coefficients(psi), t); }

    double survival(const Vec4& coeff, double t) const { return state(coeff, t).squaredNorm(); }

    /// -dP/dt = <psi(t)| K |psi(t)>
    double density(const Vec4& coeff, double t) const {
        Vec4 s = state(coeff, t);
        return (s.adjoint() * hc_.decay * s)(0, 0).real();
    }

private:
    ConditionalHamiltonian hc_;
    Mat4 v_, vinv_;
    Vec4 lambda_;
    bool defective_ = false;
};

inline double no_jump_probability(const Vec4& psi0, double t, const ConditionalHamiltonian& hc) {
    if (t < 0) throw ValidationError("time must be non-negative");
    NoJumpPropagator p(hc);
    return p.survival(p.coefficients(psi0), t);
}

inline double waiting_time_density(const Vec4& psi0, double t, const ConditionalHamiltonian& hc) {
    if (t < 0) throw ValidationError("time must be non-negative");
    NoJumpPropagator p(hc);
    return std::max(0.0, p.density(p.coefficients(psi0), t));
}

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::size_t index = 0;
    std::vector<double> jump_times;
    std::vector<int> channels;
    std::vector<Vec4> post_jump_states;
    Vec4 final_state = Vec4::Zero();
};

/// "seed jump_count t1,t2,..." with 9 decimals per jump time.
inline std::string to_text_line(const TrajectoryRecord& r) {
    std::string s = std::to_string(r.seed) + " " + std::to_string(r.jump_times.size()) + " ";
    char buf[64];
    for (std::size_t i = 0; i < r.jump_times.size(); ++i) {
        auto res = std::to_chars(buf, buf + sizeof buf, r.jump_times[i], std::chars_format::fixed, 9);
        if (i) s += ',';
        s.append(buf, res.ptr);
    }
    return s;
}

struct TrajectoryOptions {
    unsigned workers = 0;  // 0: hardware concurrency, capped by TWOATOM_WORKERS
    std::size_t max_jumps = 1'000'000;
    bool keep_states = true;
};

struct PartialResultError : NumericalError {
    std::size_t completed = 0;
    PartialResultError(const std::string& what, std::size_t done) : NumericalError(what), completed(done) {}
};

struct TrajectoryEnsemble {
    std::vector<double> times;
    std::vector<Mat4> mean_rho;
    std::vector<std::array<double, 4>> population_mean, population_stderr;
    std::vector<double> emission_rate_mean, emission_rate_stderr;
    std::vector<TrajectoryRecord> records;
};

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("TWOATOM_WORKERS")) {
        int c = std::atoi(cap);
        if (c > 0) n = std::min(n, static_cast<unsigned>(c));
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

/// Independent stream key for trajectory `index` under `seed`.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

namespace detail {

inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Pure initial state drawn from the spectral decomposition of rho0.
inline Vec4 sample_initial(const DensityMatrix4& rho0, std::mt19937_64& gen) {
    Eigen::SelfAdjointEigenSolver<Mat4> es(0.5 * (rho0.matrix() + rho0.matrix().adjoint()));
    double u = uniform01(gen), acc = 0.0;
    for (int k = 3; k >= 0; --k) {
        acc += std::max(0.0, es.eigenvalues()(k));
        if (u < acc || k == 0) return es.eigenvectors().col(k);
    }
    return es.eigenvectors().col(3);
}

struct TrajectoryResult {
    TrajectoryRecord record;
    std::vector<Vec4> samples;  // normalised state at each grid time
    bool exhausted = false;
};

inline TrajectoryResult run_one(const NoJumpPropagator& prop, const std::vector<Mat4>& channels,
                                const DensityMatrix4& rho0, const std::vector<double>& grid, std::uint64_t seed,
                                std::size_t index, const TrajectoryOptions& opt) {
    TrajectoryResult res;
    res.record.seed = stream_seed(seed, index);
    res.record.index = index;
    std::mt19937_64 gen(res.record.seed);
    Vec4 psi = sample_initial(rho0, gen);
    double t = grid.front();
    const double horizon = grid.back();
    std::size_t next = 0;
    res.samples.reserve(grid.size());
    while (true) {
        Vec4 coeff = prop.coefficients(psi);
        double xi = 1.0 - uniform01(gen);
        double span = horizon - t;
        bool jumps = prop.survival(coeff, span) < xi;
        double tau = span;
        if (jumps) {
            double lo = 0.0, hi = span;
            for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
                double mid = 0.5 * (lo + hi);
                (prop.survival(coeff, mid) < xi ? hi : lo) = mid;
            }
            tau = 0.5 * (lo + hi);
        }
        while (next < grid.size() && (grid[next] < t + tau || (!jumps && grid[next] <= horizon))) {
            Vec4 s = prop.state(coeff, grid[next] - t);
            res.samples.push_back(s / s.norm());
            ++next;
        }
        if (!jumps) {
            Vec4 s = prop.state(coeff, span);
            res.record.final_state = s / s.norm();
            return res;
        }
        Vec4 s = prop.state(coeff, tau);
        s /= s.norm();
        std::vector<double> w(channels.size());
        double total = 0.0;
        for (std::size_t k = 0; k < channels.size(); ++k) total += (w[k] = (channels[k] * s).squaredNorm());
        double u = uniform01(gen) * total, acc = 0.0;
        std::size_t pick = channels.size() - 1;
        for (std::size_t k = 0; k < channels.size(); ++k) {
            acc += w[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        psi = channels[pick] * s;
        psi /= psi.norm();
        t += tau;
        res.record.jump_times.push_back(t);
        res.record.channels.push_back(static_cast<int>(pick));
        if (opt.keep_states) res.record.post_jump_states.push_back(psi);
        if (res.record.jump_times.size() >= opt.max_jumps) {
            res.exhausted = true;
            res.record.final_state = psi;
            while (res.samples.size() < grid.size()) res.samples.push_back(psi);
            return res;
        }
    }
}

}  // namespace detail

inline TrajectoryEnsemble run_trajectories(const AtomPairConfig& pair, const DriveField& drive,
                                           const DensityMatrix4& rho0, std::size_t n_traj, std::uint64_t seed,
                                           const std::vector<double>& grid, const TrajectoryOptions& opt = {}) {
    if (n_traj < 1) throw ValidationError("n_traj must be at least 1");
    if (grid.empty()) throw ValidationError("time grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ValidationError("time grid must be strictly increasing");
    auto hc = conditional_hamiltonian(pair, drive);
    NoJumpPropagator prop(hc);
    auto channels = jump_channels(pair);

    std::vector<detail::TrajectoryResult> results(n_traj);
    std::atomic<std::size_t> cursor{0};
    auto work = [&] {
        for (std::size_t i = cursor++; i < n_traj; i = cursor++)
            results[i] = detail::run_one(prop, channels, rho0, grid, seed, i, opt);
    };
    unsigned nw = worker_count(opt.workers, n_traj);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    TrajectoryEnsemble ens;
    ens.times = grid;
    const std::size_t ng = grid.size();
    ens.mean_rho.assign(ng, Mat4::Zero());
    std::vector<std::array<double, 4>> sum2(ng, {0, 0, 0, 0});
    ens.population_mean.assign(ng, {0, 0, 0, 0});
    ens.population_stderr.assign(ng, {0, 0, 0, 0});
    ens.emission_rate_mean.assign(ng, 0.0);
    ens.emission_rate_stderr.assign(ng, 0.0);
    std::vector<double> rate2(ng, 0.0);
    std::size_t exhausted = 0;
    for (auto& r : results) {
        exhausted += r.exhausted;
        for (std::size_t g = 0; g < ng; ++g) {
            const Vec4& s = r.samples[g];
            ens.mean_rho[g] += s * s.adjoint();
            for (int k = 0; k < 4; ++k) {
                double p = std::norm(s(k));
                ens.population_mean[g][k] += p;
                sum2[g][k] += p * p;
            }
            double rate = (s.adjoint() * hc.decay * s)(0, 0).real();
            ens.emission_rate_mean[g] += rate;
            rate2[g] += rate * rate;
        }
        ens.records.push_back(std::move(r.record));
    }
    const double n = static_cast<double>(n_traj);
    auto stderr_of = [n](double s1, double s2) {
        if (n < 2) return 0.0;
        double mean = s1 / n;
        double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1));
        return std::sqrt(var / n);
    };
    for (std::size_t g = 0; g < ng; ++g) {
        for (int k = 0; k < 4; ++k) {
            ens.population_stderr[g][k] = stderr_of(ens.population_mean[g][k], sum2[g][k]);
            ens.population_mean[g][k] /= n;
        }
        ens.emission_rate_stderr[g] = stderr_of(ens.emission_rate_mean[g], rate2[g]);
        ens.emission_rate_mean[g] /= n;
        ens.mean_rho[g] /= n;
    }
    if (exhausted) throw PartialResultError("jump budget exceeded in " + std::to_string(exhausted) + " trajectories",
                                            n_traj - exhausted);
    return ens;
}

}  // namespace twoatom
