#include "test_support.hpp"

using namespace twoatom;
using namespace twoatom::oracle;
using twoatom::testing::uniform;

TEST(OracleSteady, DickeStrongFieldLimit) {
    Params p;
    p.rabi = 1e4;
    auto r = driven_dicke(p);
    EXPECT_NEAR(r.s11, 0.5, 1e-7);
    EXPECT_NEAR(r.s12, 1.0 / 6, 1e-7);
    // 2 Gamma (s11 + s12) = 4/3
    EXPECT_NEAR(2 * (r.s11 + r.s12), 4.0 / 3, 1e-6);
}

TEST(OracleSteady, SqueezedDicke) {
    Params p;
    p.n = 0.3;
    p.m = std::sqrt(p.n * (p.n + 1));
    auto q = squeezed_dicke_quantum(p);
    EXPECT_EQ(q.rho_ss, 0.0);
    EXPECT_NEAR(q.rho_ee, 0.3 / 1.6, 1e-15);
    auto general = squeezed_dicke(p);
    EXPECT_NEAR(general.rho_ss, 0.0, 1e-15);
    EXPECT_NEAR(general.rho_ee, q.rho_ee, 1e-14);
    p.m = p.n;
    auto c = squeezed_dicke_classical(p);
    EXPECT_NEAR(c.rho_ss, 0.3 / 1.9, 1e-15);
    EXPECT_NEAR(squeezed_dicke(p).rho_ss, c.rho_ss, 1e-14);
    EXPECT_NEAR(squeezed_dicke(p).rho_ee, c.rho_ee, 1e-14);
}

TEST(OracleSteady, ExtendedPopulationsSumToOne) {
    for (int k = 0; k < 500; ++k) {
        Params p;
        p.n = uniform(0, 10);
        p.m = uniform(0, std::sqrt(p.n * (p.n + 1)));
        p.a = uniform(0, 0.999);
        auto r = squeezed_extended(p);
        EXPECT_NEAR(r.rho_gg + r.rho_ss + r.rho_aa + r.rho_ee, 1.0, 1e-12);
        for (double x : {r.rho_gg, r.rho_ss, r.rho_aa, r.rho_ee, r.rho_u}) EXPECT_TRUE(std::isfinite(x));
        EXPECT_GE(r.rho_gg, -1e-12);
    }
}

TEST(OracleSteady, NonidenticalHasEqualOneExcitationPopulations) {
    for (int k = 0; k < 100; ++k) {
        Params p;
        p.n = uniform(0, 5);
        p.m = uniform(0, std::sqrt(p.n * (p.n + 1)));
        p.a = uniform(0, 1);
        auto r = squeezed_nonidentical(p);
        EXPECT_EQ(r.rho_ss, r.rho_aa);
        EXPECT_NEAR(r.rho_gg + r.rho_ss + r.rho_aa + r.rho_ee, 1.0, 1e-12);
    }
}

TEST(OracleSteady, ExtendedUncorrelatedAtoms) {
    // a = 0: no cross damping, so <S1+ S2-> = 0 and the one-excitation states are equally populated
    Params p;
    p.n = 0.4;
    p.m = 0.5;
    auto e = squeezed_extended(p);
    EXPECT_NEAR(e.rho_ss, e.rho_aa, 1e-14);
    // the limit a -> 1 keeps the antisymmetric state populated, unlike the Dicke solution
    p.a = 1.0;
    EXPECT_GT(squeezed_extended(p).rho_aa, 0.01);
    EXPECT_EQ(squeezed_dicke(p).rho_aa, 0.0);
}

TEST(OracleSteady, FormulaNames) {
    EXPECT_EQ(steady_formula_from_string("squeezed_extended"), SteadyFormula::squeezed_extended);
    EXPECT_THROW(steady_formula_from_string("nope"), ValidationError);
    Params p;
    p.detuning = 1.0;
    EXPECT_FALSE(validity(SteadyFormula::driven_extended, p).deep());
}

TEST(OracleSteady, CollectiveFormulaReducesToResonantCorrelations) {
    // the collective-state solution at Delta_L = 0 reproduces the resonant
    // atomic correlations of the extended-atom solution
    for (int k = 0; k < 50; ++k) {
        Params p;
        p.gamma12 = uniform(-0.2, 0.99);
        p.omega12 = uniform(-5, 5);
        p.rabi = uniform(0.1, 5);
        auto c = driven_collective(p);
        auto r = driven_extended(p);
        // <S1+ S1-> = rho_ee + (rho_ss + rho_aa) / 2 and <S1+ S2-> = (rho_ss - rho_aa) / 2
        EXPECT_NEAR(c.rho_ee + 0.5 * (c.rho_ss + c.rho_aa), r.s11, 1e-12);
        EXPECT_NEAR(0.5 * (c.rho_ss - c.rho_aa), r.s12, 1e-12);
    }
}

TEST(OracleIntensity, BeatsAtTimeZero) {
    Params p;
    p.gamma12 = 0.8;
    p.omega12 = 4.0;
    p.delta = -2.0;
    EXPECT_NEAR(beats_detuned(p, 0.0), 1.0 + p.delta * p.gamma12 / (2 * p.omega12), 1e-15);
    EXPECT_NEAR(validity(IntensityFormula::beats_detuned, p).margin, 2.0, 1e-15);
}

TEST(OracleIntensity, EqualRatesHaveNoBeats) {
    Params p;
    p.gamma12 = 0.5;
    p.omega12 = 7.0;
    Params q = p;
    q.omega12 = 3.0;
    for (double t : {0.1, 0.7, 2.0})
        EXPECT_NEAR(beats_unequal_damping(p, t), beats_unequal_damping(q, t), 1e-15);
}

TEST(OracleIntensity, SelectiveExcitationPreparesSymmetricState) {
    Params p;
    p.rabi = 0.3;
    double t = pi / (std::numbers::sqrt2 * p.rabi);
    EXPECT_NEAR(analytic_intensity(IntensityFormula::selective_excitation, p, t), 1.0, 1e-15);
}

TEST(OracleG2, DickeStrong) {
    Params p;
    p.rabi = 50;
    EXPECT_NEAR(dicke_strong(p, 0.0), 0.75, 1e-15);
    EXPECT_NEAR(dicke_strong(p, 200.0), 1.0, 1e-15);
    EXPECT_TRUE(validity(G2Formula::dicke_strong, p).deep());
}

TEST(OracleG2, WeakDriveSubstitution) {
    Params p;
    p.gamma12 = 0.6;
    p.detuning = 10 * (1 + 0.6) / 2;
    EXPECT_NEAR(weak_drive_detuned(p), 0.01, 1e-15);
}

TEST(OracleG2, UWNormalisationAtResonance) {
    Params p;
    p.rabi = 1e3;
    auto uw = steady_u_w(p);
    EXPECT_NEAR(uw.u, 0.25, 1e-5);
    EXPECT_NEAR(uw.w, 0.0, 1e-5);
}

TEST(OracleVariance, InPhaseStartsAtZero) {
    Params p;
    p.rabi = 100;
    EXPECT_NEAR(dicke_in_phase(p, 0.0), 0.0, 1e-15);
    EXPECT_NEAR(dicke_out_of_phase(p, 0.0), 0.0, 1e-15);
}

TEST(OracleVariance, OutOfPhaseNeverNegative) {
    Params p;
    p.rabi = 100;
    double lowest = 1.0;
    for (double t = 1e-4; t < 20; t += 1e-4) lowest = std::min(lowest, dicke_out_of_phase(p, t));
    EXPECT_GE(lowest, 0.0);
}

TEST(OracleVariance, InPhaseDipsBelowZero) {
    Params p;
    p.rabi = 100;
    double lowest = 1.0;
    for (double t = 1e-5; t < 1; t += 1e-5) lowest = std::min(lowest, dicke_in_phase(p, t));
    EXPECT_LT(lowest, -0.05);
}

TEST(OracleVariance, TwoPhotonResonanceDispersionCrossesZero) {
    Params p;
    p.rabi = 3;
    p.omega12 = 60;
    EXPECT_NEAR(two_photon_resonance(p, 0.0), 0.0, 1e-15);
    p.detuning = 0.5;
    EXPECT_GT(two_photon_resonance(p, 0.0), 0.0);
    p.detuning = -0.5;
    EXPECT_LT(two_photon_resonance(p, 0.0), 0.0);
}

TEST(OracleVisibility, Limits) {
    Params p;
    EXPECT_NEAR(visibility_driven(p), 1.0, 1e-15);
    p.rabi = 1.0;
    EXPECT_NEAR(visibility_driven(p), 1.0 / 3, 1e-15);
    Params s;
    s.a = 1.0;
    s.n = 1e3;
    s.m = std::sqrt(s.n * (s.n + 1));
    // a = 1 reduces to -2 (N + 1) / (4 N + 3)
    EXPECT_NEAR(visibility_squeezed(s), -2 * (s.n + 1) / (4 * s.n + 3), 1e-8);
}

TEST(OracleFinite, GridOverValidityDomains) {
    for (int k = 0; k < 1000; ++k) {
        Params p;
        p.gamma12 = uniform(-0.3, 0.99);
        p.omega12 = uniform(-20, 20);
        p.delta = uniform(-5, 5);
        p.rabi = uniform(0, 20);
        p.detuning = uniform(-20, 20);
        p.n = uniform(0, 10);
        p.m = uniform(0, std::sqrt(p.n * (p.n + 1)));
        p.a = uniform(0, 0.99);
        p.t = uniform(0, 3);
        p.kr1 = uniform(-6, 6);
        p.kr2 = uniform(-6, 6);
        double tau = uniform(0, 5);
        auto finite = [](double x) { return std::isfinite(x); };
        auto c = driven_collective(p);
        EXPECT_TRUE(finite(c.rho_ss) && finite(std::abs(c.rho_sg)));
        EXPECT_TRUE(finite(driven_extended(p).s11));
        EXPECT_TRUE(finite(squeezed_nonidentical(p).rho_ee));
        EXPECT_TRUE(finite(analytic_g2(G2Formula::steady_zero_delay, p, 0)));
        EXPECT_TRUE(finite(two_time_identical(p, tau)));
        EXPECT_TRUE(finite(two_time_nonidentical(p, tau)));
        EXPECT_TRUE(finite(dicke_in_phase(p, tau)));
        if (p.n > 0) {
            EXPECT_TRUE(finite(visibility_squeezed(p)));
        }
        if (p.omega12 != 0) {
            EXPECT_TRUE(finite(beats_detuned(p, tau)));
            EXPECT_TRUE(finite(two_photon_resonance(p, tau)));
        }
    }
}

TEST(EntangledStates, TwoPhotonEntangledState) {
    for (double n : {0.0, 0.05, 0.5, 5.0}) {
        Vec4 psi = tpe_state(n);
        EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
        EXPECT_LT(annihilation_residual(n, 0.0, psi), 1e-14);
        auto d = entangled_eigenstates(DensityMatrix4::pure(psi));
        EXPECT_TRUE(d.block_structured);
        EXPECT_NEAR(d.populations[0], 1.0, 1e-12);
        EXPECT_NEAR(std::abs(d.states[0].dot(psi)), 1.0, 1e-12);
    }
    EXPECT_NEAR(std::abs(tpe_state(0.0)(0)), 1.0, 1e-15);
}

TEST(EntangledStates, NonBlockStateFallsBack) {
    auto rho = twoatom::testing::random_state();
    auto d = entangled_eigenstates(rho);
    EXPECT_FALSE(d.block_structured);
    EXPECT_FALSE(d.warning.empty());
    double sum = 0;
    for (double p : d.populations) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ProjectedPhase, AxisAndPerpendicular) {
    EXPECT_NEAR(projected_phase(0.25, pi / 2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(projected_phase(0.25, 0.0)), pi / 2, 1e-15);
}
