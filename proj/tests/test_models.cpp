#include <gtest/gtest.h>

#include "support.hpp"

using namespace qfc;
using namespace qfc::models;

namespace {

// Δn(t) = ⟨n⟩ - ½ with n occupying the first state.
std::vector<double> delta_n(const Trajectory& tr)
{
    std::vector<double> out;
    for (const auto& s : tr.slices)
        out.push_back(s.p[0] - 0.5);
    return out;
}

BlochState random_bloch(gen::Rng& r)
{
    return {r.uniform(-1, 1), r.uniform(-1, 1), r.uniform(-1, 1)};
}

double bloch_distance(const BlochState& a, const BlochState& b)
{
    return std::max({std::abs(a.r1 - b.r1), std::abs(a.r2 - b.r2), std::abs(a.r3 - b.r3)});
}

} // namespace

TEST(Ising, SpectrumAndNormalization)
{
    for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        auto S = ising_step(beta);
        VecC want(2);
        want << 1.0, std::tanh(beta);
        EXPECT_LT(spectrum_distance(eigenvalues(S.matrix), want), 1e-14);
        EXPECT_NEAR(S.phi, std::log(2 * std::cosh(beta)), 1e-13);
        EXPECT_NEAR(std::exp(-2 * ising_omega_lattice(beta)), std::tanh(beta), 1e-15);
    }
    EXPECT_THROW(ising_step(-1.0), ValidationError);
}

TEST(Ising, ClosedFormReproducesLatticeBoundaryProblem)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        const double beta = r.uniform(0.5, 2.5);
        const int G = r.integer(10, 60);
        auto c = ising_chain(beta, G);
        auto tr = solve_boundary(c, PureBoundary{gen::nonnegative(r, 2), gen::nonnegative(r, 2)});
        auto dn = delta_n(tr);
        auto p = ising_from_boundary(dn.front(), dn.back(), ising_omega_lattice(beta), 0.0, G);
        for (int k = 0; k <= G; ++k)
            EXPECT_NEAR(ising_delta_n(p, k), dn[k], 1e-12) << "seed " << seed << " slice " << k;
    }
}

TEST(Ising, ContinuumRateIsOnlyTheLargeBetaLimit)
{
    const double beta = 2.0;
    double lat = ising_omega_lattice(beta), cont = ising_omega_continuum(beta);
    EXPECT_NEAR(lat / cont, 1.0, 1e-3);
    EXPECT_GT(std::abs(lat - cont), 1e-8);
}

TEST(Ising, SmallRateGivesLinearInterpolation)
{
    const double omega = 1e-9, t_in = 0.0, t_f = 40.0;
    for (double t = 0; t <= t_f; t += 2.5) {
        double exact = ising_delta_n_boundary(0.3, -0.1, omega, t_in, t_f, t);
        EXPECT_NEAR(exact, ising_delta_n_linear(0.3, -0.1, t_in, t_f, t), 1e-6);
    }
    EXPECT_DOUBLE_EQ(ising_delta_n_linear(0.3, -0.1, 0, 40, 0), 0.3);
    EXPECT_DOUBLE_EQ(ising_delta_n_linear(0.3, -0.1, 0, 40, 40), -0.1);
}

TEST(Ising, AnalyticDensityProperties)
{
    auto p = ising_from_boundary(0.2, 0.1, 0.05, 0.0, 10.0, 0.3);
    EXPECT_NEAR(ising_delta_n(p, 0.0), 0.2, 1e-14);
    EXPECT_NEAR(ising_delta_n(p, 10.0), 0.1, 1e-14);
    for (double t : {0.0, 3.0, 10.0}) {
        MatR rho = ising_rho(p, t);
        EXPECT_NEAR(rho.trace(), 1.0, 1e-15);
        EXPECT_NEAR(rho(0, 0) - 0.5, ising_delta_n(p, t), 1e-15);
    }
    // ∂_t ρ = [W, ρ] with W = -ω(1 - τ₁): compare with a central difference
    MatR W(2, 2);
    W << -p.omega, p.omega, p.omega, -p.omega;
    const double h = 1e-4, t = 4.0;
    MatR fd = (ising_rho(p, t + h) - ising_rho(p, t - h)) / (2 * h);
    MatR rho = ising_rho(p, t);
    EXPECT_LT(max_abs(MatR(fd - (W * rho - rho * W))), 1e-9);
    EXPECT_THROW(ising_rho(IsingAnalytic{2.0, 0, 0, 0.1, 0, 1}, 0.5), ValidationError);
    EXPECT_THROW(ising_from_boundary(0.1, 0.1, 0.0, 0.0, 1.0), ValidationError);
    EXPECT_NEAR(ising_static_density(0.4)(0, 1), 0.2, 1e-16);
}

TEST(FourState, SpectrumMatchesClosedForm)
{
    for (double eta : {0.0, 0.05, 0.2, 0.3, 0.5, 0.7, 1.0}) {
        auto S = four_state_step(eta);
        EXPECT_LT(spectrum_distance(eigenvalues(S.matrix), four_state_spectrum(eta)), 1e-12) << "η " << eta;
        EXPECT_TRUE(S.classical);
    }
    EXPECT_FALSE(four_state_step(0.5).regular);
    EXPECT_THROW(four_state_step(1.5), ValidationError);
}

TEST(FourState, RotationHasPeriodFour)
{
    gen::Rng r(3);
    auto c = four_state_chain(1.0, 12);
    auto tr = solve_boundary(c, PureBoundary{gen::nonnegative(r, 4), VecR::Ones(4)});
    for (int k = 0; k + 4 <= 12; ++k)
        EXPECT_EQ(max_abs(VecR(tr.slices[k + 4].p - tr.slices[k].p)), 0.0);
    EXPECT_GT(max_abs(VecR(tr.slices[1].p - tr.slices[0].p)), 1e-3);
    EXPECT_EQ(permutation_order(*as_permutation(four_state_V())), 4);
}

TEST(FourState, CommutingAndOscillatingOperators)
{
    const double w = 0.7;
    MatR W = four_state_W(w);
    for (const auto& B : four_state_B())
        EXPECT_LT(max_abs(commutator(W, B)), 1e-15);
    auto C = four_state_C();
    // [W, C₁] = -2ω C₂ and [W, C₂] = 2ω C₁: the C-part rotates with 2ω.
    EXPECT_LT(max_abs(MatR(commutator(W, C[0]) + 2 * w * C[1])), 1e-14);
    EXPECT_LT(max_abs(MatR(commutator(W, C[1]) - 2 * w * C[0])), 1e-14);
    MatR E = four_state_E();
    EXPECT_LT(max_abs(MatR(commutator(W, E) - 2 * w * E)), 1e-14);
}

TEST(FourState, GeneralSolutionSolvesVonNeumann)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        FourStateAnalytic k;
        for (auto& b : k.b)
            b = r.uniform(-0.1, 0.1);
        for (auto& d : k.d)
            d = r.uniform(-0.1, 0.1);
        for (auto& b : k.beta)
            b = r.uniform(0, 6);
        k.c_bar = r.uniform(-0.1, 0.1);
        k.alpha = r.uniform(0, 6);
        k.e_plus = r.uniform(-0.1, 0.1);
        k.e_minus = r.uniform(-0.1, 0.1);
        k.omega = r.uniform(0.2, 1.0);
        MatR W = four_state_W(k.omega);
        const double h = 1e-4;
        for (double t : {0.0, 0.4, 1.3}) {
            MatR rho = four_state_rho(k, t);
            MatR fd = (four_state_rho(k, t + h) - four_state_rho(k, t - h)) / (2 * h);
            EXPECT_LT(max_abs(MatR(fd - commutator(W, rho))), 1e-7) << "seed " << seed;
            EXPECT_NEAR(rho.trace(), 1.0, 1e-14);
        }
    }
}

TEST(FourState, OscillatingPairSolvesWaveEquations)
{
    const double w = 0.3, h = 1e-5;
    MatR W = four_state_W(w);
    for (double t : {0.0, 1.0, 2.5}) {
        auto p = four_state_oscillating_pair(w, 0.5, t);
        auto pp = four_state_oscillating_pair(w, 0.5, t + h), pm = four_state_oscillating_pair(w, 0.5, t - h);
        VecR dq = (pp.q_tilde - pm.q_tilde) / (2 * h);
        VecR dqb = (pp.q_bar - pm.q_bar) / (2 * h);
        EXPECT_LT(max_abs(VecR(dq - W * p.q_tilde)), 1e-9);
        EXPECT_LT(max_abs(VecR(dqb + W.transpose() * p.q_bar)), 1e-9);
        EXPECT_NEAR(p.q_bar.dot(p.q_tilde), 1.0, 1e-14);
    }
}

TEST(FourState, BulkEquilibrates)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        gen::Rng r(seed);
        const double eta = 0.1;
        const int G = 400; // ω(t_f - t_in) = 40
        auto tr = solve_boundary(four_state_chain(eta, G),
                                 PureBoundary{gen::nonnegative(r, 4), gen::nonnegative(r, 4)});
        MatR mid = tr.slices[G / 2].rho.matrix;
        EXPECT_LT(max_abs(MatR(mid - MatR::Constant(4, 4, 0.25))), 1e-6) << "seed " << seed;
    }
}

TEST(FourState, DampedOscillationHasGammaEqualOmega)
{
    const double eta = 0.02;
    const int G = 3000;
    VecR q_in(4);
    q_in << 1, 0, 0, 0;
    auto tr = solve_boundary(four_state_chain(eta, G), PureBoundary{q_in, VecR::Ones(4)});
    std::vector<double> t, x;
    for (int k = 0; k <= G / 2; ++k) {
        t.push_back(tr.slices[k].t);
        x.push_back(tr.slices[k].p[0]);
    }
    auto fit = fit_damped_oscillation(t, x, 0.25);
    EXPECT_GE(fit.extrema, 4);
    EXPECT_NEAR(fit.gamma / eta, 1.0, 0.02);
    EXPECT_NEAR(fit.frequency / eta, 1.0, 0.05);
    EXPECT_THROW(fit_damped_oscillation({0, 1}, {0, 1}, 0), NumericalError);
}

TEST(UniqueJump, PermutationsAndSigns)
{
    auto S = unique_jump_step({2, 0, 1});
    EXPECT_TRUE(S.classical);
    EXPECT_EQ(S.matrix(2, 0), 1.0);
    EXPECT_EQ(permutation_order({2, 0, 1}), 3);
    EXPECT_EQ(permutation_order({1, 0, 3, 4, 2}), 6);
    auto signed_step = unique_jump_step({1, 0}, std::vector<int>{1, -1});
    EXPECT_FALSE(signed_step.classical);
    EXPECT_EQ(signed_step.matrix(0, 1), -1.0);
    EXPECT_THROW(unique_jump_step({0, 0}), ValidationError);
    EXPECT_THROW(unique_jump_step({0, 1}, std::vector<int>{1, 2}), ValidationError);
    EXPECT_FALSE(as_permutation(four_state_step(0.3).matrix).has_value());
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        int n = r.integer(1, 7);
        std::vector<int> pi;
        for (int v : gen::permutation(r, n))
            pi.push_back(v);
        auto back = as_permutation(unique_jump_step(pi).matrix);
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(*back, pi);
        MatR S = unique_jump_step(pi).matrix;
        EXPECT_LT(max_abs(MatR(S.transpose() * S - MatR::Identity(n, n))), 1e-15);
    }
}

TEST(ThreeSpin, StateOrderIsMostSignificantFirst)
{
    EXPECT_EQ(three_spin_config(0), (Spins3{-1, -1, -1}));
    EXPECT_EQ(three_spin_config(1), (Spins3{-1, -1, 1}));
    EXPECT_EQ(three_spin_config(4), (Spins3{1, -1, -1}));
    for (int k = 0; k < 8; ++k)
        EXPECT_EQ(three_spin_index(three_spin_config(k)), k);
}

TEST(ThreeSpin, AllGatesArePositiveUniqueJumps)
{
    for (Gate g : {Gate::H, Gate::U31, Gate::UX, Gate::UY, Gate::UZ, Gate::U12, Gate::U23}) {
        auto real = three_spin_gate(g);
        EXPECT_TRUE(real.positive) << gate_name(g);
        EXPECT_TRUE(as_permutation(real.S.matrix).has_value());
        EXPECT_LT(max_abs(MatC(real.U.adjoint() * real.U - MatC::Identity(2, 2))), 1e-15);
    }
}

TEST(ThreeSpin, GateTransportMatchesConjugation)
{
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        gen::Rng r(seed);
        BlochState b = random_bloch(r);
        VecR p = product_distribution(b);
        for (Gate g : {Gate::H, Gate::U31, Gate::UX, Gate::UY, Gate::UZ, Gate::U12, Gate::U23}) {
            auto real = three_spin_gate(g);
            BlochState moved = bloch_from_probabilities(VecR(real.S.matrix * p));
            if (b.norm2() <= 1.0) {
                EXPECT_LT(bloch_distance(moved, conjugate_bloch(b, real.U)), 1e-12) << gate_name(g);
            }
        }
    }
}

TEST(ThreeSpin, U12RotatesAboutThirdAxis)
{
    BlochState b{0.3, -0.2, 0.5};
    auto out = conjugate_bloch(b, gate_unitary(Gate::U12));
    EXPECT_NEAR(out.r1, -0.2, 1e-15);
    EXPECT_NEAR(out.r2, -0.3, 1e-15);
    EXPECT_NEAR(out.r3, 0.5, 1e-15);
}

TEST(ThreeSpin, GateWordsComposeLikeUnitaries)
{
    const std::vector<Gate> all{Gate::H, Gate::U31, Gate::UX, Gate::UY, Gate::UZ, Gate::U12, Gate::U23};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        BlochState b = random_bloch(r);
        while (b.norm2() > 1.0)
            b = random_bloch(r);
        VecR p = product_distribution(b);
        MatC U = MatC::Identity(2, 2);
        for (int k = 0; k < 5; ++k) {
            Gate g = all[static_cast<std::size_t>(r.integer(0, 6))];
            auto real = three_spin_gate(g);
            p = real.S.matrix * p;
            U = real.U * U;
        }
        EXPECT_LT(bloch_distance(bloch_from_probabilities(p), conjugate_bloch(b, U)), 1e-12) << "seed " << seed;
    }
    EXPECT_EQ(parse_gate_word("H U12  UX").size(), 3u);
    EXPECT_THROW(parse_gate("CNOT"), ValidationError);
}

TEST(ThreeSpin, BlochValidation)
{
    EXPECT_THROW(product_distribution({1.5, 0, 0}), ValidationError);
    EXPECT_THROW(quantum_density_2x2({1, 1, 0}), ValidationError);
    EXPECT_TRUE((BlochState{0, 0, 1}).pure());
    VecR bad = VecR::Constant(8, 0.2);
    EXPECT_THROW(bloch_from_probabilities(bad), ValidationError);
}

namespace {

SPlParams random_spl(gen::Rng& r, double lo = 0.0)
{
    SPlParams p;
    for (double* v : {&p.a_p, &p.b_p, &p.c_p, &p.d_p, &p.a_m, &p.b_m, &p.c_m, &p.d_m})
        *v = r.uniform(lo, 0.45);
    return p;
}

double expect_diag(const VecR& p, const VecR& values) { return values.dot(p); }

} // namespace

TEST(SPl, SpectrumAndConservation)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        SPlParams prm = random_spl(r);
        MatR S = three_spin_pl(prm).matrix;
        EXPECT_LT(spectrum_distance(eigenvalues(S), spl_spectrum(prm)), 1e-12) << "seed " << seed;
        auto tr = solve_boundary(uniform_chain<double>(S, 8),
                                 PureBoundary{gen::nonnegative(r, 8), gen::nonnegative(r, 8)});
        VecR s1 = three_spin_operator(1).diagonal(), s3 = three_spin_operator(3).diagonal();
        VecR s13 = s1.cwiseProduct(s3);
        for (const auto& sl : tr.slices) {
            EXPECT_NEAR(expect_diag(sl.p, s1), expect_diag(tr.slices[0].p, s1), 1e-12);
            EXPECT_NEAR(expect_diag(sl.p, s3), expect_diag(tr.slices[0].p, s3), 1e-12);
            EXPECT_NEAR(expect_diag(sl.p, s13), expect_diag(tr.slices[0].p, s13), 1e-12);
        }
    }
}

TEST(SPl, InitialProbabilitiesInLongChains)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        SPlParams prm = random_spl(r, 0.05);
        VecR qi = gen::nonnegative(r, 8), qf = gen::nonnegative(r, 8);
        // G with every sub-unit |λ|^G below 1e-10
        double lam = 0.0;
        for (Eigen::Index i = 4; i < 8; ++i)
            lam = std::max(lam, std::abs(spl_spectrum(prm)[i]));
        int G = static_cast<int>(std::ceil(std::log(1e-12) / std::log(lam)));
        auto tr = solve_boundary(uniform_chain<double>(three_spin_pl(prm).matrix, G), PureBoundary{qi, qf});
        EXPECT_LT(max_abs(VecR(tr.slices[0].p - spl_initial_probabilities(prm, qi, qf))), 1e-8) << "seed " << seed;

        SPlParams sym = prm;
        sym.c_p = sym.a_p;
        sym.d_p = sym.b_p;
        sym.c_m = sym.a_m;
        sym.d_m = sym.b_m;
        lam = 0.0;
        for (Eigen::Index i = 4; i < 8; ++i)
            lam = std::max(lam, std::abs(spl_spectrum(sym)[i]));
        G = static_cast<int>(std::ceil(std::log(1e-12) / std::log(lam)));
        auto ts = solve_boundary(uniform_chain<double>(three_spin_pl(sym).matrix, G), PureBoundary{qi, qf});
        EXPECT_LT(max_abs(VecR(ts.slices[0].p - spl_initial_probabilities_symmetric(sym, qi, qf))), 1e-8);
    }
    EXPECT_THROW(spl_initial_probabilities_symmetric(SPlParams{0.1, 0.2, 0.3, 0.2, 0.1, 0.1, 0.1, 0.1},
                                                     VecR::Ones(8), VecR::Ones(8)),
                 ValidationError);
}

TEST(SPl, ConditionalEvolution)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        SPlParams prm;
        prm.a_m = prm.c_m = r.uniform(0.05, 0.45);
        prm.b_p = prm.d_p = r.uniform(0.05, 0.45);
        prm.b_m = prm.d_m = 1.0;
        const int G = 12;
        VecR qi = gen::nonnegative(r, 8), qf = gen::nonnegative(r, 8);
        qf[3] = qf[1]; // symmetric q̄ on the s₁s₃ = -1 pairs
        qf[6] = qf[4];
        auto c = uniform_chain<double>(three_spin_pl(prm).matrix, G);
        auto qt = forward_sweep<double>(c, qi);
        auto tr = solve_boundary(c, PureBoundary{qi, qf});
        double prev_up = INFINITY, prev_down = INFINITY;
        for (int k = 0; k < G; ++k) {
            // q̃₁, q̃₃ fixed and q̃₆ ↔ q̃₈ (1-based)
            EXPECT_EQ(qt[k + 1][0], qt[k][0]);
            EXPECT_EQ(qt[k + 1][2], qt[k][2]);
            EXPECT_EQ(qt[k + 1][5], qt[k][7]);
            EXPECT_EQ(qt[k + 1][7], qt[k][5]);
            const VecR& p = tr.slices[k].p;
            const VecR& pn = tr.slices[k + 1].p;
            EXPECT_NEAR(pn[0], p[0], 1e-14);
            EXPECT_NEAR(pn[2], p[2], 1e-14);
            // s₁ = s₃ = 1: ⟨s₂⟩ flips sign; s₁ = s₃ = -1: constant
            EXPECT_NEAR(-pn[5] + pn[7], -(-p[5] + p[7]), 1e-14);
            EXPECT_NEAR(-pn[0] + pn[2], -p[0] + p[2], 1e-14);
            // s₁s₃ = -1: each of the two pairs loses its s₂ information monotonically
            double up = std::abs(-p[1] + p[3]), down = std::abs(-p[4] + p[6]);
            EXPECT_LE(up, prev_up + 1e-15);
            EXPECT_LE(down, prev_down + 1e-15);
            prev_up = up;
            prev_down = down;
        }
    }
}

TEST(SPl, HalfParametersEraseMixedSectorInOneStep)
{
    SPlParams prm;
    prm.a_m = prm.c_m = 0.5;
    prm.b_p = prm.d_p = 0.5;
    prm.b_m = prm.d_m = 1.0;
    gen::Rng r(2);
    VecR q = gen::nonnegative(r, 8);
    VecR next = three_spin_pl(prm).matrix * q;
    EXPECT_DOUBLE_EQ(next[1], (q[1] + q[3]) / 2);
    EXPECT_DOUBLE_EQ(next[3], (q[1] + q[3]) / 2);
    EXPECT_DOUBLE_EQ(next[4], (q[4] + q[6]) / 2);
    EXPECT_DOUBLE_EQ(next[6], (q[4] + q[6]) / 2);
    EXPECT_FALSE(three_spin_pl(prm).regular);
}

TEST(Fermion, ParticleNumberConserved)
{
    for (int M = 1; M <= 6; ++M) {
        MatR S = diagonal_ising_step(M).matrix;
        MatR F = particle_number(M).asDiagonal();
        EXPECT_EQ(max_abs(commutator(S, F)), 0.0);
        EXPECT_TRUE(as_permutation(S).has_value());
    }
}

TEST(Fermion, SectorsMatchFullChain)
{
    const int M = 5;
    MatR full = diagonal_ising_step(M).matrix;
    for (int F = 0; F <= 2; ++F) {
        auto sec = diagonal_ising_sector(M, F);
        for (Eigen::Index a = 0; a < sec.N(); ++a)
            for (Eigen::Index b = 0; b < sec.N(); ++b)
                EXPECT_EQ(sec.S.matrix(a, b), full(sec.configs[a], sec.configs[b])) << "F " << F;
    }
    EXPECT_THROW(diagonal_ising_sector(M, 3), ValidationError);
}

TEST(Fermion, PairStepIsUnsignedAcrossTheWrap)
{
    const int M = 5;
    auto sec = diagonal_ising_sector(M, 2);
    gen::Rng r(6);
    VecR q = gen::vec(r, sec.N());
    MatR stepped = pair_amplitudes(sec, VecR(sec.S.matrix * q));
    MatR shifted = shift_amplitudes(pair_amplitudes(sec, q));
    for (std::size_t k = 0; k < sec.pairs.size(); ++k) {
        auto [x, y] = sec.pairs[k];
        // the pair came from (x-1, y-1); it crossed the boundary iff x = 0
        double sign = x == 0 ? -1.0 : 1.0;
        EXPECT_DOUBLE_EQ(stepped(x, y), sign * shifted(x, y));
    }
}

TEST(Fermion, PlaneWavesAndMomentum)
{
    const int M = 6;
    auto sec = diagonal_ising_sector(M, 1);
    MatC S = sec.S.matrix.cast<cplx>();
    MatC P = lattice_momentum(M);
    EXPECT_LT(max_abs(MatC(P - P.adjoint())), 1e-14);
    for (int m = 0; m < M; ++m) {
        VecC v = plane_wave(M, m);
        double k = 2 * std::acos(-1.0) * m / M;
        EXPECT_LT(max_abs(VecC(S * v - std::polar(1.0, -k) * v)), 1e-14);
    }
    Eigen::SelfAdjointEigenSolver<MatC> es(P);
    MatC expP = es.eigenvectors() * VecC((cplx(0, -1) * es.eigenvalues().cast<cplx>()).array().exp()).asDiagonal()
                * es.eigenvectors().adjoint();
    EXPECT_LT(max_abs(MatC(expP - S)), 1e-13);
    EXPECT_LE(es.eigenvalues().maxCoeff(), std::acos(-1.0) + 1e-12);
    EXPECT_GT(es.eigenvalues().minCoeff(), -std::acos(-1.0));
}
