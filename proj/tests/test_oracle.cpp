#include <gtest/gtest.h>

#include <cstring>

#include "support.hpp"

using namespace qfc;

TEST(DeterministicSum, IndependentOfWorkerCount)
{
    gen::Rng r(1);
    std::vector<double> x(100003);
    for (auto& v : x)
        v = r.normal() * std::pow(10.0, r.integer(-8, 8));
    double one = oracle::deterministic_sum(x, 1);
    for (unsigned w : {2u, 3u, 4u, 7u, 16u}) {
        double s = oracle::deterministic_sum(x, w);
        EXPECT_EQ(std::memcmp(&s, &one, sizeof(double)), 0) << "workers " << w;
    }
    EXPECT_EQ(oracle::deterministic_sum({}, 4), 0.0);
}

TEST(DeterministicSum, ExactOnIntegers)
{
    std::vector<double> x;
    for (int i = 1; i <= 10000; ++i)
        x.push_back(i);
    EXPECT_EQ(oracle::deterministic_sum(x, 3), 50005000.0);
    EXPECT_EQ(oracle::pairwise_sum(x), 50005000.0);
}

TEST(Enumeration, DecodeIsLexicographicWithFirstLayerSlowest)
{
    EXPECT_EQ(oracle::decode(0, 3, 2), (std::vector<int>{0, 0}));
    EXPECT_EQ(oracle::decode(1, 3, 2), (std::vector<int>{0, 1}));
    EXPECT_EQ(oracle::decode(5, 3, 2), (std::vector<int>{1, 2}));
}

TEST(Enumeration, GuardAtTwoToTheTwentyFour)
{
    auto c = models::ising_chain(1.0, 24);
    EXPECT_THROW(oracle::enumerate_weights(c, PureBoundary{VecR::Ones(2), VecR::Ones(2)}), ValidationError);
    auto ok = models::ising_chain(1.0, 3);
    EXPECT_EQ(oracle::enumerate_weights(ok, PureBoundary{VecR::Ones(2), VecR::Ones(2)}).size(), 16u);
}

TEST(Enumeration, WeightIsProductOfStepFactorsAndBoundary)
{
    gen::Rng r(4);
    ChainSpec c = gen::classical_chain(r, 3, 2);
    PureBoundary b{gen::nonnegative(r, 3), gen::nonnegative(r, 3)};
    auto h = oracle::enumerate_weights(c, b);
    // history (2, 0, 1): q̃_in(2) S₁(0, 2) S₂(1, 0) q̄_f(1)
    const auto& e = h[2 * 9 + 0 * 3 + 1];
    ASSERT_EQ(e.layers, (std::vector<int>{2, 0, 1}));
    EXPECT_DOUBLE_EQ(e.w, b.q_in[2] * c.S(0)(0, 2) * c.S(1)(1, 0) * b.q_f[1]);
    EXPECT_NEAR(oracle::partition(h), partition_function(c, b), 1e-14);
}

TEST(OracleWave, PartialSumsEqualSweeps)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        Eigen::Index N = r.integer(2, 4);
        int G = r.integer(1, 5);
        ChainSpec c = gen::classical_chain(r, N, G);
        PureBoundary b{gen::nonnegative(r, N), gen::nonnegative(r, N)};
        auto qt = forward_sweep<double>(c, b.q_in);
        auto qb = backward_sweep<double>(c, b.q_f);
        for (int k = 0; k <= G; ++k) {
            auto o = oracle::oracle_wavefunction(c, b, k);
            EXPECT_LT(max_abs(VecR(o.q_tilde - qt[k])), 1e-13 * max_abs(qt[k])) << "seed " << seed;
            EXPECT_LT(max_abs(VecR(o.q_bar - qb[k])), 1e-13 * max_abs(qb[k])) << "seed " << seed;
        }
    }
}

TEST(OracleExpectation, LocalAndTwoTimeCorrelations)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        gen::Rng r(seed);
        Eigen::Index N = r.coin() ? 2 : 4;
        int G = r.integer(2, 4);
        ChainSpec c = gen::classical_chain(r, N, G);
        PureBoundary b{gen::nonnegative(r, N), gen::nonnegative(r, N)};
        auto h = oracle::enumerate_weights(c, b);
        auto qt = forward_sweep<double>(c, b.q_in);
        auto qb = backward_sweep<double>(c, b.q_f);
        double Z = partition_function(c, b);
        VecR a = gen::vec(r, N), bb = gen::vec(r, N);
        int k1 = r.integer(0, G - 1), k2 = r.integer(k1 + 1, G);
        double direct = qb[k2].dot(bb.asDiagonal() * chain_product(c, k1, k2) * a.asDiagonal() * qt[k1]) / Z;
        double enumerated = oracle::oracle_expectation(oracle::product(oracle::local(a, k1), oracle::local(bb, k2)), h);
        EXPECT_NEAR(direct, enumerated, 1e-12) << "seed " << seed;
        double local = qb[k1].dot(a.asDiagonal() * qt[k1]) / Z;
        EXPECT_NEAR(local, oracle::oracle_expectation(oracle::local(a, k1), h), 1e-12);
    }
}

TEST(OracleExpectation, ZeroPartitionThrows)
{
    MatR swap(2, 2);
    swap << 0, 1, 1, 0;
    auto c = uniform_chain<double>(swap, 1);
    auto h = oracle::enumerate_weights(c, PureBoundary{VecR::Unit(2, 0), VecR::Unit(2, 0)});
    EXPECT_THROW(oracle::oracle_expectation(oracle::local(VecR::Ones(2), 0), h), NumericalError);
    EXPECT_THROW(oracle::oracle_probabilities(h, 2, 0), NumericalError);
}

TEST(DoubledPartition, SquaredNormOfEvolvedState)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        gen::Rng r(seed);
        Eigen::Index N = r.integer(2, 3);
        int G = r.integer(1, 3);
        ChainSpec c = gen::classical_chain(r, N, G);
        VecR q = gen::nonnegative(r, N);
        VecR end = chain_product(c, 0, G) * q;
        EXPECT_NEAR(oracle::doubled_partition(c, q), end.squaredNorm(), 1e-13 * end.squaredNorm());

        // orthogonal chains: Z equals |q_in|² for every t_f
        ChainSpec o{N, 1.0, 0.0, {}};
        for (int k = 0; k < G; ++k)
            o.ops.push_back(gen::orthogonal(r, N));
        VecR v = gen::vec(r, N);
        EXPECT_NEAR(oracle::doubled_partition(o, v), v.squaredNorm(), 1e-12);
    }
}

TEST(BoundaryFactor, MixedAndPeriodicMatchSolvedDensity)
{
    gen::Rng r(9);
    ChainSpec c = gen::classical_chain(r, 2, 3);
    MixedBoundary m{{{0.25, gen::nonnegative(r, 2), gen::nonnegative(r, 2)},
                     {0.75, gen::nonnegative(r, 2), gen::nonnegative(r, 2)}}};
    auto h = oracle::enumerate_weights(c, m);
    EXPECT_NEAR(oracle::partition(h), 1.0, 1e-14);
    ChainSpec u = models::ising_chain(0.7, 3);
    auto hp = oracle::enumerate_weights(u, PeriodicBoundary{});
    EXPECT_NEAR(oracle::partition(hp), partition_function(u, PeriodicBoundary{}), 1e-14);
}
