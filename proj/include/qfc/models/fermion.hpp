#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "qfc/lattice.hpp"

// Asymmetric diagonal Ising model at β → ∞: every spin sequence is copied one site to the right
// per step, so the particle number F = Σ_x n(x) is conserved.
namespace qfc::models {

// Full 2^M step on site occupations: n′(x + 1) = n(x), periodic in x.
inline StepOperator diagonal_ising_step(int M_x)
{
    require(M_x >= 1 && M_x <= 20, "diagonal Ising: site count must lie in [1, 20]");
    const std::uint32_t N = 1u << M_x;
    MatR S = MatR::Zero(N, N);
    for (std::uint32_t t = 0; t < N; ++t) {
        std::uint32_t shifted = ((t << 1) | (t >> (M_x - 1))) & (N - 1);
        S(shifted, t) = 1.0;
    }
    return make_step(S);
}

inline VecR particle_number(int M_x)
{
    VecR F(std::size_t{1} << M_x);
    for (Eigen::Index t = 0; t < F.size(); ++t)
        F[t] = static_cast<double>(__builtin_popcount(static_cast<unsigned>(t)));
    return F;
}

struct FermionSector {
    int M_x = 0;
    int F = 0;
    std::vector<std::pair<int, int>> pairs; // F = 2 basis: ordered pairs x < y
    StepOperator S;
    std::vector<std::uint32_t> configs; // occupation configuration of each sector state

    Eigen::Index N() const { return S.N(); }
};

inline std::uint32_t sector_config(int M_x, const std::vector<int>& sites)
{
    std::uint32_t c = 0;
    for (int x : sites)
        c |= 1u << (((x % M_x) + M_x) % M_x);
    return c;
}

// F = 1: q(t+ε, x) = q(t, x-ε). F = 2: stored once on x < y; the antisymmetric amplitude is
// q(x, y) = -q(y, x).
inline FermionSector diagonal_ising_sector(int M_x, int F)
{
    require(M_x >= 1, "fermion sector: need at least one site");
    require(F >= 0, "fermion sector: F must be nonnegative");
    if (F > 2)
        throw ValidationError("fermion sector: F > 2 is not supported");
    require(F <= M_x, "fermion sector: more particles than sites");
    FermionSector s;
    s.M_x = M_x;
    s.F = F;
    if (F == 0) {
        s.configs = {0};
        s.S = make_step(MatR::Identity(1, 1));
        return s;
    }
    if (F == 1) {
        MatR S = MatR::Zero(M_x, M_x);
        for (int x = 0; x < M_x; ++x) {
            S((x + 1) % M_x, x) = 1.0;
            s.configs.push_back(sector_config(M_x, {x}));
        }
        s.S = make_step(S);
        return s;
    }
    for (int x = 0; x < M_x; ++x)
        for (int y = x + 1; y < M_x; ++y) {
            s.pairs.emplace_back(x, y);
            s.configs.push_back(sector_config(M_x, {x, y}));
        }
    auto index_of = [&](int x, int y) {
        if (x > y)
            std::swap(x, y);
        for (std::size_t k = 0; k < s.pairs.size(); ++k)
            if (s.pairs[k] == std::make_pair(x, y))
                return static_cast<Eigen::Index>(k);
        throw ValidationError("fermion sector: pair not found");
    };
    const auto P = static_cast<Eigen::Index>(s.pairs.size());
    MatR S = MatR::Zero(P, P);
    for (Eigen::Index k = 0; k < P; ++k) {
        auto [x, y] = s.pairs[k];
        S(index_of((x + 1) % M_x, (y + 1) % M_x), k) = 1.0;
    }
    s.S = make_step(S);
    return s;
}

// Antisymmetric F = 2 amplitude matrix Q(x, y) from the stored pair components.
inline MatR pair_amplitudes(const FermionSector& s, const VecR& q)
{
    require(s.F == 2, "pair_amplitudes: F = 2 sector required");
    require(q.size() == static_cast<Eigen::Index>(s.pairs.size()), "pair_amplitudes: vector length");
    MatR Q = MatR::Zero(s.M_x, s.M_x);
    for (std::size_t k = 0; k < s.pairs.size(); ++k) {
        auto [x, y] = s.pairs[k];
        Q(x, y) = q[static_cast<Eigen::Index>(k)];
        Q(y, x) = -q[static_cast<Eigen::Index>(k)];
    }
    return Q;
}

// Antisymmetric evolution q(t+ε; x, y) = q(t; x-ε, y-ε) of the amplitude matrix.
inline MatR shift_amplitudes(const MatR& Q)
{
    const auto M = Q.rows();
    MatR out(M, M);
    for (Eigen::Index x = 0; x < M; ++x)
        for (Eigen::Index y = 0; y < M; ++y)
            out(x, y) = Q((x + M - 1) % M, (y + M - 1) % M);
    return out;
}

// Lattice momentum of the F = 1 sector with exp(-i P ε) equal to the shift, eigenvalues k ∈ (-π/ε, π/ε].
inline MatC lattice_momentum(int M_x, double eps = 1.0)
{
    require(M_x >= 1 && eps > 0.0, "lattice_momentum: invalid lattice");
    const double two_pi = 2 * std::acos(-1.0);
    MatC P = MatC::Zero(M_x, M_x);
    for (int m = 0; m < M_x; ++m) {
        double k = two_pi * m / (M_x * eps);
        if (k * eps > two_pi / 2 + 1e-12)
            k -= two_pi / eps;
        VecC v(M_x);
        for (int x = 0; x < M_x; ++x)
            v[x] = std::polar(1.0 / std::sqrt(static_cast<double>(M_x)), k * x * eps);
        P += k * v * v.adjoint();
    }
    return P;
}

// Continuum generator W = -iP.
inline MatC fermion_generator(int M_x, double eps = 1.0) { return cplx(0, -1) * lattice_momentum(M_x, eps); }

inline VecC plane_wave(int M_x, int m, double eps = 1.0)
{
    const double k = 2 * std::acos(-1.0) * m / (M_x * eps);
    VecC v(M_x);
    for (int x = 0; x < M_x; ++x)
        v[x] = std::polar(1.0, k * x * eps);
    return v;
}

} // namespace qfc::models
