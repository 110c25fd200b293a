#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "qfc/qfc.hpp"

// Hand-rolled generators for the property tests. Every case draws from its own seeded stream so a
// failure names the seed that reproduces it.
namespace gen {

using namespace qfc;

struct Rng {
    std::mt19937_64 eng;

    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
    bool coin() { return integer(0, 1) == 1; }
};

inline MatR dense(Rng& r, Eigen::Index n, Eigen::Index m, double scale = 1.0)
{
    MatR a(n, m);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a.data()[i] = scale * r.normal();
    return a;
}

inline MatR square(Rng& r, Eigen::Index n, double scale = 1.0) { return dense(r, n, n, scale); }

inline VecR vec(Rng& r, Eigen::Index n, double scale = 1.0)
{
    VecR v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = scale * r.normal();
    return v;
}

inline VecR nonnegative(Rng& r, Eigen::Index n, double lo = 0.05, double hi = 1.0)
{
    VecR v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = r.uniform(lo, hi);
    return v;
}

inline VecC cvec(Rng& r, Eigen::Index n)
{
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = cplx(r.normal(), r.normal());
    return v;
}

// Elementwise positive, normalized to spectral radius one, kept away from singular.
inline MatR classical_step(Rng& r, Eigen::Index n)
{
    MatR s(n, n);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s.data()[i] = r.uniform(0.05, 1.0);
    s += 0.5 * MatR::Identity(n, n);
    return normalize_step(s).matrix;
}

// Positive step close to the identity, so long products stay well conditioned.
inline MatR mild_step(Rng& r, Eigen::Index n)
{
    MatR s(n, n);
    for (Eigen::Index i = 0; i < s.size(); ++i)
        s.data()[i] = r.uniform(0.0, 0.3);
    s += MatR::Identity(n, n);
    return normalize_step(s).matrix;
}

// Well conditioned invertible matrix.
inline MatR invertible(Rng& r, Eigen::Index n)
{
    return square(r, n, 0.4) + 2.0 * MatR::Identity(n, n);
}

inline MatR orthogonal(Rng& r, Eigen::Index n)
{
    Eigen::HouseholderQR<MatR> qr(square(r, n));
    MatR q = qr.householderQ();
    return q;
}

inline MatC unitary(Rng& r, Eigen::Index n)
{
    MatC a(n, n);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a.data()[i] = cplx(r.normal(), r.normal());
    Eigen::HouseholderQR<MatC> qr(a);
    MatC q = qr.householderQ();
    return q;
}

inline std::vector<int> permutation(Rng& r, int n)
{
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        p[i] = i;
    std::shuffle(p.begin(), p.end(), r.eng);
    return p;
}

inline ChainSpec classical_chain(Rng& r, Eigen::Index n, int G, bool t_dependent = true)
{
    ChainSpec c{n, 1.0, 0.0, {}};
    MatR s = classical_step(r, n);
    for (int k = 0; k < G; ++k)
        c.ops.push_back(t_dependent ? classical_step(r, n) : s);
    return c;
}

} // namespace gen
