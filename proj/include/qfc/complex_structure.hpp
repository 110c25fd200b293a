#pragma once

#include <utility>
#include <vector>

#include "qfc/evolution.hpp"

namespace qfc {

// Pairs real components (R_k, I_k) into complex components ψ_k = q_{R_k} + i q_{I_k}.
struct ComplexStructure {
    Eigen::Index N = 0;
    std::vector<std::pair<int, int>> pairing;
    MatR I; // I² = -1

    Eigen::Index half() const { return N / 2; }
};

inline ComplexStructure build_complex_structure(Eigen::Index N, const std::vector<std::pair<int, int>>& pairing)
{
    require(N > 0 && N % 2 == 0, "complex structure needs an even number of components");
    require(static_cast<Eigen::Index>(pairing.size()) == N / 2, "pairing must have N/2 pairs");
    std::vector<int> seen(static_cast<std::size_t>(N), 0);
    for (auto [r, i] : pairing) {
        require(r >= 0 && r < N && i >= 0 && i < N, "pairing index out of range");
        ++seen[r];
        ++seen[i];
    }
    for (int c : seen)
        require(c == 1, "pairing must be a bijection");
    ComplexStructure cs{N, pairing, MatR::Zero(N, N)};
    for (auto [r, i] : pairing) {
        cs.I(i, r) = 1.0;
        cs.I(r, i) = -1.0;
    }
    return cs;
}

// Default pairing (k, k + N/2), i.e. W = [[W1, W2], [-W2, W1]] in the natural block order.
inline ComplexStructure block_complex_structure(Eigen::Index N)
{
    std::vector<std::pair<int, int>> p;
    for (int k = 0; k < N / 2; ++k)
        p.emplace_back(k, static_cast<int>(k + N / 2));
    return build_complex_structure(N, p);
}

inline double incompatibility(const MatR& W, const ComplexStructure& cs)
{
    require(W.rows() == cs.N && W.cols() == cs.N, "operator and complex structure sizes differ");
    return max_abs(MatR(W * cs.I - cs.I * W));
}

inline bool compatible(const MatR& W, const ComplexStructure& cs, double tolerance = 1e-12)
{
    return incompatibility(W, cs) <= tolerance;
}

// Blocks W1 = W(R,R) and W2 = W(R,I) of a compatible operator.
inline std::pair<MatR, MatR> complex_blocks(const MatR& W, const ComplexStructure& cs)
{
    Eigen::Index h = cs.half();
    MatR W1(h, h), W2(h, h);
    for (Eigen::Index a = 0; a < h; ++a)
        for (Eigen::Index b = 0; b < h; ++b) {
            W1(a, b) = W(cs.pairing[a].first, cs.pairing[b].first);
            W2(a, b) = W(cs.pairing[a].first, cs.pairing[b].second);
        }
    return {W1, W2};
}

inline MatR assemble_real(const MatR& W1, const MatR& W2, const ComplexStructure& cs)
{
    MatR W = MatR::Zero(cs.N, cs.N);
    for (Eigen::Index a = 0; a < cs.half(); ++a)
        for (Eigen::Index b = 0; b < cs.half(); ++b) {
            auto [ra, ia] = cs.pairing[a];
            auto [rb, ib] = cs.pairing[b];
            W(ra, rb) = W1(a, b);
            W(ia, ib) = W1(a, b);
            W(ra, ib) = W2(a, b);
            W(ia, rb) = -W2(a, b);
        }
    return W;
}

struct ComplexPair {
    VecC psi;
    VecC psi_bar;
};

inline ComplexPair complexify(const VecR& q_tilde, const VecR& q_bar, const ComplexStructure& cs)
{
    require(q_tilde.size() == cs.N && q_bar.size() == cs.N, "complexify: vector length");
    ComplexPair out{VecC(cs.half()), VecC(cs.half())};
    for (Eigen::Index k = 0; k < cs.half(); ++k) {
        auto [r, i] = cs.pairing[k];
        out.psi[k] = cplx(q_tilde[r], q_tilde[i]);
        out.psi_bar[k] = cplx(q_bar[r], -q_bar[i]);
    }
    return out;
}

inline VecR realify(const VecC& psi, const ComplexStructure& cs)
{
    VecR q(cs.N);
    for (Eigen::Index k = 0; k < cs.half(); ++k) {
        q[cs.pairing[k].first] = psi[k].real();
        q[cs.pairing[k].second] = psi[k].imag();
    }
    return q;
}

inline VecR realify_conjugate(const VecC& psi_bar, const ComplexStructure& cs)
{
    return realify(VecC(psi_bar.conjugate()), cs);
}

struct ComplexGenerator {
    MatC H_hat; // hermitian
    MatC J_hat; // hermitian
    MatC G;     // H_hat + i J_hat, with i ∂_t ψ = G ψ
};

inline ComplexGenerator complex_generator(const MatR& W, const ComplexStructure& cs, double tolerance = 1e-12)
{
    if (!compatible(W, cs, tolerance))
        throw ValidationError("complex_generator: W does not commute with I");
    auto [W1, W2] = complex_blocks(W, cs);
    MatR W1S = (W1 + W1.transpose()) / 2, W1A = (W1 - W1.transpose()) / 2;
    MatR W2S = (W2 + W2.transpose()) / 2, W2A = (W2 - W2.transpose()) / 2;
    const cplx i(0, 1);
    ComplexGenerator g;
    g.H_hat = W2S.cast<cplx>() + i * W1A.cast<cplx>();
    g.J_hat = W1S.cast<cplx>() - i * W2A.cast<cplx>();
    g.G = g.H_hat + i * g.J_hat;
    return g;
}

// A′ = [[A_R, -A_I], [A_I, A_R]] in (R, I) blocks maps to Â = A_R + i A_I.
inline MatC complex_operator(const MatR& A, const ComplexStructure& cs, double tolerance = 1e-12)
{
    if (!compatible(A, cs, tolerance))
        throw ValidationError("complex_operator: operator does not commute with I");
    auto [A1, A2] = complex_blocks(A, cs);
    return A1.cast<cplx>() - cplx(0, 1) * A2.cast<cplx>();
}

inline cplx bilinear_c(const VecC& a, const VecC& b)
{
    return (a.transpose() * b).value();
}

inline MatC complex_density(const VecC& psi, const VecC& psi_bar)
{
    require(psi.size() == psi_bar.size(), "complex_density: sizes differ");
    return psi * psi_bar.transpose();
}

inline VecC psi_rate(const ComplexGenerator& g, const VecC& psi) { return cplx(0, -1) * (g.G * psi); }
inline VecC psi_bar_rate(const ComplexGenerator& g, const VecC& psi_bar)
{
    return cplx(0, 1) * (g.G.transpose() * psi_bar);
}
inline MatC complex_density_rate(const ComplexGenerator& g, const MatC& rho)
{
    return cplx(0, -1) * (g.G * rho - rho * g.G);
}

// ∂_t (ψ†ψ) = 2 ψ† Ĵ ψ.
inline double norm_drift(const ComplexGenerator& g, const VecC& psi)
{
    return 2.0 * (psi.adjoint() * g.J_hat * psi).value().real();
}

struct ComplexSample {
    double t;
    VecC psi;
    VecC psi_bar;
};

// Fixed-step RK4 of i ψ̇ = G ψ and -i ψ̄̇ = Gᵀ ψ̄, both integrated forward in t.
inline std::vector<ComplexSample> integrate_complex(const ComplexGenerator& g, const ComplexPair& start, double t0,
                                                   double t1, double dt)
{
    if (!(dt > 0.0))
        throw ValidationError("integrate_complex: dt must be positive");
    long n = std::max(1L, std::lround((t1 - t0) / dt));
    double h = (t1 - t0) / n;
    auto fp = [&](double, const VecC& v) -> VecC { return psi_rate(g, v); };
    auto fb = [&](double, const VecC& v) -> VecC { return psi_bar_rate(g, v); };
    std::vector<ComplexSample> out{{t0, start.psi, start.psi_bar}};
    for (long k = 0; k < n; ++k) {
        double t = t0 + k * h;
        const auto& last = out.back();
        out.push_back({t + h, rk4_step(fp, t, last.psi, h), rk4_step(fb, t, last.psi_bar, h)});
    }
    return out;
}

} // namespace qfc
