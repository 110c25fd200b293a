#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "qfc/lattice.hpp"

// Three-spin chains are built in the printed state order: state k (0-based) carries the
// binary digits n_1 n_2 n_3 of k, so s_1 is the most significant spin.
namespace qfc::models {

using Spins3 = std::array<int, 3>;

inline Spins3 three_spin_config(int k)
{
    require(k >= 0 && k < 8, "three-spin: state out of range");
    return {2 * ((k >> 2) & 1) - 1, 2 * ((k >> 1) & 1) - 1, 2 * (k & 1) - 1};
}

inline int three_spin_index(const Spins3& s)
{
    for (int v : s)
        require(v == 1 || v == -1, "three-spin: spins must be ±1");
    return ((s[0] + 1) / 2) * 4 + ((s[1] + 1) / 2) * 2 + (s[2] + 1) / 2;
}

// Diagonal operator of spin k ∈ {1, 2, 3}.
inline MatR three_spin_operator(int k)
{
    require(k >= 1 && k <= 3, "three-spin: spin label must be 1, 2 or 3");
    MatR A = MatR::Zero(8, 8);
    for (int t = 0; t < 8; ++t)
        A(t, t) = three_spin_config(t)[k - 1];
    return A;
}

enum class Gate { H, U31, UX, UY, UZ, U12, U23 };

inline const char* gate_name(Gate g)
{
    switch (g) {
    case Gate::H: return "H";
    case Gate::U31: return "U31";
    case Gate::UX: return "UX";
    case Gate::UY: return "UY";
    case Gate::UZ: return "UZ";
    case Gate::U12: return "U12";
    case Gate::U23: return "U23";
    }
    return "?";
}

inline Gate parse_gate(const std::string& id)
{
    for (Gate g : {Gate::H, Gate::U31, Gate::UX, Gate::UY, Gate::UZ, Gate::U12, Gate::U23})
        if (id == gate_name(g))
            return g;
    throw ValidationError("unknown gate id '" + id + "'");
}

inline std::vector<Gate> parse_gate_word(const std::string& word)
{
    std::istringstream in(word);
    std::vector<Gate> out;
    for (std::string tok; in >> tok;)
        out.push_back(parse_gate(tok));
    return out;
}

// Spin configuration after the gate.
inline Spins3 gate_spin_map(Gate g, const Spins3& s)
{
    switch (g) {
    case Gate::H: return {s[2], -s[1], s[0]};
    case Gate::U31: return {-s[2], s[1], s[0]};
    case Gate::UX: return {s[0], -s[1], -s[2]};
    case Gate::UY: return {-s[0], s[1], -s[2]};
    case Gate::UZ: return {-s[0], -s[1], s[2]};
    case Gate::U12: return {s[1], -s[0], s[2]};
    case Gate::U23: return {s[0], s[2], -s[1]};
    }
    throw ValidationError("unknown gate");
}

inline MatC gate_unitary(Gate g)
{
    const double r = 1 / std::sqrt(2.0);
    const cplx i(0, 1);
    MatC U(2, 2);
    switch (g) {
    case Gate::H: U << r, r, r, -r; break;
    case Gate::U31: U << r, r, -r, r; break;
    case Gate::UX: U << 0, 1, 1, 0; break;
    case Gate::UY: U << 0, 1, -1, 0; break;
    case Gate::UZ: U << 1, 0, 0, -1; break;
    case Gate::U12: U << 1, 0, 0, -i; break;
    case Gate::U23: U << i * r, -r, -r, i * r; break;
    }
    return U;
}

struct GateRealization {
    StepOperator S;
    MatC U;
    bool positive = true; // realized by a nonnegative unique jump operator
};

inline GateRealization three_spin_gate(Gate g)
{
    MatR S = MatR::Zero(8, 8);
    for (int t = 0; t < 8; ++t)
        S(three_spin_index(gate_spin_map(g, three_spin_config(t))), t) = 1.0;
    GateRealization out{make_step(S), gate_unitary(g), true};
    out.positive = out.S.classical;
    return out;
}

struct BlochState {
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;

    double norm2() const { return r1 * r1 + r2 * r2 + r3 * r3; }
    bool pure(double tolerance = 1e-12) const { return std::abs(norm2() - 1.0) <= tolerance; }
};

inline BlochState bloch_from_probabilities(const VecR& p, double tolerance = 1e-12)
{
    require(p.size() == 8, "bloch: need 8 probabilities");
    require((p.array() >= -tolerance).all(), "bloch: negative probability");
    require(std::abs(p.sum() - 1.0) <= 1e-10, "bloch: probabilities must sum to one");
    return {three_spin_operator(1).diagonal().dot(p), three_spin_operator(2).diagonal().dot(p),
            three_spin_operator(3).diagonal().dot(p)};
}

inline std::array<MatC, 3> pauli()
{
    MatC t1(2, 2), t2(2, 2), t3(2, 2);
    t1 << 0, 1, 1, 0;
    t2 << 0, cplx(0, -1), cplx(0, 1), 0;
    t3 << 1, 0, 0, -1;
    return {t1, t2, t3};
}

// ½(1 + ρ_k τ_k)
inline MatC quantum_density_2x2(const BlochState& b, double tolerance = 1e-12)
{
    require(b.norm2() <= 1.0 + tolerance, "bloch: |ρ| > 1 violates positivity");
    auto t = pauli();
    return (MatC::Identity(2, 2) + b.r1 * t[0] + b.r2 * t[1] + b.r3 * t[2]) / 2.0;
}

inline BlochState bloch_from_density(const MatC& rho)
{
    require(rho.rows() == 2 && rho.cols() == 2, "bloch: need a 2x2 density matrix");
    auto t = pauli();
    return {(rho * t[0]).trace().real(), (rho * t[1]).trace().real(), (rho * t[2]).trace().real()};
}

inline BlochState conjugate_bloch(const BlochState& b, const MatC& U)
{
    return bloch_from_density(MatC(U * quantum_density_2x2(b) * U.adjoint()));
}

// Product distribution p(s) = Π_k (1 + ρ_k s_k)/2, an admissible state with the given Bloch vector
// (requires |ρ_k| ≤ 1 each).
inline VecR product_distribution(const BlochState& b)
{
    for (double r : {b.r1, b.r2, b.r3})
        require(std::abs(r) <= 1.0, "bloch: components must lie in [-1, 1]");
    VecR p(8);
    for (int t = 0; t < 8; ++t) {
        auto s = three_spin_config(t);
        p[t] = (1 + b.r1 * s[0]) * (1 + b.r2 * s[1]) * (1 + b.r3 * s[2]) / 8;
    }
    return p;
}

struct SPlParams {
    double a_p = 0, b_p = 0, c_p = 0, d_p = 0;
    double a_m = 0, b_m = 0, c_m = 0, d_m = 0;
};

inline void validate(const SPlParams& p)
{
    for (double v : {p.a_p, p.b_p, p.c_p, p.d_p, p.a_m, p.b_m, p.c_m, p.d_m})
        require(v >= 0.0 && v <= 1.0, "S_pl: parameters must lie in [0, 1]");
}

inline MatR spl_block(double a, double b, double c, double d)
{
    MatR S(4, 4);
    S << 1 - a, 0, c, 0,
         0, 1 - b, 0, d,
         a, 0, 1 - c, 0,
         0, b, 0, 1 - d;
    return S;
}

inline StepOperator three_spin_pl(const SPlParams& p)
{
    validate(p);
    MatR S = MatR::Zero(8, 8);
    S.topLeftCorner(4, 4) = spl_block(p.a_p, p.b_p, p.c_p, p.d_p);
    S.bottomRightCorner(4, 4) = spl_block(p.a_m, p.b_m, p.c_m, p.d_m);
    return make_step(S);
}

// {1, 1, 1, 1, 1-a₊-c₊, 1-b₊-d₊, 1-a₋-c₋, 1-b₋-d₋}
inline VecC spl_spectrum(const SPlParams& p)
{
    VecC ev(8);
    ev << 1, 1, 1, 1, 1 - p.a_p - p.c_p, 1 - p.b_p - p.d_p, 1 - p.a_m - p.c_m, 1 - p.b_m - p.d_m;
    return ev;
}

// p_τ(t_in) for G → ∞ in the symmetric case c = a, d = b, from the overlaps f^(α) of q̄(t_f) with the
// unit-eigenvalue eigenvectors; normalized so that Σ p = 1.
inline VecR spl_initial_probabilities_symmetric(const SPlParams& p, const VecR& q_in, const VecR& q_f)
{
    validate(p);
    require(q_in.size() == 8 && q_f.size() == 8, "S_pl: boundary vectors must have 8 entries");
    const double r = 1 / std::sqrt(2.0);
    VecR out(8);
    for (int half = 0; half < 2; ++half) {
        int o = 4 * half;
        double a = half ? p.a_m : p.a_p, b = half ? p.b_m : p.b_p;
        double c = half ? p.c_m : p.c_p, d = half ? p.d_m : p.d_p;
        require(std::abs(a - c) <= 1e-15 && std::abs(b - d) <= 1e-15, "S_pl: symmetric formula needs c = a, d = b");
        double f1 = r * (q_f[o] + q_f[o + 2]);
        double f2 = r * (q_f[o + 1] + q_f[o + 3]);
        double n1 = std::sqrt(a * a + c * c), n2 = std::sqrt(b * b + d * d);
        out[o] = f1 * c * q_in[o] / n1;
        out[o + 1] = f2 * d * q_in[o + 1] / n2;
        out[o + 2] = f1 * a * q_in[o + 2] / n1;
        out[o + 3] = f2 * b * q_in[o + 3] / n2;
    }
    return out / out.sum();
}

// Same limit for arbitrary parameters: q̄(t_in) becomes the projection (c q̄₁ + a q̄₃)/(a + c) on each
// conserved pair.
inline VecR spl_initial_probabilities(const SPlParams& p, const VecR& q_in, const VecR& q_f)
{
    validate(p);
    require(q_in.size() == 8 && q_f.size() == 8, "S_pl: boundary vectors must have 8 entries");
    VecR out(8);
    for (int half = 0; half < 2; ++half) {
        int o = 4 * half;
        double a = half ? p.a_m : p.a_p, b = half ? p.b_m : p.b_p;
        double c = half ? p.c_m : p.c_p, d = half ? p.d_m : p.d_p;
        require(a + c > 0.0 && b + d > 0.0, "S_pl: limit needs a + c > 0 and b + d > 0");
        double g1 = (c * q_f[o] + a * q_f[o + 2]) / (a + c);
        double g2 = (d * q_f[o + 1] + b * q_f[o + 3]) / (b + d);
        out[o] = q_in[o] * g1;
        out[o + 2] = q_in[o + 2] * g1;
        out[o + 1] = q_in[o + 1] * g2;
        out[o + 3] = q_in[o + 3] * g2;
    }
    return out / out.sum();
}

} // namespace qfc::models
