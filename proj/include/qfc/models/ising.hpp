#pragma once

#include <cmath>

#include "qfc/lattice.hpp"

namespace qfc::models {

// Normalized one-spin Ising step e^{-φ}[[e^β, e^{-β}], [e^{-β}, e^β]] with φ = ln(2 cosh β).
inline StepOperator ising_step(double beta)
{
    require(beta >= 0.0, "ising: β must be nonnegative");
    double th = std::tanh(beta);
    MatR S(2, 2);
    S << 1 + th, 1 - th, 1 - th, 1 + th;
    S /= 2;
    StepOperator out = make_step(S);
    out.phi = beta + std::log1p(std::exp(-2 * beta));
    return out;
}

inline ChainSpec ising_chain(double beta, int G, double eps = 1.0, double t_in = 0.0)
{
    return uniform_chain<double>(ising_step(beta).matrix, G, eps, t_in);
}

// Occupation number n with the first basis state occupied.
inline MatR ising_occupation()
{
    MatR n = MatR::Zero(2, 2);
    n(0, 0) = 1.0;
    return n;
}

// Continuum rate ω = e^{-2β}/ε of the small-e^{-2β} expansion.
inline double ising_omega_continuum(double beta, double eps = 1.0) { return std::exp(-2 * beta) / eps; }

// Rate with e^{-2ωε} = tanh β, which makes the closed-form solution exact on the lattice.
inline double ising_omega_lattice(double beta, double eps = 1.0)
{
    require(beta > 0.0, "ising: lattice rate needs β > 0");
    return -std::log(std::tanh(beta)) / (2 * eps);
}

struct IsingAnalytic {
    double a = 0.0;
    double b_in = 0.0;
    double c_f = 0.0;
    double omega = 0.0;
    double t_in = 0.0;
    double t_f = 1.0;

    double r() const { return std::exp(-2 * omega * (t_f - t_in)); }
    double b(double t) const { return b_in * std::exp(-2 * omega * (t - t_in)); }
    double c(double t) const { return c_f * std::exp(-2 * omega * (t_f - t)); }
};

inline void validate(const IsingAnalytic& p)
{
    require(p.t_f > p.t_in, "ising: t_f must exceed t_in");
    require(p.omega >= 0.0, "ising: ω must be nonnegative");
    require(p.a >= -1.0 && p.a <= 1.0, "ising: static parameter a must lie in [-1, 1]");
}

// ½[1 + aτ₁ + b(t)(iτ₂ + τ₃) + c(t)(-iτ₂ + τ₃)] with iτ₂ = [[0, 1], [-1, 0]].
inline MatR ising_rho(const IsingAnalytic& p, double t)
{
    validate(p);
    double b = p.b(t), c = p.c(t);
    MatR rho(2, 2);
    rho << 1 + b + c, p.a + b - c, p.a - b + c, 1 - b - c;
    return rho / 2;
}

inline double ising_delta_n(const IsingAnalytic& p, double t) { return (p.b(t) + p.c(t)) / 2; }

inline double ising_det(const IsingAnalytic& p)
{
    return (1 - p.a * p.a - 4 * p.b_in * p.c_f * p.r()) / 4;
}

// Constants reproducing prescribed boundary offsets Δn(t_in), Δn(t_f).
inline IsingAnalytic ising_from_boundary(double dn_in, double dn_f, double omega, double t_in, double t_f,
                                         double a = 0.0)
{
    IsingAnalytic p{a, 0.0, 0.0, omega, t_in, t_f};
    validate(p);
    double r = p.r();
    if (!(r < 1.0))
        throw ValidationError("ising: r >= 1, the boundary offsets do not determine the solution");
    p.b_in = 2 * (dn_in - r * dn_f) / (1 - r * r);
    p.c_f = 2 * (dn_f - r * dn_in) / (1 - r * r);
    return p;
}

inline double ising_delta_n_boundary(double dn_in, double dn_f, double omega, double t_in, double t_f, double t)
{
    return ising_delta_n(ising_from_boundary(dn_in, dn_f, omega, t_in, t_f), t);
}

// ω → 0 limit: linear interpolation between the boundary offsets.
inline double ising_delta_n_linear(double dn_in, double dn_f, double t_in, double t_f, double t)
{
    return (dn_in + dn_f) / 2 + (dn_in - dn_f) / 2 * (t_f + t_in - 2 * t) / (t_f - t_in);
}

inline MatR ising_static_density(double a)
{
    require(a >= -1.0 && a <= 1.0, "ising: static parameter a must lie in [-1, 1]");
    MatR rho(2, 2);
    rho << 1, a, a, 1;
    return rho / 2;
}

} // namespace qfc::models
