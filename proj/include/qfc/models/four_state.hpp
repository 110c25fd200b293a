#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "qfc/evolution.hpp"

namespace qfc::models {

inline StepOperator four_state_step(double eta)
{
    require(eta >= 0.0 && eta <= 1.0, "four-state: η must lie in [0, 1]");
    MatR S(4, 4);
    S << 1 - eta, 0, eta, 0,
         eta, 1 - eta, 0, 0,
         0, 0, 1 - eta, eta,
         0, eta, 0, 1 - eta;
    return make_step(S);
}

inline ChainSpec four_state_chain(double eta, int G, double eps = 1.0, double t_in = 0.0)
{
    return uniform_chain<double>(four_state_step(eta).matrix, G, eps, t_in);
}

// 1, 1-η+iη, 1-η-iη, 1-2η
inline VecC four_state_spectrum(double eta)
{
    VecC ev(4);
    ev << cplx(1, 0), cplx(1 - eta, eta), cplx(1 - eta, -eta), cplx(1 - 2 * eta, 0);
    return ev;
}

// The η = 1 rotation, a period-4 unique jump operator.
inline MatR four_state_V()
{
    MatR V(4, 4);
    V << 0, 0, 1, 0,
         1, 0, 0, 0,
         0, 0, 0, 1,
         0, 1, 0, 0;
    return V;
}

inline MatR four_state_W(double omega) { return -omega * (MatR::Identity(4, 4) - four_state_V()); }

namespace detail {

inline MatR blocks(const MatR& a, const MatR& b, const MatR& c, const MatR& d)
{
    MatR m(4, 4);
    m << a, b, c, d;
    return m;
}

inline MatR tau1() { return (MatR(2, 2) << 0, 1, 1, 0).finished(); }
inline MatR tau3() { return (MatR(2, 2) << 1, 0, 0, -1).finished(); }
inline MatR itau2() { return (MatR(2, 2) << 0, 1, -1, 0).finished(); }

} // namespace detail

// Operators commuting with W.
inline std::array<MatR, 3> four_state_B()
{
    MatR Z = MatR::Zero(2, 2);
    return {detail::blocks(Z, detail::tau1(), detail::tau1(), Z), MatR(four_state_V().transpose()), four_state_V()};
}

inline std::array<MatR, 2> four_state_C()
{
    MatR I = MatR::Identity(2, 2);
    return {detail::blocks(detail::tau3(), -detail::itau2(), detail::itau2(), -detail::tau3()),
            detail::blocks(-detail::tau1(), I, I, -detail::tau1())};
}

inline std::array<MatR, 4> four_state_F()
{
    std::array<MatR, 4> F{MatR(4, 4), MatR(4, 4), MatR(4, 4), MatR(4, 4)};
    F[0] << 1, 0, 0, -1, 1, 0, 0, -1, 1, 0, 0, -1, 1, 0, 0, -1;
    F[1] << 1, -1, -1, 1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 1, 1, -1;
    F[2] << 0, 1, -1, 0, 0, 1, -1, 0, 0, 1, -1, 0, 0, 1, -1, 0;
    F[3] << 0, 0, 0, 0, 1, -1, -1, 1, -1, 1, 1, -1, 0, 0, 0, 0;
    return F;
}

inline MatR four_state_E()
{
    MatR E(4, 4);
    for (int r = 0; r < 4; ++r)
        E.row(r) << 1, -1, -1, 1;
    return E;
}

// Integration constants of the general solution of ∂_t ρ′ = [W, ρ′].
struct FourStateAnalytic {
    std::array<double, 3> b{};
    double c_bar = 0.0;
    double alpha = 0.0;
    std::array<double, 4> d{};
    std::array<double, 4> beta{};
    double e_plus = 0.0;
    double e_minus = 0.0;
    double omega = 1.0;
};

// The static/oscillating part oscillates with 2ω.
inline MatR four_state_rho(const FourStateAnalytic& k, double t)
{
    require(k.omega > 0.0, "four-state: ω must be positive");
    const double w = k.omega;
    auto B = four_state_B();
    auto C = four_state_C();
    auto F = four_state_F();
    MatR E = four_state_E();
    MatR rho = MatR::Identity(4, 4) / 4;
    for (int i = 0; i < 3; ++i)
        rho += k.b[i] * B[i];
    rho += k.c_bar * (std::sin(2 * w * t + k.alpha) * C[0] + std::cos(2 * w * t + k.alpha) * C[1]);
    MatR up = 2 * k.d[0] * (F[0] * std::cos(w * t + k.beta[0]) + F[2] * std::sin(w * t + k.beta[0]))
              + 2 * k.d[1] * (F[1] * std::cos(w * t + k.beta[1]) + F[3] * std::sin(w * t + k.beta[1]));
    MatR down = 2 * k.d[2] * (F[0] * std::cos(w * t + k.beta[2]) + F[2] * std::sin(w * t + k.beta[2]))
                + 2 * k.d[3] * (F[1] * std::cos(w * t + k.beta[3]) + F[3] * std::sin(w * t + k.beta[3]));
    rho += up * std::exp(w * t) + MatR(down.transpose()) * std::exp(-w * t);
    rho += k.e_plus * E * std::exp(2 * w * t) + k.e_minus * MatR(E.transpose()) * std::exp(-2 * w * t);
    return rho;
}

// Q(t) = (cos ωt, sin ωt, -sin ωt, -cos ωt)/√2; q̃ = e^{-ω(t-t̄)}Q, q̄ = e^{ω(t-t̄)}Q.
inline WavePair<double> four_state_oscillating_pair(double omega, double t_bar, double t)
{
    VecR Q(4);
    double c = std::cos(omega * t), s = std::sin(omega * t);
    Q << c, s, -s, -c;
    Q /= std::sqrt(2.0);
    return {VecR(std::exp(-omega * (t - t_bar)) * Q), VecR(std::exp(omega * (t - t_bar)) * Q), t};
}

struct DampedOscillationFit {
    double gamma = 0.0;     // envelope decay rate
    double frequency = 0.0; // π over the mean spacing of successive extrema
    int extrema = 0;
};

// x(t) = x_* + c cos(ωt + α) e^{-γt}: linear regression of ln|x - x_*| over the local maxima of |x - x_*|.
// Extrema below `floor` are dropped, so the tail lost in rounding does not bias γ.
inline DampedOscillationFit fit_damped_oscillation(const std::vector<double>& t, const std::vector<double>& x,
                                                   double baseline, double floor = 1e-10)
{
    require(t.size() == x.size(), "damped fit: t and x differ in length");
    std::vector<double> te, le;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        double a = std::abs(x[i - 1] - baseline), b = std::abs(x[i] - baseline), c = std::abs(x[i + 1] - baseline);
        if (b >= a && b > c && b > floor) {
            te.push_back(t[i]);
            le.push_back(std::log(b));
        }
    }
    if (te.size() < 3)
        throw NumericalError("damped fit: fewer than three extrema above the floor");
    const double n = static_cast<double>(te.size());
    double mt = 0, ml = 0;
    for (std::size_t i = 0; i < te.size(); ++i) {
        mt += te[i] / n;
        ml += le[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < te.size(); ++i) {
        sxy += (te[i] - mt) * (le[i] - ml);
        sxx += (te[i] - mt) * (te[i] - mt);
    }
    DampedOscillationFit f;
    f.gamma = -sxy / sxx;
    f.frequency = std::acos(-1.0) * (n - 1) / (te.back() - te.front());
    f.extrema = static_cast<int>(te.size());
    return f;
}

} // namespace qfc::models
