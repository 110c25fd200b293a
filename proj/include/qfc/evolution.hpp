#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qfc/lattice.hpp"

namespace qfc {

template <class T>
struct WavePair {
    Vec<T> q_tilde;
    Vec<T> q_bar;
    double t = 0.0;
};

// Bilinear product aᵀ b with no complex conjugation.
template <class T>
T bilinear(const Vec<T>& a, const Vec<T>& b)
{
    return (a.transpose() * b).value();
}

template <class T>
T overlap(const WavePair<T>& w)
{
    return bilinear(w.q_bar, w.q_tilde);
}

template <class T>
struct Density {
    Mat<T> matrix;
    double t = 0.0;
    bool pure = false;

    Eigen::Index N() const { return matrix.rows(); }
};

using ClassicalDensity = Density<double>;

template <class T>
bool is_pure(const Mat<T>& rho)
{
    return max_abs(Mat<T>(rho * rho - rho)) <= tol::pure;
}

template <class T>
Density<T> make_density(const Mat<T>& rho, double t = 0.0)
{
    require(rho.rows() == rho.cols(), "density matrix must be square");
    require(std::abs(rho.trace() - T(1)) <= tol::trace, "density matrix must have unit trace");
    return {rho, t, is_pure(rho)};
}

// ρ′ = q̃ q̄ᵀ / (q̄ᵀ q̃); the row index belongs to q̃.
template <class T>
Density<T> pure_density(const Vec<T>& q_tilde, const Vec<T>& q_bar, double t = 0.0)
{
    require(q_tilde.size() == q_bar.size(), "wave function sizes differ");
    T Z = bilinear(q_bar, q_tilde);
    if (std::abs(Z) == 0.0)
        throw NumericalError("pure_density: Z = 0");
    return {Mat<T>(q_tilde * q_bar.transpose() / Z), t, true};
}

template <class T>
Vec<T> evolve_wave(const Vec<T>& q, const Mat<T>& S)
{
    require(S.cols() == q.size() && S.rows() == S.cols(), "evolve_wave: dimension mismatch");
    return S * q;
}

// (S⁻¹)ᵀ q̄, via an LU solve of Sᵀ x = q̄.
template <class T>
Vec<T> evolve_conjugate(const Vec<T>& q_bar, const Mat<T>& S)
{
    require(S.cols() == q_bar.size() && S.rows() == S.cols(), "evolve_conjugate: dimension mismatch");
    return RegularLU<T>(S).solve_transposed(q_bar);
}

// Inverse step of the conjugate wave function: q̄(t) = Sᵀ(t) q̄(t+ε).
template <class T>
Vec<T> retract_conjugate(const Vec<T>& q_bar_next, const Mat<T>& S)
{
    require(S.rows() == q_bar_next.size(), "retract_conjugate: dimension mismatch");
    return S.transpose() * q_bar_next;
}

template <class T>
std::vector<Vec<T>> forward_sweep(const BasicChain<T>& c, const Vec<T>& q_in)
{
    require(q_in.size() == c.N, "forward_sweep: boundary vector length");
    std::vector<Vec<T>> out{q_in};
    for (int k = 0; k < c.G(); ++k)
        out.push_back(c.S(k) * out.back());
    return out;
}

template <class T>
std::vector<Vec<T>> backward_sweep(const BasicChain<T>& c, const Vec<T>& q_bar_f)
{
    require(q_bar_f.size() == c.N, "backward_sweep: boundary vector length");
    std::vector<Vec<T>> out(static_cast<std::size_t>(c.G()) + 1);
    out.back() = q_bar_f;
    for (int k = c.G() - 1; k >= 0; --k)
        out[k] = c.S(k).transpose() * out[k + 1];
    return out;
}

template <class T>
Density<T> evolve_density_step(const Density<T>& rho, const Mat<T>& S, double eps = 1.0)
{
    require(S.rows() == rho.N() && S.cols() == rho.N(), "evolve_density_step: dimension mismatch");
    RegularLU<T> lu(S);
    // X = S ρ S⁻¹ solves Sᵀ Xᵀ = (S ρ)ᵀ.
    Mat<T> Srho = S * rho.matrix;
    Mat<T> out = lu.solve_transposed(Mat<T>(Srho.transpose())).transpose();
    return {out, rho.t + eps, rho.pure && is_pure(out)};
}

template <class T>
struct GeneratorW {
    Mat<T> W;
    Mat<T> W_tilde;
    Mat<T> J;   // symmetric part
    Mat<T> W_A; // antisymmetric part, H = i W_A
};

template <class T>
GeneratorW<T> split_generator(const Mat<T>& W, const Mat<T>& W_tilde)
{
    GeneratorW<T> g;
    g.W = W;
    g.W_tilde = W_tilde;
    g.J = (W + W.transpose()) / T(2);
    g.W_A = (W - W.transpose()) / T(2);
    return g;
}

// W = (S(t) - S⁻¹(t-ε)) / 2ε and W̃ = (S(t-ε) - S⁻¹(t)) / 2ε.
template <class T>
GeneratorW<T> generator(const Mat<T>& S_t, const Mat<T>& S_tminus, double eps)
{
    require(eps > 0.0, "generator: ε must be positive");
    require(S_t.rows() == S_tminus.rows() && S_t.cols() == S_tminus.cols(), "generator: dimension mismatch");
    Mat<T> inv_prev = checked_inverse(S_tminus);
    Mat<T> inv_now = checked_inverse(S_t);
    Mat<T> W = (S_t - inv_prev) / T(2 * eps);
    Mat<T> Wt = (S_tminus - inv_now) / T(2 * eps);
    return split_generator(W, Wt);
}

template <class T>
GeneratorW<T> generator(const Mat<T>& S, double eps)
{
    return generator(S, S, eps);
}

// One classical fourth-order step for y' = f(t, y).
template <class Y, class F>
Y rk4_step(const F& f, double t, const Y& y, double h)
{
    Y k1 = f(t, y);
    Y k2 = f(t + h / 2, Y(y + (h / 2) * k1));
    Y k3 = f(t + h / 2, Y(y + (h / 2) * k2));
    Y k4 = f(t + h, Y(y + h * k3));
    return Y(y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4));
}

template <class T>
struct DensitySample {
    double t;
    Mat<T> rho;
};

// ∂_t ρ′ = [W(t), ρ′] with a fixed step; samples at every step including both ends.
template <class T>
std::vector<DensitySample<T>> integrate_von_neumann(const Mat<T>& rho0, const std::function<Mat<T>(double)>& W_of_t,
                                                    double t0, double t1, double dt)
{
    if (!(dt > 0.0))
        throw ValidationError("integrate_von_neumann: dt must be positive");
    require(t1 >= t0, "integrate_von_neumann: empty span");
    long n = std::lround((t1 - t0) / dt);
    if (n < 1 && t1 > t0)
        n = 1;
    double h = n > 0 ? (t1 - t0) / n : 0.0;
    auto f = [&](double t, const Mat<T>& r) -> Mat<T> {
        Mat<T> W = W_of_t(t);
        return W * r - r * W;
    };
    std::vector<DensitySample<T>> out{{t0, rho0}};
    out.reserve(static_cast<std::size_t>(n) + 1);
    for (long k = 0; k < n; ++k) {
        double t = t0 + k * h;
        out.push_back({t0 + (k + 1) * h, rk4_step(f, t, out.back().rho, h)});
    }
    return out;
}

template <class T>
std::vector<DensitySample<T>> integrate_von_neumann(const Mat<T>& rho0, const Mat<T>& W, double t0, double t1,
                                                    double dt)
{
    return integrate_von_neumann<T>(rho0, [&W](double) { return W; }, t0, t1, dt);
}

// Density evolution is implemented for W̃ = W only.
template <class T>
void require_symmetric_labels(const GeneratorW<T>& g, double tolerance = 1e-12)
{
    if (max_abs(Mat<T>(g.W - g.W_tilde)) > tolerance)
        throw UnsupportedCase("density evolution with W̃ != W is not supported");
}

} // namespace qfc
