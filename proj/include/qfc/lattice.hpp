#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "qfc/linalg.hpp"

namespace qfc {

// A local configuration of M spins. Bit γ of `index` is the occupation number n_γ
// (little-endian), and the Ising spin is s_γ = 2 n_γ - 1.
struct SpinConfig {
    std::uint32_t index = 0;
    int M = 1;

    int n(int gamma) const { return static_cast<int>((index >> gamma) & 1u); }
    int s(int gamma) const { return 2 * n(gamma) - 1; }
    std::size_t N() const { return std::size_t{1} << M; }
};

inline std::vector<SpinConfig> enumerate_configs(int M)
{
    require(M >= 1 && M <= 20, "spin count M must lie in [1, 20]");
    std::vector<SpinConfig> out;
    out.reserve(std::size_t{1} << M);
    for (std::uint32_t i = 0; i < (1u << M); ++i)
        out.push_back({i, M});
    return out;
}

inline int basis_value(const SpinConfig& tau, const SpinConfig& sigma)
{
    require(tau.M == sigma.M, "basis_value: configs have different M");
    return tau.index == sigma.index ? 1 : 0;
}

// Ordering of the printed three-spin tables: spin 1 is the most significant bit, so
// state k (0-based) has n_1 n_2 n_3 equal to the binary digits of k. Our index puts
// n_1 in bit 0. The two orders are related by bit reversal, which is its own inverse.
enum class Ordering { little_endian, msb_first };

inline std::uint32_t reverse_bits(std::uint32_t index, int M)
{
    std::uint32_t r = 0;
    for (int g = 0; g < M; ++g)
        r |= ((index >> g) & 1u) << (M - 1 - g);
    return r;
}

// perm[k] = library index of the k-th state in msb-first order.
inline std::vector<std::uint32_t> msb_first_permutation(int M)
{
    require(M >= 1 && M <= 20, "spin count M must lie in [1, 20]");
    std::vector<std::uint32_t> perm(std::size_t{1} << M);
    for (std::uint32_t k = 0; k < perm.size(); ++k)
        perm[k] = reverse_bits(k, M);
    return perm;
}

inline int spin_at(std::uint32_t state, int M, int gamma, Ordering ord)
{
    std::uint32_t idx = ord == Ordering::little_endian ? state : reverse_bits(state, M);
    return SpinConfig{idx, M}.s(gamma);
}

// Values s_γ on every state, listed in the requested ordering.
inline VecR spin_values(int M, int gamma, Ordering ord = Ordering::little_endian)
{
    require(gamma >= 0 && gamma < M, "spin index out of range");
    VecR v(std::size_t{1} << M);
    for (Eigen::Index k = 0; k < v.size(); ++k)
        v[k] = spin_at(static_cast<std::uint32_t>(k), M, gamma, ord);
    return v;
}

inline VecR occupation_values(int M, int gamma, Ordering ord = Ordering::little_endian)
{
    return (spin_values(M, gamma, ord).array() + 1.0) / 2.0;
}

inline MatR permutation_matrix(const std::vector<std::uint32_t>& perm)
{
    // P e_k = e_{perm[k]}: maps msb-first coordinates into library coordinates.
    MatR P = MatR::Zero(perm.size(), perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k)
        P(perm[k], k) = 1.0;
    return P;
}

inline constexpr double forbidden = std::numeric_limits<double>::infinity();

struct LocalAction {
    MatR couplings; // M_τρ, +inf marks a forbidden transition
    double t = 0.0;
};

inline void validate(const LocalAction& a)
{
    require(a.couplings.rows() == a.couplings.cols(), "action matrix must be square");
    for (Eigen::Index i = 0; i < a.couplings.size(); ++i) {
        double v = a.couplings.data()[i];
        require(!std::isnan(v), "action contains NaN");
        require(v != -forbidden, "action contains -inf");
    }
}

struct StepOperator {
    MatR matrix;
    double phi = 0.0;
    double spectral_radius = 0.0;
    int leading_multiplicity = 0; // eigenvalues tied with |λ_max| within 1e-9
    bool regular = false;
    bool classical = false;

    Eigen::Index N() const { return matrix.rows(); }
};

namespace detail {

inline bool is_regular(const MatR& m)
{
    try {
        RegularLU<double> lu(m);
        return true;
    } catch (const NumericalError&) {
        return false;
    }
}

inline StepOperator describe(const MatR& m, double phi)
{
    StepOperator s;
    s.matrix = m;
    s.phi = phi;
    VecC ev = eigenvalues(m);
    s.spectral_radius = ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(std::abs(ev[i]) - s.spectral_radius) <= tol::spectral_radius * std::max(1.0, s.spectral_radius))
            ++s.leading_multiplicity;
    s.regular = is_regular(m);
    s.classical = (m.array() >= 0.0).all();
    return s;
}

} // namespace detail

inline StepOperator make_step(const MatR& m)
{
    require(m.rows() == m.cols(), "step operator must be square");
    return detail::describe(m, 0.0);
}

inline StepOperator step_from_action(const LocalAction& a)
{
    validate(a);
    MatR S(a.couplings.rows(), a.couplings.cols());
    for (Eigen::Index i = 0; i < S.size(); ++i) {
        double v = a.couplings.data()[i];
        S.data()[i] = v == forbidden ? 0.0 : std::exp(-v);
    }
    return detail::describe(S, 0.0);
}

inline LocalAction action_from_step(const StepOperator& S, double t = 0.0)
{
    const MatR& m = S.matrix;
    LocalAction a{MatR(m.rows(), m.cols()), t};
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        double v = m.data()[i];
        require(v >= 0.0, "action_from_step: negative entry in step operator");
        a.couplings.data()[i] = v == 0.0 ? forbidden : -std::log(v);
    }
    return a;
}

inline StepOperator normalize_step(const MatR& raw)
{
    require(raw.rows() == raw.cols(), "step operator must be square");
    double rho = spectral_radius(raw);
    if (!(rho > 0.0))
        throw NumericalError("normalize_step: spectral radius is zero");
    if (std::abs(rho - 1.0) <= tol::spectral_radius)
        return detail::describe(raw, 0.0);
    return detail::describe(raw / rho, std::log(rho));
}

inline StepOperator normalize_step(const StepOperator& s)
{
    StepOperator out = normalize_step(s.matrix);
    out.phi += s.phi;
    return out;
}

// Ordered sequence S(t_in), ..., S(t_f - ε).
template <class T>
struct BasicChain {
    Eigen::Index N = 0;
    double eps = 1.0;
    double t_in = 0.0;
    std::vector<Mat<T>> ops;

    int G() const { return static_cast<int>(ops.size()); }
    double t_f() const { return t_in + G() * eps; }
    double time(int k) const { return t_in + k * eps; }
    const Mat<T>& S(int k) const { return ops.at(static_cast<std::size_t>(k)); }
};

using ChainSpec = BasicChain<double>;

template <class T>
void validate(const BasicChain<T>& c)
{
    require(c.eps > 0.0, "time step must be positive");
    for (const auto& m : c.ops)
        require(m.rows() == c.N && m.cols() == c.N, "chain operators must all be N x N");
}

template <class T>
BasicChain<T> uniform_chain(const Mat<T>& S, int G, double eps = 1.0, double t_in = 0.0)
{
    require(G >= 0, "step count must be nonnegative");
    require(S.rows() == S.cols(), "step operator must be square");
    BasicChain<T> c{S.rows(), eps, t_in, std::vector<Mat<T>>(static_cast<std::size_t>(G), S)};
    validate(c);
    return c;
}

template <class T>
BasicChain<cplx> complexify_chain(const BasicChain<T>& c)
{
    BasicChain<cplx> out{c.N, c.eps, c.t_in, {}};
    for (const auto& m : c.ops)
        out.ops.push_back(m.template cast<cplx>());
    return out;
}

// Ordered product S(b-1)...S(a), mapping slice a to slice b.
template <class T>
Mat<T> chain_product(const BasicChain<T>& c, int a, int b)
{
    require(0 <= a && a <= b && b <= c.G(), "chain_product: slice range");
    Mat<T> P = Mat<T>::Identity(c.N, c.N);
    for (int k = a; k < b; ++k)
        P = c.S(k) * P;
    return P;
}

} // namespace qfc
