#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "qfc/boundary.hpp"

namespace qfc::oracle {

struct ConfigHistory {
    std::vector<int> layers; // ρ_1 … ρ_{G+1}
    double w = 0.0;
};

// Recursive halving in a fixed order.
inline double pairwise_sum(const double* x, std::size_t n)
{
    if (n == 0)
        return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += x[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

inline constexpr std::size_t reduction_block = 4096;

// Blocks of fixed size are summed pairwise, possibly on several threads, and combined pairwise in block
// order; the result does not depend on `workers`.
inline double deterministic_sum(const std::vector<double>& x, unsigned workers = 1)
{
    std::size_t nb = (x.size() + reduction_block - 1) / reduction_block;
    std::vector<double> partial(nb, 0.0);
    auto run = [&](std::size_t first, std::size_t stride) {
        for (std::size_t b = first; b < nb; b += stride) {
            std::size_t lo = b * reduction_block;
            partial[b] = pairwise_sum(x.data() + lo, std::min(reduction_block, x.size() - lo));
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(nb, 1))));
    if (workers == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(run, w, workers);
        for (auto& t : pool)
            t.join();
    }
    return pairwise_sum(partial);
}

inline std::uint64_t ipow(std::uint64_t base, int e)
{
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        r *= base;
        if (r > enumeration_guard)
            return enumeration_guard + 1;
    }
    return r;
}

inline void guard(Eigen::Index N, int layers)
{
    if (ipow(static_cast<std::uint64_t>(N), layers) > enumeration_guard)
        throw ValidationError("oracle: configuration space exceeds 2^24 histories");
}

// Lexicographic decoding with ρ_1 as the slowest index.
inline std::vector<int> decode(std::uint64_t code, Eigen::Index N, int layers)
{
    std::vector<int> out(static_cast<std::size_t>(layers));
    for (int k = layers - 1; k >= 0; --k) {
        out[k] = static_cast<int>(code % static_cast<std::uint64_t>(N));
        code /= static_cast<std::uint64_t>(N);
    }
    return out;
}

inline double chain_weight(const ChainSpec& c, const std::vector<int>& n, int first_slice)
{
    double k = 1.0;
    for (std::size_t j = 1; j < n.size(); ++j)
        k *= c.S(first_slice + static_cast<int>(j) - 1)(n[j], n[j - 1]);
    return k;
}

inline double boundary_factor(const ChainSpec& c, const BoundaryCondition& bc, int first, int last)
{
    if (auto p = std::get_if<PureBoundary>(&bc))
        return p->q_in[first] * p->q_f[last];
    if (auto m = std::get_if<MixedBoundary>(&bc)) {
        double f = 0.0;
        for (const auto& comp : m->components) {
            double Z = pure_partition(c, comp.q_in, comp.q_f);
            f += comp.weight * comp.q_in[first] * comp.q_f[last] / Z;
        }
        return f;
    }
    return closing_operator(c, std::get<PeriodicBoundary>(bc))(first, last);
}

inline std::vector<ConfigHistory> enumerate_weights(const ChainSpec& c, const BoundaryCondition& bc)
{
    validate(c);
    validate(bc, c.N);
    const int L = c.G() + 1;
    guard(c.N, L);
    std::uint64_t total = ipow(static_cast<std::uint64_t>(c.N), L);
    std::vector<ConfigHistory> out;
    out.reserve(total);
    for (std::uint64_t code = 0; code < total; ++code) {
        auto n = decode(code, c.N, L);
        double w = boundary_factor(c, bc, n.front(), n.back()) * chain_weight(c, n, 0);
        out.push_back({std::move(n), w});
    }
    return out;
}

inline double partition(const std::vector<ConfigHistory>& h, unsigned workers = 1)
{
    std::vector<double> w;
    w.reserve(h.size());
    for (const auto& x : h)
        w.push_back(x.w);
    return deterministic_sum(w, workers);
}

using HistoryObservable = std::function<double(const std::vector<int>&)>;

inline double oracle_expectation(const HistoryObservable& A, const std::vector<ConfigHistory>& h,
                                 unsigned workers = 1)
{
    std::vector<double> w, wa;
    w.reserve(h.size());
    wa.reserve(h.size());
    for (const auto& x : h) {
        w.push_back(x.w);
        wa.push_back(x.w * A(x.layers));
    }
    double Z = deterministic_sum(w, workers);
    if (Z == 0.0)
        throw NumericalError("oracle_expectation: Z = 0");
    return deterministic_sum(wa, workers) / Z;
}

// Local value table f(τ) at slice k, as a history observable.
inline HistoryObservable local(const VecR& values, int k)
{
    return [values, k](const std::vector<int>& n) { return values[n[k]]; };
}

inline HistoryObservable product(HistoryObservable a, HistoryObservable b)
{
    return [a = std::move(a), b = std::move(b)](const std::vector<int>& n) { return a(n) * b(n); };
}

// p_τ(t_k) by summing all histories with ρ at slice k equal to τ.
inline VecR oracle_probabilities(const std::vector<ConfigHistory>& h, Eigen::Index N, int k)
{
    std::vector<std::vector<double>> parts(static_cast<std::size_t>(N));
    std::vector<double> all;
    for (const auto& x : h) {
        parts[x.layers[k]].push_back(x.w);
        all.push_back(x.w);
    }
    double Z = deterministic_sum(all);
    if (Z == 0.0)
        throw NumericalError("oracle_probabilities: Z = 0");
    VecR p(N);
    for (Eigen::Index t = 0; t < N; ++t)
        p[t] = deterministic_sum(parts[t]) / Z;
    return p;
}

struct OracleWave {
    VecR q_tilde;
    VecR q_bar;
};

// Partial sums over the layers below and above slice k for a pure boundary.
inline OracleWave oracle_wavefunction(const ChainSpec& c, const PureBoundary& b, int k)
{
    validate(c);
    require(k >= 0 && k <= c.G(), "oracle_wavefunction: slice out of range");
    require(b.q_in.size() == c.N && b.q_f.size() == c.N, "oracle_wavefunction: boundary length");
    const int lower = k + 1, upper = c.G() - k + 1;
    guard(c.N, std::max(lower, upper));
    OracleWave out{VecR::Zero(c.N), VecR::Zero(c.N)};
    std::vector<std::vector<double>> lo(static_cast<std::size_t>(c.N)), up(static_cast<std::size_t>(c.N));
    std::uint64_t nl = ipow(static_cast<std::uint64_t>(c.N), lower);
    for (std::uint64_t code = 0; code < nl; ++code) {
        auto n = decode(code, c.N, lower);
        lo[n.back()].push_back(chain_weight(c, n, 0) * b.q_in[n.front()]);
    }
    std::uint64_t nu = ipow(static_cast<std::uint64_t>(c.N), upper);
    for (std::uint64_t code = 0; code < nu; ++code) {
        auto n = decode(code, c.N, upper);
        up[n.front()].push_back(chain_weight(c, n, k) * b.q_f[n.back()]);
    }
    for (Eigen::Index t = 0; t < c.N; ++t) {
        out.q_tilde[t] = deterministic_sum(lo[t]);
        out.q_bar[t] = deterministic_sum(up[t]);
    }
    return out;
}

// Doubled-history partition sum with both branches starting from q_in and joined at t_f.
inline double doubled_partition(const ChainSpec& c, const VecR& q_in)
{
    validate(c);
    require(q_in.size() == c.N, "doubled_partition: boundary length");
    const int L = c.G() + 1;
    guard(c.N, 2 * L - 1);
    std::uint64_t nb = ipow(static_cast<std::uint64_t>(c.N), L);
    std::vector<double> branch(nb);
    for (std::uint64_t code = 0; code < nb; ++code) {
        auto n = decode(code, c.N, L);
        branch[code] = chain_weight(c, n, 0) * q_in[n.front()];
    }
    std::vector<double> terms;
    terms.reserve(nb * nb / static_cast<std::uint64_t>(c.N));
    for (std::uint64_t a = 0; a < nb; ++a)
        for (std::uint64_t b = 0; b < nb; ++b)
            if (a % static_cast<std::uint64_t>(c.N) == b % static_cast<std::uint64_t>(c.N))
                terms.push_back(branch[a] * branch[b]);
    return deterministic_sum(terms);
}

} // namespace qfc::oracle
