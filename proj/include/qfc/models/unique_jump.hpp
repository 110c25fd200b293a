#pragma once

#include <numeric>
#include <optional>
#include <vector>

#include "qfc/lattice.hpp"

namespace qfc::models {

// S_{π(τ) τ} = sign_τ (default +1).
inline StepOperator unique_jump_step(const std::vector<int>& pi, const std::optional<std::vector<int>>& signs = std::nullopt)
{
    const auto N = static_cast<Eigen::Index>(pi.size());
    require(N > 0, "unique jump: empty permutation");
    std::vector<int> hit(pi.size(), 0);
    for (int p : pi) {
        require(p >= 0 && p < N, "unique jump: image out of range");
        ++hit[p];
    }
    for (int h : hit)
        require(h == 1, "unique jump: map is not a permutation");
    if (signs) {
        require(signs->size() == pi.size(), "unique jump: one sign per state");
        for (int s : *signs)
            require(s == 1 || s == -1, "unique jump: signs must be ±1");
    }
    MatR S = MatR::Zero(N, N);
    for (Eigen::Index t = 0; t < N; ++t)
        S(pi[t], t) = signs ? (*signs)[t] : 1.0;
    return make_step(S);
}

inline ChainSpec unique_jump_chain(const std::vector<int>& pi, int G,
                                   const std::optional<std::vector<int>>& signs = std::nullopt, double eps = 1.0)
{
    return uniform_chain<double>(unique_jump_step(pi, signs).matrix, G, eps);
}

// Order of the permutation (lcm of cycle lengths).
inline long permutation_order(const std::vector<int>& pi)
{
    std::vector<bool> seen(pi.size(), false);
    long order = 1;
    for (std::size_t s = 0; s < pi.size(); ++s) {
        if (seen[s])
            continue;
        long len = 0;
        for (std::size_t k = s; !seen[k]; k = static_cast<std::size_t>(pi[k])) {
            seen[k] = true;
            ++len;
        }
        order = std::lcm(order, len);
    }
    return order;
}

// Positive orthogonal matrices are permutation matrices; returns the permutation if S is one.
inline std::optional<std::vector<int>> as_permutation(const MatR& S, double tolerance = 1e-12)
{
    if (S.rows() != S.cols())
        return std::nullopt;
    std::vector<int> pi(static_cast<std::size_t>(S.cols()), -1);
    for (Eigen::Index c = 0; c < S.cols(); ++c)
        for (Eigen::Index r = 0; r < S.rows(); ++r) {
            double v = S(r, c);
            if (std::abs(v - 1.0) <= tolerance) {
                if (pi[c] != -1)
                    return std::nullopt;
                pi[c] = static_cast<int>(r);
            } else if (std::abs(v) > tolerance) {
                return std::nullopt;
            }
        }
    std::vector<int> hit(pi.size(), 0);
    for (int p : pi) {
        if (p < 0 || ++hit[p] > 1)
            return std::nullopt;
    }
    return pi;
}

} // namespace qfc::models
