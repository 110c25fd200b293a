#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qfc/observables.hpp"

namespace qfc {

struct PureBoundary {
    VecR q_in;
    VecR q_f; // q̄(t_f)
};

struct MixedComponent {
    double weight;
    VecR q_in;
    VecR q_f;
};

struct MixedBoundary {
    std::vector<MixedComponent> components;
};

// Closes the chain on a circle. Without an explicit closing operator the chain must be t-independent.
struct PeriodicBoundary {
    std::optional<MatR> closing;
};

using BoundaryCondition = std::variant<PureBoundary, MixedBoundary, PeriodicBoundary>;

inline void validate(const BoundaryCondition& bc, Eigen::Index N)
{
    if (auto p = std::get_if<PureBoundary>(&bc)) {
        require(p->q_in.size() == N && p->q_f.size() == N, "boundary vectors must have length N");
    } else if (auto m = std::get_if<MixedBoundary>(&bc)) {
        require(!m->components.empty(), "mixed boundary needs at least one component");
        double sum = 0.0;
        for (const auto& c : m->components) {
            require(c.weight >= 0.0, "mixed boundary weights must be nonnegative");
            require(c.q_in.size() == N && c.q_f.size() == N, "boundary vectors must have length N");
            sum += c.weight;
        }
        require(std::abs(sum - 1.0) <= 1e-12, "mixed boundary weights must sum to one");
    } else {
        auto& pb = std::get<PeriodicBoundary>(bc);
        if (pb.closing)
            require(pb.closing->rows() == N && pb.closing->cols() == N, "closing operator must be N x N");
    }
}

inline bool is_t_independent(const ChainSpec& c)
{
    for (int k = 1; k < c.G(); ++k)
        if (c.S(k) != c.S(0))
            return false;
    return true;
}

inline MatR closing_operator(const ChainSpec& c, const PeriodicBoundary& pb)
{
    if (pb.closing)
        return *pb.closing;
    require(c.G() > 0 && is_t_independent(c), "periodic boundary on a t-dependent chain needs a closing operator");
    return c.S(0);
}

inline double pure_partition(const ChainSpec& c, const VecR& q_in, const VecR& q_f)
{
    return q_f.dot(chain_product(c, 0, c.G()) * q_in);
}

// The boundary matrix b′ with Z = tr(b′ U(t_in → t_f)); mixed components are normalized to Z = 1 first.
inline MatR boundary_matrix(const ChainSpec& c, const BoundaryCondition& bc)
{
    validate(bc, c.N);
    if (auto p = std::get_if<PureBoundary>(&bc))
        return p->q_in * p->q_f.transpose();
    if (auto m = std::get_if<MixedBoundary>(&bc)) {
        MatR b = MatR::Zero(c.N, c.N);
        for (const auto& comp : m->components) {
            double Z = pure_partition(c, comp.q_in, comp.q_f);
            if (Z == 0.0)
                throw NumericalError("mixed boundary component has Z = 0");
            b += comp.weight * comp.q_in * comp.q_f.transpose() / Z;
        }
        return b;
    }
    return closing_operator(c, std::get<PeriodicBoundary>(bc));
}

inline double partition_function(const ChainSpec& c, const BoundaryCondition& bc)
{
    validate(c);
    if (auto p = std::get_if<PureBoundary>(&bc)) {
        validate(bc, c.N);
        return pure_partition(c, p->q_in, p->q_f);
    }
    if (auto m = std::get_if<MixedBoundary>(&bc)) {
        validate(bc, c.N);
        double Z = 0.0;
        for (const auto& comp : m->components)
            Z += comp.weight * pure_partition(c, comp.q_in, comp.q_f);
        return Z;
    }
    MatR S = closing_operator(c, std::get<PeriodicBoundary>(bc));
    return (S * chain_product(c, 0, c.G())).trace();
}

struct Slice {
    double t = 0.0;
    std::optional<WavePair<double>> wave; // pure boundaries only
    ClassicalDensity rho;
    VecR p;
};

struct PositivityViolation {
    int slice;
    int tau;
    double value;
};

struct Trajectory {
    std::vector<Slice> slices;
    double Z = 0.0;          // raw partition function before rescaling
    double z_drift = 0.0;    // max |q̄(t)·q̃(t) - 1| after rescaling (pure only)
    double trace_drift = 0.0;
    std::vector<PositivityViolation> violations; // p_τ outside [0, 1]
    // Periodic boundaries: spectrum of the loop product and the eigenvectors of its leading modulus.
    VecC loop_spectrum;
    MatC fixed_subspace;
};

inline void require_regular_chain(const ChainSpec& c)
{
    for (const auto& S : c.ops)
        RegularLU<double> check(S);
}

inline Trajectory solve_boundary(const ChainSpec& c, const BoundaryCondition& bc, double positivity_tol = 1e-12)
{
    validate(c);
    validate(bc, c.N);
    require_regular_chain(c);
    Trajectory tr;
    tr.Z = partition_function(c, bc);
    if (tr.Z == 0.0 || !std::isfinite(tr.Z))
        throw NumericalError("solve_boundary: Z = 0, normalization impossible");

    const int G = c.G();
    if (auto p = std::get_if<PureBoundary>(&bc)) {
        auto qt = forward_sweep<double>(c, VecR(p->q_in / tr.Z));
        auto qb = backward_sweep<double>(c, p->q_f);
        for (int k = 0; k <= G; ++k) {
            Slice s;
            s.t = c.time(k);
            s.wave = WavePair<double>{qt[k], qb[k], s.t};
            s.rho = {MatR(qt[k] * qb[k].transpose()), s.t, true};
            s.p = qt[k].cwiseProduct(qb[k]);
            tr.z_drift = std::max(tr.z_drift, std::abs(qb[k].dot(qt[k]) - 1.0));
            tr.slices.push_back(std::move(s));
        }
    } else {
        MatR b = boundary_matrix(c, bc);
        // ρ′(t) = U_<(t) b′ U_>(t) / Z, U_< : t_in → t, U_> : t → t_f.
        std::vector<MatR> lower{MatR::Identity(c.N, c.N)};
        for (int k = 0; k < G; ++k)
            lower.push_back(c.S(k) * lower.back());
        std::vector<MatR> upper(static_cast<std::size_t>(G) + 1, MatR::Identity(c.N, c.N));
        for (int k = G - 1; k >= 0; --k)
            upper[k] = upper[k + 1] * c.S(k);
        double Zb = (b * lower.back()).trace();
        if (Zb == 0.0)
            throw NumericalError("solve_boundary: Z = 0, normalization impossible");
        for (int k = 0; k <= G; ++k) {
            Slice s;
            s.t = c.time(k);
            MatR rho = lower[k] * b * upper[k] / Zb;
            s.rho = {rho, s.t, is_pure(rho)};
            s.p = rho.diagonal();
            tr.slices.push_back(std::move(s));
        }
        if (std::holds_alternative<PeriodicBoundary>(bc)) {
            MatR loop = b * lower.back();
            Eigen::EigenSolver<MatR> es(loop, true);
            tr.loop_spectrum = es.eigenvalues();
            double lead = tr.loop_spectrum.cwiseAbs().maxCoeff();
            std::vector<Eigen::Index> keep;
            for (Eigen::Index i = 0; i < tr.loop_spectrum.size(); ++i)
                if (std::abs(std::abs(tr.loop_spectrum[i]) - lead) <= tol::unit_sector * std::max(1.0, lead))
                    keep.push_back(i);
            tr.fixed_subspace.resize(c.N, static_cast<Eigen::Index>(keep.size()));
            for (std::size_t j = 0; j < keep.size(); ++j)
                tr.fixed_subspace.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
        }
    }
    for (std::size_t k = 0; k < tr.slices.size(); ++k) {
        const auto& s = tr.slices[k];
        tr.trace_drift = std::max(tr.trace_drift, std::abs(s.rho.matrix.trace() - 1.0));
        for (Eigen::Index tau = 0; tau < s.p.size(); ++tau)
            if (s.p[tau] < -positivity_tol || s.p[tau] > 1.0 + positivity_tol)
                tr.violations.push_back({static_cast<int>(k), static_cast<int>(tau), s.p[tau]});
    }
    return tr;
}

struct WeightEntry {
    std::vector<int> layers; // ρ_1 … ρ_{G+1}, ρ_1 at t_in
    double w;
};

inline constexpr std::uint64_t enumeration_guard = std::uint64_t{1} << 24;

inline std::uint64_t history_count(Eigen::Index N, int G)
{
    std::uint64_t n = 1;
    for (int k = 0; k <= G; ++k) {
        n *= static_cast<std::uint64_t>(N);
        if (n > enumeration_guard)
            return n;
    }
    return n;
}

// w = b′_{ρ_1 ρ_{G+1}} S_{ρ_{G+1} ρ_G} ⋯ S_{ρ_2 ρ_1}; for pure boundaries b′ = q̃_in q̄_fᵀ.
inline std::vector<WeightEntry> weight_coefficients(const ChainSpec& c, const BoundaryCondition& bc)
{
    validate(c);
    require(history_count(c.N, c.G()) <= enumeration_guard, "weight_coefficients: more than 2^24 histories");
    MatR b = boundary_matrix(c, bc);
    std::vector<WeightEntry> out;
    std::vector<int> layers(static_cast<std::size_t>(c.G()) + 1, 0);
    const int G = c.G();
    // Depth-first over layers with running products of the step factors.
    std::vector<double> prefix(static_cast<std::size_t>(G) + 1, 1.0);
    auto rec = [&](auto&& self, int k) -> void {
        for (int r = 0; r < c.N; ++r) {
            layers[k] = r;
            double f = k == 0 ? 1.0 : prefix[k - 1] * c.S(k - 1)(r, layers[k - 1]);
            prefix[k] = f;
            if (k == G)
                out.push_back({layers, f * b(layers[0], layers[G])});
            else
                self(self, k + 1);
        }
    };
    rec(rec, 0);
    return out;
}

struct PositivityReport {
    bool chain_classical = true;
    bool q_in_nonnegative = true;
    bool q_f_nonnegative = true;
    bool b_nonnegative = true;
    std::vector<std::pair<int, int>> offending; // (ρ, τ) with q̃_ρ q̄_τ < 0

    bool pass() const { return chain_classical && q_in_nonnegative && q_f_nonnegative && b_nonnegative; }
};

inline PositivityReport positivity_check(const VecR& q_in, const VecR& q_f, const ChainSpec& c, double tolerance = 0.0)
{
    require(q_in.size() == c.N && q_f.size() == c.N, "positivity_check: vector length");
    PositivityReport r;
    for (const auto& S : c.ops)
        if ((S.array() < 0.0).any())
            r.chain_classical = false;
    r.q_in_nonnegative = (q_in.array() >= -tolerance).all();
    r.q_f_nonnegative = (q_f.array() >= -tolerance).all();
    for (int a = 0; a < c.N; ++a)
        for (int b = 0; b < c.N; ++b)
            if (q_in[a] * q_f[b] < -tolerance) {
                r.b_nonnegative = false;
                r.offending.emplace_back(a, b);
            }
    return r;
}

inline double overlap(const VecR& q_bar, const VecR& q_tilde)
{
    require(q_bar.size() == q_tilde.size(), "overlap: vector length");
    return q_bar.dot(q_tilde);
}

struct UnnormalizedExpectation {
    double value; // q̄ᵀ A′ q̃
    double Z;
    double normalized;
    MatR rho; // q̃ q̄ᵀ / Z
};

inline UnnormalizedExpectation unnormalized_expectation(const VecR& q_bar, const MatR& A, const VecR& q_tilde)
{
    require(A.rows() == q_tilde.size() && q_bar.size() == q_tilde.size(), "unnormalized_expectation: dimensions");
    double Z = q_bar.dot(q_tilde);
    if (Z == 0.0)
        throw NumericalError("unnormalized_expectation: Z = 0");
    double v = q_bar.dot(A * q_tilde);
    return {v, Z, v / Z, MatR(q_tilde * q_bar.transpose() / Z)};
}

// E = U_>ᵀ U_> with U_> the ordered product from slice k to t_f; (Sᵀ)^F S^F for constant S.
inline MatR future_projection(const ChainSpec& c, int k)
{
    MatR U = chain_product(c, k, c.G());
    return U.transpose() * U;
}

struct FutureReport {
    std::vector<double> values; // ⟨A(t)⟩ for each tested step count G
    double max_deviation = 0.0;
};

// Initial-value boundary q̄(t_f) = q̃(t_f) for constant S and varying t_f.
inline FutureReport independence_of_future_check(const MatR& S, const VecR& q_in, const MatR& A, int k,
                                                 const std::vector<int>& step_counts)
{
    require(!step_counts.empty(), "independence_of_future_check: no step counts");
    FutureReport r;
    for (int G : step_counts) {
        require(G > k, "independence_of_future_check: t_f must lie after t");
        ChainSpec c = uniform_chain<double>(S, G);
        auto qt = forward_sweep<double>(c, q_in);
        auto qb = backward_sweep<double>(c, qt.back());
        r.values.push_back(qb[k].dot(A * qt[k]) / qb[k].dot(qt[k]));
    }
    for (double v : r.values)
        r.max_deviation = std::max(r.max_deviation, std::abs(v - r.values.front()));
    return r;
}

} // namespace qfc
