#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qfc/evolution.hpp"

namespace qfc {

template <class T>
struct BasicOperator {
    Mat<T> matrix;
    double time_ref = 0.0;
    std::string origin;
};

using LocalOperator = BasicOperator<double>;

inline LocalOperator diagonal_operator(const VecR& values, double t = 0.0, std::string origin = "classical")
{
    return {MatR(values.asDiagonal()), t, std::move(origin)};
}

// Normalized expectation q̄ᵀ A′ q̃ / q̄ᵀ q̃.
template <class T>
T expectation(const WavePair<T>& w, const Mat<T>& A)
{
    require(A.rows() == w.q_tilde.size() && A.cols() == w.q_tilde.size(), "expectation: dimension mismatch");
    T Z = bilinear(w.q_bar, w.q_tilde);
    if (std::abs(Z) == 0.0)
        throw NumericalError("expectation: Z = 0");
    return bilinear(w.q_bar, Vec<T>(A * w.q_tilde)) / Z;
}

template <class T>
T expectation(const Density<T>& rho, const Mat<T>& A)
{
    require(A.rows() == rho.N() && A.cols() == rho.N(), "expectation: dimension mismatch");
    return (A * rho.matrix).trace();
}

template <class T>
Vec<T> local_probabilities(const Density<T>& rho)
{
    return rho.matrix.diagonal();
}

// Operator at slice `to` for an observable defined at slice `from` (any order).
template <class T>
Mat<T> transport_operator(const Mat<T>& A, const BasicChain<T>& c, int from, int to)
{
    require(A.rows() == c.N && A.cols() == c.N, "transport_operator: dimension mismatch");
    if (from == to)
        return A;
    if (from > to) {
        Mat<T> U = chain_product(c, to, from); // slice to -> slice from
        return RegularLU<T>(U).solve(Mat<T>(A * U));
    }
    Mat<T> U = chain_product(c, from, to);
    // U A U⁻¹ = (U⁻ᵀ (U A)ᵀ)ᵀ
    return RegularLU<T>(U).solve_transposed(Mat<T>((U * A).transpose())).transpose();
}

struct MeasurementSpectrum {
    VecR eigenvalues;             // λ_τ in the order of the diagonalizer rows
    MatR D;                       // D A′ D⁻¹ = diag(λ)
    VecR weights;                 // w_τ
    std::vector<double> values;   // distinct eigenvalues
    std::vector<double> probabilities;
    std::vector<std::pair<int, double>> negative; // (τ, w_τ) with w_τ < 0, never clamped
    double imag_residue = 0.0;

    bool nonnegative() const { return negative.empty(); }
};

namespace detail {

struct RealEigen {
    VecR values;
    MatR V; // columns are eigenvectors
    double imag_residue = 0.0;
};

inline RealEigen real_eigensystem(const MatR& A)
{
    Eigen::EigenSolver<MatR> es(A, true);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed");
    VecC ev = es.eigenvalues();
    double radius = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev[i].imag()) > tol::imag_spectrum * radius)
            throw ValidationError("operator has a complex spectrum: not a local observable candidate");
    MatC Vc = es.eigenvectors();
    // Rotate each eigenvector to be real: multiply by the conjugate phase of its largest entry.
    for (Eigen::Index j = 0; j < Vc.cols(); ++j) {
        Eigen::Index k = 0;
        Vc.col(j).cwiseAbs().maxCoeff(&k);
        cplx ph = Vc(k, j) / std::abs(Vc(k, j));
        Vc.col(j) /= ph;
    }
    RealEigen out{ev.real(), Vc.real(), max_abs(MatR(Vc.imag()))};
    Eigen::FullPivLU<MatR> lu(out.V);
    if (!lu.isInvertible() || 1.0 / std::max(lu.rcond(), 1e-300) > tol::max_condition)
        throw NumericalError("operator is defective (eigenvectors are not independent)");
    return out;
}

inline void group_weights(MeasurementSpectrum& m)
{
    std::vector<int> order(m.eigenvalues.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return m.eigenvalues[a] < m.eigenvalues[b]; });
    double scale = std::max(1.0, m.eigenvalues.cwiseAbs().maxCoeff());
    for (int idx : order) {
        double v = m.eigenvalues[idx];
        if (!m.values.empty() && std::abs(v - m.values.back()) <= tol::eigen_group * scale) {
            m.probabilities.back() += m.weights[idx];
        } else {
            m.values.push_back(v);
            m.probabilities.push_back(m.weights[idx]);
        }
    }
    for (Eigen::Index t = 0; t < m.weights.size(); ++t)
        if (m.weights[t] < 0.0)
            m.negative.emplace_back(static_cast<int>(t), m.weights[t]);
}

} // namespace detail

// w_τ = (D ρ′ D⁻¹)_ττ; for a pure state this is [(D⁻¹)ᵀ q̄]_τ [D q̃]_τ.
inline MeasurementSpectrum measurement_weights(const MatR& A, const ClassicalDensity& rho)
{
    require(A.rows() == rho.N() && A.cols() == rho.N(), "measurement_weights: dimension mismatch");
    auto es = detail::real_eigensystem(A);
    RegularLU<double> lu(es.V);
    MeasurementSpectrum m;
    m.eigenvalues = es.values;
    m.D = lu.inverse();
    m.imag_residue = es.imag_residue;
    m.weights = (m.D * rho.matrix * es.V).diagonal();
    detail::group_weights(m);
    return m;
}

inline MeasurementSpectrum measurement_weights(const MatR& A, const WavePair<double>& w)
{
    require(A.rows() == w.q_tilde.size(), "measurement_weights: dimension mismatch");
    auto es = detail::real_eigensystem(A);
    RegularLU<double> lu(es.V);
    MeasurementSpectrum m;
    m.eigenvalues = es.values;
    m.D = lu.inverse();
    m.imag_residue = es.imag_residue;
    double Z = bilinear(w.q_bar, w.q_tilde);
    if (Z == 0.0)
        throw NumericalError("measurement_weights: Z = 0");
    VecR left = es.V.transpose() * w.q_bar; // (D⁻¹)ᵀ q̄
    VecR right = lu.solve(w.q_tilde);       // D q̃
    m.weights = left.cwiseProduct(right) / Z;
    detail::group_weights(m);
    return m;
}

struct LocalObservableReport {
    bool expectation_consistent = true; // Σ λ_i p_i = ⟨A′⟩ (and = reference when given)
    bool real_spectrum = true;
    bool nonnegative_weights = true;
    bool product_rule = true; // ⟨B_n′⟩ = ⟨(A′)ⁿ⟩ for the supplied power operators
    int samples_checked = 0;
    double worst_weight = 0.0;
    double worst_expectation_gap = 0.0;
    double worst_product_gap = 0.0;
    std::string coverage; // condition (3) is certified over the sample set only

    bool all() const { return expectation_consistent && real_spectrum && nonnegative_weights && product_rule; }
};

// `powers[k]` is the operator that represents A^(k+2); `reference[i]` an independently known ⟨A⟩ on sample i.
inline LocalObservableReport check_local_observable(const MatR& A, const std::vector<ClassicalDensity>& samples,
                                                    const std::vector<MatR>& powers = {},
                                                    const std::vector<double>& reference = {},
                                                    double tolerance = 1e-10)
{
    require(!samples.empty(), "check_local_observable: empty sample set");
    LocalObservableReport r;
    r.coverage = "condition (3) checked on " + std::to_string(samples.size()) + " supplied states only";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        double ev = expectation(s, A);
        MeasurementSpectrum m;
        try {
            m = measurement_weights(A, s);
        } catch (const ValidationError&) {
            r.real_spectrum = false;
            ++r.samples_checked;
            continue;
        }
        double mean = 0.0;
        for (std::size_t g = 0; g < m.values.size(); ++g)
            mean += m.values[g] * m.probabilities[g];
        double gap = std::abs(mean - ev);
        if (i < reference.size())
            gap = std::max(gap, std::abs(reference[i] - ev));
        r.worst_expectation_gap = std::max(r.worst_expectation_gap, gap);
        if (gap > tolerance)
            r.expectation_consistent = false;
        double wmin = m.weights.minCoeff();
        r.worst_weight = std::min(r.worst_weight, wmin);
        if (wmin < -tolerance)
            r.nonnegative_weights = false;
        MatR An = A;
        for (const auto& B : powers) {
            An = An * A;
            double pg = std::abs(expectation(s, MatR(B - An)));
            r.worst_product_gap = std::max(r.worst_product_gap, pg);
            if (pg > tolerance)
                r.product_rule = false;
        }
        ++r.samples_checked;
    }
    return r;
}

enum class DerivativeVariant { midpoint, forward, continuum };

// midpoint {S⁻¹,[A′,S]}/2ε, forward S⁻¹[A′,S]/ε, continuum -[W,A′].
inline MatR derivative_operator(const MatR& A, const MatR& S, double eps,
                                DerivativeVariant v = DerivativeVariant::continuum,
                                const std::optional<MatR>& W = std::nullopt)
{
    require(eps > 0.0, "derivative_operator: ε must be positive");
    require(A.rows() == S.rows() && A.cols() == S.cols(), "derivative_operator: dimension mismatch");
    if (v == DerivativeVariant::continuum) {
        MatR Wm = W ? *W : generator(S, eps).W;
        return -(Wm * A - A * Wm);
    }
    MatR Sinv = checked_inverse(S);
    MatR c = A * S - S * A;
    if (v == DerivativeVariant::forward)
        return Sinv * c / eps;
    return (Sinv * c + c * Sinv) / (2 * eps);
}

template <class T>
struct TimedOperator {
    Mat<T> A; // already expressed on the common reference slice
    double t;
};

template <class T>
struct OrderedProduct {
    Mat<T> product;
    bool ambiguous = false; // equal time labels carried non-commuting factors
};

// Larger time label to the left; stable for equal labels.
template <class T>
OrderedProduct<T> t_ordered_product(std::vector<TimedOperator<T>> ops)
{
    require(!ops.empty(), "t_ordered_product: no factors");
    std::stable_sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) { return a.t > b.t; });
    OrderedProduct<T> out{Mat<T>::Identity(ops[0].A.rows(), ops[0].A.cols()), false};
    for (std::size_t i = 0; i < ops.size(); ++i) {
        require(ops[i].A.rows() == out.product.rows(), "t_ordered_product: dimension mismatch");
        for (std::size_t j = i + 1; j < ops.size() && ops[j].t == ops[i].t; ++j)
            if (max_abs(commutator(ops[i].A, ops[j].A)) > 1e-12)
                out.ambiguous = true;
        out.product = out.product * ops[i].A;
    }
    return out;
}

// D′ - C′² = A′ [A′, B′] B′ with C′ = A′B′, D′ = A′² B′².
template <class T>
Mat<T> incomplete_statistics_gap(const Mat<T>& A, const Mat<T>& B)
{
    require(A.rows() == B.rows() && A.cols() == B.cols(), "incomplete_statistics_gap: dimension mismatch");
    return A * commutator(A, B) * B;
}

template <class T>
T quantum_correlation(const Density<T>& rho, const Mat<T>& A, const Mat<T>& B)
{
    return (rho.matrix * anticommutator(A, B)).trace() / T(2);
}

} // namespace qfc
