#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qfc/boundary.hpp"

namespace qfc {

enum class TransformKind { orthogonal_basis, global, local, sign_gauge, classical_basis, unitary_basis, heisenberg };

// One transformation matrix per slice t_in, ..., t_f.
template <class T>
struct SimilaritySequence {
    std::vector<Mat<T>> D;
    TransformKind kind = TransformKind::local;

    int slices() const { return static_cast<int>(D.size()); }
    const Mat<T>& at(int k) const { return D.at(static_cast<std::size_t>(k)); }
};

template <class T>
void validate(const SimilaritySequence<T>& s, Eigen::Index N)
{
    require(!s.D.empty(), "similarity sequence is empty");
    for (const auto& d : s.D) {
        require(d.rows() == N && d.cols() == N, "similarity matrices must be N x N");
        RegularLU<T> check(d);
    }
}

// Chain plus pure boundary data, the unit on which transforms act.
template <class T>
struct BasicSystem {
    BasicChain<T> chain;
    Vec<T> q_in;
    Vec<T> q_f;
};

using System = BasicSystem<double>;

template <class T>
T partition_function(const BasicSystem<T>& s)
{
    return bilinear(s.q_f, Vec<T>(chain_product(s.chain, 0, s.chain.G()) * s.q_in));
}

// ⟨A⟩ at slice k from the sweeps; bilinear, no complex conjugation.
template <class T>
T slice_expectation(const BasicSystem<T>& s, const Mat<T>& A, int k)
{
    auto qt = forward_sweep<T>(s.chain, s.q_in);
    auto qb = backward_sweep<T>(s.chain, s.q_f);
    return expectation(WavePair<T>{qt[k], qb[k], s.chain.time(k)}, A);
}

template <class T>
Vec<T> transform_wave(const SimilaritySequence<T>& s, int k, const Vec<T>& q)
{
    return s.at(k) * q;
}

template <class T>
Vec<T> transform_conjugate(const SimilaritySequence<T>& s, int k, const Vec<T>& q_bar)
{
    return RegularLU<T>(s.at(k)).solve_transposed(q_bar);
}

template <class T>
Mat<T> transform_operator(const SimilaritySequence<T>& s, int k, const Mat<T>& A)
{
    const Mat<T>& D = s.at(k);
    return RegularLU<T>(D).solve_transposed(Mat<T>((D * A).transpose())).transpose();
}

template <class T>
Mat<T> transform_density(const SimilaritySequence<T>& s, int k, const Mat<T>& rho)
{
    return transform_operator(s, k, rho);
}

// S′(t) = D(t+ε) S(t) D⁻¹(t), q̃′(t_in) = D(t_in) q̃, q̄′(t_f) = D(t_f)⁻ᵀ q̄.
template <class T>
BasicSystem<T> apply(const SimilaritySequence<T>& s, const BasicSystem<T>& sys)
{
    validate(sys.chain);
    require(s.slices() == sys.chain.G() + 1, "similarity sequence needs one matrix per slice");
    validate(s, sys.chain.N);
    BasicSystem<T> out{BasicChain<T>{sys.chain.N, sys.chain.eps, sys.chain.t_in, {}}, {}, {}};
    for (int k = 0; k < sys.chain.G(); ++k) {
        const Mat<T>& Dn = s.at(k + 1);
        Mat<T> DS = Dn * sys.chain.S(k);
        out.chain.ops.push_back(RegularLU<T>(s.at(k)).solve_transposed(Mat<T>(DS.transpose())).transpose());
    }
    out.q_in = transform_wave(s, 0, sys.q_in);
    out.q_f = transform_conjugate(s, sys.chain.G(), sys.q_f);
    return out;
}

template <class T>
SimilaritySequence<T> global_similarity(const Mat<T>& D, int G)
{
    require(G >= 0, "global_similarity: negative step count");
    RegularLU<T> check(D);
    return {std::vector<Mat<T>>(static_cast<std::size_t>(G) + 1, D), TransformKind::global};
}

inline SimilaritySequence<double> change_basis(const MatR& V, int G)
{
    require(V.rows() == V.cols(), "change_basis: V must be square");
    require(max_abs(MatR(V.transpose() * V - MatR::Identity(V.rows(), V.cols()))) <= tol::orthogonal,
            "change_basis: V is not orthogonal");
    auto s = global_similarity<double>(V, G);
    s.kind = TransformKind::orthogonal_basis;
    return s;
}

template <class T>
SimilaritySequence<T> local_similarity(std::vector<Mat<T>> D)
{
    SimilaritySequence<T> s{std::move(D), TransformKind::local};
    require(!s.D.empty(), "local_similarity: empty sequence");
    validate(s, s.D.front().rows());
    return s;
}

// Diagonal ±1 matrices ŝ_τ(t), one sign vector per slice.
inline SimilaritySequence<double> sign_gauge(const std::vector<VecR>& signs)
{
    require(!signs.empty(), "sign_gauge: empty sequence");
    SimilaritySequence<double> s{{}, TransformKind::sign_gauge};
    for (const auto& v : signs) {
        require(v.size() == signs.front().size(), "sign_gauge: sign vectors differ in length");
        for (Eigen::Index i = 0; i < v.size(); ++i)
            require(v[i] == 1.0 || v[i] == -1.0, "sign_gauge: entries must be ±1");
        s.D.push_back(MatR(v.asDiagonal()));
    }
    return s;
}

// D(t+ε) = S′(t) D(t) S†(t) with D(t_in) = 1 maps the unitary chain S onto the target chain S′.
template <class T>
SimilaritySequence<cplx> classical_basis_for_quantum(const BasicChain<T>& unitary, const ChainSpec& target,
                                                     double tolerance = 1e-9)
{
    validate(unitary);
    validate(target);
    require(unitary.N == target.N && unitary.G() == target.G(), "classical_basis: dimension mismatch");
    SimilaritySequence<cplx> s{{MatC::Identity(unitary.N, unitary.N)}, TransformKind::classical_basis};
    for (int k = 0; k < unitary.G(); ++k) {
        MatC S = unitary.S(k).template cast<cplx>();
        require(max_abs(MatC(S.adjoint() * S - MatC::Identity(S.rows(), S.cols()))) <= tolerance,
                "classical_basis: chain member is not unitary");
        require((target.S(k).array() >= 0.0).all(), "classical_basis: target chain must be nonnegative");
        s.D.push_back(target.S(k).cast<cplx>() * s.D.back() * S.adjoint());
    }
    validate(s, unitary.N);
    return s;
}

struct UnitaryBasis {
    SimilaritySequence<double> sequence; // D(t)
    std::vector<MatR> B;                 // B(t) = D⁻¹ D⁻ᵀ
    double min_eigenvalue = 0.0;         // smallest eigenvalue of any B(t)
};

inline MatR symmetric_sqrt(const MatR& B, double floor, double* min_ev = nullptr)
{
    Eigen::SelfAdjointEigenSolver<MatR> es(B);
    if (es.info() != Eigen::Success)
        throw NumericalError("symmetric_sqrt: eigendecomposition failed");
    VecR ev = es.eigenvalues();
    if (min_ev)
        *min_ev = ev.minCoeff();
    if (ev.minCoeff() < floor)
        throw NumericalError("unitary basis: B lost positive definiteness (eigenvalue below 1e-14)");
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

// B(t+ε) = S̄ B S̄ᵀ from B(t_in) = 1 and D⁻¹ = B^{1/2}; S′ = B₊^{-1/2} S̄ B^{1/2} is orthogonal.
inline UnitaryBasis unitary_basis_for_classical(const ChainSpec& c)
{
    validate(c);
    require_regular_chain(c);
    UnitaryBasis out;
    out.sequence.kind = TransformKind::unitary_basis;
    out.B.push_back(MatR::Identity(c.N, c.N));
    out.min_eigenvalue = 1.0;
    for (int k = 0; k < c.G(); ++k) {
        MatR Bn = c.S(k) * out.B.back() * c.S(k).transpose();
        out.B.push_back((Bn + Bn.transpose()) / 2);
    }
    for (const auto& B : out.B) {
        double m = 0.0;
        MatR root = symmetric_sqrt(B, tol::sqrt_floor, &m);
        out.min_eigenvalue = std::min(out.min_eigenvalue, m);
        out.sequence.D.push_back(checked_inverse(root));
    }
    return out;
}

template <class T>
struct HeisenbergPicture {
    std::vector<Mat<T>> U_bar; // Ū(t, t_in) = S(t-ε)⋯S(t_in) per slice
};

template <class T>
HeisenbergPicture<T> heisenberg_picture(const BasicChain<T>& c)
{
    validate(c);
    HeisenbergPicture<T> h{{Mat<T>::Identity(c.N, c.N)}};
    for (int k = 0; k < c.G(); ++k) {
        RegularLU<T> check(c.S(k));
        h.U_bar.push_back(c.S(k) * h.U_bar.back());
    }
    return h;
}

// A′_H(t) = Ū⁻¹ A′ Ū
template <class T>
Mat<T> heisenberg_operator(const HeisenbergPicture<T>& h, const Mat<T>& A, int k)
{
    const Mat<T>& U = h.U_bar.at(static_cast<std::size_t>(k));
    return RegularLU<T>(U).solve(Mat<T>(A * U));
}

// ⟨A(t)⟩ = q̄′ᵀ(t_f) A′_H(t) q̃(t_in) / Z with q̄′(t_f) = Ūᵀ(t_f, t_in) q̄(t_f).
template <class T>
T heisenberg_expectation(const BasicSystem<T>& s, const HeisenbergPicture<T>& h, const Mat<T>& A, int k)
{
    Vec<T> qb = h.U_bar.back().transpose() * s.q_f;
    T Z = bilinear(qb, s.q_in);
    if (std::abs(Z) == 0.0)
        throw NumericalError("heisenberg_expectation: Z = 0");
    return bilinear(qb, Vec<T>(heisenberg_operator(h, A, k) * s.q_in)) / Z;
}

// The Heisenberg picture as a local similarity, D(t) = Ū⁻¹(t, t_in), for which S′ = 1.
template <class T>
SimilaritySequence<T> heisenberg_sequence(const HeisenbergPicture<T>& h)
{
    SimilaritySequence<T> s{{}, TransformKind::heisenberg};
    for (const auto& U : h.U_bar)
        s.D.push_back(checked_inverse(U));
    return s;
}

struct SectorDecomposition {
    VecC eigenvalues;
    std::vector<int> unit;        // indices of |λ| = 1 within 1e-8
    std::vector<int> contracting; // the rest
    std::vector<double> phases;   // α of each unit eigenvalue
    MatR P;                       // real basis, environment columns first, unit sector last
    MatR S_block;                 // P⁻¹ S P
    MatR W_block;                 // (S_block - S_block⁻¹)/2ε
    int unit_dim = 0;
    MatR W_unit; // antisymmetric unit-sector block of W_block
    MatC H2;     // i W_unit, so the unit block reads -i H2
    double off_block = 0.0;   // largest entry coupling the two sectors
    double antisymmetry = 0.0; // max |W_unit + W_unitᵀ|
    bool all_unit_modes_assigned_to_quantum = true;
};

// Real block form: a pair λ = a ± ib with eigenvector x + iy gives S[x y] = [x y][[a, b], [-b, a]].
inline SectorDecomposition sector_decomposition(const MatR& S, double eps = 1.0)
{
    require(S.rows() == S.cols(), "sector_decomposition: S must be square");
    require(eps > 0.0, "sector_decomposition: ε must be positive");
    const auto N = S.rows();
    Eigen::EigenSolver<MatR> es(S, true);
    if (es.info() != Eigen::Success)
        throw NumericalError("sector_decomposition: eigendecomposition failed");
    SectorDecomposition d;
    d.eigenvalues = es.eigenvalues();
    MatC V = es.eigenvectors();
    struct Col {
        VecR v;
        bool unit;
    };
    std::vector<Col> env, uni;
    std::vector<bool> used(static_cast<std::size_t>(N), false);
    const double imag_tol = 1e-12;
    for (Eigen::Index i = 0; i < N; ++i) {
        if (used[i])
            continue;
        cplx l = d.eigenvalues[i];
        bool unit = std::abs(std::abs(l) - 1.0) <= tol::unit_sector;
        (unit ? d.unit : d.contracting).push_back(static_cast<int>(i));
        auto& dst = unit ? uni : env;
        if (std::abs(l.imag()) <= imag_tol * std::max(1.0, std::abs(l))) {
            Eigen::Index k = 0;
            V.col(i).cwiseAbs().maxCoeff(&k);
            VecC v = V.col(i) / (V(k, i) / std::abs(V(k, i)));
            dst.push_back({v.real(), unit});
            used[i] = true;
            if (unit)
                d.phases.push_back(std::arg(l));
            continue;
        }
        // find the conjugate partner
        Eigen::Index partner = -1;
        double best = INFINITY;
        for (Eigen::Index j = 0; j < N; ++j)
            if (j != i && !used[j] && std::abs(d.eigenvalues[j] - std::conj(l)) < best) {
                best = std::abs(d.eigenvalues[j] - std::conj(l));
                partner = j;
            }
        if (partner < 0 || best > 1e-8 * std::max(1.0, std::abs(l)))
            throw NumericalError("sector_decomposition: complex eigenvalue without conjugate partner");
        used[i] = used[partner] = true;
        (unit ? d.unit : d.contracting).push_back(static_cast<int>(partner));
        VecC v = l.imag() > 0 ? VecC(V.col(i)) : VecC(V.col(partner));
        dst.push_back({v.real(), unit});
        dst.push_back({v.imag(), unit});
        if (unit) {
            double a = std::abs(std::arg(l));
            d.phases.push_back(a);
            d.phases.push_back(-a);
        }
    }
    d.unit_dim = static_cast<int>(uni.size());
    d.P.resize(N, N);
    Eigen::Index c = 0;
    for (const auto& col : env)
        d.P.col(c++) = col.v;
    for (const auto& col : uni)
        d.P.col(c++) = col.v;
    Eigen::FullPivLU<MatR> lu(d.P);
    if (!lu.isInvertible() || 1.0 / std::max(lu.rcond(), 1e-300) > tol::max_condition)
        throw NumericalError("sector_decomposition: S is defective");
    d.S_block = lu.solve(MatR(S * d.P));
    MatR Sinv = checked_inverse(d.S_block);
    d.W_block = (d.S_block - Sinv) / (2 * eps);
    const Eigen::Index e = N - d.unit_dim;
    d.W_unit = d.W_block.bottomRightCorner(d.unit_dim, d.unit_dim);
    d.H2 = cplx(0, 1) * d.W_unit.cast<cplx>();
    if (d.unit_dim > 0 && e > 0)
        d.off_block = std::max(max_abs(MatR(d.S_block.topRightCorner(e, d.unit_dim))),
                               max_abs(MatR(d.S_block.bottomLeftCorner(d.unit_dim, e))));
    d.antisymmetry = max_abs(MatR(d.W_unit + d.W_unit.transpose()));
    return d;
}

struct QuantumSubsystemReport {
    bool commutes_with_J = false; // [J, ρ′] = 0
    bool closed = false;          // [[J, H], ρ′] = 0
    double residual_J = 0.0;
    double residual_closure = 0.0;
    std::optional<double> evolution_deviation; // max |ρ_full - ρ_vN| over the integration window
    bool pass() const { return commutes_with_J && closed; }
};

// With W = J - iH: if ρ′ commutes with J and [J, H], evolves ∂_t ρ = -i[H, ρ] and [W, ρ] side by side.
inline QuantumSubsystemReport quantum_subsystem_check(const MatR& W, const MatR& rho, double duration = 1.0,
                                                      double dt = 1e-3, double tolerance = 1e-10)
{
    require(W.rows() == W.cols() && rho.rows() == W.rows() && rho.cols() == W.cols(),
            "quantum_subsystem_check: dimension mismatch");
    MatR J = (W + W.transpose()) / 2;
    MatC H = cplx(0, 1) * MatC(((W - W.transpose()) / 2).cast<cplx>());
    QuantumSubsystemReport r;
    r.residual_J = max_abs(MatR(commutator(J, rho)));
    MatC JH = commutator(MatC(J.cast<cplx>()), H);
    r.residual_closure = max_abs(MatC(commutator(JH, MatC(rho.cast<cplx>()))));
    r.commutes_with_J = r.residual_J <= tolerance;
    r.closed = r.residual_closure <= tolerance;
    if (r.pass() && duration > 0.0) {
        auto full = integrate_von_neumann<double>(rho, W, 0.0, duration, dt);
        MatC Wq = cplx(0, -1) * H;
        auto quantum = integrate_von_neumann<cplx>(MatC(rho.cast<cplx>()), Wq, 0.0, duration, dt);
        double dev = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i)
            dev = std::max(dev, max_abs(MatC(full[i].rho.cast<cplx>() - quantum[i].rho)));
        r.evolution_deviation = dev;
    }
    return r;
}

// For unitary S and a unitary target S″ with the same spectrum, V = E″ E† with E, E″ orthonormal
// eigenvector matrices paired by sorted phase (ties by index), so that S″ = V S V†.
struct EigenMatching {
    MatC V;
    double residual = 0.0; // max |V S V† - S″|
};

namespace detail {

inline MatC orthonormal_eigenvectors(const MatC& S, std::vector<int>& order, VecC& ev)
{
    Eigen::ComplexEigenSolver<MatC> es(S, true);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigendecomposition failed");
    ev = es.eigenvalues();
    order.resize(static_cast<std::size_t>(ev.size()));
    std::iota(order.begin(), order.end(), 0);
    // phases folded into (-π, π], so -1 computed as arg -π sorts with +π
    auto phase = [](cplx z) {
        double a = std::arg(z);
        return a <= -std::acos(-1.0) + 1e-9 ? a + 2 * std::acos(-1.0) : a;
    };
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double pa = phase(ev[a]), pb = phase(ev[b]);
        if (std::abs(pa - pb) > 1e-9)
            return pa < pb;
        return false;
    });
    MatC E(S.rows(), S.cols());
    for (std::size_t j = 0; j < order.size(); ++j)
        E.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(order[j]);
    // Orthonormalize within groups of equal eigenvalue.
    std::size_t start = 0;
    while (start < order.size()) {
        std::size_t end = start + 1;
        while (end < order.size() && std::abs(ev[order[end]] - ev[order[start]]) <= 1e-9)
            ++end;
        auto n = static_cast<Eigen::Index>(end - start);
        Eigen::HouseholderQR<MatC> qr(E.middleCols(static_cast<Eigen::Index>(start), n));
        E.middleCols(static_cast<Eigen::Index>(start), n) = qr.householderQ() * MatC::Identity(S.rows(), n);
        start = end;
    }
    return E;
}

} // namespace detail

inline EigenMatching classical_basis_eigen_matching(const MatC& S, const MatC& S_target, double tolerance = 1e-9)
{
    require(S.rows() == S_target.rows() && S.cols() == S_target.cols(), "eigen matching: dimension mismatch");
    for (const MatC* m : {&S, &S_target})
        require(max_abs(MatC(m->adjoint() * *m - MatC::Identity(m->rows(), m->cols()))) <= tolerance,
                "eigen matching: operators must be unitary");
    std::vector<int> oa, ob;
    VecC ea, eb;
    MatC E = detail::orthonormal_eigenvectors(S, oa, ea);
    MatC Et = detail::orthonormal_eigenvectors(S_target, ob, eb);
    for (std::size_t j = 0; j < oa.size(); ++j)
        if (std::abs(ea[oa[j]] - eb[ob[j]]) > 1e-8)
            throw ValidationError("eigen matching: spectra differ");
    EigenMatching m{Et * E.adjoint(), 0.0};
    m.residual = max_abs(MatC(m.V * S * m.V.adjoint() - S_target));
    return m;
}

} // namespace qfc
