#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "qfc/types.hpp"

namespace qfc {

template <class T>
double max_abs(const Mat<T>& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

template <class T>
double max_abs(const Vec<T>& v)
{
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

template <class T>
Mat<T> commutator(const Mat<T>& a, const Mat<T>& b)
{
    return a * b - b * a;
}

template <class T>
Mat<T> anticommutator(const Mat<T>& a, const Mat<T>& b)
{
    return a * b + b * a;
}

// LU factorization that refuses ill-conditioned input.
template <class T>
class RegularLU {
public:
    explicit RegularLU(const Mat<T>& m) : lu_(m)
    {
        if (m.rows() != m.cols())
            throw ValidationError("matrix must be square");
        double rc = m.rows() == 0 ? 1.0 : lu_.rcond();
        // Eigen's estimate can report rcond = 1 when a pivot is exactly zero.
        if (m.rows() > 0) {
            auto piv = lu_.matrixLU().diagonal().cwiseAbs();
            double lo = piv.minCoeff(), hi = piv.maxCoeff();
            if (!(lo > 0.0) || !std::isfinite(hi) || hi / lo > tol::max_condition)
                rc = 0.0;
        }
        if (!(rc > 0.0) || 1.0 / rc > tol::max_condition)
            throw NumericalError("singular matrix (condition estimate above 1e12)");
    }

    Vec<T> solve(const Vec<T>& b) const { return lu_.solve(b); }
    Mat<T> solve(const Mat<T>& b) const { return lu_.solve(b); }
    Mat<T> inverse() const { return lu_.inverse(); }

    // Solves xᵀ M = bᵀ, i.e. Mᵀ x = b.
    Vec<T> solve_transposed(const Vec<T>& b) const { return lu_.transpose().solve(b); }
    Mat<T> solve_transposed(const Mat<T>& b) const { return lu_.transpose().solve(b); }

private:
    Eigen::PartialPivLU<Mat<T>> lu_;
};

template <class T>
Mat<T> checked_inverse(const Mat<T>& m)
{
    return RegularLU<T>(m).inverse();
}

template <class T>
VecC eigenvalues(const Mat<T>& m)
{
    if constexpr (std::is_same_v<T, double>) {
        Eigen::EigenSolver<MatR> es(m, false);
        return es.eigenvalues();
    } else {
        Eigen::ComplexEigenSolver<MatC> es(m, false);
        return es.eigenvalues();
    }
}

template <class T>
double spectral_radius(const Mat<T>& m)
{
    if (m.size() == 0)
        return 0.0;
    return eigenvalues(m).cwiseAbs().maxCoeff();
}

// Eigenvalues sorted by descending modulus, ties by descending real then imaginary part.
inline std::vector<cplx> sorted_spectrum(const VecC& ev)
{
    std::vector<cplx> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (std::abs(std::abs(a) - std::abs(b)) > 1e-12)
            return std::abs(a) > std::abs(b);
        if (std::abs(a.real() - b.real()) > 1e-12)
            return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return out;
}

// Max distance between two spectra matched greedily, each element used once.
inline double spectrum_distance(const VecC& a, const VecC& b)
{
    if (a.size() != b.size())
        return INFINITY;
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        double best = INFINITY;
        Eigen::Index pick = -1;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (used[j])
                continue;
            double d = std::abs(a[i] - b[j]);
            if (d < best) {
                best = d;
                pick = j;
            }
        }
        used[pick] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

inline MatC to_complex(const MatR& m) { return m.cast<cplx>(); }
inline VecC to_complex(const VecR& v) { return v.cast<cplx>(); }

template <class T>
Mat<T> identity(Eigen::Index n)
{
    return Mat<T>::Identity(n, n);
}

} // namespace qfc
