#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qfc {

using cplx = std::complex<double>;

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatR = Mat<double>;
using VecR = Vec<double>;
using MatC = Mat<cplx>;
using VecC = Vec<cplx>;

// Bad input: wrong sizes, out-of-range parameters, malformed data.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The math is well posed but the numbers are not: singular S, Z = 0, defective spectra.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for cases the library represents but deliberately does not evolve (W̃ != W).
struct UnsupportedCase : std::logic_error {
    using std::logic_error::logic_error;
};

namespace tol {
inline constexpr double spectral_radius = 1e-9;
inline constexpr double max_condition = 1e12;
inline constexpr double trace = 1e-10;
inline constexpr double pure = 1e-8;
inline constexpr double eigen_group = 1e-8;
inline constexpr double imag_spectrum = 1e-8;
inline constexpr double unit_sector = 1e-8;
inline constexpr double sqrt_floor = 1e-14;
inline constexpr double orthogonal = 1e-10;
} // namespace tol

inline void require(bool ok, const std::string& msg)
{
    if (!ok)
        throw ValidationError(msg);
}

} // namespace qfc
