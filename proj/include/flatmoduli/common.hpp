#ifndef FLATMODULI_COMMON_HPP
#define FLATMODULI_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace flatmoduli {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr Complex kI{0.0, 1.0};

// Default tolerance policy: structural zeros are exact, analytic identities
// are checked at 1e-11 relative unless an operation states otherwise.
namespace tol {
inline constexpr double structural = 0.0;
inline constexpr double analytic = 1e-11;
inline constexpr double membership = 1e-12;
inline constexpr double harmonic_snap = 1e-9;
}  // namespace tol

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct SpecMismatch : Error {
    using Error::Error;
};

struct BandLimitOverflow : Error {
    using Error::Error;
};

inline double sqr(double x) { return x * x; }

}  // namespace flatmoduli

#endif
