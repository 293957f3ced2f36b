#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace hecke {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;

// error taxonomy; the CLI maps these to exit codes
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_violation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct pole_proximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct no_convergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_point_at_infinity(const cplx& z) {
    return std::isinf(z.real()) || std::isinf(z.imag());
}

inline cplx point_at_infinity() {
    return {std::numeric_limits<double>::infinity(), 0.0};
}

// poles of the meromorphically continued fast operators sit in (1-N_0)/2
inline double distance_to_pole_set(const cplx& s) {
    if (s.real() > 0.5) return std::abs(s - cplx(0.5, 0.0));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0;; ++k) {
        double p = 0.5 * (1.0 - k);
        double d = std::abs(s - cplx(p, 0.0));
        best = std::min(best, d);
        if (p < s.real() - 1.0) break;
    }
    return best;
}

enum class Parity { Even, Odd };

inline const char* parity_name(Parity p) { return p == Parity::Even ? "even" : "odd"; }

enum class BranchVariant { V1, V2 };

enum class Exec { Serial, Parallel };

} // namespace hecke
