#pragma once

// Truncated power-series arithmetic for the monomial (nuclear-basis)
// assembly of the fast operators on the cofinite families. A Series holds
// the coefficients of sum_p c_p t^p with t = z - z0, truncated at length L.

#include <Eigen/Dense>

#include "hecke/common.hpp"

namespace hecke {
namespace series {

using Series = Eigen::VectorXcd;

inline Series constant(int L, const cplx& c) {
    Series s = Series::Zero(L);
    s(0) = c;
    return s;
}

inline Series mul(const Series& a, const Series& b) {
    int L = (int)a.size();
    Series out = Series::Zero(L);
    for (int i = 0; i < L; ++i) {
        if (a(i) == cplx(0.0, 0.0)) continue;
        for (int j = 0; j + i < L; ++j) out(i + j) += a(i) * b(j);
    }
    return out;
}

// (alpha + gamma t)^{-1} as a geometric series
inline Series inv_linear(int L, const cplx& alpha, const cplx& gamma) {
    if (std::abs(alpha) < 1e-300) throw domain_violation("series: pole at expansion point");
    Series out(L);
    cplx q = -gamma / alpha, pw = 1.0 / alpha;
    for (int p = 0; p < L; ++p) {
        out(p) = pw;
        pw *= q;
    }
    return out;
}

// log(alpha + gamma t) - log(alpha)
inline Series log1p_linear(int L, const cplx& alpha, const cplx& gamma) {
    Series out = Series::Zero(L);
    cplx q = gamma / alpha, pw = q;
    for (int p = 1; p < L; ++p) {
        out(p) = pw * ((p % 2 == 1) ? 1.0 : -1.0) / (double)p;
        pw *= q;
    }
    return out;
}

// exp of a series with vanishing constant term
inline Series exp0(const Series& a) {
    int L = (int)a.size();
    Series out = Series::Zero(L);
    out(0) = 1.0;
    for (int p = 1; p < L; ++p) {
        cplx acc = 0.0;
        for (int j = 1; j <= p; ++j) acc += (double)j * a(j) * out(p - j);
        out(p) = acc / (double)p;
    }
    return out;
}

// Moebius image (a z + b)/(c z + d) as a series around z0
inline Series mobius(int L, double a, double b, double c, double d, const cplx& z0) {
    cplx num0 = a * z0 + b, den0 = c * z0 + d;
    Series inv = inv_linear(L, den0, cplx(c, 0.0));
    Series out = inv * num0;
    for (int p = 0; p + 1 < L; ++p) out(p + 1) += a * inv(p);
    return out;
}

// ((alpha + gamma t)^2)^{-s}, continued from the expansion point
inline Series linear_pow_m2s(int L, const cplx& alpha, const cplx& gamma, const cplx& s) {
    Series lg = log1p_linear(L, alpha, gamma);
    Series ex = exp0(lg * (-2.0 * s));
    return ex * std::exp(-s * std::log(alpha * alpha));
}

} // namespace series
} // namespace hecke
