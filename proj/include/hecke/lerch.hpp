#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hecke/action.hpp"
#include "hecke/common.hpp"
#include "hecke/group.hpp"
#include "hecke/representation.hpp"

namespace hecke {

struct LerchParams {
    cplx s;
    double a = 0.0; // phase; e^{2 pi i a} is the chi eigenvalue on the parabolic direction
    cplx w = 1.0;   // Re w > 0
    BranchVariant variant = BranchVariant::V1;
};

// Direct summation of sum_{n>=0} e^{2 pi i n a} (n+w)^{-s}; requires Re s > 1.
// Kahan-compensated, stops when the tail bound drops below 1e-14.
cplx lerch_direct(const LerchParams& p);

// Meromorphic continuation. Integer phase: Euler-Maclaurin (Hurwitz), simple
// pole at s = 1. Non-integer phase: index shift plus the large-argument
// asymptotic series with polylog coefficients; entire in s.
cplx lerch_continued(const LerchParams& p, double* err_estimate = nullptr);

// asymptotic fit v(x) ~ c/x + c0 on a geometric sample ladder, per channel
struct AsymptoticFit {
    Eigen::VectorXcd c_minus1;
    Eigen::VectorXcd c0;
    double fit_residual = 0.0;
    std::vector<int> nonfixed_channels; // chi channels where c must vanish
};

AsymptoticFit fit_asymptotic(const std::vector<double>& xs,
                             const std::vector<Eigen::VectorXcd>& values);

// scalar function holomorphic on |omega| < rho, with omega = 0 reachable
struct ScalarSeriesFn {
    std::function<cplx(const cplx&)> eval;
    double rho = 0.0;
};

// Prepared evaluator for S(u) = sum_{n>=1} e^{2 pi i n a} ((u+n*lambda)^2)^{-s} H(1/(u+n*lambda)).
// Taylor head of degree < M through the continued Lerch zeta, remainder summed
// directly with a certified tail bound below tol.
class TranslatedPowerSum {
  public:
    TranslatedPowerSum(cplx s, double a, double lambda, ScalarSeriesFn H, int M, double tol = 1e-12);

    cplx eval(const cplx& u) const;
    int head_degree() const { return M_; }
    const Eigen::VectorXcd& head_coeffs() const { return coeff_; }

  private:
    cplx s_;
    double a_;
    double lambda_;
    ScalarSeriesFn H_;
    int M_;
    double tol_;
    int n_samples_ = 0;
    double rho_c_ = 0.0;          // Cauchy circle radius
    std::vector<cplx> circle_;    // H on the circle
    Eigen::VectorXcd coeff_;      // Taylor head coefficients
    double rem_bound_ = 0.0;      // sup |P_M H| on |omega| = rho_c

    cplx remainder_at(const cplx& omega) const;
};

int default_taylor_degree(const cplx& s);

// structure of a parabolic element as a conjugated translation
struct ParabolicConjugation {
    bool translation_at_infinity = false;
    double lambda = 0.0;     // p^{-1} = h t_lambda h^{-1}
    GroupElement h, h_inv;   // identity when translation_at_infinity
    double fixed_point = 0.0;
    cplx pullback_scale = 1.0, pullback_shift = 0.0; // H(om) = f(scale*om + shift)
};

ParabolicConjugation deduce_translation_structure(const GroupElement& p);

// (sum_{n>=1} alpha_s(p^n)) f at the target points, per the channel
// decomposition of the unitary phase matrix chi(p). Targets must satisfy
// Re(h^{-1}.x) > -lambda. Throws domain_violation/pole_proximity.
std::vector<Eigen::VectorXcd> parabolic_sum_apply(const GroupElement& p,
                                                  const Eigen::MatrixXcd& phase_matrix,
                                                  const cplx& s, const VectorFunction& f,
                                                  double f_radius_at_fixed_point, int M,
                                                  const std::vector<cplx>& targets,
                                                  double tol = 1e-12);

} // namespace hecke
