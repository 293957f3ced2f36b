#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "hecke/common.hpp"
#include "hecke/funcspace.hpp"
#include "hecke/lerch.hpp"
#include "hecke/transfer.hpp"
#include "hecke/zeta.hpp"

namespace hecke {

// Slow eigenfunction realized through zone evaluators (interpolants on the
// certified disks, identity-plus-parabolic-sum closures near the cusps) with
// the slow functional equation as the extension mechanism beyond the zones.
class SlowFunction {
  public:
    struct Zone {
        DiskDomain disk;
        std::function<Eigen::VectorXcd(const cplx&)> eval;
        double min_re = -std::numeric_limits<double>::infinity(); // physical Re x floor
        int priority = 0;
    };

    SlowFunction(const OperatorSpec& spec, std::vector<Zone> zones);

    Eigen::VectorXcd eval(const cplx& x) const;
    int dim() const { return spec_.chi.dim(); }
    const OperatorSpec& spec() const { return spec_; }

  private:
    OperatorSpec spec_;
    std::vector<Zone> zones_;
    struct SlowTerm {
        GroupElement mover;
        Eigen::MatrixXcd twist;
        double weight;
    };
    std::vector<SlowTerm> terms_; // for the functional-equation extension

    Eigen::VectorXcd eval_depth(const cplx& x, int depth) const;
};

// f = L^fast f residual of a flat vector (sup norm at nodes, normalized)
double fast_residual(const OperatorMatrix& fast_op, const Eigen::VectorXcd& v);

// right singular vector of 1 - L for the smallest singular value
Eigen::VectorXcd extract_eigenvector(const OperatorMatrix& fast_op);

SlowFunction fast_to_slow(const OperatorMatrix& fast_op, const BlockVector& f);
BlockVector slow_to_fast(const OperatorMatrix& fast_op, const SlowFunction& phi);

double blockvec_residual(const BlockVector& a, const BlockVector& b);

// sup residual of the slow functional equation at interior check points
double slow_fe_residual(const OperatorMatrix& fast_op, const SlowFunction& phi);

// the family's accelerated letter and the f-block equal to (1 - alpha(p)) phi
struct DistinguishedParabolic {
    ParabolicSumSpec sum_spec; // bare sum of alpha_s(p^n) on the psi block
    std::vector<Gen> p_word;
    int psi_block = 0;
    double ladder_x0 = 0.1;    // approach coordinate start
    double fixed_point = 0.0;  // finite fixed point (cofinite/theta)
    bool at_infinity = false;  // non-cofinite: cusp at infinity
};
DistinguishedParabolic distinguished_parabolic(const HeckeFamily& fam,
                                               const DomainFamily& domains);

struct CrucialReport {
    double shift_residual = 0.0;     // alpha(p) L f = L f - alpha(p) f
    double identity1_residual = 0.0; // alpha(p)(1+L) f_psi = L f_psi
    double identity2_residual = 0.0; // L (1-alpha(p)) phi = alpha(p) phi
};
CrucialReport check_crucial_identities(const OperatorMatrix& fast_op, const BlockVector& f,
                                       const SlowFunction& phi);

// shift identity alone, on an arbitrary element of the psi block's space
double shift_identity_residual(const OperatorMatrix& fast_op, const FunctionElement& f);

struct Q0Report {
    double sup_q0 = 0.0;
    double invariance_residual = 0.0;
    double c_fit_abs = 0.0; // |c| of the fitted c/t + O(1) of Q0 itself
};
Q0Report q0_diagnostic(const OperatorMatrix& fast_op, const SlowFunction& phi);

struct GrowthReport {
    AsymptoticFit fit;
    double nonfixed_max = 0.0; // max |pr_r component| of the fitted c
};
GrowthReport growth_class_fit(const OperatorMatrix& fast_op, const SlowFunction& phi);

struct DecayReport {
    bool applicable = false;
    bool flag = false;
    double mismatch = 0.0; // worst C^2 jet mismatch across the gluing point
};
DecayReport decay_membership(const OperatorMatrix& fast_op, const BlockVector& f,
                             const SlowFunction& phi);

struct ContractionLengthStat {
    int length = 0;
    long words = 0;
    long failures = 0;
};
struct ContractionReport {
    std::vector<ContractionLengthStat> class_minus1, class_zero;
    int n0_minus1 = -1, n0_zero = -1; // first length with zero failures onward
    bool halfplane_ok = false;
    long halfplane_words = 0;
};
ContractionReport contraction_verify(const HeckeFamily& fam, int len_lo, int len_hi,
                                     Exec exec = Exec::Parallel);

// everything criterion-style in one record, for the CLI and acceptance suite
struct IsoCheckReport {
    cplx s0;
    Parity parity = Parity::Even;
    double eig_residual = 0.0;
    double fast_residual = 0.0;
    double roundtrip_fast = 0.0; // slow_to_fast(fast_to_slow(f)) vs f
    double roundtrip_slow = 0.0; // fast_to_slow(slow_to_fast(phi)) vs phi
    double slow_fe = 0.0;
    GrowthReport growth;
    Q0Report q0;
    CrucialReport crucial;
    DecayReport decay;
    std::string to_json() const;
};

IsoCheckReport iso_check_at(const HeckeFamily& fam, const Representation& chi, Parity parity,
                            const cplx& s0, int N, Exec exec = Exec::Parallel);

} // namespace hecke
