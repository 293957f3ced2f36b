#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hecke/action.hpp"
#include "hecke/common.hpp"
#include "hecke/funcspace.hpp"
#include "hecke/group.hpp"
#include "hecke/lerch.hpp"
#include "hecke/representation.hpp"
#include "hecke/structure.hpp"

namespace hecke {

enum class Speed { Slow, Fast };

struct OperatorSpec {
    HeckeFamily family = HeckeFamily::cofinite(3);
    Parity parity = Parity::Even;
    cplx s = 2.0;
    Representation chi = Representation::trivial();
    Speed speed = Speed::Fast;
    int n_nodes = 32;
    BranchVariant variant = BranchVariant::V1;
    double shrink = 0.9;
    // interval (Chebyshev) sections represent eigenfunctions best; the
    // monomial sections give the cleanest determinants on the cofinite disks
    bool eigenfunction_mode = false;
};

enum class MatrixBasis { Nodal, Chebyshev, Monomial };

struct TermLogEntry {
    std::string target, source, word, desc;
    double weight = 1.0;
    int det_sign = 1;
    bool infinite_sum = false;
};

struct OperatorMatrix {
    OperatorSpec spec;
    DomainFamily domains;
    Eigen::MatrixXcd blocks;
    std::vector<TermLogEntry> term_log;
    // Fast builds are Chebyshev-coefficient sections: entry functions are
    // sampled on an oversampled real node grid and projected by DCT. The
    // smoothing projection removes the spurious modes of plain collocation
    // sections and keeps entries O(1) at complex s (the cocycle factors have
    // unit modulus on the real intervals). Slow builds collocate on nodes.
    MatrixBasis basis = MatrixBasis::Nodal;

    int n_disks() const { return (int)domains.disks.size(); }
    int node_count() const { return spec.n_nodes; }
    int chi_dim() const { return spec.chi.dim(); }
    int block_offset(int disk) const { return disk * spec.n_nodes * spec.chi.dim(); }
    int dim() const { return (int)blocks.rows(); }
    std::string to_json() const;
};

OperatorMatrix build_slow(const OperatorSpec& spec, Exec exec = Exec::Parallel);
OperatorMatrix build_fast(const OperatorSpec& spec, Exec exec = Exec::Parallel);

// truncation oracle: every infinite block replaced by the plain partial sum
// n <= n_max of its finite terms
OperatorMatrix build_fast_brute(const OperatorSpec& spec, long n_max, Exec exec = Exec::Parallel);

using BlockVector = std::vector<FunctionElement>;

BlockVector blockvec_from_flat(const OperatorMatrix& op, const Eigen::VectorXcd& v);
Eigen::VectorXcd flat_from_blockvec(const OperatorMatrix& op, const BlockVector& f);
BlockVector apply(const OperatorMatrix& op, const BlockVector& f);

// Rayleigh-quotient estimates of the leading eigenvalue along the iteration
std::vector<cplx> power_iterate(const OperatorMatrix& op, const Eigen::VectorXcd& f0, int k);

// consolidated scalar factor of a finite term between two (possibly chart /
// weighted) components, at a real target node in working coordinates
cplx finite_term_scalar(const GroupElement& mover, const DiskDomain& target,
                        const DiskDomain& source, const cplx& w_node, const cplx& s);

// Prepared evaluator for one parabolic block sum_{n>=1} alpha_s(pre p^n)
// applied to data on a source component; evaluates at physical targets.
class ParabolicBlock {
  public:
    ParabolicBlock(const ParabolicSumSpec& sp, const HeckeFamily& fam, const Representation& chi,
                   const cplx& s, const DiskDomain& source, int M = 0, double tol = 1e-12);

    // row over source cardinals x channels at one physical target point
    Eigen::MatrixXcd row_at(const cplx& x_physical) const; // d x (N*d)
    // row at a node of a (possibly weighted) target component, with the
    // target weight consolidated into the prefactor
    Eigen::MatrixXcd row_at_target(const DiskDomain& target, double w_node) const;

    // apply to a concrete source element
    Eigen::VectorXcd apply_to(const FunctionElement& f, const cplx& x_physical) const;

    double lambda() const { return lambda_; }

  private:
    const DiskDomain source_;
    DiskDomain coarse_; // sums are taken on a coarse sub-grid, where the
                        // endpoint Taylor data of the cardinals is stable
    cplx s_;
    int M_;
    double tol_;
    double lambda_;
    bool translation_ = false;
    double source_pole_shift_ = 0.0; // u = x - shift (translation case)
    GroupElement e_pre_, u_el_, h_;
    cplx pull_scale_, pull_shift_;
    Eigen::MatrixXcd preU_, Uinv_;   // chi(pre) U and U^{-1}
    std::vector<double> phases_;     // a_j per channel
    double rho_H_ = 0.0, rho_c_ = 0.0;
    Eigen::MatrixXcd taylor_;        // M x Nc coarse-cardinal Taylor coefficients
    Eigen::MatrixXcd fine_to_coarse_; // Nc x N interpolation
    double rem_bound_ = 0.0;         // sup over circle and cardinals of |P_M C|

    Eigen::MatrixXcd channel_rows(const cplx& u) const; // d x Nc scalar rows
};

} // namespace hecke
