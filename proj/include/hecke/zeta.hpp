#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hecke/common.hpp"
#include "hecke/group.hpp"
#include "hecke/representation.hpp"
#include "hecke/transfer.hpp"

namespace hecke {

// det(1 - L) of a discretized fast operator, by pivoted LU
cplx fredholm_det(const OperatorMatrix& op);

struct SelbergZeta {
    cplx Z, Zplus, Zminus;
};

// Z(s) = det(1 - L^+) det(1 - L^-); the factors are the even/odd determinants
// (equal to Z_+/Z_- for a single-cusp lattice with trivial chi)
SelbergZeta selberg_zeta(const HeckeFamily& fam, const Representation& chi, const cplx& s, int N,
                         Exec exec = Exec::Parallel);

struct EulerProductResult {
    cplx value = 1.0;
    double tail_bound = 0.0;  // |euler - Z| estimate: k-tail + word-length tail
    double k_tail = 0.0;      // rigorous geometric bound on the truncated k-product
    double length_tail = 0.0; // shell-ratio extrapolation of the missing classes
    int n_classes = 0;
    bool tail_warning = false;
};

EulerProductResult euler_product(const HeckeFamily& fam, const Representation& chi, const cplx& s,
                                 int max_word_len, int k_max = 40);
EulerProductResult euler_product_from_classes(const std::vector<ConjClass>& classes, int dim,
                                              const cplx& s, int k_max,
                                              const std::vector<int>* shell_lengths = nullptr);

struct ZeroRecord {
    cplx s0;
    Parity parity = Parity::Even;
    double det_residual = 0.0;
    double eig_residual = 0.0;
    int winding = 0;
    int N_used = 0;
    bool verified = false;          // re-verification at N+8 nodes converged nearby
    double displacement_check = 0.0; // |s0(N+8) - s0(N)|
    cplx det_other_parity = 0.0;
    std::string note;
};

struct ScanSample {
    cplx s;
    cplx det;
};

struct ScanResult {
    std::vector<ScanSample> samples;
    std::vector<ZeroRecord> zeros;
};

// determinant scan along the segment s_begin -> s_end with the given step;
// dips are bracketed, winding counted over small rectangles, zeros refined by
// secant iteration and re-verified at N+8 nodes
ScanResult zero_scan_segment(const HeckeFamily& fam, const Representation& chi, Parity parity,
                             const cplx& s_begin, const cplx& s_end, double step, int N,
                             Exec exec = Exec::Parallel);

// vertical-line scan at Re s = re_s, Im s in [im_lo, im_hi]
ScanResult zero_scan(const HeckeFamily& fam, const Representation& chi, Parity parity, double re_s,
                     double im_lo, double im_hi, double step, int N, Exec exec = Exec::Parallel);

std::optional<ZeroRecord> refine_zero(const HeckeFamily& fam, const Representation& chi,
                                      Parity parity, const cplx& s_guess, int N,
                                      Exec exec = Exec::Parallel);

} // namespace hecke
