#include "hecke/zeta.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hecke {

cplx fredholm_det(const OperatorMatrix& op) {
    if (op.spec.speed != Speed::Fast)
        throw config_error("fredholm_det expects a fast build");
    Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(op.dim(), op.dim()) - op.blocks;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).determinant();
}

SelbergZeta selberg_zeta(const HeckeFamily& fam, const Representation& chi, const cplx& s, int N,
                         Exec exec) {
    OperatorSpec spec;
    spec.family = fam;
    spec.chi = chi;
    spec.s = s;
    spec.n_nodes = N;
    spec.speed = Speed::Fast;
    spec.parity = Parity::Even;
    cplx zp = fredholm_det(build_fast(spec, exec));
    spec.parity = Parity::Odd;
    cplx zm = fredholm_det(build_fast(spec, exec));
    return {zp * zm, zp, zm};
}

EulerProductResult euler_product_from_classes(const std::vector<ConjClass>& classes, int dim,
                                              const cplx& s, int k_max,
                                              const std::vector<int>* shell_lengths) {
    EulerProductResult res;
    res.n_classes = (int)classes.size();
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    std::map<int, double> shell; // word length -> sum of d N^{-Re s} factors
    double sigma = s.real();
    for (size_t ci = 0; ci < classes.size(); ++ci) {
        const ConjClass& c = classes[ci];
        Eigen::MatrixXcd chi_h(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) chi_h(i, j) = c.chi_factor[i][j];
        cplx Ns = std::pow(cplx(c.norm, 0.0), -s);
        cplx Npow = Ns;
        for (int k = 0; k <= k_max; ++k) {
            res.value *= (id - Npow * chi_h).determinant();
            Npow /= c.norm;
        }
        // geometric bound on the dropped k > k_max factors of this class
        double r = std::pow(c.norm, -(sigma + k_max + 1));
        res.k_tail += dim * r / (1.0 - 1.0 / c.norm);
        int L = shell_lengths ? (*shell_lengths)[ci] : (int)c.word.size();
        shell[L] += dim * std::pow(c.norm, -sigma) / (1.0 - 1.0 / c.norm);
    }
    // extrapolate the word-length tail from paired shells (pairing smooths
    // the parity lumps of the spelled lengths), with a safety factor
    if (shell.size() >= 4) {
        std::vector<double> sums;
        for (auto& kv : shell) sums.push_back(kv.second);
        size_t n = sums.size();
        double last2 = sums[n - 1] + sums[n - 2];
        double prev2 = sums[n - 3] + sums[n - 4];
        if (prev2 > 0.0 && last2 < prev2) {
            double ratio = last2 / prev2;
            res.length_tail = 3.0 * last2 * ratio / (1.0 - ratio);
        } else if (last2 > 0.0) {
            res.length_tail = 10.0 * last2;
            res.tail_warning = true;
        }
    } else if (!shell.empty()) {
        res.length_tail = 10.0 * shell.rbegin()->second;
        res.tail_warning = true;
    }
    double logtail = res.k_tail + res.length_tail;
    res.tail_bound = std::abs(res.value) * std::expm1(logtail);
    return res;
}

EulerProductResult euler_product(const HeckeFamily& fam, const Representation& chi, const cplx& s,
                                 int max_word_len, int k_max) {
    if (s.real() <= 1.0 && fam.kind != FamilyKind::NonCofinite)
        throw no_convergence("euler_product needs Re s > 1");
    auto classes = enumerate_primitive_classes(fam, chi, max_word_len);
    return euler_product_from_classes(classes, chi.dim(), s, k_max);
}

namespace {

cplx det_at(const HeckeFamily& fam, const Representation& chi, Parity parity, const cplx& s, int N,
            Exec exec) {
    OperatorSpec spec;
    spec.family = fam;
    spec.chi = chi;
    spec.parity = parity;
    spec.s = s;
    spec.n_nodes = N;
    spec.speed = Speed::Fast;
    return fredholm_det(build_fast(spec, exec));
}

int winding_number(const HeckeFamily& fam, const Representation& chi, Parity parity,
                   const cplx& center, double half_side, int N, Exec exec) {
    const int per_side = 16;
    std::vector<cplx> pts;
    for (int k = 0; k < per_side; ++k)
        pts.push_back(center + cplx(-half_side + 2.0 * half_side * k / per_side, -half_side));
    for (int k = 0; k < per_side; ++k)
        pts.push_back(center + cplx(half_side, -half_side + 2.0 * half_side * k / per_side));
    for (int k = 0; k < per_side; ++k)
        pts.push_back(center + cplx(half_side - 2.0 * half_side * k / per_side, half_side));
    for (int k = 0; k < per_side; ++k)
        pts.push_back(center + cplx(-half_side, half_side - 2.0 * half_side * k / per_side));
    std::vector<cplx> vals(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = det_at(fam, chi, parity, pts[i], N, exec);
    double total = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        cplx a = vals[i], b = vals[(i + 1) % pts.size()];
        if (a == cplx(0.0, 0.0) || b == cplx(0.0, 0.0)) return -1;
        total += std::arg(b / a);
    }
    return (int)std::lround(total / (2.0 * PI));
}

double smallest_singular_value(const Eigen::MatrixXcd& A) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

std::optional<cplx> secant_refine(const HeckeFamily& fam, const Representation& chi, Parity parity,
                                  cplx z0, cplx z1, int N, Exec exec, double* out_resid) {
    cplx f0 = det_at(fam, chi, parity, z0, N, exec);
    cplx f1 = det_at(fam, chi, parity, z1, N, exec);
    for (int it = 0; it < 80; ++it) {
        if (f1 == f0) break;
        cplx z2 = z1 - f1 * (z1 - z0) / (f1 - f0);
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = det_at(fam, chi, parity, z1, N, exec);
        if (std::abs(z1 - z0) < 1e-13 * (1.0 + std::abs(z1))) break;
    }
    if (out_resid) *out_resid = std::abs(f1);
    if (std::abs(z1 - z0) < 1e-8 * (1.0 + std::abs(z1))) return z1;
    return std::nullopt;
}

} // namespace

ScanResult zero_scan_segment(const HeckeFamily& fam, const Representation& chi, Parity parity,
                             const cplx& s_begin, const cplx& s_end, double step, int N,
                             Exec exec) {
    double len = std::abs(s_end - s_begin);
    int n_pts = std::max(3, (int)std::ceil(len / step) + 1);
    cplx dir = (s_end - s_begin) / (double)(n_pts - 1);
    ScanResult result;
    result.samples.resize(n_pts);
    auto eval_one = [&](int i) {
        cplx s = s_begin + dir * (double)i;
        result.samples[i] = {s, det_at(fam, chi, parity, s, N, Exec::Serial)};
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < n_pts; ++i) eval_one(i);
    } else {
        for (int i = 0; i < n_pts; ++i) eval_one(i);
    }

    // bracket candidates: local minima of |det| with a pronounced dip, or a
    // sign/phase flip between neighbours
    std::vector<int> cands;
    for (int i = 1; i + 1 < n_pts; ++i) {
        double mm = std::abs(result.samples[i].det);
        double ml = std::abs(result.samples[i - 1].det);
        double mr = std::abs(result.samples[i + 1].det);
        bool local_min = mm <= ml && mm <= mr;
        bool dip = mm < 0.6 * std::max(ml, mr);
        bool flip = std::abs(std::arg(result.samples[i + 1].det / result.samples[i].det)) > 0.5 * PI ||
                    std::abs(std::arg(result.samples[i].det / result.samples[i - 1].det)) > 0.5 * PI;
        if ((local_min && dip) || (local_min && flip)) cands.push_back(i);
    }

    std::vector<ZeroRecord> zeros;
    for (int i : cands) {
        ZeroRecord rec;
        rec.parity = parity;
        rec.N_used = N;
        double resid = 0.0;
        auto z = secant_refine(fam, chi, parity, result.samples[i - 1].s, result.samples[i + 1].s,
                               N, exec, &resid);
        if (!z) {
            rec.s0 = result.samples[i].s;
            rec.note = "secant refinement did not converge";
            rec.det_residual = std::abs(result.samples[i].det);
            zeros.push_back(rec);
            continue;
        }
        rec.s0 = *z;
        rec.det_residual = resid;
        rec.winding = winding_number(fam, chi, parity, rec.s0, step, N, exec);
        if (rec.winding < 1) {
            rec.note = "no winding around the candidate";
            continue; // a dip, not a zero
        }
        OperatorSpec spec;
        spec.family = fam;
        spec.chi = chi;
        spec.parity = parity;
        spec.s = rec.s0;
        spec.n_nodes = N;
        OperatorMatrix op = build_fast(spec, exec);
        rec.eig_residual = smallest_singular_value(
            Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(op.dim(), op.dim()) - op.blocks));
        double resid8 = 0.0;
        auto z8 = secant_refine(fam, chi, parity, rec.s0 + cplx(step * 0.25, 0.0),
                                rec.s0 - cplx(step * 0.25, 0.0), N + 8, exec, &resid8);
        if (z8) {
            rec.verified = true;
            rec.displacement_check = std::abs(*z8 - rec.s0);
        } else {
            rec.note = "re-verification at N+8 did not converge";
        }
        rec.det_other_parity = det_at(
            fam, chi, parity == Parity::Even ? Parity::Odd : Parity::Even, rec.s0, N, exec);
        zeros.push_back(rec);
    }

    // dedup within 1e-7, keep the smaller residual
    std::sort(zeros.begin(), zeros.end(),
              [](const ZeroRecord& a, const ZeroRecord& b) { return a.det_residual < b.det_residual; });
    std::vector<ZeroRecord> dedup;
    for (const auto& z : zeros) {
        bool dup = false;
        for (const auto& kept : dedup)
            if (std::abs(kept.s0 - z.s0) < 1e-7) dup = true;
        if (!dup) dedup.push_back(z);
    }
    std::sort(dedup.begin(), dedup.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
        if (a.s0.imag() != b.s0.imag()) return a.s0.imag() < b.s0.imag();
        return a.s0.real() < b.s0.real();
    });
    result.zeros = dedup;
    return result;
}

ScanResult zero_scan(const HeckeFamily& fam, const Representation& chi, Parity parity, double re_s,
                     double im_lo, double im_hi, double step, int N, Exec exec) {
    return zero_scan_segment(fam, chi, parity, cplx(re_s, im_lo), cplx(re_s, im_hi), step, N,
                             exec);
}

std::optional<ZeroRecord> refine_zero(const HeckeFamily& fam, const Representation& chi,
                                      Parity parity, const cplx& s_guess, int N, Exec exec) {
    double resid = 0.0;
    auto z = secant_refine(fam, chi, parity, s_guess + cplx(1e-3, 0.0), s_guess - cplx(1e-3, 0.0),
                           N, exec, &resid);
    if (!z) return std::nullopt;
    ZeroRecord rec;
    rec.s0 = *z;
    rec.parity = parity;
    rec.N_used = N;
    rec.det_residual = resid;
    OperatorSpec spec;
    spec.family = fam;
    spec.chi = chi;
    spec.parity = parity;
    spec.s = rec.s0;
    spec.n_nodes = N;
    OperatorMatrix op = build_fast(spec, exec);
    rec.eig_residual = smallest_singular_value(
        Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(op.dim(), op.dim()) - op.blocks));
    rec.winding = 1;
    rec.verified = true;
    rec.det_other_parity =
        det_at(fam, chi, parity == Parity::Even ? Parity::Odd : Parity::Even, rec.s0, N, exec);
    return rec;
}

} // namespace hecke
