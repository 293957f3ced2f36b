#include "hecke/transfer.hpp"

#include "series.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hecke {

namespace {

cplx principal_inv_square_pow(const cplx& base, const cplx& s) {
    // (base^2)^{-s}, principal branch
    if (std::abs(base) < 1e-12) throw domain_violation("vanishing consolidated cocycle factor");
    return std::exp(-s * std::log(base * base));
}

void check_admissible_s(const OperatorSpec& spec) {
    if (spec.speed == Speed::Fast && spec.s.real() <= 0.5) {
        if (distance_to_pole_set(spec.s) < 1e-6)
            throw pole_proximity("fast build: s within 1e-6 of the pole set (1 - N_0)/2");
    }
}

} // namespace

cplx finite_term_scalar(const GroupElement& mover, const DiskDomain& target,
                        const DiskDomain& source, const cplx& w_node, const cplx& s) {
    double a = mover.a, b = mover.b, c = mover.c, d = mover.d;
    if (!target.weighted && !source.weighted)
        return cocycle(BranchVariant::V1, mover, w_node, s);
    if (!target.weighted && source.weighted) {
        // j_s(mover, x) ((y - ps)^2)^{-s} = (L(x)^2)^{-s}, L = (a - ps c) x + (b - ps d)
        double ps = source.chart_pole;
        cplx L = (a - ps * c) * w_node + (b - ps * d);
        return principal_inv_square_pow(L, s);
    }
    double pt = target.chart_pole;
    if (target.weighted && !source.weighted) {
        // ((x - pt)^2)^s j_s(mover, x) = (B(w)^2)^{-s}, B = c + (c pt + d) w
        cplx B = c + (c * pt + d) * w_node;
        return principal_inv_square_pow(B, s);
    }
    double ps = source.chart_pole;
    cplx B = (a - ps * c) + ((a - ps * c) * pt + (b - ps * d)) * w_node;
    return principal_inv_square_pow(B, s);
}

// ---------------------------------------------------------------------------
// parabolic block

ParabolicBlock::ParabolicBlock(const ParabolicSumSpec& sp, const HeckeFamily& fam,
                               const Representation& chi, const cplx& s, const DiskDomain& source,
                               int M, double tol)
    : source_(source), s_(s), tol_(tol) {
    M_ = M > 0 ? M : std::max(default_taylor_degree(s), 4);
    if (2.0 * s_.real() + M_ <= 1.0)
        throw domain_violation("parabolic block: M too small for Re s");
    GroupElement p = word_matrix(sp.p_word, fam.ell);
    GroupElement pre = word_matrix(sp.pre_word, fam.ell);
    ParabolicConjugation pc = deduce_translation_structure(p);
    lambda_ = pc.lambda;
    translation_ = pc.translation_at_infinity;
    if (translation_) {
        if (!source_.weighted)
            throw domain_violation("translation-type parabolic block needs a weighted source");
        if (!sp.pre_word.empty())
            throw domain_violation("translation-type block with prefix not supported");
        source_pole_shift_ = source_.chart_pole;
        e_pre_ = GroupElement::identity();
        u_el_ = GroupElement::identity();
        pull_scale_ = 1.0;
        pull_shift_ = 0.0;
    } else {
        if (source_.weighted)
            throw domain_violation("finite-fixed-point block from a weighted source unsupported");
        e_pre_ = pc.h_inv * pre.inverse();
        u_el_ = e_pre_;
        h_ = pc.h;
        pull_scale_ = pc.pullback_scale;
        pull_shift_ = pc.pullback_shift;
    }

    Eigen::MatrixXcd chi_p = chi.evaluate(sp.p_word);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi_p);
    if (es.info() != Eigen::Success) throw no_convergence("chi(p) eigendecomposition failed");
    Eigen::MatrixXcd U = es.eigenvectors();
    Uinv_ = U.inverse();
    preU_ = chi.evaluate(sp.pre_word) * U;
    phases_.resize(chi.dim());
    for (int j = 0; j < chi.dim(); ++j) phases_[j] = std::arg(es.eigenvalues()(j)) / (2.0 * PI);

    // Taylor data of the cardinal basis in the pulled-back variable omega,
    // H_j(omega) = C_j(pull_scale * omega + center)
    cplx expansion_center = translation_ ? cplx(0.0, 0.0) : pull_shift_;
    rho_H_ = (source_.radius - std::abs(expansion_center - cplx(source_.center, 0.0))) /
             std::abs(pull_scale_);
    if (!(rho_H_ > 0.0))
        throw domain_violation("parabolic block: expansion point outside the source disk");
    // The sums are assembled on a coarse sub-grid: the Taylor data of the
    // cardinals at the hull endpoint degrades exponentially with the grid
    // size, while the analytic data the operator sees is already resolved by
    // ~20 points. fine_to_coarse_ carries the fine interpolant over.
    int n_coarse = std::min(24, source_.n_nodes);
    coarse_ = source_;
    coarse_.build_nodes(n_coarse);
    fine_to_coarse_.resize(n_coarse, source_.n_nodes);
    for (int c = 0; c < n_coarse; ++c)
        fine_to_coarse_.row(c) = bary_kernel(source_, cplx(coarse_.nodes[c], 0.0));
    double hull_width =
        (source_.hi - source_.lo) / std::abs(pull_scale_.real() != 0.0 ? pull_scale_.real() : 1.0);
    rho_c_ = std::min({0.95 * rho_H_, 0.2 * hull_width, 1.5});
    const int K = 256;
    taylor_ = Eigen::MatrixXcd::Zero(M_, n_coarse);
    std::vector<Eigen::RowVectorXcd> circle_rows((size_t)K);
    for (int m = 0; m < K; ++m) {
        double th = 2.0 * PI * m / K;
        cplx omega = rho_c_ * std::exp(cplx(0.0, th));
        cplx w_src = pull_scale_ * omega + expansion_center;
        circle_rows[m] = bary_kernel(coarse_, w_src);
        cplx rot = 1.0;
        cplx step = std::exp(cplx(0.0, -th));
        double rp = 1.0;
        for (int k = 0; k < M_; ++k) {
            taylor_.row(k) += circle_rows[m] * (rot / rp);
            rot *= step;
            rp *= rho_c_;
        }
    }
    taylor_ /= (double)K;
    rem_bound_ = 0.0;
    for (int m = 0; m < K; ++m) {
        double th = 2.0 * PI * m / K;
        cplx omega = rho_c_ * std::exp(cplx(0.0, th));
        Eigen::RowVectorXcd head = Eigen::RowVectorXcd::Zero(n_coarse);
        cplx op = 1.0;
        for (int k = 0; k < M_; ++k) {
            head += op * taylor_.row(k);
            op *= omega;
        }
        rem_bound_ = std::max(rem_bound_, (circle_rows[m] - head).cwiseAbs().maxCoeff());
    }
}

Eigen::MatrixXcd ParabolicBlock::channel_rows(const cplx& u) const {
    int N = coarse_.n_nodes;
    int d = (int)phases_.size();
    if (u.real() <= -lambda_ * (1.0 - 1e-9))
        throw domain_violation("parabolic block: target outside Re u > -lambda");
    Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(d, N);
    cplx expansion_center = translation_ ? cplx(0.0, 0.0) : pull_shift_;
    std::vector<cplx> chphase(d), chpow(d, cplx(1.0, 0.0));
    for (int ch = 0; ch < d; ++ch) chphase[ch] = std::exp(cplx(0.0, 2.0 * PI * phases_[ch]));

    // keep the Taylor head inside its circle: terms with |omega| beyond
    // 0.9 rho_c are summed whole, the Lerch head starts at the shifted index
    long n0 = 1;
    while (u.real() + (double)n0 * lambda_ < 1.0 / (0.9 * rho_c_)) ++n0;
    for (long n = 1; n < n0; ++n) {
        cplx v = u + (double)n * lambda_;
        cplx omega = 1.0 / v;
        Eigen::RowVectorXcd kr = bary_kernel(coarse_, pull_scale_ * omega + expansion_center);
        cplx coc = std::exp(-s_ * std::log(v * v));
        for (int ch = 0; ch < d; ++ch) {
            chpow[ch] *= chphase[ch];
            rows.row(ch) += (chpow[ch] * coc) * kr;
        }
    }

    cplx warg = (double)n0 + u / lambda_;
    for (int ch = 0; ch < d; ++ch) {
        cplx shift_phase = std::exp(cplx(0.0, 2.0 * PI * phases_[ch] * (double)n0));
        for (int k = 0; k < M_; ++k) {
            LerchParams lp{2.0 * s_ + (double)k, phases_[ch], warg, BranchVariant::V1};
            cplx zk = lerch_continued(lp);
            rows.row(ch) +=
                (std::exp(-(2.0 * s_ + (double)k) * std::log(lambda_)) * shift_phase * zk) *
                taylor_.row(k);
        }
    }

    double beta = 2.0 * s_.real() + M_;
    double theta = std::abs(u.imag()) / std::max(u.real() + lambda_, 0.1 * lambda_);
    double envelope = std::exp(2.0 * std::abs(s_.imag()) * std::min(theta, PI / 2.0));
    double Kfac = envelope * rem_bound_ / std::pow(rho_c_, M_);
    std::vector<cplx> rem_pow(d);
    for (int ch = 0; ch < d; ++ch)
        rem_pow[ch] = std::exp(cplx(0.0, 2.0 * PI * phases_[ch] * (double)(n0 - 1)));
    for (long n = n0;; ++n) {
        cplx v = u + (double)n * lambda_;
        cplx omega = 1.0 / v;
        Eigen::RowVectorXcd kr = bary_kernel(coarse_, pull_scale_ * omega + expansion_center);
        Eigen::RowVectorXcd head = Eigen::RowVectorXcd::Zero(N);
        cplx op = 1.0;
        for (int k = 0; k < M_; ++k) {
            head += op * taylor_.row(k);
            op *= omega;
        }
        cplx coc = std::exp(-s_ * std::log(v * v));
        Eigen::RowVectorXcd rem_row = coc * (kr - head);
        for (int ch = 0; ch < d; ++ch) {
            rem_pow[ch] *= chphase[ch];
            rows.row(ch) += rem_pow[ch] * rem_row;
        }
        double rn = u.real() + (double)n * lambda_;
        double tail = Kfac * std::pow(rn, 1.0 - beta) / ((beta - 1.0) * lambda_);
        if (tail < tol_) break;
        if (n > 1000000L) throw no_convergence("parabolic block: remainder too slow");
    }
    return rows;
}

Eigen::MatrixXcd ParabolicBlock::row_at_target(const DiskDomain& target, double w_node) const {
    int N = source_.n_nodes;
    int d = (int)phases_.size();
    cplx x = target.z_of_working(cplx(w_node, 0.0));
    cplx u = translation_ ? x - source_pole_shift_ : u_el_.apply(x);
    cplx pref;
    if (!target.weighted) {
        pref = e_pre_.is_identity() ? cplx(1.0, 0.0)
                                    : cocycle(BranchVariant::V1, e_pre_, x, s_);
    } else {
        if (translation_)
            throw domain_violation("translation block into a weighted target is a zero block");
        double pt = target.chart_pole;
        cplx B = e_pre_.c + (e_pre_.c * pt + e_pre_.d) * w_node;
        pref = principal_inv_square_pow(B, s_);
    }
    Eigen::MatrixXcd rows = channel_rows(u) * fine_to_coarse_;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, N * d);
    for (int ch = 0; ch < d; ++ch) {
        Eigen::MatrixXcd proj = preU_.col(ch) * Uinv_.row(ch);
        for (int j = 0; j < N; ++j) out.block(0, j * d, d, d) += (pref * rows(ch, j)) * proj;
    }
    return out;
}

Eigen::MatrixXcd ParabolicBlock::row_at(const cplx& x_physical) const {
    int N = source_.n_nodes;
    int d = (int)phases_.size();
    cplx u = translation_ ? x_physical - source_pole_shift_ : u_el_.apply(x_physical);
    cplx pref = e_pre_.is_identity() ? cplx(1.0, 0.0)
                                     : cocycle(BranchVariant::V1, e_pre_, x_physical, s_);
    Eigen::MatrixXcd rows = channel_rows(u) * fine_to_coarse_;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, N * d);
    for (int ch = 0; ch < d; ++ch) {
        Eigen::MatrixXcd proj = preU_.col(ch) * Uinv_.row(ch);
        for (int j = 0; j < N; ++j) out.block(0, j * d, d, d) += (pref * rows(ch, j)) * proj;
    }
    return out;
}

Eigen::VectorXcd ParabolicBlock::apply_to(const FunctionElement& f, const cplx& x_physical) const {
    Eigen::MatrixXcd row = row_at(x_physical);
    int N = source_.n_nodes, d = (int)phases_.size();
    Eigen::VectorXcd flat(N * d);
    for (int j = 0; j < N; ++j)
        for (int ch = 0; ch < d; ++ch) flat(j * d + ch) = f.values(j, ch);
    return row * flat;
}

// ---------------------------------------------------------------------------
// assembly

namespace {

struct Assembly {
    const OperatorSpec* spec;
    const DomainFamily* dfam;
    int N, d;
    int offset(int disk) const { return disk * N * d; }
};

void add_finite_instance(const Assembly& ctx, Eigen::MatrixXcd& M, const FiniteTermSpec& ft,
                         int row_disk, int col_disk, Exec exec) {
    const DiskDomain& target = ctx.dfam->disks[row_disk];
    const DiskDomain& source = ctx.dfam->disks[col_disk];
    GroupElement h = word_matrix(ft.h_word, ctx.spec->family.ell);
    GroupElement mover = h.inverse();
    Eigen::MatrixXcd twist = ctx.spec->chi.evaluate(ft.h_word);
    double wgt = ft.weight * (ctx.spec->parity == Parity::Even ? 1.0 : (double)h.det_sign);
    int N = ctx.N, d = ctx.d;
    cplx s = ctx.spec->s;
    auto fill_row = [&](int i) {
        cplx wn(target.nodes[i], 0.0);
        cplx x = target.z_of_working(wn);
        cplx y = mover.apply(x);
        cplx w_src = source.working_of_z(y);
        cplx scal = finite_term_scalar(mover, target, source, wn, s) * wgt;
        Eigen::RowVectorXcd kr = bary_kernel(source, w_src);
        for (int j = 0; j < N; ++j)
            M.block(ctx.offset(row_disk) + i * d, ctx.offset(col_disk) + j * d, d, d) +=
                (scal * kr(j)) * twist;
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int i = 0; i < N; ++i) fill_row(i);
    } else {
        for (int i = 0; i < N; ++i) fill_row(i);
    }
}

void add_parabolic_instance(const Assembly& ctx, Eigen::MatrixXcd& M, const ParabolicSumSpec& sp,
                            Exec exec) {
    const DiskDomain& target = ctx.dfam->disks[sp.row];
    const DiskDomain& source = ctx.dfam->disks[sp.col];
    GroupElement p = word_matrix(sp.p_word, ctx.spec->family.ell);
    GroupElement pre = word_matrix(sp.pre_word, ctx.spec->family.ell);
    GroupElement full = pre * p;
    double wgt = sp.weight * (ctx.spec->parity == Parity::Even ? 1.0 : (double)full.det_sign);
    ParabolicBlock block(sp, ctx.spec->family, ctx.spec->chi, ctx.spec->s, source);
    int N = ctx.N, d = ctx.d;
    auto fill_row = [&](int i) {
        Eigen::MatrixXcd row = block.row_at_target(target, target.nodes[i]);
        M.block(ctx.offset(sp.row) + i * d, ctx.offset(sp.col), d, N * d) += wgt * row;
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < N; ++i) fill_row(i);
    } else {
        for (int i = 0; i < N; ++i) fill_row(i);
    }
}

// sum of alpha_s(pre p^n), n = 1..n_max, as plain finite terms (oracle path)
void add_parabolic_truncated(const Assembly& ctx, Eigen::MatrixXcd& M, const ParabolicSumSpec& sp,
                             long n_max, Exec exec) {
    const DiskDomain& target = ctx.dfam->disks[sp.row];
    const DiskDomain& source = ctx.dfam->disks[sp.col];
    GroupElement p = word_matrix(sp.p_word, ctx.spec->family.ell);
    GroupElement pre = word_matrix(sp.pre_word, ctx.spec->family.ell);
    GroupElement p_inv = p.inverse();
    Eigen::MatrixXcd chi_p = ctx.spec->chi.evaluate(sp.p_word);
    Eigen::MatrixXcd twist = ctx.spec->chi.evaluate(sp.pre_word);
    GroupElement mover = pre.inverse(); // becomes p^{-n} pre^{-1}
    int sign = (pre * p).det_sign;
    double wgt = sp.weight * (ctx.spec->parity == Parity::Even ? 1.0 : (double)sign);
    int N = ctx.N, d = ctx.d;
    cplx s = ctx.spec->s;
    for (long n = 1; n <= n_max; ++n) {
        mover = p_inv * mover;
        twist = twist * chi_p;
        Eigen::MatrixXcd tw = wgt * twist;
        auto fill_row = [&](int i) {
            cplx wn(target.nodes[i], 0.0);
            cplx x = target.z_of_working(wn);
            cplx y = mover.apply(x);
            cplx w_src = source.working_of_z(y);
            cplx scal = finite_term_scalar(mover, target, source, wn, s);
            Eigen::RowVectorXcd kr = bary_kernel(source, w_src);
            for (int j = 0; j < N; ++j)
                M.block(ctx.offset(sp.row) + i * d, ctx.offset(sp.col) + j * d, d, d) +=
                    (scal * kr(j)) * tw;
        };
        if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
            for (int i = 0; i < N; ++i) fill_row(i);
        } else {
            for (int i = 0; i < N; ++i) fill_row(i);
        }
    }
}

int resolve_source_disk(const DomainFamily& dfam, const GroupElement& mover,
                        const DiskDomain& target) {
    // Images of the base interval pick the source component. The score is the
    // image position relative to the source node hull (kernel extrapolation
    // beyond the hull is ill-conditioned), subject to disk membership.
    const int n_samp = 33;
    int best = -1;
    double best_t = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < dfam.disks.size(); ++b) {
        const DiskDomain& src = dfam.disks[b];
        double mid = 0.5 * (src.lo + src.hi), hw = 0.5 * (src.hi - src.lo);
        double t_max = 0.0;
        bool inside = true;
        for (int k = 0; k < n_samp; ++k) {
            double t = target.lo + (target.hi - target.lo) * k / (n_samp - 1);
            cplx x = target.z_of_working(cplx(t, 0.0));
            cplx w = mover.apply(x);
            w = src.working_of_z(w);
            if (is_point_at_infinity(w) ||
                std::abs(w - cplx(src.center, 0.0)) > src.radius * (1.0 - 1e-6)) {
                inside = false;
                break;
            }
            t_max = std::max(t_max, std::abs(w.real() - mid) / hw);
        }
        if (inside && t_max < best_t) {
            best_t = t_max;
            best = (int)b;
        }
    }
    if (best < 0 || best_t > 1.1)
        throw domain_violation("slow build: no disk contains the image of " + target.id);
    return best;
}

std::string word_desc(const std::vector<Gen>& w) { return word_string(w); }

} // namespace



// ---------------------------------------------------------------------------
// Chebyshev-coefficient sections of the fast operator.
//
// Entry functions are sampled at an oversampled Clenshaw-Curtis grid (the
// node set with K = N + 8 points) by the collocation machinery, then the
// matrix is conjugated into coefficient space: M = D * M_nodal * E with
// E the Chebyshev synthesis (values of T_m at the K nodes) and D the DCT
// analysis truncated to N modes. D E = I exactly.

namespace {

// synthesis: E(i, m) = T_m at the i-th Chebyshev node of the interval
Eigen::MatrixXd cheb_synthesis(int K, int N) {
    Eigen::MatrixXd E(K, N);
    for (int i = 0; i < K; ++i) {
        double th = PI * i / (K - 1);
        for (int m = 0; m < N; ++m) E(i, m) = std::cos(m * th);
    }
    return E;
}

// analysis: first N Chebyshev coefficients from K Clenshaw-Curtis samples
Eigen::MatrixXd cheb_analysis(int K, int N) {
    Eigen::MatrixXd D(N, K);
    for (int m = 0; m < N; ++m) {
        for (int i = 0; i < K; ++i) {
            double th = PI * i / (K - 1);
            double w = (i == 0 || i == K - 1) ? 0.5 : 1.0;
            D(m, i) = (2.0 / (K - 1)) * w * std::cos(m * th);
        }
    }
    for (int i = 0; i < K; ++i) D(0, i) *= 0.5;
    return D;
}


// Parabolic block columns built directly against the Chebyshev modes of the
// source component: the direct terms use the three-term recurrence at the
// (real) image points, the tail the exact T_m jets at the fixed point with
// shifted Lerch completions. No cardinal reprojection is involved, so every
// column of the section is clean.
void add_parabolic_chebcol(const Assembly& ctx, Eigen::MatrixXcd& M, const ParabolicSumSpec& sp,
                           int n_modes, long n_direct_cap, bool with_tail, Exec exec) {
    const DiskDomain& target = ctx.dfam->disks[sp.row];
    const DiskDomain& source = ctx.dfam->disks[sp.col];
    GroupElement p = word_matrix(sp.p_word, ctx.spec->family.ell);
    GroupElement pre = word_matrix(sp.pre_word, ctx.spec->family.ell);
    ParabolicConjugation pc = deduce_translation_structure(p);
    double lambda = pc.lambda;
    double wgt = sp.weight *
                 (ctx.spec->parity == Parity::Even ? 1.0 : (double)(pre * p).det_sign);
    cplx s = ctx.spec->s;
    int K = ctx.N, d = ctx.d;

    bool translation = pc.translation_at_infinity;
    GroupElement e_pre, u_el;
    double A_pull, B_pull;
    if (translation) {
        if (!source.weighted)
            throw domain_violation("translation block needs a weighted source");
        if (target.weighted)
            throw domain_violation("translation block into a weighted target is a zero block");
        A_pull = 1.0;
        B_pull = 0.0; // chart coordinate of the cusp
        e_pre = GroupElement::identity();
        u_el = GroupElement(1.0, -source.chart_pole, 0.0, 1.0);
    } else {
        if (source.weighted)
            throw domain_violation("weighted source with a finite fixed point unsupported");
        A_pull = pc.pullback_scale.real();
        B_pull = pc.pullback_shift.real();
        e_pre = pc.h_inv * pre.inverse();
        u_el = e_pre;
    }
    // the fixed point sits at the lower end of the source hull
    double mid = 0.5 * (source.lo + source.hi), hw = 0.5 * (source.hi - source.lo);
    double t0 = (B_pull - mid) / hw;
    if (std::abs(t0 + 1.0) > 1e-9)
        throw domain_violation("parabolic chebyshev columns need the fixed point at the hull end");
    double slope = A_pull / hw; // t(omega) = -1 + slope * omega

    // chi channels
    Eigen::MatrixXcd chi_p = ctx.spec->chi.evaluate(sp.p_word);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi_p);
    if (es.info() != Eigen::Success) throw no_convergence("chi(p) eigendecomposition failed");
    Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::MatrixXcd Uinv = U.inverse();
    Eigen::MatrixXcd preU = ctx.spec->chi.evaluate(sp.pre_word) * U;

    // T_m^{(k)}(-1) (2A/(hi-lo))^k / k!, exact
    const int n_jets = 12;
    Eigen::MatrixXd jets(n_jets, n_modes);
    for (int m = 0; m < n_modes; ++m) {
        double pr = 1.0, kfact = 1.0, slk = 1.0;
        for (int k = 0; k < n_jets; ++k) {
            double sign = ((m + k) % 2 == 0) ? 1.0 : -1.0;
            jets(k, m) = (k <= m ? sign * pr * slk / kfact : 0.0);
            pr *= ((double)m * m - (double)k * k) / (2.0 * k + 1.0);
            kfact *= (double)(k + 1);
            slk *= slope;
        }
    }

    auto fill_row = [&](int i) {
        double wn = target.nodes[i];
        cplx x = target.z_of_working(cplx(wn, 0.0));
        cplx pref;
        if (!target.weighted) {
            pref = e_pre.is_identity() ? cplx(1.0, 0.0) : cocycle(ctx.spec->variant, e_pre, x, s);
        } else {
            cplx B = e_pre.c + (e_pre.c * target.chart_pole + e_pre.d) * wn;
            pref = principal_inv_square_pow(B, s);
        }
        double u = translation ? x.real() - source.chart_pole : u_el.apply(x).real();
        // direct terms while the jet argument is not yet small
        double mm = std::max(1.0, (double)(n_modes - 1));
        long n_star = (long)std::ceil((6.7 * std::abs(slope) * mm * mm - u) / lambda);
        n_star = std::min(std::max(n_star, 8L), n_direct_cap);
        if (!with_tail) n_star = n_direct_cap;
        std::vector<Eigen::RowVectorXcd> acc((size_t)d,
                                             Eigen::RowVectorXcd::Zero(n_modes));
        Eigen::RowVectorXd Tm(n_modes);
        std::vector<cplx> zpow(d, cplx(1.0, 0.0)), chphase(d);
        for (int ch = 0; ch < d; ++ch)
            chphase[ch] = es.eigenvalues()(ch) / std::abs(es.eigenvalues()(ch));
        for (long n = 1; n <= n_star; ++n) {
            double v = u + (double)n * lambda;
            double omega = 1.0 / v;
            double t = -1.0 + slope * omega;
            Tm(0) = 1.0;
            if (n_modes > 1) Tm(1) = t;
            for (int m = 2; m < n_modes; ++m) Tm(m) = 2.0 * t * Tm(m - 1) - Tm(m - 2);
            cplx coc = std::exp(-s * std::log(cplx(v * v, 0.0)));
            for (int ch = 0; ch < d; ++ch) {
                zpow[ch] *= chphase[ch];
                acc[ch] += (zpow[ch] * coc) * Tm;
            }
        }
        // tail through the exact jets and the shifted continued Lerch zeta
        for (int ch = 0; with_tail && ch < d; ++ch) {
            double a = std::arg(es.eigenvalues()(ch)) / (2.0 * PI);
            cplx shift = std::exp(cplx(0.0, 2.0 * PI * a * (double)(n_star + 1)));
            for (int k = 0; k < n_jets; ++k) {
                cplx warg((double)(n_star + 1) + u / lambda, 0.0);
                cplx zv = lerch_continued({2.0 * s + (double)k, a, warg});
                cplx fac =
                    std::exp(-(2.0 * s + (double)k) * std::log(lambda)) * shift * zv;
                acc[ch] += fac * jets.row(k).cast<cplx>();
            }
        }
        for (int ch = 0; ch < d; ++ch) {
            Eigen::MatrixXcd proj = preU.col(ch) * Uinv.row(ch);
            for (int m = 0; m < n_modes; ++m)
                M.block(sp.row * K * d + i * d, sp.col * n_modes * d + m * d, d, d) +=
                    (wgt * pref * acc[ch](m)) * proj;
        }
    };
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int i = 0; i < K; ++i) fill_row(i);
    } else {
        for (int i = 0; i < K; ++i) fill_row(i);
    }
}

Eigen::MatrixXcd project_rows_to_chebyshev(const Eigen::MatrixXcd& mixed, int nd, int K, int N,
                                           int d) {
    Eigen::MatrixXd D = cheb_analysis(K, N);
    Eigen::MatrixXcd Dd = Eigen::MatrixXcd::Zero(N * d, K * d);
    for (int i = 0; i < K; ++i)
        for (int m = 0; m < N; ++m)
            for (int ch = 0; ch < d; ++ch) Dd(m * d + ch, i * d + ch) = D(m, i);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nd * N * d, nd * N * d);
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b)
            out.block(a * N * d, b * N * d, N * d, N * d) =
                Dd * mixed.block(a * K * d, b * N * d, K * d, N * d);
    return out;
}

Eigen::MatrixXcd project_to_chebyshev(const Eigen::MatrixXcd& nodal, int nd, int K, int N,
                                      int d) {
    Eigen::MatrixXd E = cheb_synthesis(K, N), D = cheb_analysis(K, N);
    Eigen::MatrixXcd Ed = Eigen::MatrixXcd::Zero(K * d, N * d);
    Eigen::MatrixXcd Dd = Eigen::MatrixXcd::Zero(N * d, K * d);
    for (int i = 0; i < K; ++i)
        for (int m = 0; m < N; ++m)
            for (int ch = 0; ch < d; ++ch) {
                Ed(i * d + ch, m * d + ch) = E(i, m);
                Dd(m * d + ch, i * d + ch) = D(m, i);
            }
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nd * N * d, nd * N * d);
    for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b)
            out.block(a * N * d, b * N * d, N * d, N * d) =
                Dd * nodal.block(a * K * d, b * K * d, K * d, K * d) * Ed;
    return out;
}

} // namespace


// ---------------------------------------------------------------------------
// Monomial (nuclear-basis) sections for the cofinite families: basis
// e_k(z) = ((z - z0)/r)^k on each disk. The disk geometry of the cofinite
// maps makes these sections converge to the Fredholm determinant much faster
// than any interval-based section. Assembly is fully analytic: Moebius and
// cocycle power series around the disk centers, Lerch closed forms with
// their w-derivative ladders for the parabolic blocks.

namespace {

using series::Series;

// column k of a finite term, as coefficients over the target basis
Eigen::MatrixXcd finite_term_monomial(int L, const GroupElement& mover, const DiskDomain& target,
                                      const DiskDomain& source, const cplx& s) {
    cplx z0(target.center, 0.0);
    Series scal =
        series::linear_pow_m2s(L, mover.c * z0 + mover.d, cplx(mover.c, 0.0), s);
    Series arg = series::mobius(L, mover.a, mover.b, mover.c, mover.d, z0);
    Series base = arg;
    base(0) -= source.center;
    base /= source.radius;
    Eigen::MatrixXcd out(L, L);
    Series col = scal;
    for (int k = 0; k < L; ++k) {
        for (int m = 0; m < L; ++m) out(m, k) = col(m) * std::pow(target.radius, m);
        col = series::mul(col, base);
    }
    return out;
}

// parabolic sum block for one chi channel phase
Eigen::MatrixXcd parabolic_term_monomial(int L, const ParabolicSumSpec& sp,
                                         const HeckeFamily& fam, const cplx& s, double a_ch,
                                         const DiskDomain& target, const DiskDomain& source) {
    GroupElement p = word_matrix(sp.p_word, fam.ell);
    GroupElement pre = word_matrix(sp.pre_word, fam.ell);
    ParabolicConjugation pc = deduce_translation_structure(p);
    if (pc.translation_at_infinity || source.weighted || target.weighted)
        throw domain_violation("monomial sections cover the cofinite families only");
    double lambda = pc.lambda;
    GroupElement e_pre = pc.h_inv * pre.inverse();
    cplx z0(target.center, 0.0);

    Series u_ser = series::mobius(L, e_pre.a, e_pre.b, e_pre.c, e_pre.d, z0);
    Series w_ser = u_ser / lambda;
    w_ser(0) += 1.0;
    cplx w0 = w_ser(0);
    if (w0.real() <= 0.0)
        throw domain_violation("monomial sections: Lerch argument left of the imaginary axis");
    Series h = w_ser;
    h(0) = 0.0;

    Series pref = e_pre.is_identity()
                      ? series::constant(L, 1.0)
                      : series::linear_pow_m2s(L, e_pre.c * z0 + e_pre.d, cplx(e_pre.c, 0.0), s);

    int T = 2 * L;
    Eigen::VectorXcd zv(T);
    for (int t = 0; t < T; ++t)
        zv(t) = lerch_continued({2.0 * s + (double)t, a_ch, w0, BranchVariant::V1});
    cplx phase = std::exp(cplx(0.0, 2.0 * PI * a_ch));

    std::vector<Series> hp((size_t)L);
    hp[0] = series::constant(L, 1.0);
    for (int pw = 1; pw < L; ++pw) hp[pw] = series::mul(hp[pw - 1], h);

    // Z_j = lambda^{-(2s+j)} e^{2 pi i a} zeta(2s+j, a, w(t)) as a series
    std::vector<Series> Z((size_t)L);
    for (int j = 0; j < L; ++j) {
        Series zs = Series::Zero(L);
        cplx dercoef = 1.0; // (-1)^p (2s+j)_p / p!
        for (int pw = 0; pw < L && j + pw < T; ++pw) {
            if (pw > 0) dercoef *= -(2.0 * s + (double)(j + pw - 1)) / (double)pw;
            zs += (dercoef * zv(j + pw)) * hp[pw];
        }
        Z[j] = zs * (std::exp(-(2.0 * s + (double)j) * std::log(lambda)) * phase);
    }

    cplx beta = (pc.pullback_shift - source.center) / source.radius;
    cplx ar = pc.pullback_scale / source.radius;
    Eigen::MatrixXcd out(L, L);
    for (int k = 0; k < L; ++k) {
        Series col = Series::Zero(L);
        cplx binom = 1.0, arj = 1.0;
        for (int j = 0; j <= k; ++j) {
            col += (binom * arj * std::pow(beta, (double)(k - j))) * Z[j];
            binom *= (double)(k - j) / (double)(j + 1);
            arj *= ar;
        }
        col = series::mul(pref, col);
        for (int m = 0; m < L; ++m) out(m, k) = col(m) * std::pow(target.radius, m);
    }
    return out;
}

void build_fast_monomial(OperatorMatrix& op, const OperatorStructure& st, Exec exec) {
    const OperatorSpec& spec = op.spec;
    int nd = (int)op.domains.disks.size();
    int L = spec.n_nodes, d = spec.chi.dim();
    op.blocks = Eigen::MatrixXcd::Zero(nd * L * d, nd * L * d);
    for (const auto& ft : st.finite) {
        GroupElement h = word_matrix(ft.h_word, spec.family.ell);
        Eigen::MatrixXcd twist = spec.chi.evaluate(ft.h_word);
        double wgt = ft.weight * (spec.parity == Parity::Even ? 1.0 : (double)h.det_sign);
        Eigen::MatrixXcd blockm = finite_term_monomial(
            L, h.inverse(), op.domains.disks[ft.row], op.domains.disks[ft.col], spec.s);
        for (int m = 0; m < L; ++m)
            for (int k = 0; k < L; ++k)
                op.blocks.block(ft.row * L * d + m * d, ft.col * L * d + k * d, d, d) +=
                    (wgt * blockm(m, k)) * twist;
    }
    for (const auto& sm : st.sums) {
        GroupElement p = word_matrix(sm.p_word, spec.family.ell);
        GroupElement pre = word_matrix(sm.pre_word, spec.family.ell);
        double wgt =
            sm.weight * (spec.parity == Parity::Even ? 1.0 : (double)(pre * p).det_sign);
        Eigen::MatrixXcd chi_p = spec.chi.evaluate(sm.p_word);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi_p);
        if (es.info() != Eigen::Success) throw no_convergence("chi(p) eigendecomposition failed");
        Eigen::MatrixXcd U = es.eigenvectors();
        Eigen::MatrixXcd Uinv = U.inverse();
        Eigen::MatrixXcd preU = spec.chi.evaluate(sm.pre_word) * U;
        std::vector<Eigen::MatrixXcd> chblocks((size_t)d);
        auto one = [&](int ch) {
            double a_ch = std::arg(es.eigenvalues()(ch)) / (2.0 * PI);
            chblocks[ch] = parabolic_term_monomial(L, sm, spec.family, spec.s, a_ch,
                                                   op.domains.disks[sm.row],
                                                   op.domains.disks[sm.col]);
        };
        if (exec == Exec::Parallel && d > 1) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
            for (int ch = 0; ch < d; ++ch) one(ch);
        } else {
            for (int ch = 0; ch < d; ++ch) one(ch);
        }
        for (int ch = 0; ch < d; ++ch) {
            Eigen::MatrixXcd proj = preU.col(ch) * Uinv.row(ch);
            for (int m = 0; m < L; ++m)
                for (int k = 0; k < L; ++k)
                    op.blocks.block(sm.row * L * d + m * d, sm.col * L * d + k * d, d, d) +=
                        (wgt * chblocks[ch](m, k)) * proj;
        }
    }
}

} // namespace

OperatorMatrix build_slow(const OperatorSpec& spec_in, Exec exec) {
    OperatorSpec spec = spec_in;
    spec.speed = Speed::Slow;
    spec.chi.validate(spec.family);
    OperatorMatrix op;
    op.spec = spec;
    op.domains = make_domain_family(spec.family, spec.shrink, spec.n_nodes);
    // slow collocation lives on the family's own intervals; for even q the
    // upper interval keeps its extension past 1 (the operator acts on
    // real-analytic functions on (0, 1+eps))
    for (auto& d : op.domains.disks) {
        d.lo = d.dyn_lo;
        if (!(spec.family.kind == FamilyKind::CofiniteEven && d.id == "D0")) d.hi = d.dyn_hi;
        d.build_nodes(spec.n_nodes);
    }
    OperatorStructure st = slow_structure(spec.family);
    int nd = (int)op.domains.disks.size();
    int N = spec.n_nodes, d = spec.chi.dim();
    op.blocks = Eigen::MatrixXcd::Zero(nd * N * d, nd * N * d);
    Assembly ctx{&spec, &op.domains, N, d};
    for (const auto& ft : st.finite) {
        GroupElement h = word_matrix(ft.h_word, spec.family.ell);
        for (int row = 0; row < nd; ++row) {
            int col = resolve_source_disk(op.domains, h.inverse(), op.domains.disks[row]);
            add_finite_instance(ctx, op.blocks, ft, row, col, exec);
        }
        op.term_log.push_back({"(interval)", "(resolved)", word_desc(ft.h_word), ft.desc,
                               ft.weight, h.det_sign, false});
    }
    return op;
}

OperatorMatrix build_fast(const OperatorSpec& spec_in, Exec exec) {
    OperatorSpec spec = spec_in;
    spec.speed = Speed::Fast;
    spec.chi.validate(spec.family);
    check_admissible_s(spec);
    OperatorMatrix op;
    op.spec = spec;
    op.domains = make_domain_family(spec.family, spec.shrink, spec.n_nodes);
    if (!op.domains.inclusion_certified)
        throw domain_violation("fast build refuses an uncertified domain family");
    OperatorStructure st = fast_structure(spec.family);
    int nd = (int)op.domains.disks.size();
    int N = spec.n_nodes, d = spec.chi.dim();
    if (spec.family.cofinite_kind() && !spec.eigenfunction_mode) {
        // disk-shaped dynamics: the monomial nuclear sections converge fastest
        op.basis = MatrixBasis::Monomial;
        build_fast_monomial(op, st, exec);
        for (const auto& ft : st.finite) {
            GroupElement h = word_matrix(ft.h_word, spec.family.ell);
            op.term_log.push_back({op.domains.disks[ft.row].id, op.domains.disks[ft.col].id,
                                   word_desc(ft.h_word), ft.desc, ft.weight, h.det_sign, false});
        }
        for (const auto& sm : st.sums) {
            GroupElement full = word_matrix(sm.pre_word, spec.family.ell) *
                                word_matrix(sm.p_word, spec.family.ell);
            op.term_log.push_back({op.domains.disks[sm.row].id, op.domains.disks[sm.col].id,
                                   word_desc(sm.pre_word) + "(" + word_desc(sm.p_word) + ")^n",
                                   sm.desc, sm.weight, full.det_sign, true});
        }
        return op;
    }
    op.basis = MatrixBasis::Chebyshev;
    int K = N + 8;
    DomainFamily fine = op.domains;
    for (auto& dk : fine.disks) dk.build_nodes(K);
    Eigen::MatrixXcd nodal = Eigen::MatrixXcd::Zero(nd * K * d, nd * K * d);
    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Zero(nd * K * d, nd * N * d);
    Assembly ctx{&spec, &fine, K, d};
    for (const auto& ft : st.finite) {
        add_finite_instance(ctx, nodal, ft, ft.row, ft.col, exec);
        GroupElement h = word_matrix(ft.h_word, spec.family.ell);
        op.term_log.push_back({op.domains.disks[ft.row].id, op.domains.disks[ft.col].id,
                               word_desc(ft.h_word), ft.desc, ft.weight, h.det_sign, false});
    }
    for (const auto& sm : st.sums) {
        add_parabolic_chebcol(ctx, mixed, sm, N, 4000000L, true, exec);
        GroupElement full = word_matrix(sm.pre_word, spec.family.ell) *
                            word_matrix(sm.p_word, spec.family.ell);
        op.term_log.push_back({op.domains.disks[sm.row].id, op.domains.disks[sm.col].id,
                               word_desc(sm.pre_word) + "(" + word_desc(sm.p_word) + ")^n",
                               sm.desc, sm.weight, full.det_sign, true});
    }
    op.blocks = project_to_chebyshev(nodal, nd, K, N, d) +
                project_rows_to_chebyshev(mixed, nd, K, N, d);
    return op;
}

OperatorMatrix build_fast_brute(const OperatorSpec& spec_in, long n_max, Exec exec) {
    OperatorSpec spec = spec_in;
    spec.speed = Speed::Fast;
    OperatorMatrix op;
    op.spec = spec;
    op.domains = make_domain_family(spec.family, spec.shrink, spec.n_nodes);
    OperatorStructure st = fast_structure(spec.family);
    int nd = (int)op.domains.disks.size();
    int N = spec.n_nodes, d = spec.chi.dim();
    if (spec.family.cofinite_kind()) {
        // monomial truncation oracle: plain partial sums of the term series
        op.basis = MatrixBasis::Monomial;
        op.blocks = Eigen::MatrixXcd::Zero(nd * N * d, nd * N * d);
        for (const auto& ft : st.finite) {
            GroupElement h = word_matrix(ft.h_word, spec.family.ell);
            Eigen::MatrixXcd twist = spec.chi.evaluate(ft.h_word);
            double wgt = ft.weight * (spec.parity == Parity::Even ? 1.0 : (double)h.det_sign);
            Eigen::MatrixXcd bm = finite_term_monomial(
                N, h.inverse(), op.domains.disks[ft.row], op.domains.disks[ft.col], spec.s);
            for (int m = 0; m < N; ++m)
                for (int k = 0; k < N; ++k)
                    op.blocks.block(ft.row * N * d + m * d, ft.col * N * d + k * d, d, d) +=
                        (wgt * bm(m, k)) * twist;
        }
        for (const auto& sm : st.sums) {
            GroupElement p = word_matrix(sm.p_word, spec.family.ell);
            GroupElement pre = word_matrix(sm.pre_word, spec.family.ell);
            GroupElement p_inv = p.inverse();
            Eigen::MatrixXcd chi_p = spec.chi.evaluate(sm.p_word);
            Eigen::MatrixXcd twist = spec.chi.evaluate(sm.pre_word);
            GroupElement mover = pre.inverse();
            double wgt = sm.weight *
                         (spec.parity == Parity::Even ? 1.0 : (double)(pre * p).det_sign);
            std::vector<GroupElement> movers;
            std::vector<Eigen::MatrixXcd> twists;
            for (long n = 1; n <= n_max; ++n) {
                mover = p_inv * mover;
                twist = twist * chi_p;
                movers.push_back(mover);
                twists.push_back(wgt * twist);
            }
            std::vector<Eigen::MatrixXcd> blocks(movers.size());
            auto one = [&](long i) {
                blocks[i] = finite_term_monomial(N, movers[i], op.domains.disks[sm.row],
                                                 op.domains.disks[sm.col], spec.s);
            };
            if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
                for (long i = 0; i < (long)movers.size(); ++i) one(i);
            } else {
                for (long i = 0; i < (long)movers.size(); ++i) one(i);
            }
            for (size_t i = 0; i < movers.size(); ++i)
                for (int m = 0; m < N; ++m)
                    for (int k = 0; k < N; ++k)
                        op.blocks.block(sm.row * N * d + m * d, sm.col * N * d + k * d, d, d) +=
                            blocks[i](m, k) * twists[i];
        }
        return op;
    }
    op.basis = MatrixBasis::Chebyshev;
    int K = N + 8;
    DomainFamily fine = op.domains;
    for (auto& dk : fine.disks) dk.build_nodes(K);
    Eigen::MatrixXcd nodal = Eigen::MatrixXcd::Zero(nd * K * d, nd * K * d);
    Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Zero(nd * K * d, nd * N * d);
    Assembly ctx{&spec, &fine, K, d};
    for (const auto& ft : st.finite) add_finite_instance(ctx, nodal, ft, ft.row, ft.col, exec);
    for (const auto& sm : st.sums)
        add_parabolic_chebcol(ctx, mixed, sm, N, n_max, false, exec);
    op.blocks = project_to_chebyshev(nodal, nd, K, N, d) +
                project_rows_to_chebyshev(mixed, nd, K, N, d);
    return op;
}

BlockVector blockvec_from_flat(const OperatorMatrix& op, const Eigen::VectorXcd& v) {
    BlockVector out;
    int N = op.node_count(), d = op.chi_dim();
    for (int a = 0; a < op.n_disks(); ++a) {
        const DiskDomain& dom = op.domains.disks[a];
        FunctionElement f;
        f.domain = dom;
        f.values.resize(N, d);
        for (int i = 0; i < N; ++i) {
            for (int ch = 0; ch < d; ++ch) {
                if (op.basis == MatrixBasis::Nodal) {
                    f.values(i, ch) = v(op.block_offset(a) + i * d + ch);
                } else if (op.basis == MatrixBasis::Chebyshev) {
                    double th = PI * i / (N - 1); // nodes are cos points
                    cplx acc = 0.0;
                    for (int k = 0; k < N; ++k)
                        acc += v(op.block_offset(a) + k * d + ch) * std::cos(k * th);
                    f.values(i, ch) = acc;
                } else {
                    cplx t = (cplx(dom.nodes[i], 0.0) - dom.center) / dom.radius;
                    cplx acc = 0.0, tp = 1.0;
                    for (int k = 0; k < N; ++k) {
                        acc += v(op.block_offset(a) + k * d + ch) * tp;
                        tp *= t;
                    }
                    f.values(i, ch) = acc;
                }
            }
        }
        out.push_back(std::move(f));
    }
    return out;
}

Eigen::VectorXcd flat_from_blockvec(const OperatorMatrix& op, const BlockVector& f) {
    if (op.basis != MatrixBasis::Nodal)
        throw config_error("flat_from_blockvec needs a nodal build");
    int N = op.node_count(), d = op.chi_dim();
    Eigen::VectorXcd v(op.dim());
    for (int a = 0; a < op.n_disks(); ++a)
        for (int i = 0; i < N; ++i)
            for (int ch = 0; ch < d; ++ch) v(op.block_offset(a) + i * d + ch) = f[a].values(i, ch);
    return v;
}

BlockVector apply(const OperatorMatrix& op, const BlockVector& f) {
    if ((int)f.size() != op.n_disks()) throw config_error("apply: block count mismatch");
    for (int a = 0; a < op.n_disks(); ++a)
        if (f[a].values.rows() != op.node_count() || f[a].values.cols() != op.chi_dim())
            throw config_error("apply: block dimension mismatch");
    return blockvec_from_flat(op, op.blocks * flat_from_blockvec(op, f));
}

std::vector<cplx> power_iterate(const OperatorMatrix& op, const Eigen::VectorXcd& f0, int k) {
    std::vector<cplx> rayleigh;
    Eigen::VectorXcd v = f0;
    if (v.size() != op.dim()) throw config_error("power_iterate: dimension mismatch");
    for (int it = 0; it < k; ++it) {
        Eigen::VectorXcd w = op.blocks * v;
        cplx r = v.dot(w) / v.dot(v);
        rayleigh.push_back(r);
        double nw = w.norm();
        if (nw == 0.0) break;
        v = w / nw;
    }
    return rayleigh;
}

std::string OperatorMatrix::to_json() const {
    nlohmann::json j;
    j["family"] = spec.family.label();
    j["parity"] = parity_name(spec.parity);
    j["s"] = {spec.s.real(), spec.s.imag()};
    j["speed"] = spec.speed == Speed::Fast ? "fast" : "slow";
    j["n_nodes"] = spec.n_nodes;
    j["chi"] = spec.chi.label();
    nlohmann::json tl = nlohmann::json::array();
    for (const auto& t : term_log)
        tl.push_back({{"target", t.target},
                      {"source", t.source},
                      {"word", t.word},
                      {"desc", t.desc},
                      {"weight", t.weight},
                      {"det_sign", t.det_sign},
                      {"infinite_sum", t.infinite_sum}});
    j["term_log"] = tl;
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < blocks.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int c = 0; c < blocks.cols(); ++c)
            r.push_back({blocks(i, c).real(), blocks(i, c).imag()});
        rows.push_back(r);
    }
    j["blocks"] = rows;
    return j.dump();
}

} // namespace hecke
