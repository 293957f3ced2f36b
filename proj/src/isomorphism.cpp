#include "hecke/isomorphism.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hecke {

namespace {

Eigen::MatrixXcd chi_of(const Representation& chi, const std::vector<Gen>& word) {
    return chi.evaluate(word);
}

// alpha_s(h) g (x) = j_s(h^{-1}-mover, x) chi(h) g(h^{-1}.x)
Eigen::VectorXcd alpha_on(const OperatorSpec& spec, const std::vector<Gen>& h_word,
                          const std::function<Eigen::VectorXcd(const cplx&)>& g, const cplx& x) {
    GroupElement h = word_matrix(h_word, spec.family.ell);
    GroupElement mover = h.inverse();
    cplx coc = cocycle(spec.variant, mover, x, spec.s);
    return coc * (chi_of(spec.chi, h_word) * g(mover.apply(x)));
}

// least-squares polynomial fit y(t) = sum_p beta_p t^p per channel;
// returns (degree+1) x d coefficients and the relative rms residual
Eigen::MatrixXcd poly_ladder_fit(const std::vector<double>& ts,
                                 const std::vector<Eigen::VectorXcd>& ys, int degree,
                                 double* rel_residual) {
    int n = (int)ts.size(), d = (int)ys[0].size();
    Eigen::MatrixXd A(n, degree + 1);
    for (int i = 0; i < n; ++i) {
        double tp = 1.0;
        for (int p = 0; p <= degree; ++p) {
            A(i, p) = tp;
            tp *= ts[i];
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXcd beta(degree + 1, d);
    double res2 = 0.0, scale = 0.0;
    for (int ch = 0; ch < d; ++ch) {
        Eigen::VectorXd re(n), im(n);
        for (int i = 0; i < n; ++i) {
            re(i) = ys[i](ch).real();
            im(i) = ys[i](ch).imag();
            scale = std::max(scale, std::abs(ys[i](ch)));
        }
        Eigen::VectorXd br = svd.solve(re), bi = svd.solve(im);
        for (int p = 0; p <= degree; ++p) beta(p, ch) = cplx(br(p), bi(p));
        res2 += (A * br - re).squaredNorm() + (A * bi - im).squaredNorm();
    }
    if (rel_residual) *rel_residual = std::sqrt(res2 / (n * d)) / std::max(scale, 1e-300);
    return beta;
}


// (sum_{n>=1} alpha_s(p^n) g) at a real target, for g known only on the real
// axis near the fixed point (complex Taylor circles are useless at large
// |Im s|: the cocycle chirp explodes off the axis). Direct terms plus a
// three-jet Lerch completion of the tail.
Eigen::VectorXcd real_parabolic_sum(const OperatorSpec& spec, const GroupElement& p,
                                    const Eigen::MatrixXcd& chi_p, const VectorFunction& g,
                                    double x, long n_direct = 1200) {
    ParabolicConjugation pc = deduce_translation_structure(p);
    int d = (int)chi_p.rows();
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(d);
    GroupElement p_inv = p.inverse();
    GroupElement mover = GroupElement::identity();
    Eigen::MatrixXcd tw = Eigen::MatrixXcd::Identity(d, d);
    for (long n = 1; n <= n_direct; ++n) {
        mover = p_inv * mover;
        tw = tw * chi_p;
        cplx coc = cocycle(spec.variant, mover, cplx(x, 0.0), spec.s);
        total += coc * (tw * g(mover.apply(cplx(x, 0.0))));
    }
    // tail: G(v) = j_s(h, v) g(h.v) = ((v)^2)^{-s} H(1/v) with H real-smooth;
    // fit the first three jets of H from real samples and complete with the
    // shifted continued Lerch zeta
    double u = pc.translation_at_infinity ? x : pc.h_inv.apply(cplx(x, 0.0)).real();
    double lambda = pc.lambda;
    double omega_star = 1.0 / (u + (double)(n_direct)*lambda);
    std::vector<double> ts;
    std::vector<Eigen::VectorXcd> hs;
    for (int j = 1; j <= 5; ++j) {
        double om = omega_star * j / 5.0;
        ts.push_back(om);
        cplx v = 1.0 / om;
        cplx y = pc.translation_at_infinity ? v : pc.h.apply(v);
        cplx jh = pc.translation_at_infinity
                      ? std::exp(-spec.s * std::log(v * v))
                      : cocycle(spec.variant, pc.h, v, spec.s);
        hs.push_back((std::exp(spec.s * std::log(v * v)) * jh * g(y)).eval());
    }
    double rel = 0.0;
    Eigen::MatrixXcd jets = poly_ladder_fit(ts, hs, 2, &rel);
    // diagonalize chi(p) for the channel phases
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi_p);
    Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::MatrixXcd Uinv = U.inverse();
    Eigen::VectorXcd tail = Eigen::VectorXcd::Zero(d);
    for (int ch = 0; ch < d; ++ch) {
        double a = std::arg(es.eigenvalues()(ch)) / (2.0 * PI);
        cplx acc = 0.0;
        for (int k = 0; k < 3; ++k) {
            cplx ck = (Uinv * jets.row(k).transpose())(ch);
            cplx warg((double)(n_direct + 1) + u / lambda, 0.0);
            cplx zeta_val = lerch_continued({2.0 * spec.s + (double)k, a, warg});
            cplx shift_phase = std::exp(cplx(0.0, 2.0 * PI * a * (double)(n_direct + 1)));
            acc += ck * std::exp(-(2.0 * spec.s + (double)k) * std::log(lambda)) * shift_phase *
                   zeta_val;
        }
        tail += acc * U.col(ch);
    }
    cplx pref = pc.translation_at_infinity
                    ? cplx(1.0, 0.0)
                    : cocycle(spec.variant, pc.h_inv, cplx(x, 0.0), spec.s);
    total += pref * tail;
    return total;
}

std::vector<double> interior_points(const DiskDomain& d, int count, double trim = 0.05) {
    // interior of the dynamical interval, where slow eigenfunctions live
    std::vector<double> pts;
    double lo = d.dyn_lo + trim * (d.dyn_hi - d.dyn_lo), hi = d.dyn_hi - trim * (d.dyn_hi - d.dyn_lo);
    for (int i = 0; i < count; ++i)
        pts.push_back(lo + (hi - lo) * (0.5 + 0.5 * std::cos(PI * (i + 0.5) / count)));
    return pts;
}

} // namespace

SlowFunction::SlowFunction(const OperatorSpec& spec, std::vector<Zone> zones)
    : spec_(spec), zones_(std::move(zones)) {
    std::sort(zones_.begin(), zones_.end(),
              [](const Zone& a, const Zone& b) { return a.priority < b.priority; });
    for (const auto& ft : slow_structure(spec_.family).finite) {
        GroupElement h = word_matrix(ft.h_word, spec_.family.ell);
        double w = ft.weight * (spec_.parity == Parity::Even ? 1.0 : (double)h.det_sign);
        terms_.push_back({h.inverse(), chi_of(spec_.chi, ft.h_word), w});
    }
}

Eigen::VectorXcd SlowFunction::eval(const cplx& x) const { return eval_depth(x, 0); }

Eigen::VectorXcd SlowFunction::eval_depth(const cplx& x, int depth) const {
    for (const auto& z : zones_) {
        if (x.real() <= z.min_re) continue;
        cplx w = z.disk.working_of_z(x);
        if (is_point_at_infinity(w)) continue;
        if (std::abs(w - cplx(z.disk.center, 0.0)) <= 0.985 * z.disk.radius) return z.eval(x);
    }
    if (depth >= 12)
        throw no_convergence("SlowFunction: functional-equation extension did not land in a zone");
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim());
    for (const auto& t : terms_) {
        cplx coc = cocycle(spec_.variant, t.mover, x, spec_.s);
        acc += (t.weight * coc) * (t.twist * eval_depth(t.mover.apply(x), depth + 1));
    }
    return acc;
}

double fast_residual(const OperatorMatrix& fast_op, const Eigen::VectorXcd& v) {
    Eigen::VectorXcd r = fast_op.blocks * v - v;
    return r.cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd extract_eigenvector(const OperatorMatrix& fast_op) {
    Eigen::MatrixXcd A =
        Eigen::MatrixXcd::Identity(fast_op.dim(), fast_op.dim()) - fast_op.blocks;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
    Eigen::VectorXcd v = svd.matrixV().col(fast_op.dim() - 1);
    // fix scale and phase: largest entry becomes 1
    int imax = 0;
    double best = 0.0;
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > best) {
            best = std::abs(v(i));
            imax = i;
        }
    return v / v(imax);
}

DistinguishedParabolic distinguished_parabolic(const HeckeFamily& fam,
                                               const DomainFamily& domains) {
    DistinguishedParabolic dp;
    switch (fam.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            dp.p_word = g_minus_k_word(1);
            dp.psi_block = fam.q == 3 ? 0 : 1; // the D_{-1} component
            dp.fixed_point = 0.0;
            dp.ladder_x0 = std::min(0.1, domains.disks[dp.psi_block].radius / 4.0);
            break;
        }
        case FamilyKind::Theta: {
            dp.p_word = {Gen::Tinv, Gen::S}; // k2, fixed point -1
            dp.psi_block = 0;                // E_a component
            dp.fixed_point = -1.0;
            dp.ladder_x0 = std::min(0.1, domains.disks[0].radius / 4.0);
            break;
        }
        case FamilyKind::NonCofinite: {
            dp.p_word = {Gen::Tinv}; // a1^{-1}, cusp at infinity
            dp.psi_block = 1;        // E_2 component
            dp.at_infinity = true;
            dp.ladder_x0 = fam.ell + 1.0;
            break;
        }
    }
    dp.sum_spec = ParabolicSumSpec{dp.p_word, {}, 1.0, dp.psi_block, dp.psi_block, "L_p"};
    return dp;
}

SlowFunction fast_to_slow(const OperatorMatrix& fast_op, const BlockVector& f) {
    const OperatorSpec& spec = fast_op.spec;
    const DomainFamily& dom = fast_op.domains;
    std::vector<SlowFunction::Zone> zones;
    auto interp_zone = [&](int disk, int priority) {
        auto fe = std::make_shared<FunctionElement>(f[disk]);
        cplx s = spec.s;
        zones.push_back({dom.disks[disk],
                         [fe, s](const cplx& x) { return fe->eval_physical(x, s); },
                         -std::numeric_limits<double>::infinity(), priority});
    };
    auto sum_zone = [&](int disk, const std::vector<Gen>& p_word, double min_re, int priority) {
        auto fe = std::make_shared<FunctionElement>(f[disk]);
        ParabolicSumSpec sp{p_word, {}, 1.0, disk, disk, "iso"};
        auto block = std::make_shared<ParabolicBlock>(sp, spec.family, spec.chi, spec.s,
                                                      dom.disks[disk]);
        cplx s = spec.s;
        zones.push_back({dom.disks[disk],
                         [fe, block, s](const cplx& x) {
                             return (fe->eval_physical(x, s) + block->apply_to(*fe, x)).eval();
                         },
                         min_re, priority});
    };
    switch (spec.family.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            if (spec.family.q > 3) interp_zone(0, 0); // phi |_{D0} = f0
            int dm1 = spec.family.q == 3 ? 0 : 1;
            sum_zone(dm1, g_minus_k_word(1), 1e-9, 1); // phi |_{Dm1} = (1 + L_{-1}) f_{-1}
            break;
        }
        case FamilyKind::Theta: {
            interp_zone(1, 0);                            // phi |_{Eb} = f_b
            sum_zone(0, {Gen::Tinv, Gen::S}, -1.0 + 1e-9, 1); // (1 + L_2) f_a
            sum_zone(2, {Gen::Tinv}, 1e-9, 1);            // (1 + L_1) f_c
            break;
        }
        case FamilyKind::NonCofinite: {
            interp_zone(0, 0);                 // phi |_{E1} = f_1
            sum_zone(1, {Gen::Tinv}, 1e-9, 1); // (1 + L_1) f_2
            break;
        }
    }
    return SlowFunction(spec, std::move(zones));
}

namespace {

// (slow operator minus the alpha(skip) term) applied to phi at a physical x
Eigen::VectorXcd slow_remainder_eval(const OperatorSpec& spec, const SlowFunction& phi,
                                     const std::vector<Gen>& skip_word, const cplx& x) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(spec.chi.dim());
    for (const auto& ft : slow_structure(spec.family).finite) {
        if (ft.h_word == skip_word) continue;
        GroupElement h = word_matrix(ft.h_word, spec.family.ell);
        double w = ft.weight * (spec.parity == Parity::Even ? 1.0 : (double)h.det_sign);
        GroupElement mover = h.inverse();
        cplx coc = cocycle(spec.variant, mover, x, spec.s);
        acc += (w * coc) * (chi_of(spec.chi, ft.h_word) * phi.eval(mover.apply(x)));
    }
    return acc;
}

// stored (weight-cleared) version on a chart component at a real w node
Eigen::VectorXcd slow_remainder_stored(const OperatorSpec& spec, const SlowFunction& phi,
                                       const std::vector<Gen>& skip_word, const DiskDomain& target,
                                       double w_node) {
    DiskDomain plain; // stand-in unweighted source: phi is evaluated physically
    plain.weighted = false;
    plain.chart = false;
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(spec.chi.dim());
    cplx x = target.z_of_working(cplx(w_node, 0.0));
    for (const auto& ft : slow_structure(spec.family).finite) {
        if (ft.h_word == skip_word) continue;
        GroupElement h = word_matrix(ft.h_word, spec.family.ell);
        double w = ft.weight * (spec.parity == Parity::Even ? 1.0 : (double)h.det_sign);
        GroupElement mover = h.inverse();
        cplx scal = finite_term_scalar(mover, target, plain, cplx(w_node, 0.0), spec.s);
        acc += (w * scal) * (chi_of(spec.chi, ft.h_word) * phi.eval(mover.apply(x)));
    }
    return acc;
}

} // namespace

BlockVector slow_to_fast(const OperatorMatrix& fast_op, const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    const DomainFamily& dom = fast_op.domains;
    int d = spec.chi.dim();
    auto values_on = [&](int disk, const std::function<Eigen::VectorXcd(double)>& g) {
        FunctionElement fe;
        fe.domain = dom.disks[disk];
        fe.values.resize(fe.domain.n_nodes, d);
        for (int i = 0; i < fe.domain.n_nodes; ++i)
            fe.values.row(i) = g(fe.domain.nodes[i]).transpose();
        return fe;
    };
    BlockVector out;
    switch (spec.family.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            auto skip = g_minus_k_word(1);
            if (spec.family.q > 3)
                out.push_back(values_on(0, [&](double t) { return phi.eval(cplx(t, 0.0)); }));
            int dm1 = spec.family.q == 3 ? 0 : 1;
            out.push_back(values_on(
                dm1, [&](double t) { return slow_remainder_eval(spec, phi, skip, cplx(t, 0.0)); }));
            break;
        }
        case FamilyKind::Theta: {
            std::vector<Gen> k2{Gen::Tinv, Gen::S}, k1i{Gen::Tinv};
            out.push_back(values_on(
                0, [&](double t) { return slow_remainder_eval(spec, phi, k2, cplx(t, 0.0)); }));
            out.push_back(values_on(1, [&](double t) { return phi.eval(cplx(t, 0.0)); }));
            out.push_back(values_on(2, [&](double t) {
                return slow_remainder_stored(spec, phi, k1i, dom.disks[2], t);
            }));
            break;
        }
        case FamilyKind::NonCofinite: {
            std::vector<Gen> a1i{Gen::Tinv};
            out.push_back(values_on(0, [&](double t) { return phi.eval(cplx(t, 0.0)); }));
            out.push_back(values_on(1, [&](double t) {
                return slow_remainder_stored(spec, phi, a1i, dom.disks[1], t);
            }));
            break;
        }
    }
    return out;
}

double blockvec_residual(const BlockVector& a, const BlockVector& b) {
    if (a.size() != b.size()) throw config_error("blockvec_residual: block count mismatch");
    double scale = 0.0, worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, a[i].values.cwiseAbs().maxCoeff());
        worst = std::max(worst, (a[i].values - b[i].values).cwiseAbs().maxCoeff());
    }
    return scale > 0 ? worst / scale : worst;
}

double slow_fe_residual(const OperatorMatrix& fast_op, const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    double worst = 0.0, scale = 0.0;
    for (const auto& disk : fast_op.domains.disks) {
        for (double t : interior_points(disk, 12)) {
            cplx x = disk.z_of_working(cplx(t, 0.0));
            Eigen::VectorXcd lhs = phi.eval(x);
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(phi.dim());
            for (const auto& ft : slow_structure(spec.family).finite) {
                GroupElement h = word_matrix(ft.h_word, spec.family.ell);
                double w = ft.weight * (spec.parity == Parity::Even ? 1.0 : (double)h.det_sign);
                GroupElement mover = h.inverse();
                cplx coc = cocycle(spec.variant, mover, x, spec.s);
                rhs += (w * coc) * (chi_of(spec.chi, ft.h_word) * phi.eval(mover.apply(x)));
            }
            worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
            scale = std::max(scale, lhs.cwiseAbs().maxCoeff());
        }
    }
    return worst / std::max(scale, 1e-30);
}

double shift_identity_residual(const OperatorMatrix& fast_op, const FunctionElement& f) {
    const OperatorSpec& spec = fast_op.spec;
    DistinguishedParabolic dp = distinguished_parabolic(spec.family, fast_op.domains);
    ParabolicBlock block(dp.sum_spec, spec.family, spec.chi, spec.s,
                         fast_op.domains.disks[dp.psi_block]);
    GroupElement p = word_matrix(dp.p_word, spec.family.ell);
    GroupElement mover = p.inverse();
    Eigen::MatrixXcd chi_p = chi_of(spec.chi, dp.p_word);
    double worst = 0.0, scale = 0.0;
    std::vector<double> xs;
    if (dp.at_infinity) {
        for (int j = 0; j < 8; ++j) xs.push_back(dp.ladder_x0 * std::pow(1.5, j));
    } else {
        for (int j = 0; j < 8; ++j)
            xs.push_back(dp.fixed_point + dp.ladder_x0 * std::pow(0.5, j) +
                         (dp.fixed_point == 0.0 ? 0.0 : 0.0));
    }
    cplx s = spec.s;
    for (double xr : xs) {
        cplx x(xr, 0.0);
        // alpha(p) L f (x) = j_s(mover, x) chi(p) (L f)(mover.x)
        cplx coc = cocycle(spec.variant, mover, x, s);
        Eigen::VectorXcd lhs = coc * (chi_p * block.apply_to(f, mover.apply(x)));
        Eigen::VectorXcd alpha_f = coc * (chi_p * f.eval_physical(mover.apply(x), s));
        Eigen::VectorXcd rhs = block.apply_to(f, x) - alpha_f;
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        scale = std::max(scale, rhs.cwiseAbs().maxCoeff());
    }
    return worst / std::max(scale, 1e-30);
}

CrucialReport check_crucial_identities(const OperatorMatrix& fast_op, const BlockVector& f,
                                       const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    DistinguishedParabolic dp = distinguished_parabolic(spec.family, fast_op.domains);
    ParabolicBlock block(dp.sum_spec, spec.family, spec.chi, spec.s,
                         fast_op.domains.disks[dp.psi_block]);
    GroupElement p = word_matrix(dp.p_word, spec.family.ell);
    GroupElement mover = p.inverse();
    Eigen::MatrixXcd chi_p = chi_of(spec.chi, dp.p_word);
    CrucialReport rep;
    rep.shift_residual = shift_identity_residual(fast_op, f[dp.psi_block]);

    const FunctionElement& fpsi = f[dp.psi_block];
    BlockVector f_from_phi = slow_to_fast(fast_op, phi);
    const FunctionElement& psi = f_from_phi[dp.psi_block];
    VectorFunction psi_fn = [&](const cplx& z) { return psi.eval_raw(z); };
    auto L_psi = [&](const cplx& x) -> Eigen::VectorXcd {
        if (dp.at_infinity) return block.apply_to(psi, x);
        return real_parabolic_sum(spec, p, chi_p, psi_fn, x.real());
    };
    double worst1 = 0.0, worst2 = 0.0, scale = 0.0;
    std::vector<double> xs;
    if (dp.at_infinity)
        for (int j = 0; j < 8; ++j) xs.push_back(dp.ladder_x0 * std::pow(1.5, j));
    else
        for (int j = 0; j < 8; ++j)
            xs.push_back(dp.fixed_point + dp.ladder_x0 * std::pow(0.5, j));
    for (double xr : xs) {
        cplx x(xr, 0.0);
        cplx coc = cocycle(spec.variant, mover, x, spec.s);
        cplx y = mover.apply(x);
        // identity 1: alpha(p)(1 + L) f_psi = L f_psi
        Eigen::VectorXcd one_plus_L =
            fpsi.eval_physical(y, spec.s) + block.apply_to(fpsi, y);
        Eigen::VectorXcd lhs1 = coc * (chi_p * one_plus_L);
        Eigen::VectorXcd rhs1 = block.apply_to(fpsi, x);
        worst1 = std::max(worst1, (lhs1 - rhs1).cwiseAbs().maxCoeff());
        // identity 2: L (1 - alpha(p)) phi = alpha(p) phi
        Eigen::VectorXcd lhs2 = L_psi(x);
        Eigen::VectorXcd rhs2 = coc * (chi_p * phi.eval(y));
        worst2 = std::max(worst2, (lhs2 - rhs2).cwiseAbs().maxCoeff());
        scale = std::max(scale, rhs2.cwiseAbs().maxCoeff());
    }
    rep.identity1_residual = worst1 / std::max(scale, 1e-30);
    rep.identity2_residual = worst2 / std::max(scale, 1e-30);
    return rep;
}

Q0Report q0_diagnostic(const OperatorMatrix& fast_op, const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    DistinguishedParabolic dp = distinguished_parabolic(spec.family, fast_op.domains);
    GroupElement p = word_matrix(dp.p_word, spec.family.ell);
    GroupElement mover = p.inverse();
    Eigen::MatrixXcd chi_p = chi_of(spec.chi, dp.p_word);
    BlockVector f_from_phi = slow_to_fast(fast_op, phi);
    const FunctionElement& psi_el = f_from_phi[dp.psi_block];
    // psi = (1 - alpha_s(p)) phi is exactly the f-component on the psi block;
    // its interpolant is the cheap accurate evaluator near the fixed point
    VectorFunction psi_fn = [&](const cplx& z) { return psi_el.eval_raw(z); };
    ParabolicBlock block(dp.sum_spec, spec.family, spec.chi, spec.s,
                         fast_op.domains.disks[dp.psi_block]);
    auto L_psi = [&](const cplx& x) -> Eigen::VectorXcd {
        if (dp.at_infinity) return block.apply_to(psi_el, x);
        return real_parabolic_sum(spec, p, chi_p, psi_fn, x.real());
    };

    auto Q0 = [&](const cplx& x) -> Eigen::VectorXcd {
        cplx coc = cocycle(spec.variant, mover, x, spec.s);
        Eigen::VectorXcd a = coc * (chi_p * phi.eval(mover.apply(x)));
        return a - L_psi(x);
    };

    Q0Report rep;
    std::vector<double> ladder;
    std::vector<Eigen::VectorXcd> q0_vals;
    double scale = 0.0;
    for (int j = 0; j < 8; ++j) {
        double t = dp.ladder_x0 * std::pow(0.5, j);
        double xr = dp.at_infinity ? dp.ladder_x0 * std::pow(1.5, j) : dp.fixed_point + t;
        cplx x(xr, 0.0);
        Eigen::VectorXcd q = Q0(x);
        Eigen::VectorXcd pq;
        {
            cplx coc = cocycle(spec.variant, mover, x, spec.s);
            pq = coc * (chi_p * Q0(mover.apply(x)));
        }
        rep.sup_q0 = std::max(rep.sup_q0, q.cwiseAbs().maxCoeff());
        rep.invariance_residual =
            std::max(rep.invariance_residual, (pq - q).cwiseAbs().maxCoeff());
        scale = std::max(scale, phi.eval(x).cwiseAbs().maxCoeff());
        if (!dp.at_infinity) {
            ladder.push_back(t);
            q0_vals.push_back(q);
        }
    }
    if (scale > 0) {
        rep.sup_q0 /= scale;
        rep.invariance_residual /= scale;
    }
    if (!ladder.empty()) {
        AsymptoticFit fit = fit_asymptotic(ladder, q0_vals);
        rep.c_fit_abs = fit.c_minus1.cwiseAbs().maxCoeff() / std::max(scale, 1e-30);
    }
    return rep;
}

GrowthReport growth_class_fit(const OperatorMatrix& fast_op, const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    DistinguishedParabolic dp = distinguished_parabolic(spec.family, fast_op.domains);
    GrowthReport rep;
    // the regular part is modeled to 4th order so the residual measures the
    // deviation from the c/t + (smooth) form itself
    std::vector<double> ts;
    std::vector<Eigen::VectorXcd> ys;
    for (int j = 0; j < 8; ++j) {
        if (!dp.at_infinity) {
            double t = dp.ladder_x0 * std::pow(0.5, j);
            ts.push_back(t);
            ys.push_back((t * phi.eval(cplx(dp.fixed_point + t, 0.0))).eval());
        } else {
            // t = 1/x; phi(x) x^{2s-1} = c + c0 t + ...
            double x = dp.ladder_x0 * std::pow(2.0, j);
            ts.push_back(1.0 / x);
            cplx fac = std::exp((2.0 * spec.s - 1.0) * std::log(cplx(x, 0.0)));
            ys.push_back((fac * phi.eval(cplx(x, 0.0))).eval());
        }
    }
    double rel = 0.0;
    Eigen::MatrixXcd beta = poly_ladder_fit(ts, ys, 4, &rel);
    rep.fit.c_minus1 = beta.row(0).transpose();
    rep.fit.c0 = beta.row(1).transpose();
    rep.fit.fit_residual = rel;
    // non-fixed chi channels of the parabolic direction
    Eigen::MatrixXcd chi_p = chi_of(spec.chi, dp.p_word);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(chi_p);
    Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::VectorXcd in_basis = U.inverse() * rep.fit.c_minus1;
    double cscale = 0.0;
    for (const auto& y : ys) cscale = std::max(cscale, y.cwiseAbs().maxCoeff());
    for (int ch = 0; ch < spec.chi.dim(); ++ch) {
        if (std::abs(es.eigenvalues()(ch) - cplx(1.0, 0.0)) > 1e-8) {
            rep.fit.nonfixed_channels.push_back(ch);
            rep.nonfixed_max =
                std::max(rep.nonfixed_max, std::abs(in_basis(ch)) / std::max(cscale, 1e-30));
        }
    }
    return rep;
}

DecayReport decay_membership(const OperatorMatrix& fast_op, const BlockVector& f,
                             const SlowFunction& phi) {
    const OperatorSpec& spec = fast_op.spec;
    DecayReport rep;
    int d = spec.chi.dim();
    double sign = spec.parity == Parity::Even ? -1.0 : 1.0; // the "-/+ alpha(J)" sign
    std::function<Eigen::VectorXcd(double)> plus, minus;
    if (spec.family.cofinite_kind()) {
        rep.applicable = true;
        Eigen::MatrixXcd chi_J = chi_of(spec.chi, {Gen::Q, Gen::S});
        plus = [&](double x) { return phi.eval(cplx(x, 0.0)); };
        minus = [&, chi_J](double x) {
            return (sign * (chi_J * phi.eval(cplx(-x, 0.0)))).eval();
        };
    } else if (spec.family.kind == FamilyKind::Theta) {
        rep.applicable = true;
        Eigen::MatrixXcd chi_Q = chi_of(spec.chi, {Gen::Q});
        Eigen::MatrixXcd chi_S = chi_of(spec.chi, {Gen::S});
        Eigen::MatrixXcd chi_J = chi_of(spec.chi, {Gen::Q, Gen::S});
        const FunctionElement& fb = f[1];
        cplx s = spec.s;
        auto one_plus_L1_fc = [&, s](const cplx& x) { return phi.eval(x); }; // phi on E_c
        plus = [&, chi_Q, s](double x) {
            cplx coc = std::exp(-s * std::log(cplx(x * x, 0.0)));
            return (fb.eval_physical(cplx(x, 0.0), s) +
                    (spec.parity == Parity::Even ? 1.0 : -1.0) * coc *
                        (chi_Q * one_plus_L1_fc(cplx(1.0 / x, 0.0))))
                .eval();
        };
        minus = [&, chi_S, chi_J, s](double x) {
            cplx coc = std::exp(-s * std::log(cplx(x * x, 0.0)));
            Eigen::VectorXcd a = coc * (chi_S * one_plus_L1_fc(cplx(-1.0 / x, 0.0)));
            Eigen::VectorXcd b = chi_J * fb.eval_physical(cplx(-x, 0.0), s);
            return (-a + sign * b).eval();
        };
    } else {
        rep.applicable = false;
        return rep;
    }

    // C^2 jets from quartic least squares on geometric ladders
    auto jets = [&](const std::function<Eigen::VectorXcd(double)>& g, double orient) {
        const int J = 8;
        double x0 = 0.04;
        Eigen::MatrixXd A(J, 5);
        std::vector<Eigen::VectorXcd> v;
        for (int j = 0; j < J; ++j) {
            double x = orient * x0 * std::pow(0.5, j);
            double t = x / x0;
            A(j, 0) = 1;
            A(j, 1) = t;
            A(j, 2) = t * t;
            A(j, 3) = t * t * t;
            A(j, 4) = t * t * t * t;
            v.push_back(g(x));
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::MatrixXcd jets_out(3, d);
        for (int ch = 0; ch < d; ++ch) {
            Eigen::VectorXcd rhs(J);
            for (int j = 0; j < J; ++j) rhs(j) = v[j](ch);
            Eigen::VectorXd cr = svd.solve(rhs.real().eval());
            Eigen::VectorXd ci = svd.solve(rhs.imag().eval());
            jets_out(0, ch) = cplx(cr(0), ci(0));
            jets_out(1, ch) = cplx(cr(1), ci(1)) / x0;
            jets_out(2, ch) = cplx(cr(2), ci(2)) * 2.0 / (x0 * x0);
        }
        return jets_out;
    };
    Eigen::MatrixXcd jp = jets(plus, 1.0);
    Eigen::MatrixXcd jm = jets(minus, -1.0);
    double scale = std::max(1.0, jp.cwiseAbs().maxCoeff());
    rep.mismatch = (jp - jm).cwiseAbs().maxCoeff() / scale;
    rep.flag = rep.mismatch < 1e-5;
    return rep;
}

ContractionReport contraction_verify(const HeckeFamily& fam, int len_lo, int len_hi, Exec exec) {
    if (!fam.cofinite_kind())
        throw config_error("contraction_verify covers the cofinite families");
    DomainFamily dom = make_domain_family(fam);
    const DiskDomain& U_m1 = dom.disks[fam.q == 3 ? 0 : (int)dom.disks.size() - 1];
    const DiskDomain& U_0 = dom.disks[0];
    // test set bounded away from (-infty, 0]
    DiskDomain testset;
    testset.center = 0.5;
    testset.radius = 0.47;
    GroupElement Q = gen_Q();

    std::vector<GroupElement> letters;  // g_{+-k}^{-1}
    std::vector<int> letter_first;      // -1 for g_{-1}^{-1}, 0 for g_{-k<=-2}, +1 otherwise
    for (int k = 1; k <= fam.m; ++k) {
        letters.push_back(g_element(fam.q, k).inverse());
        letter_first.push_back(1);
        letters.push_back(g_element(fam.q, -k).inverse());
        letter_first.push_back(k == 1 ? -1 : 0);
    }

    auto maps_into = [&](const GroupElement& g, const DiskDomain& target) {
        const int samples = 64;
        for (int i = 0; i < samples; ++i) {
            cplx z = testset.center + testset.radius * std::exp(cplx(0, 2.0 * PI * i / samples));
            cplx w = g.apply(z);
            if (std::abs(w - cplx(target.center, 0.0)) >= target.radius) return false;
        }
        return true;
    };

    ContractionReport rep;
    std::vector<ContractionLengthStat> stat_m1(len_hi + 1), stat_0(len_hi + 1);
    for (int n = 0; n <= len_hi; ++n) {
        stat_m1[n].length = n;
        stat_0[n].length = n;
    }

    // depth-first enumeration with incremental products
    std::function<void(GroupElement, int, int)> dfs = [&](GroupElement acc, int first, int n) {
        if (n >= len_lo && first <= 0) {
            const DiskDomain& target = first == -1 ? U_m1 : U_0;
            auto& stat = first == -1 ? stat_m1[n] : stat_0[n];
            stat.words++;
            bool ok = maps_into(acc, target) && maps_into(acc * Q, target);
            if (!ok) stat.failures++;
        }
        if (n == len_hi) return;
        for (size_t li = 0; li < letters.size(); ++li) {
            int f = n == 0 ? letter_first[li] : first;
            dfs(n == 0 ? letters[li] : acc * letters[li], f, n + 1);
        }
    };
    dfs(GroupElement::identity(), 2, 0);

    // half-plane forward invariance on sampled words
    long hp_checked = 0;
    bool hp_ok = true;
    std::function<void(GroupElement, int, int)> dfs_hp = [&](GroupElement acc, int first, int n) {
        if (n >= 1 && first <= 0) {
            const DiskDomain& target = first == -1 ? U_m1 : U_0;
            hp_checked++;
            for (int i = 0; i < 24 && hp_ok; ++i) {
                double th = 2.0 * PI * i / 24;
                cplx z = cplx(target.center, 0.0) +
                         0.9 * target.radius * std::exp(cplx(0, th));
                if (z.real() < 0.0) z = cplx(0.0, z.imag()); // clamp into C_R
                if (std::abs(z - cplx(target.center, 0.0)) > target.radius) continue;
                cplx w = acc.apply(z);
                if (w.real() < -1e-10 ||
                    std::abs(w - cplx(target.center, 0.0)) > target.radius + 1e-10)
                    hp_ok = false;
            }
        }
        if (n == std::min(len_hi, 5)) return;
        for (size_t li = 0; li < letters.size(); ++li) {
            int f = n == 0 ? letter_first[li] : first;
            dfs_hp(n == 0 ? letters[li] : acc * letters[li], f, n + 1);
        }
    };
    dfs_hp(GroupElement::identity(), 2, 0);
    rep.halfplane_ok = hp_ok;
    rep.halfplane_words = hp_checked;

    auto first_zero_onward = [&](const std::vector<ContractionLengthStat>& st) {
        int n0 = -1;
        for (int n = len_lo; n <= len_hi; ++n) {
            if (st[n].failures == 0) {
                if (n0 < 0) n0 = n;
            } else {
                n0 = -1;
            }
        }
        return n0;
    };
    for (int n = len_lo; n <= len_hi; ++n) {
        rep.class_minus1.push_back(stat_m1[n]);
        rep.class_zero.push_back(stat_0[n]);
    }
    rep.n0_minus1 = first_zero_onward(stat_m1);
    rep.n0_zero = first_zero_onward(stat_0);
    (void)exec;
    return rep;
}

std::string IsoCheckReport::to_json() const {
    nlohmann::json j;
    j["s0"] = {s0.real(), s0.imag()};
    j["parity"] = parity_name(parity);
    j["eig_residual"] = eig_residual;
    j["fast_residual"] = fast_residual;
    j["roundtrip_fast"] = roundtrip_fast;
    j["roundtrip_slow"] = roundtrip_slow;
    j["slow_fe_residual"] = slow_fe;
    j["growth_fit_residual"] = growth.fit.fit_residual;
    j["growth_nonfixed_max"] = growth.nonfixed_max;
    j["q0_sup"] = q0.sup_q0;
    j["q0_invariance"] = q0.invariance_residual;
    j["shift_residual"] = crucial.shift_residual;
    j["identity1_residual"] = crucial.identity1_residual;
    j["identity2_residual"] = crucial.identity2_residual;
    j["decay_applicable"] = decay.applicable;
    j["decay_flag"] = decay.flag;
    j["decay_mismatch"] = decay.mismatch;
    return j.dump(2);
}

IsoCheckReport iso_check_at(const HeckeFamily& fam, const Representation& chi, Parity parity,
                            const cplx& s0, int N, Exec exec) {
    if (std::abs(s0 - cplx(0.5, 0.0)) < 1e-3)
        throw domain_violation("isomorphism checks refuse s within 1e-3 of 1/2");
    OperatorSpec spec;
    spec.family = fam;
    spec.chi = chi;
    spec.parity = parity;
    spec.s = s0;
    spec.n_nodes = N;
    spec.eigenfunction_mode = true;
    OperatorMatrix op = build_fast(spec, exec);
    IsoCheckReport rep;
    rep.s0 = s0;
    rep.parity = parity;
    Eigen::VectorXcd v = extract_eigenvector(op);
    rep.fast_residual = fast_residual(op, v);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(op.dim(), op.dim()) - op.blocks;
    rep.eig_residual = (A * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
    BlockVector f = blockvec_from_flat(op, v);
    SlowFunction phi = fast_to_slow(op, f);
    BlockVector f_back = slow_to_fast(op, phi);
    rep.roundtrip_fast = blockvec_residual(f, f_back);
    SlowFunction phi_back = fast_to_slow(op, f_back);
    // compare phi and phi_back at interior samples
    {
        double worst = 0.0, scale = 0.0;
        for (const auto& disk : op.domains.disks)
            for (double t : interior_points(disk, 8)) {
                cplx x = disk.z_of_working(cplx(t, 0.0));
                Eigen::VectorXcd a = phi.eval(x), b = phi_back.eval(x);
                worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
                scale = std::max(scale, a.cwiseAbs().maxCoeff());
            }
        rep.roundtrip_slow = worst / std::max(scale, 1e-30);
    }
    rep.slow_fe = slow_fe_residual(op, phi);
    rep.growth = growth_class_fit(op, phi);
    rep.q0 = q0_diagnostic(op, phi);
    rep.crucial = check_crucial_identities(op, f, phi);
    rep.decay = decay_membership(op, f, phi);
    return rep;
}

} // namespace hecke
