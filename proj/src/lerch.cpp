#include "hecke/lerch.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace hecke {

namespace {

// B_{2j} / (2j)! for j = 1..12
constexpr double kBernoulliOverFactorial[12] = {
    8.3333333333333333e-02,  -1.3888888888888889e-03, 3.3068783068783069e-05,
    -8.2671957671957672e-07, 2.0876756987868099e-08,  -5.2841901386874932e-10,
    1.3382536530684679e-11,  -3.3896802963225829e-13, 8.5860620562778446e-15,
    -2.1748686985580619e-16, 5.5090028283602295e-18,  -1.3954464685812522e-19};

bool integer_phase(double a) { return std::abs(a - std::round(a)) < 1e-9; }

// Hurwitz zeta by Euler-Maclaurin: direct head plus tail correction
cplx hurwitz_em(const cplx& s, const cplx& w, double* err_out) {
    if (std::abs(s - cplx(1.0, 0.0)) < 1e-6)
        throw pole_proximity("Hurwitz zeta: s within 1e-6 of the pole s = 1");
    int N = std::max(50, (int)std::ceil(1.5 * std::abs(s)));
    cplx sum = 0.0, comp = 0.0;
    for (int n = 0; n < N; ++n) {
        cplx term = std::pow(cplx(n, 0.0) + w, -s);
        cplx y = term - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    cplx W = w + cplx(N, 0.0);
    cplx Winv = 1.0 / W;
    cplx tail = std::pow(W, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(W, -s);
    cplx fac = s * std::pow(W, -s - 1.0); // (s)_{2j-1} W^{-s-2j+1}, built incrementally
    double last = 0.0;
    for (int j = 1; j <= 12; ++j) {
        cplx term = kBernoulliOverFactorial[j - 1] * fac;
        tail += term;
        last = std::abs(term);
        fac *= (s + (double)(2 * j - 1)) * (s + (double)(2 * j)) * Winv * Winv;
    }
    if (err_out) *err_out = last * std::abs((s + 25.0) * Winv) + 1e-16 * std::abs(sum);
    return sum + tail;
}

int stirling_kmax() { return 34; }

// Stirling numbers of the second kind, S(n,k) for n,k <= 35
const std::vector<std::vector<double>>& stirling2_table() {
    static const std::vector<std::vector<double>> table = [] {
        int n_max = 36;
        std::vector<std::vector<double>> t(n_max + 1, std::vector<double>(n_max + 1, 0.0));
        t[0][0] = 1.0;
        for (int n = 1; n <= n_max; ++n)
            for (int k = 1; k <= n; ++k) t[n][k] = (double)k * t[n - 1][k] + t[n - 1][k - 1];
        return t;
    }();
    return table;
}

// Li_{-n}(z) = sum_j j! S(n+1, j+1) u^{j+1}, u = z/(1-z)
std::vector<cplx> polylog_negative(const cplx& z, int n_max) {
    const auto& S2 = stirling2_table();
    cplx u = z / (1.0 - z);
    std::vector<cplx> li(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        cplx acc = 0.0;
        double jfact = 1.0;
        cplx upow = u;
        for (int j = 0; j <= n; ++j) {
            acc += jfact * S2[n + 1][j + 1] * upow;
            jfact *= (double)(j + 1);
            upow *= u;
        }
        li[n] = acc;
    }
    return li;
}

// continuation for non-integer phase: shift + large-argument series, entire in s
cplx lerch_shift_asymptotic(const cplx& s, double a, const cplx& w, double* err_out) {
    cplx z = std::exp(cplx(0.0, 2.0 * PI * a));
    double gap = std::abs(1.0 - z);
    int K = stirling_kmax();
    double Wmin = std::max({30.0, 1.3 * (std::abs(s) + K) / std::max(gap, 0.25), 1.5 * std::abs(s)});
    int N = 0;
    while (std::abs(w + cplx(N, 0.0)) < Wmin) ++N;
    cplx sum = 0.0, comp = 0.0, zpow = 1.0;
    for (int n = 0; n < N; ++n) {
        cplx term = zpow * std::pow(cplx(n, 0.0) + w, -s);
        cplx y = term - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        zpow *= z;
    }
    cplx W = w + cplx(N, 0.0);
    auto li = polylog_negative(z, K);
    li[0] += 1.0; // sum_{m>=0} z^m m^k needs the m = 0 term when k = 0
    cplx tail = 0.0;
    cplx binom = 1.0; // binom(-s, k)
    cplx Wpow = std::pow(W, -s);
    double smallest = std::numeric_limits<double>::infinity();
    cplx acc_at_smallest = 0.0;
    for (int k = 0; k <= K; ++k) {
        cplx term = binom * li[k] * Wpow;
        tail += term;
        double mag = std::abs(term);
        if (mag < smallest) {
            smallest = mag;
            acc_at_smallest = tail;
        }
        binom *= (-s - (double)k) / (double)(k + 1);
        Wpow /= W;
    }
    // asymptotic series: truncate at the smallest term
    if (err_out) *err_out = smallest + 1e-16 * std::abs(sum);
    return sum + zpow * acc_at_smallest;
}

} // namespace

cplx lerch_direct(const LerchParams& p) {
    if (p.s.real() <= 1.0)
        throw no_convergence("lerch_direct requires Re s > 1");
    if (p.w.real() <= 0.0) throw domain_violation("lerch needs Re w > 0");
    cplx z = std::exp(cplx(0.0, 2.0 * PI * p.a));
    cplx sum = 0.0, comp = 0.0, zpow = 1.0;
    long N = std::max(20000L, (long)std::ceil(4.0 * std::abs(p.s)));
    auto f = [&](long n) { return std::pow(cplx((double)n, 0.0) + p.w, -p.s); };
    for (long n = 0; n < N; ++n) {
        cplx term = zpow * f(n);
        cplx y = term - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        zpow *= z;
    }
    // endpoint completion of the tail, residual below 1e-14
    if (integer_phase(p.a)) {
        cplx W = p.w + cplx((double)N, 0.0);
        sum += std::pow(W, 1.0 - p.s) / (p.s - 1.0) + 0.5 * std::pow(W, -p.s) +
               kBernoulliOverFactorial[0] * p.s * std::pow(W, -p.s - 1.0) +
               kBernoulliOverFactorial[1] * p.s * (p.s + 1.0) * (p.s + 2.0) *
                   std::pow(W, -p.s - 3.0);
    } else {
        // iterated Abel summation on the slowly varying factor
        cplx u = z / (1.0 - z);
        cplx d0 = f(N), d1 = f(N + 1) - f(N), d2 = f(N + 2) - 2.0 * f(N + 1) + f(N);
        cplx d3 = f(N + 3) - 3.0 * f(N + 2) + 3.0 * f(N + 1) - f(N);
        sum += zpow * (1.0 + u) * (d0 + u * d1 + u * u * d2 + u * u * u * d3);
    }
    return sum;
}

cplx lerch_continued(const LerchParams& p, double* err_out) {
    if (p.w.real() <= 0.0) throw domain_violation("lerch needs Re w > 0");
    if (integer_phase(p.a)) return hurwitz_em(p.s, p.w, err_out);
    double a = p.a - std::floor(p.a);
    return lerch_shift_asymptotic(p.s, a, p.w, err_out);
}

AsymptoticFit fit_asymptotic(const std::vector<double>& xs,
                             const std::vector<Eigen::VectorXcd>& values) {
    if (xs.size() < 3 || values.size() != xs.size())
        throw config_error("fit_asymptotic needs >= 3 ladder samples");
    int d = values[0].size();
    int n = (int)xs.size();
    Eigen::MatrixXd A(n, 2);
    for (int i = 0; i < n; ++i) {
        if (xs[i] <= 0.0) throw domain_violation("fit_asymptotic: ladder must be positive");
        A(i, 0) = 1.0 / xs[i];
        A(i, 1) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues()(1) < 1e-12 * svd.singularValues()(0))
        throw no_convergence("fit_asymptotic: ill-conditioned ladder");
    AsymptoticFit fit;
    fit.c_minus1.resize(d);
    fit.c0.resize(d);
    double res2 = 0.0;
    for (int ch = 0; ch < d; ++ch) {
        Eigen::VectorXcd rhs(n);
        for (int i = 0; i < n; ++i) rhs(i) = values[i](ch);
        Eigen::VectorXcd re = svd.solve(rhs.real().eval().cast<cplx>());
        Eigen::VectorXcd im = svd.solve(rhs.imag().eval().cast<cplx>());
        cplx c1 = re(0).real() + cplx(0, 1) * im(0).real();
        cplx c0 = re(1).real() + cplx(0, 1) * im(1).real();
        fit.c_minus1(ch) = c1;
        fit.c0(ch) = c0;
        for (int i = 0; i < n; ++i) {
            cplx model = c1 / xs[i] + c0;
            res2 += std::norm(rhs(i) - model);
        }
    }
    fit.fit_residual = std::sqrt(res2 / (n * d));
    return fit;
}

int default_taylor_degree(const cplx& s) {
    return std::max(2, (int)std::ceil(1.0 - 2.0 * s.real()) + 2);
}

TranslatedPowerSum::TranslatedPowerSum(cplx s, double a, double lambda, ScalarSeriesFn H, int M,
                                       double tol)
    : s_(s), a_(a), lambda_(lambda), H_(std::move(H)), M_(M), tol_(tol) {
    if (lambda_ <= 0.0) throw domain_violation("translated power sum: lambda must be positive");
    if (2.0 * s_.real() + M_ <= 1.0)
        throw domain_violation("translated power sum: M too small for Re s (need Re s > (1-M)/2)");
    if (!(H_.rho > 0.0)) throw domain_violation("translated power sum: empty Taylor radius");
    n_samples_ = 256;
    // cap the Cauchy circle: huge radii trade truncation error for roundoff
    rho_c_ = std::min(0.9 * H_.rho, 1.5);
    circle_.resize(n_samples_);
    for (int j = 0; j < n_samples_; ++j) {
        cplx zeta = rho_c_ * std::exp(cplx(0.0, 2.0 * PI * j / n_samples_));
        circle_[j] = H_.eval(zeta);
    }
    coeff_.resize(M_);
    for (int k = 0; k < M_; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < n_samples_; ++j) {
            cplx zeta = rho_c_ * std::exp(cplx(0.0, 2.0 * PI * j / n_samples_));
            acc += circle_[j] * std::exp(cplx(0.0, -2.0 * PI * j * k / n_samples_)) /
                   std::pow(rho_c_, k);
        }
        coeff_(k) = acc / (double)n_samples_;
    }
    rem_bound_ = 0.0;
    for (int j = 0; j < n_samples_; ++j) {
        cplx zeta = rho_c_ * std::exp(cplx(0.0, 2.0 * PI * j / n_samples_));
        cplx head = 0.0, zp = 1.0;
        for (int k = 0; k < M_; ++k) {
            head += coeff_(k) * zp;
            zp *= zeta;
        }
        rem_bound_ = std::max(rem_bound_, std::abs(circle_[j] - head));
    }
}

cplx TranslatedPowerSum::remainder_at(const cplx& omega) const {
    if (std::abs(omega) > 0.98 * rho_c_) {
        // direct difference; omega not tiny, no cancellation trouble
        cplx head = 0.0, zp = 1.0;
        for (int k = 0; k < M_; ++k) {
            head += coeff_(k) * zp;
            zp *= omega;
        }
        return H_.eval(omega) - head;
    }
    // Cauchy form of the Taylor remainder, stable for small omega
    cplx acc = 0.0;
    cplx ratio_pow;
    for (int j = 0; j < n_samples_; ++j) {
        cplx zeta = rho_c_ * std::exp(cplx(0.0, 2.0 * PI * j / n_samples_));
        cplx r = omega / zeta;
        ratio_pow = std::pow(r, M_);
        acc += circle_[j] * ratio_pow / (1.0 - r);
    }
    return acc / (double)n_samples_;
}

cplx TranslatedPowerSum::eval(const cplx& u) const {
    if (u.real() <= -lambda_ * (1.0 - 1e-9))
        throw domain_violation("translated power sum: target outside Re u > -lambda");
    cplx total = 0.0;
    cplx phase = std::exp(cplx(0.0, 2.0 * PI * a_));
    // terms whose omega leaves the Taylor circle are summed whole
    long n0 = 1;
    while (u.real() + (double)n0 * lambda_ < 1.0 / (0.9 * rho_c_)) ++n0;
    cplx zpow = 1.0;
    for (long n = 1; n < n0; ++n) {
        zpow *= phase;
        cplx v = u + (double)n * lambda_;
        total += zpow * std::exp(-s_ * std::log(v * v)) * H_.eval(1.0 / v);
    }
    // Taylor head through the continued Lerch zeta, from the shifted index
    cplx warg = (double)n0 + u / lambda_;
    cplx shift_phase = std::exp(cplx(0.0, 2.0 * PI * a_ * (double)n0));
    for (int k = 0; k < M_; ++k) {
        if (std::abs(coeff_(k)) == 0.0) continue;
        LerchParams lp{s_ * 2.0 + (double)k, a_, warg, BranchVariant::V1};
        cplx zeta_val = lerch_continued(lp);
        total += coeff_(k) * std::exp(-(2.0 * s_ + (double)k) * std::log(lambda_)) * shift_phase *
                 zeta_val;
    }
    // remainder, summed directly with a certified tail bound
    double beta = 2.0 * s_.real() + M_;
    double theta = std::abs(u.imag()) / std::max(u.real() + lambda_, 0.1 * lambda_);
    double envelope = std::exp(2.0 * std::abs(s_.imag()) * std::min(theta, PI / 2.0)) *
                      rem_bound_ / std::pow(rho_c_, M_);
    zpow = std::exp(cplx(0.0, 2.0 * PI * a_ * (double)(n0 - 1)));
    for (long n = n0;; ++n) {
        zpow *= phase;
        cplx v = u + (double)n * lambda_;
        cplx omega = 1.0 / v;
        cplx coc = std::exp(-s_ * std::log(v * v));
        total += zpow * coc * remainder_at(omega);
        double rn = u.real() + (double)n * lambda_;
        double tail = envelope * std::pow(rn, 1.0 - beta) / ((beta - 1.0) * lambda_);
        if (tail < tol_) break;
        if (n > 2000000L) throw no_convergence("translated power sum: remainder too slow");
    }
    return total;
}

ParabolicConjugation deduce_translation_structure(const GroupElement& p) {
    if (!p.is_parabolic()) throw domain_violation("parabolic element required (|trace| = 2)");
    ParabolicConjugation pc;
    GroupElement pinv = p.inverse();
    if (std::abs(pinv.c) < 1e-12) {
        // p^{-1} is a translation; normalized form has a = d = +-1
        double lam = pinv.b / pinv.a;
        if (lam <= 0.0)
            throw domain_violation("parabolic sum: translation direction must be positive");
        pc.translation_at_infinity = true;
        pc.lambda = lam;
        pc.h = GroupElement::identity();
        pc.h_inv = pc.h;
        pc.fixed_point = std::numeric_limits<double>::infinity();
        return pc;
    }
    double xp = (pinv.a - pinv.d) / (2.0 * pinv.c);
    for (double sign : {-1.0, 1.0}) {
        GroupElement h(xp, sign, 1.0, 0.0);
        GroupElement t = h.inverse() * pinv * h;
        if (std::abs(t.c) < 1e-9 && std::abs(t.a - t.d) < 1e-9) {
            double lam = t.b / t.a;
            if (lam > 0.0) {
                pc.translation_at_infinity = false;
                pc.lambda = lam;
                pc.h = h;
                pc.h_inv = h.inverse();
                pc.fixed_point = xp;
                pc.pullback_scale = cplx(sign / 1.0, 0.0); // h.(1/om) = xp + sign*om
                pc.pullback_shift = cplx(xp, 0.0);
                return pc;
            }
        }
    }
    throw domain_violation("parabolic sum: could not conjugate to a positive translation");
}

std::vector<Eigen::VectorXcd> parabolic_sum_apply(const GroupElement& p,
                                                  const Eigen::MatrixXcd& phase_matrix,
                                                  const cplx& s, const VectorFunction& f,
                                                  double f_radius_at_fixed_point, int M,
                                                  const std::vector<cplx>& targets, double tol) {
    ParabolicConjugation pc = deduce_translation_structure(p);
    if (M <= 0) M = default_taylor_degree(s);
    int d = (int)phase_matrix.rows();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(phase_matrix);
    if (es.info() != Eigen::Success)
        throw no_convergence("parabolic sum: phase matrix eigendecomposition failed");
    Eigen::MatrixXcd U = es.eigenvectors();
    Eigen::VectorXcd ev = es.eigenvalues();
    Eigen::MatrixXcd Uinv = U.inverse();

    std::vector<TranslatedPowerSum> channel_sums;
    channel_sums.reserve(d);
    for (int ch = 0; ch < d; ++ch) {
        double a = std::arg(ev(ch)) / (2.0 * PI);
        ScalarSeriesFn H;
        if (pc.translation_at_infinity) {
            throw domain_violation(
                "parabolic_sum_apply: cusp at infinity requires chart data (FunctionElement)");
        }
        cplx scale = pc.pullback_scale, shift = pc.pullback_shift;
        H.eval = [f, Uinv, ch, scale, shift](const cplx& om) -> cplx {
            return (Uinv * f(scale * om + shift))(ch);
        };
        H.rho = f_radius_at_fixed_point / std::abs(scale);
        channel_sums.emplace_back(s, a, pc.lambda, H, M, tol);
    }

    std::vector<Eigen::VectorXcd> out;
    out.reserve(targets.size());
    for (const cplx& x : targets) {
        cplx pref = cocycle(BranchVariant::V1, pc.h_inv, x, s);
        cplx u = pc.h_inv.apply(x);
        Eigen::VectorXcd channel_vals(d);
        for (int ch = 0; ch < d; ++ch) channel_vals(ch) = channel_sums[ch].eval(u);
        out.push_back(pref * (U * channel_vals));
    }
    return out;
}

} // namespace hecke
