#include <doctest.h>

#include <cmath>

#include "hecke/transfer.hpp"

using namespace hecke;

namespace {

OperatorSpec make_spec(const HeckeFamily& fam, Parity parity, cplx s, int N,
                       Speed speed = Speed::Fast) {
    OperatorSpec spec;
    spec.family = fam;
    spec.parity = parity;
    spec.s = s;
    spec.n_nodes = N;
    spec.speed = speed;
    spec.chi = Representation::trivial();
    return spec;
}

} // namespace

TEST_CASE("slow term log counts") {
    auto s3 = build_slow(make_spec(HeckeFamily::cofinite(3), Parity::Even, 2.0, 8));
    CHECK(s3.term_log.size() == 2); // g_{-1} and Q g_{-1}
    auto s5 = build_slow(make_spec(HeckeFamily::cofinite(5), Parity::Even, 2.0, 8));
    CHECK(s5.term_log.size() == 4);
    // even q = 6: the paper's formula gives 6 acting elements, the
    // g_{q/2} pair carrying weight 1/2
    auto s6 = build_slow(make_spec(HeckeFamily::cofinite(6), Parity::Even, 2.0, 8));
    CHECK(s6.term_log.size() == 6);
    int halves = 0;
    for (const auto& t : s6.term_log)
        if (t.weight == 0.5) ++halves;
    CHECK(halves == 2);
    auto th = build_slow(make_spec(HeckeFamily::theta(), Parity::Even, 2.0, 8));
    CHECK(th.term_log.size() == 3);
    auto nc = build_slow(make_spec(HeckeFamily::noncofinite(2.5), Parity::Even, 2.0, 8));
    CHECK(nc.term_log.size() == 3);
}

TEST_CASE("fast operator shape: exact zero blocks") {
    int N = 8;
    auto th = build_fast(make_spec(HeckeFamily::theta(), Parity::Even, cplx(1.5, 0.5), N));
    REQUIRE(th.n_disks() == 3);
    // blocks (Ea,Ea) and (Ec,Ec) are identically zero
    CHECK(th.blocks.block(0, 0, N, N).cwiseAbs().maxCoeff() == 0.0);
    CHECK(th.blocks.block(2 * N, 2 * N, N, N).cwiseAbs().maxCoeff() == 0.0);
    CHECK(th.blocks.block(N, 0, N, N).cwiseAbs().maxCoeff() > 0.0);
    auto nc = build_fast(make_spec(HeckeFamily::noncofinite(2.5), Parity::Even, cplx(1.5, 0.5), N));
    REQUIRE(nc.n_disks() == 2);
    CHECK(nc.blocks.block(N, N, N, N).cwiseAbs().maxCoeff() == 0.0);
    // q = 3 reduces to the single block +- alpha(Q) L_{-1}
    auto q3 = build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Even, cplx(2.0, 0.0), N));
    CHECK(q3.n_disks() == 1);
    CHECK(q3.term_log.size() == 1);
    CHECK(q3.term_log[0].infinite_sum);
}

TEST_CASE("fast vs brute truncation at Re s = 2") {
    for (auto fam : {HeckeFamily::cofinite(3), HeckeFamily::cofinite(5), HeckeFamily::cofinite(6),
                     HeckeFamily::theta(), HeckeFamily::noncofinite(2.5)}) {
        for (Parity p : {Parity::Even, Parity::Odd}) {
            auto spec = make_spec(fam, p, cplx(2.0, 0.0), 12);
            auto lerch_path = build_fast(spec);
            auto brute = build_fast_brute(spec, 4000);
            double diff = (lerch_path.blocks - brute.blocks).cwiseAbs().maxCoeff();
            CHECK(diff < 1e-9);
        }
    }
}

TEST_CASE("continuation consistency near the critical line") {
    // Re s in (0.5, 0.6]: Lerch path against tail-extrapolated truncation
    double sr = 0.55;
    auto spec = make_spec(HeckeFamily::cofinite(3), Parity::Odd, cplx(sr, 0.0), 10);
    auto lerch_path = build_fast(spec);
    long N1 = 12500;
    std::vector<OperatorMatrix> bs;
    for (int r = 0; r < 4; ++r) bs.push_back(build_fast_brute(spec, N1 << r));
    // entrywise tail model S_N = S + a N^{1-2s} + b N^{-2s} + c N^{-2s-1}
    double e1 = 1.0 - 2.0 * sr, e2 = -2.0 * sr;
    double worst = 0.0;
    Eigen::Matrix4d A;
    for (int r = 0; r < 4; ++r) {
        double Nr = (double)(N1 << r);
        A(r, 0) = 1.0;
        A(r, 1) = std::pow(Nr, e1);
        A(r, 2) = std::pow(Nr, e2);
        A(r, 3) = std::pow(Nr, e2 - 1.0);
    }
    Eigen::PartialPivLU<Eigen::Matrix4d> lu(A);
    int dim = (int)lerch_path.blocks.rows();
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            Eigen::Vector4d re, im;
            for (int r = 0; r < 4; ++r) {
                re(r) = bs[r].blocks(i, j).real();
                im(r) = bs[r].blocks(i, j).imag();
            }
            cplx extrap(lu.solve(re)(0), lu.solve(im)(0));
            worst = std::max(worst, std::abs(lerch_path.blocks(i, j) - extrap));
        }
    }
    CHECK(worst < 1e-7);
}

TEST_CASE("parity relation") {
    // q = 3: every term carries Q, so even + odd = 0
    auto even = build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Even, cplx(1.3, 1.0), 10));
    auto odd = build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Odd, cplx(1.3, 1.0), 10));
    CHECK((even.blocks + odd.blocks).cwiseAbs().maxCoeff() < 1e-14);
    // q = 5: even and odd differ exactly on the det-negative terms
    auto e5 = build_fast(make_spec(HeckeFamily::cofinite(5), Parity::Even, cplx(1.3, 1.0), 8));
    auto o5 = build_fast(make_spec(HeckeFamily::cofinite(5), Parity::Odd, cplx(1.3, 1.0), 8));
    for (size_t t = 0; t < e5.term_log.size(); ++t) {
        CHECK(e5.term_log[t].word == o5.term_log[t].word);
        bool has_Q = e5.term_log[t].word.find('Q') != std::string::npos;
        CHECK(e5.term_log[t].det_sign == (has_Q ? -1 : 1));
    }
    CHECK((e5.blocks - o5.blocks).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("analyticity in s away from the poles") {
    auto at = [&](cplx s) {
        return build_fast(make_spec(HeckeFamily::cofinite(5), Parity::Even, s, 8)).blocks;
    };
    cplx s0(1.3, 0.4);
    double h = 1e-2;
    auto D = [&](double step) {
        return ((at(s0 + cplx(step, 0)) - at(s0 - cplx(step, 0))) / (2.0 * step)).eval();
    };
    Eigen::MatrixXcd d1 = D(h), d2 = D(h / 2), d4 = D(h / 4);
    double r1 = (d1 - d2).cwiseAbs().maxCoeff();
    double r2 = (d2 - d4).cwiseAbs().maxCoeff();
    double ratio = r1 / r2;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.5);
}

TEST_CASE("slow iterate consistency with two-letter words") {
    // (L_slow)^2 through the discretization equals the direct 2-word sum
    for (auto fam : {HeckeFamily::cofinite(3), HeckeFamily::cofinite(5)}) {
        OperatorSpec spec = make_spec(fam, Parity::Even, cplx(1.8, 0.3), 24, Speed::Slow);
        auto op = build_slow(spec);
        int d = 1, N = spec.n_nodes;
        // analytic test function
        auto fz = [](const cplx& z) { return 0.3 + z + 0.5 * z * z; };
        BlockVector f;
        for (int a = 0; a < op.n_disks(); ++a) {
            FunctionElement fe;
            fe.domain = op.domains.disks[a];
            fe.values.resize(N, d);
            for (int i = 0; i < N; ++i) fe.values(i, 0) = fz(cplx(fe.domain.nodes[i], 0.0));
            f.push_back(fe);
        }
        BlockVector twice = hecke::apply(op, hecke::apply(op, f));
        // direct two-word assembly, evaluated pointwise
        OperatorStructure st = slow_structure(fam);
        double worst = 0.0;
        for (int a = 0; a < op.n_disks(); ++a) {
            for (double t : {0.3, 0.62}) {
                double x0 = op.domains.disks[a].lo +
                            t * (op.domains.disks[a].hi - op.domains.disks[a].lo);
                cplx x(x0, 0.0);
                cplx direct = 0.0;
                for (const auto& t1 : st.finite)
                    for (const auto& t2 : st.finite) {
                        GroupElement h12 = word_matrix(t1.h_word, fam.ell) *
                                           word_matrix(t2.h_word, fam.ell);
                        GroupElement mover = h12.inverse();
                        cplx coc = cocycle(BranchVariant::V1, mover, x, spec.s);
                        direct += t1.weight * t2.weight * coc * fz(mover.apply(x));
                    }
                // interpolate the discretized double application at x
                FunctionElement fe = twice[a];
                cplx via_matrix = fe.eval_raw(x)(0);
                worst = std::max(worst, std::abs(direct - via_matrix));
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("power iteration sees a real positive leading eigenvalue") {
    auto op = build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Even, cplx(0.7, 0.0), 16));
    Eigen::VectorXcd v0 = Eigen::VectorXcd::Ones(op.dim());
    auto rayleigh = power_iterate(op, v0, 60);
    cplx lead = rayleigh.back();
    CHECK(lead.real() > 0.0);
    CHECK(std::abs(lead.imag()) < 1e-9);
    // stabilized
    CHECK(std::abs(rayleigh[59] - rayleigh[58]) < 1e-10);
}

TEST_CASE("apply: zero in, zero out, and dimension checks") {
    auto op = build_slow(make_spec(HeckeFamily::cofinite(5), Parity::Even, cplx(2.0, 0.0), 8));
    BlockVector zero = blockvec_from_flat(op, Eigen::VectorXcd::Zero(op.dim()));
    BlockVector out = hecke::apply(op, zero);
    for (const auto& b : out) CHECK(b.values.cwiseAbs().maxCoeff() == 0.0);
    BlockVector wrong = zero;
    wrong.pop_back();
    CHECK_THROWS_AS(hecke::apply(op, wrong), config_error);
}

TEST_CASE("fast build refuses s at the pole set") {
    CHECK_THROWS_AS(
        build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Even, cplx(0.5, 0.0), 8)),
        pole_proximity);
    CHECK_THROWS_AS(
        build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Even, cplx(-0.5, 1e-8), 8)),
        pole_proximity);
}

TEST_CASE("operator json dump carries spec and term log") {
    auto op = build_fast(make_spec(HeckeFamily::cofinite(3), Parity::Odd, cplx(2.0, 0.0), 6));
    std::string js = op.to_json();
    CHECK(js.find("\"parity\":\"odd\"") != std::string::npos);
    CHECK(js.find("term_log") != std::string::npos);
    CHECK(js.find("blocks") != std::string::npos);
}
