#include <doctest.h>

#include <cmath>

#include "hecke/isomorphism.hpp"

using namespace hecke;

namespace {

// a fast build together with its unit eigenvector at a located zero
struct ZeroSetup {
    OperatorMatrix op;
    Eigen::VectorXcd v;
    BlockVector f;
};

ZeroSetup at_zero(const HeckeFamily& fam, Parity parity, const cplx& s0, int N) {
    OperatorSpec spec;
    spec.family = fam;
    spec.chi = Representation::trivial();
    spec.parity = parity;
    spec.s = s0;
    spec.n_nodes = N;
    spec.eigenfunction_mode = true;
    ZeroSetup z{build_fast(spec), {}, {}};
    z.v = extract_eigenvector(z.op);
    z.f = blockvec_from_flat(z.op, z.v);
    return z;
}

const cplx kFirstOddZero(0.5, 9.533695261354);

} // namespace

TEST_CASE("zero maps to zero through both directions") {
    ZeroSetup z = at_zero(HeckeFamily::cofinite(5), Parity::Even, cplx(1.0, 0.0), 16);
    BlockVector zero;
    for (const auto& fe : z.f) {
        FunctionElement g = fe;
        g.values.setZero();
        zero.push_back(g);
    }
    SlowFunction phi0 = fast_to_slow(z.op, zero);
    for (double x : {0.2, 0.7, 0.95})
        CHECK(phi0.eval(cplx(x, 0.0)).cwiseAbs().maxCoeff() == 0.0);
    BlockVector back = slow_to_fast(z.op, phi0);
    for (const auto& fe : back) CHECK(fe.values.cwiseAbs().maxCoeff() < 1e-30);
}

TEST_CASE("round trips at located zeros") {
    // one zero per family class: q=3 on the critical line, q=5/theta at s=1,
    // non-cofinite at its real resonance
    struct Case {
        HeckeFamily fam;
        Parity parity;
        cplx s0;
    };
    std::vector<Case> cases{{HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero},
                            {HeckeFamily::cofinite(5), Parity::Even, cplx(1.0, 0.0)},
                            {HeckeFamily::theta(), Parity::Even, cplx(1.0, 0.0)},
                            {HeckeFamily::noncofinite(2.5), Parity::Even,
                             cplx(0.816941637886, 0.0)}};
    for (const auto& c : cases) {
        ZeroSetup z = at_zero(c.fam, c.parity, c.s0, 24);
        CHECK(fast_residual(z.op, z.v) < 1e-7);
        SlowFunction phi = fast_to_slow(z.op, z.f);
        BlockVector f_back = slow_to_fast(z.op, phi);
        CHECK(blockvec_residual(z.f, f_back) < 1e-8);
        CHECK(slow_fe_residual(z.op, phi) < 1e-6);
    }
}

TEST_CASE("q = 3 reduction: phi = (1 + L) f on the single component") {
    ZeroSetup z = at_zero(HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero, 24);
    SlowFunction phi = fast_to_slow(z.op, z.f);
    DistinguishedParabolic dp = distinguished_parabolic(z.op.spec.family, z.op.domains);
    ParabolicBlock block(dp.sum_spec, z.op.spec.family, z.op.spec.chi, z.op.spec.s,
                         z.op.domains.disks[0]);
    for (double x : {0.2, 0.55, 0.9}) {
        Eigen::VectorXcd direct =
            z.f[0].eval_raw(cplx(x, 0.0)) + block.apply_to(z.f[0], cplx(x, 0.0));
        CHECK((phi.eval(cplx(x, 0.0)) - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("crucial identities at a zero") {
    ZeroSetup z = at_zero(HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero, 24);
    SlowFunction phi = fast_to_slow(z.op, z.f);
    CrucialReport rep = check_crucial_identities(z.op, z.f, phi);
    CHECK(rep.shift_residual < 1e-10);
    CHECK(rep.identity1_residual < 1e-7);
    CHECK(rep.identity2_residual < 1e-7);
}

TEST_CASE("shift identity on arbitrary smooth data") {
    OperatorSpec spec;
    spec.family = HeckeFamily::cofinite(5);
    spec.chi = Representation::trivial();
    spec.parity = Parity::Even;
    spec.s = cplx(2.0, 0.0);
    spec.n_nodes = 20;
    auto op = build_fast(spec);
    int dm1 = 1;
    FunctionElement f;
    f.domain = op.domains.disks[dm1];
    f.values.resize(f.domain.n_nodes, 1);
    for (int i = 0; i < f.domain.n_nodes; ++i) {
        double x = f.domain.nodes[i];
        f.values(i, 0) = 0.3 + x - 0.2 * x * x + 0.05 * x * x * x;
    }
    CHECK(shift_identity_residual(op, f) < 1e-10);
}

TEST_CASE("q0 diagnostic at a zero and for zero data") {
    ZeroSetup z = at_zero(HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero, 24);
    SlowFunction phi = fast_to_slow(z.op, z.f);
    Q0Report q0 = q0_diagnostic(z.op, phi);
    CHECK(q0.sup_q0 < 1e-6);
    CHECK(q0.invariance_residual < 1e-8);
    CHECK(q0.c_fit_abs < 1e-4); // lem Q0 (iv): c = 0 on the critical line
    // zero eigenfunction: Q0 identically zero
    BlockVector zerof;
    for (const auto& fe : z.f) {
        FunctionElement g = fe;
        g.values.setZero();
        zerof.push_back(g);
    }
    SlowFunction phi0 = fast_to_slow(z.op, zerof);
    Q0Report q00 = q0_diagnostic(z.op, phi0);
    CHECK(q00.sup_q0 == 0.0);
}

TEST_CASE("growth class fit extracts a nonzero c at s = 1 and a clean one at a cusp zero") {
    ZeroSetup z5 = at_zero(HeckeFamily::cofinite(5), Parity::Even, cplx(1.0, 0.0), 24);
    SlowFunction phi5 = fast_to_slow(z5.op, z5.f);
    GrowthReport g5 = growth_class_fit(z5.op, phi5);
    CHECK(g5.fit.fit_residual < 1e-4);
    ZeroSetup z3 = at_zero(HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero, 24);
    SlowFunction phi3 = fast_to_slow(z3.op, z3.f);
    GrowthReport g3 = growth_class_fit(z3.op, phi3);
    CHECK(g3.fit.fit_residual < 1e-4);
}

TEST_CASE("growth fit flags vanishing non-fixed channels for a two-dimensional twist") {
    // trivial (+) sign character: chi(g_{-1}) = diag(1, -1); the second
    // channel is non-fixed, so pr_r(c) must vanish at a zero of the trivial
    // block
    Representation chi2 = Representation::direct_sum(
        Representation::trivial(), Representation::character(-1.0, -1.0, 1.0, "sgn"));
    OperatorSpec spec;
    spec.family = HeckeFamily::cofinite(5);
    spec.chi = chi2;
    spec.parity = Parity::Even;
    spec.s = cplx(1.0, 0.0);
    spec.n_nodes = 20;
    spec.eigenfunction_mode = true;
    auto op = build_fast(spec);
    Eigen::VectorXcd v = extract_eigenvector(op);
    CHECK(fast_residual(op, v) < 1e-7);
    BlockVector f = blockvec_from_flat(op, v);
    SlowFunction phi = fast_to_slow(op, f);
    GrowthReport g = growth_class_fit(op, phi);
    REQUIRE(g.fit.nonfixed_channels.size() == 1);
    CHECK(g.nonfixed_max < 1e-4);
}

TEST_CASE("decay membership") {
    // the first odd zero of q = 3 is a Maass cusp form parameter: decay holds
    ZeroSetup z = at_zero(HeckeFamily::cofinite(3), Parity::Odd, kFirstOddZero, 24);
    SlowFunction phi = fast_to_slow(z.op, z.f);
    DecayReport dec = decay_membership(z.op, z.f, phi);
    CHECK(dec.applicable);
    CHECK(dec.flag);
    // a deliberately mismatched pair: double the function on one side
    BlockVector doubled = z.f;
    doubled[0].values *= 2.0;
    SlowFunction phi2 = fast_to_slow(z.op, doubled);
    DecayReport bad = decay_membership(z.op, z.f, phi2);
    CHECK(!bad.flag);
    // non-cofinite: no decay class
    ZeroSetup znc =
        at_zero(HeckeFamily::noncofinite(2.5), Parity::Even, cplx(0.816941637886, 0.0), 16);
    SlowFunction phinc = fast_to_slow(znc.op, znc.f);
    DecayReport nc = decay_membership(znc.op, znc.f, phinc);
    CHECK(!nc.applicable);
}

TEST_CASE("contraction verifier for q = 5") {
    ContractionReport rep = contraction_verify(HeckeFamily::cofinite(5), 1, 8);
    REQUIRE(rep.class_minus1.size() == 8);
    // failures drop to zero by n0 <= 6 and stay zero
    CHECK(rep.n0_minus1 >= 1);
    CHECK(rep.n0_minus1 <= 6);
    CHECK(rep.n0_zero >= 1);
    CHECK(rep.n0_zero <= 6);
    long total_m1 = 0;
    for (const auto& st : rep.class_minus1) total_m1 += st.words;
    CHECK(total_m1 > 1000);
    for (const auto& st : rep.class_minus1)
        if (st.length >= rep.n0_minus1) CHECK(st.failures == 0);
    // monotone decrease of failures
    for (size_t i = 1; i < rep.class_minus1.size(); ++i) {
        double r0 = rep.class_minus1[i - 1].words
                        ? (double)rep.class_minus1[i - 1].failures /
                              rep.class_minus1[i - 1].words
                        : 0.0;
        double r1 = rep.class_minus1[i].words
                        ? (double)rep.class_minus1[i].failures / rep.class_minus1[i].words
                        : 0.0;
        CHECK(r1 <= r0 + 1e-12);
    }
    CHECK(rep.halfplane_ok);
    CHECK(rep.halfplane_words > 100);
}

TEST_CASE("isomorphism checks refuse s near one half") {
    CHECK_THROWS_AS(iso_check_at(HeckeFamily::cofinite(3), Representation::trivial(),
                                 Parity::Even, cplx(0.5005, 0.0), 8),
                    domain_violation);
}
