#include <doctest.h>

#include <cmath>

#include "hecke/zeta.hpp"

using namespace hecke;

namespace {

OperatorMatrix fake_fast_op(const Eigen::MatrixXcd& blocks) {
    OperatorMatrix op;
    op.spec.speed = Speed::Fast;
    op.blocks = blocks;
    return op;
}

} // namespace

TEST_CASE("fredholm determinant basics") {
    CHECK(std::abs(fredholm_det(fake_fast_op(Eigen::MatrixXcd::Zero(6, 6))) - 1.0) < 1e-15);
    // rank one with eigenvalue lambda: det = 1 - lambda
    cplx lam(0.3, -0.8);
    Eigen::VectorXcd u = Eigen::VectorXcd::Random(5);
    Eigen::MatrixXcd rank1 = lam * (u * u.transpose()) / (u.transpose() * u)(0, 0);
    CHECK(std::abs(fredholm_det(fake_fast_op(rank1)) - (1.0 - lam)) < 1e-12);
    OperatorMatrix slow;
    slow.spec.speed = Speed::Slow;
    slow.blocks = Eigen::MatrixXcd::Zero(4, 4);
    CHECK_THROWS_AS(fredholm_det(slow), config_error);
}

TEST_CASE("determinant self convergence at s = 2") {
    OperatorSpec spec;
    spec.family = HeckeFamily::cofinite(3);
    spec.chi = Representation::trivial();
    spec.parity = Parity::Even;
    spec.s = cplx(2.0, 0.0);
    spec.n_nodes = 24;
    cplx d24 = fredholm_det(build_fast(spec));
    spec.n_nodes = 32;
    cplx d32 = fredholm_det(build_fast(spec));
    CHECK(std::abs(d24 - d32) < 1e-6);
    // geometric convergence of the increments
    spec.n_nodes = 12;
    cplx a = fredholm_det(build_fast(spec));
    spec.n_nodes = 16;
    cplx b = fredholm_det(build_fast(spec));
    spec.n_nodes = 20;
    cplx c = fredholm_det(build_fast(spec));
    spec.n_nodes = 24;
    cplx d = fredholm_det(build_fast(spec));
    double inc1 = std::abs(b - a), inc2 = std::abs(c - b), inc3 = std::abs(d - c);
    CHECK(inc2 < 0.5 * inc1);
    CHECK(inc3 < 0.5 * inc2);
}

TEST_CASE("schwarz symmetry for trivial chi") {
    OperatorSpec spec;
    spec.family = HeckeFamily::cofinite(5);
    spec.chi = Representation::trivial();
    spec.parity = Parity::Odd;
    spec.n_nodes = 16;
    spec.s = cplx(1.3, 2.2);
    cplx d1 = fredholm_det(build_fast(spec));
    spec.s = std::conj(spec.s);
    cplx d2 = fredholm_det(build_fast(spec));
    CHECK(std::abs(d1 - std::conj(d2)) < 1e-10 * (1.0 + std::abs(d1)));
    // real s: real determinant
    spec.s = cplx(1.7, 0.0);
    cplx dr = fredholm_det(build_fast(spec));
    CHECK(std::abs(dr.imag()) < 1e-10 * (1.0 + std::abs(dr)));
}

TEST_CASE("selberg zeta factorization") {
    SelbergZeta Z = selberg_zeta(HeckeFamily::cofinite(3), Representation::trivial(),
                                 cplx(2.5, 0.0), 16);
    CHECK(std::abs(Z.Z - Z.Zplus * Z.Zminus) < 1e-14 * std::abs(Z.Z));
    CHECK(std::abs(Z.Zplus.imag()) < 1e-10);
    CHECK(std::abs(Z.Zminus.imag()) < 1e-10);
}

TEST_CASE("euler product basics") {
    Representation triv = Representation::trivial();
    // empty class list: empty product
    std::vector<ConjClass> none;
    auto e0 = euler_product_from_classes(none, 1, cplx(3.0, 0.0), 10);
    CHECK(e0.value == cplx(1.0, 0.0));
    // single class with norm 9, k_max = 0: 1 - 9^{-2}
    ConjClass c;
    c.norm = 9.0;
    c.trace = 3.0 + 1.0 / 3.0;
    c.chi_factor = {{cplx(1.0, 0.0)}};
    c.word = {Gen::T, Gen::S};
    auto e1 = euler_product_from_classes({c}, 1, cplx(2.0, 0.0), 0);
    CHECK(std::abs(e1.value - (1.0 - std::pow(9.0, -2.0))) < 1e-15);
    CHECK_THROWS_AS(euler_product(HeckeFamily::cofinite(3), triv, cplx(0.9, 0.0), 8),
                    no_convergence);
}

TEST_CASE("euler product is cauchy in the word length") {
    Representation triv = Representation::trivial();
    HeckeFamily q3 = HeckeFamily::cofinite(3);
    cplx s(3.0, 0.0);
    cplx e10 = euler_product(q3, triv, s, 10).value;
    cplx e12 = euler_product(q3, triv, s, 12).value;
    cplx e14 = euler_product(q3, triv, s, 14).value;
    CHECK(std::abs(e12 - e10) < 1e-4);
    CHECK(std::abs(e14 - e12) < 5e-5);
    CHECK(std::abs(e14 - e12) < std::abs(e12 - e10));
}

TEST_CASE("euler product cross-checks the determinant at s = 3") {
    Representation triv = Representation::trivial();
    HeckeFamily q3 = HeckeFamily::cofinite(3);
    auto ep = euler_product(q3, triv, cplx(3.0, 0.0), 14);
    SelbergZeta Z = selberg_zeta(q3, triv, cplx(3.0, 0.0), 24);
    double diff = std::abs(ep.value - Z.Z);
    CHECK(diff < 1e-4);
    CHECK(diff <= ep.tail_bound);
}

TEST_CASE("zero scan finds nothing in a zero-free region") {
    auto res = zero_scan(HeckeFamily::cofinite(3), Representation::trivial(), Parity::Even, 2.5,
                         0.5, 1.5, 0.25, 10);
    for (const auto& s : res.samples) CHECK(std::abs(s.det) > 0.1);
    CHECK(res.zeros.empty());
}

TEST_CASE("zero scan locates and verifies the first odd zero of q = 3") {
    auto res = zero_scan(HeckeFamily::cofinite(3), Representation::trivial(), Parity::Odd, 0.5,
                         9.3, 9.8, 0.05, 16);
    REQUIRE(res.zeros.size() == 1);
    const ZeroRecord& z = res.zeros[0];
    CHECK(std::abs(z.s0 - cplx(0.5, 9.533695261)) < 5e-4);
    CHECK(z.winding >= 1);
    CHECK(z.eig_residual < 1e-6);
    CHECK(z.verified);
    CHECK(z.displacement_check < 1e-3); // N = 16 smoke resolution

    CHECK(std::abs(z.det_other_parity) > 1e-3); // not an even zero
}

TEST_CASE("refine_zero reproduces a zero at two resolutions") {
    auto r24 = refine_zero(HeckeFamily::cofinite(5), Representation::trivial(), Parity::Even,
                           cplx(1.0, 0.0), 20);
    auto r28 = refine_zero(HeckeFamily::cofinite(5), Representation::trivial(), Parity::Even,
                           cplx(1.0, 0.0), 28);
    REQUIRE(r24.has_value());
    REQUIRE(r28.has_value());
    CHECK(std::abs(r24->s0 - r28->s0) < 1e-6);
    CHECK(std::abs(r24->s0 - cplx(1.0, 0.0)) < 1e-8); // s = 1 zero of the even factor
}
