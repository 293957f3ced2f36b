#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hecke/group.hpp"
#include "hecke/representation.hpp"

using namespace hecke;

TEST_CASE("sigma special values") {
    CHECK(sigma(0, 7) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sigma(1, 7) == doctest::Approx(1.0).epsilon(1e-15));
    // sigma(2,5) = 2 cos(pi/5), the golden ratio
    CHECK(sigma(2, 5) == doctest::Approx(1.6180339887498949).epsilon(1e-13));
    CHECK(sigma(2, 5) == doctest::Approx(HeckeFamily::cofinite(5).ell).epsilon(1e-14));
}

TEST_CASE("sigma three-term recurrence and reduction") {
    for (int q : {3, 5, 6, 7, 12}) {
        double ell = 2.0 * std::cos(PI / q);
        for (long m = 1; m <= q; ++m)
            CHECK(std::abs(sigma(m + 1, q) - ell * sigma(m, q) + sigma(m - 1, q)) < 1e-12);
        // reduction mod 2q is exact
        CHECK(std::abs(sigma(5 + 2L * q * 1000001L, q) - sigma(5, q)) < 1e-12);
        CHECK(std::abs(sigma(-3, q) + sigma(3, q)) < 1e-15);
    }
}

TEST_CASE("generators") {
    GroupElement T3 = gen_T(HeckeFamily::cofinite(3).ell);
    CHECK(T3.approx_equal(GroupElement(1, 1, 0, 1)));
    CHECK(gen_S().apply(cplx(1, 0)) == cplx(-1, 0));
    CHECK(gen_Q().apply(cplx(2, 0)) == cplx(0.5, 0));
    CHECK(gen_Q().det_sign == -1);
    CHECK(gen_J().det_sign == -1);
    CHECK(gen_S().det_sign == 1);
    // J = QS
    CHECK(gen_J().approx_equal(gen_Q() * gen_S()));
    // Q and J are involutions
    CHECK((gen_Q() * gen_Q()).is_identity());
    CHECK((gen_J() * gen_J()).is_identity());
}

TEST_CASE("mobius conventions at infinity and poles") {
    GroupElement T = gen_T(1.0);
    CHECK(is_point_at_infinity(T.apply(point_at_infinity())));
    CHECK(is_point_at_infinity(gen_S().apply(cplx(0, 0))));
    GroupElement L(1, 0, 1, 1);
    CHECK(L.apply(cplx(1, 0)) == cplx(0.5, 0));
}

TEST_CASE("group relation (TS)^q projectively trivial") {
    for (int q : {3, 5, 6, 7, 10}) {
        HeckeFamily fam = HeckeFamily::cofinite(q);
        GroupElement U = gen_T(fam.ell) * gen_S();
        GroupElement p = U.pow(q);
        CHECK(p.approx_equal(GroupElement::identity(), 1e-10));
    }
}

TEST_CASE("g_element matches the sigma-entry matrix") {
    // g_{3,-1}^{-1} = (-1,0/-1,-1), i.e. (1,0/1,1) modulo scalars
    CHECK(g_element(3, -1).inverse().approx_equal(GroupElement(1, 0, 1, 1), 1e-12));
    for (int q : {3, 5, 6, 7}) {
        CHECK(g_element(q, 0).inverse().approx_equal(gen_S(), 1e-12));
        for (long k = -q; k <= q; ++k) {
            if (k % q == 0 && k != 0) continue; // sigma matrix degenerates there
            CHECK(g_element(q, k).inverse().approx_equal(g_inverse_sigma(q, k), 1e-12));
        }
    }
    // even q: g_{q,q/2} = g_{q,-q/2}
    for (int q : {4, 6, 8}) CHECK(g_element(q, q / 2).approx_equal(g_element(q, -q / 2), 1e-12));
}

TEST_CASE("conjugated h matrices, including the integer degeneration") {
    GroupElement m00 = conjugated_h(0, std::nullopt, 2, 0);
    CHECK(m00.approx_equal(GroupElement(2, 3, 1, 2), 1e-14));
    GroupElement m11 = conjugated_h(1, std::nullopt, 2, 1);
    CHECK(m11.approx_equal(GroupElement(2, 1, 3, 2), 1e-14));
    GroupElement m5 = conjugated_h(0, 5, 1, 0);
    CHECK(m5.approx_equal(GroupElement(1.0, sigma(2, 5), 0.0, 1.0), 1e-12));
    // identity against explicit products Q^{r1} g_{q,k}^{-1} Q^{r2}
    for (int q : {3, 5, 7}) {
        for (long k : {-3L, -1L, 1L, 2L}) {
            for (int r1 : {0, 1})
                for (int r2 : {0, 1}) {
                    GroupElement lhs = conjugated_h(r1, q, k, r2);
                    GroupElement rhs = (r1 ? gen_Q() : GroupElement::identity()) *
                                       g_inverse_sigma(q, k) *
                                       (r2 ? gen_Q() : GroupElement::identity());
                    CHECK(lhs.approx_equal(rhs, 1e-12));
                }
        }
    }
}

TEST_CASE("mobius action is a homomorphism on random words") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ud(0.1, 2.0);
    double ell = HeckeFamily::cofinite(5).ell;
    std::vector<GroupElement> gens{gen_S(), gen_T(ell), gen_T(ell).inverse(), gen_Q()};
    for (int trial = 0; trial < 100; ++trial) {
        GroupElement g = GroupElement::identity(), h = GroupElement::identity();
        for (int i = 0; i < 4; ++i) g = g * gens[rng() % 4];
        for (int i = 0; i < 4; ++i) h = h * gens[rng() % 4];
        cplx z(ud(rng), ud(rng));
        cplx lhs = g.apply(h.apply(z));
        cplx rhs = (g * h).apply(z);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("class enumeration basics") {
    HeckeFamily fam = HeckeFamily::cofinite(3);
    Representation triv = Representation::trivial();
    CHECK(enumerate_primitive_classes(fam, triv, 1).empty());
    auto classes4 = enumerate_primitive_classes(fam, triv, 4);
    REQUIRE(classes4.size() == 1);
    // the trace-3 class containing (2,1/1,1): N = ((3+sqrt 5)/2)^2
    CHECK(std::abs(classes4[0].trace) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(classes4[0].norm == doctest::Approx(6.854101966249685).epsilon(1e-12));
    CHECK(classes4[0].word.size() == 4);
    auto classes = enumerate_primitive_classes(fam, triv, 10);
    for (const auto& c : classes) {
        CHECK(c.primitive);
        CHECK(c.norm > 1.0);
        CHECK(std::abs(c.trace) > 2.0);
        GroupElement m = word_matrix(c.word, fam.ell);
        CHECK(m.approx_equal(c.rep, 1e-9));
    }
    for (size_t i = 1; i < classes.size(); ++i)
        CHECK(classes[i - 1].word.size() <= classes[i].word.size());
    CHECK_THROWS_AS(enumerate_primitive_classes(fam, triv, 30), config_error);
}

TEST_CASE("class enumeration respects cyclic rotation") {
    HeckeFamily fam = HeckeFamily::cofinite(5);
    Representation triv = Representation::trivial();
    auto classes = enumerate_primitive_classes(fam, triv, 8);
    CHECK(classes.size() > 2);
    for (size_t i = 0; i < classes.size(); ++i)
        for (size_t j = i + 1; j < classes.size(); ++j) {
            if (classes[i].word.size() != classes[j].word.size()) continue;
            bool same_rotation = false;
            auto w = classes[i].word;
            for (size_t r = 0; r < w.size(); ++r) {
                std::rotate(w.begin(), w.begin() + 1, w.end());
                if (w == classes[j].word) same_rotation = true;
            }
            CHECK(!same_rotation);
        }
}

TEST_CASE("non-cofinite and theta enumeration") {
    Representation triv = Representation::trivial();
    auto th = enumerate_primitive_classes(HeckeFamily::theta(), triv, 6);
    for (const auto& c : th) CHECK(std::abs(c.trace) > 2.0);
    CHECK(!th.empty());
    auto nc = enumerate_primitive_classes(HeckeFamily::noncofinite(2.5), triv, 6);
    CHECK(!nc.empty());
    // smallest class of ell = 2.5: T S with |trace| = ell
    CHECK(std::abs(nc[0].trace) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("family parsing and Fuchsian condition") {
    CHECK(HeckeFamily::parse("q:5").q == 5);
    CHECK(HeckeFamily::parse("theta").kind == FamilyKind::Theta);
    CHECK(HeckeFamily::parse("ell:2.5").ell == doctest::Approx(2.5));
    CHECK(HeckeFamily::parse("ell:2").kind == FamilyKind::Theta);
    CHECK_THROWS_AS(HeckeFamily::parse("ell:1.5"), config_error);
    CHECK_THROWS_AS(HeckeFamily::parse("q:2"), config_error);
    CHECK(HeckeFamily::cofinite(6).m == 2);
    CHECK(HeckeFamily::cofinite(7).m == 3);
}
