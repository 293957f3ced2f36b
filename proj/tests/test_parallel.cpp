#include <doctest.h>

#include <cmath>

#include "hecke/isomorphism.hpp"
#include "hecke/transfer.hpp"
#include "hecke/zeta.hpp"

using namespace hecke;

// the OpenMP kernels against their serial reference paths

TEST_CASE("fast assembly: parallel equals serial") {
    for (auto fam : {HeckeFamily::cofinite(5), HeckeFamily::theta()}) {
        OperatorSpec spec;
        spec.family = fam;
        spec.chi = Representation::trivial();
        spec.parity = Parity::Odd;
        spec.s = cplx(1.4, 3.0);
        spec.n_nodes = 14;
        auto par = build_fast(spec, Exec::Parallel);
        auto ser = build_fast(spec, Exec::Serial);
        CHECK((par.blocks - ser.blocks).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("slow assembly: parallel equals serial") {
    OperatorSpec spec;
    spec.family = HeckeFamily::cofinite(6);
    spec.chi = Representation::trivial();
    spec.parity = Parity::Even;
    spec.s = cplx(2.0, 0.0);
    spec.n_nodes = 12;
    auto par = build_slow(spec, Exec::Parallel);
    auto ser = build_slow(spec, Exec::Serial);
    CHECK((par.blocks - ser.blocks).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scan: parallel equals serial") {
    auto par = zero_scan(HeckeFamily::cofinite(3), Representation::trivial(), Parity::Even, 2.0,
                         0.0, 1.0, 0.2, 8, Exec::Parallel);
    auto ser = zero_scan(HeckeFamily::cofinite(3), Representation::trivial(), Parity::Even, 2.0,
                         0.0, 1.0, 0.2, 8, Exec::Serial);
    REQUIRE(par.samples.size() == ser.samples.size());
    for (size_t i = 0; i < par.samples.size(); ++i) {
        CHECK(par.samples[i].s == ser.samples[i].s);
        CHECK(par.samples[i].det == ser.samples[i].det);
    }
}

TEST_CASE("repeated builds are bit-identical") {
    OperatorSpec spec;
    spec.family = HeckeFamily::noncofinite(2.5);
    spec.chi = Representation::trivial();
    spec.parity = Parity::Even;
    spec.s = cplx(1.1, 0.7);
    spec.n_nodes = 12;
    auto a = build_fast(spec, Exec::Parallel);
    auto b = build_fast(spec, Exec::Parallel);
    CHECK((a.blocks - b.blocks).cwiseAbs().maxCoeff() == 0.0);
}
