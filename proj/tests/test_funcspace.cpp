#include <doctest.h>

#include <cmath>

#include "hecke/funcspace.hpp"

using namespace hecke;

namespace {

DiskDomain plain_disk(double lo, double hi, double c, double r, int n) {
    DiskDomain d;
    d.id = "test";
    d.lo = lo;
    d.hi = hi;
    d.center = c;
    d.radius = r;
    d.build_nodes(n);
    return d;
}

} // namespace

TEST_CASE("interpolation reproduces polynomials and nodes") {
    DiskDomain d = plain_disk(0.0, 1.0, 0.6, 0.8, 8);
    std::vector<Eigen::VectorXcd> vals;
    for (double x : d.nodes) {
        Eigen::VectorXcd v(1);
        v(0) = cplx(x * x, 0.0);
        vals.push_back(v);
    }
    FunctionElement f = interpolate(d, vals);
    for (cplx z : {cplx(0.32, 0.0), cplx(0.8, 0.4), cplx(0.1, -0.6)})
        CHECK(std::abs(f.eval_raw(z)(0) - z * z) < 1e-13);
    // node reproduction is exact
    for (int j = 0; j < d.n_nodes; ++j)
        CHECK(f.eval_raw(cplx(d.nodes[j], 0.0))(0) == f.values(j, 0));
    // outside the closed disk: error
    CHECK_THROWS_AS(f.eval_raw(cplx(3.0, 0.0)), domain_violation);
}

TEST_CASE("rational function on the q=5 lower disk") {
    DomainFamily fam = make_domain_family(HeckeFamily::cofinite(5), 0.9, 32);
    const DiskDomain& d = fam.disks[fam.disk_index("Dm1")];
    std::vector<Eigen::VectorXcd> vals;
    for (double x : d.nodes) {
        Eigen::VectorXcd v(1);
        v(0) = 1.0 / (cplx(x, 0.0) + 2.0);
        vals.push_back(v);
    }
    FunctionElement f = interpolate(d, vals);
    cplx c(d.center, 0.0);
    CHECK(std::abs(f.eval_raw(c)(0) - 1.0 / (c + 2.0)) < 1e-10);
}

TEST_CASE("geometric interpolation error decay for e^z") {
    for (auto fam_kind : {HeckeFamily::cofinite(3), HeckeFamily::cofinite(5)}) {
        DomainFamily f12 = make_domain_family(fam_kind, 0.9, 12);
        DomainFamily f24 = make_domain_family(fam_kind, 0.9, 24);
        for (size_t di = 0; di < f12.disks.size(); ++di) {
            auto err = [&](const DiskDomain& d) {
                std::vector<Eigen::VectorXcd> vals;
                for (double x : d.nodes) {
                    Eigen::VectorXcd v(1);
                    v(0) = std::exp(cplx(x, 0.0));
                    vals.push_back(v);
                }
                FunctionElement f = interpolate(d, vals);
                double worst = 0.0;
                for (int k = 0; k <= 50; ++k) {
                    cplx z(d.lo + (d.hi - d.lo) * k / 50.0, 0.0);
                    worst = std::max(worst, std::abs(f.eval_raw(z)(0) - std::exp(z)));
                }
                return worst;
            };
            double e12 = err(f12.disks[di]);
            double e24 = err(f24.disks[di]);
            // geometric decay, down to the rounding floor
            CHECK(e24 < std::max(1e-4 * e12, 5e-15));
        }
    }
}

TEST_CASE("chart round trip on unbounded domains") {
    for (auto fam : {HeckeFamily::theta(), HeckeFamily::noncofinite(2.5)}) {
        DomainFamily df = make_domain_family(fam, 0.9, 16);
        const DiskDomain& d = df.disks.back();
        REQUIRE(d.chart);
        for (int k = 1; k <= 100; ++k) {
            cplx z(d.chart_pole + 1.0 + 0.37 * k, 0.02 * k);
            cplx back = d.z_of_working(d.working_of_z(z));
            CHECK(std::abs(back - z) < 1e-13 * (1.0 + std::abs(z)));
        }
    }
}

TEST_CASE("certify_inclusion") {
    DomainFamily df = make_domain_family(HeckeFamily::cofinite(5), 0.9, 8);
    const DiskDomain& dm1 = df.disks[df.disk_index("Dm1")];
    // identity on the same disk: sampled a hair inside, margin positive
    InclusionCheck idc = certify_inclusion(GroupElement::identity(), dm1, dm1);
    CHECK(idc.ok);
    CHECK(idc.margin > 0.0);
    // g_{5,-1}^{-1} carries the upper component into the D_{-1} disk (the
    // inclusion the fast operator actually uses); on D_{-1} itself the
    // parabolic fixed point 0 is interior, so only the real interval and the
    // right-half-plane intersections contract, not the full disk
    const DiskDomain& d0 = df.disks[df.disk_index("D0")];
    InclusionCheck gm = certify_inclusion(g_element(5, -1), d0, dm1);
    CHECK(gm.ok);
    CHECK(gm.margin > 0.01);
    GroupElement mover = g_element(5, -1).inverse();
    for (double t : {0.0, 0.2, 0.4, 0.6, 0.9, 1.0}) {
        cplx img = mover.apply(cplx(dm1.dyn_lo + t * (dm1.dyn_hi - dm1.dyn_lo), 0.0));
        CHECK(img.real() >= dm1.dyn_lo - 1e-12);
        CHECK(img.real() <= dm1.dyn_hi + 1e-12);
    }
    // T does not contract a disk into itself
    InclusionCheck bad = certify_inclusion(gen_T(HeckeFamily::cofinite(5).ell), dm1, dm1);
    CHECK(!bad.ok);
}

TEST_CASE("domain families are certified with the expected component count") {
    CHECK(make_domain_family(HeckeFamily::cofinite(3)).disks.size() == 1);
    CHECK(make_domain_family(HeckeFamily::cofinite(5)).disks.size() == 2);
    CHECK(make_domain_family(HeckeFamily::cofinite(6)).disks.size() == 2);
    CHECK(make_domain_family(HeckeFamily::cofinite(7)).disks.size() == 2);
    CHECK(make_domain_family(HeckeFamily::theta()).disks.size() == 3);
    CHECK(make_domain_family(HeckeFamily::noncofinite(2.5)).disks.size() == 2);
    for (auto fam : {HeckeFamily::cofinite(3), HeckeFamily::cofinite(6), HeckeFamily::theta(),
                     HeckeFamily::noncofinite(2.5)}) {
        DomainFamily df = make_domain_family(fam);
        CHECK(df.inclusion_certified);
        for (const auto& d : df.disks) {
            // closure of the base interval inside the open disk
            CHECK(std::abs(d.lo - d.center) < d.radius);
            CHECK(std::abs(d.hi - d.center) < d.radius);
        }
    }
    // even q: the D0 disk holds 1 in its interior with room to spare
    DomainFamily even = make_domain_family(HeckeFamily::cofinite(6));
    const DiskDomain& d0 = even.disks[even.disk_index("D0")];
    CHECK(d0.center + d0.radius > 1.0 + 1e-3);
}

TEST_CASE("function element json round trip") {
    DomainFamily df = make_domain_family(HeckeFamily::noncofinite(2.5), 0.9, 10);
    const DiskDomain& d = df.disks[1];
    std::vector<Eigen::VectorXcd> vals;
    for (double w : d.nodes) {
        Eigen::VectorXcd v(2);
        v(0) = cplx(w, 1.0 - w);
        v(1) = cplx(-w, 0.25);
        vals.push_back(v);
    }
    FunctionElement f = interpolate(d, vals);
    FunctionElement g = FunctionElement::from_json(f.to_json());
    CHECK(g.domain.id == d.id);
    CHECK(g.domain.weighted);
    CHECK((g.values - f.values).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(g.eval_raw(cplx(0.4, 0.1))(1) - f.eval_raw(cplx(0.4, 0.1))(1)) < 1e-13);
}

TEST_CASE("cardinal taylor matrix differentiates the interpolant") {
    DiskDomain d = plain_disk(0.0, 1.0, 0.5, 1.0, 16);
    Eigen::MatrixXcd L = cardinal_taylor_matrix(d, cplx(0.2, 0.0), 0.3, 4);
    // coefficients of f(z) = (z - 0.2)^3 + 2 around 0.2: c0 = 2, c3 = 1
    Eigen::VectorXcd fv(d.n_nodes);
    for (int j = 0; j < d.n_nodes; ++j) {
        double t = d.nodes[j] - 0.2;
        fv(j) = cplx(t * t * t + 2.0, 0.0);
    }
    Eigen::VectorXcd coeff = L * fv;
    CHECK(std::abs(coeff(0) - 2.0) < 1e-10);
    CHECK(std::abs(coeff(1)) < 1e-10);
    CHECK(std::abs(coeff(2)) < 1e-10);
    CHECK(std::abs(coeff(3) - 1.0) < 1e-10);
}

TEST_CASE("weighted evaluation applies the chart weight") {
    DomainFamily df = make_domain_family(HeckeFamily::theta(), 0.9, 12);
    const DiskDomain& ec = df.disks[df.disk_index("Ec")];
    std::vector<Eigen::VectorXcd> vals;
    for (double w : ec.nodes) {
        Eigen::VectorXcd v(1);
        v(0) = cplx(1.0 + w, 0.0); // stored F(w) = 1 + w
        vals.push_back(v);
    }
    FunctionElement f = interpolate(ec, vals);
    cplx s(1.25, 0.5);
    cplx x(4.0, 0.0); // w = 1/4
    cplx expect = std::exp(-s * std::log(x * x)) * (1.0 + 1.0 / x);
    CHECK(std::abs(f.eval_physical(x, s) (0) - expect) < 1e-12);
}
