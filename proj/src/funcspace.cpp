#include "hecke/funcspace.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "hecke/lerch.hpp"
#include "hecke/structure.hpp"

namespace hecke {

using nlohmann::json;

void DiskDomain::build_nodes(int n) {
    if (n < 4) throw config_error("need at least 4 nodes per disk");
    n_nodes = n;
    nodes.resize(n);
    bary_w.resize(n);
    double mid = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
    for (int j = 0; j < n; ++j) {
        nodes[j] = mid + hw * std::cos(PI * j / (n - 1));
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w *= 0.5;
        bary_w[j] = w;
    }
}

cplx DiskDomain::working_of_z(const cplx& z) const {
    if (!chart) return z;
    if (is_point_at_infinity(z)) return {0.0, 0.0};
    cplx den = z - chart_pole;
    if (den == cplx(0.0, 0.0)) return point_at_infinity();
    return 1.0 / den;
}

cplx DiskDomain::z_of_working(const cplx& w) const {
    if (!chart) return w;
    if (w == cplx(0.0, 0.0)) return point_at_infinity();
    return 1.0 / w + chart_pole;
}

std::string DiskDomain::physical_interval() const {
    std::ostringstream os;
    if (!chart) {
        os << "(" << dyn_lo << "," << dyn_hi << ")";
    } else {
        os << "(" << (1.0 / dyn_hi + chart_pole) << ",inf)";
    }
    return os.str();
}

Eigen::RowVectorXcd bary_kernel(const DiskDomain& dom, const cplx& w) {
    int n = dom.n_nodes;
    Eigen::RowVectorXcd k = Eigen::RowVectorXcd::Zero(n);
    for (int j = 0; j < n; ++j) {
        if (w == cplx(dom.nodes[j], 0.0)) {
            k(j) = 1.0;
            return k;
        }
    }
    cplx denom = 0.0;
    for (int j = 0; j < n; ++j) {
        cplx t = dom.bary_w[j] / (w - dom.nodes[j]);
        k(j) = t;
        denom += t;
    }
    return k / denom;
}

Eigen::VectorXcd FunctionElement::eval_raw(const cplx& w) const {
    if (!domain.contains_working(w, 1e-12 * domain.radius))
        throw domain_violation("FunctionElement eval outside the closed disk " + domain.id);
    return (bary_kernel(domain, w) * values).transpose();
}

Eigen::VectorXcd FunctionElement::eval_physical(const cplx& z, const cplx& s) const {
    cplx w = domain.working_of_z(z);
    Eigen::VectorXcd raw = eval_raw(w);
    if (!domain.weighted) return raw;
    cplx zz = z - domain.chart_pole;
    return std::exp(-s * std::log(zz * zz)) * raw;
}

FunctionElement interpolate(const DiskDomain& dom,
                            const std::vector<Eigen::VectorXcd>& point_values) {
    if ((int)point_values.size() != dom.n_nodes)
        throw config_error("interpolate: need one value vector per node");
    FunctionElement f;
    f.domain = dom;
    int d = (int)point_values[0].size();
    f.values.resize(dom.n_nodes, d);
    for (int i = 0; i < dom.n_nodes; ++i) f.values.row(i) = point_values[i].transpose();
    return f;
}

std::string FunctionElement::to_json() const {
    json j;
    j["domain_id"] = domain.id;
    j["center"] = domain.center;
    j["radius"] = domain.radius;
    j["lo"] = domain.lo;
    j["hi"] = domain.hi;
    j["dyn_lo"] = domain.dyn_lo;
    j["dyn_hi"] = domain.dyn_hi;
    j["chart"] = domain.chart;
    j["chart_pole"] = domain.chart_pole;
    j["weighted"] = domain.weighted;
    j["nodes"] = domain.nodes;
    json vals = json::array();
    for (int i = 0; i < values.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < values.cols(); ++c)
            row.push_back(json::array({values(i, c).real(), values(i, c).imag()}));
        vals.push_back(row);
    }
    j["values"] = vals;
    return j.dump(2);
}

FunctionElement FunctionElement::from_json(const std::string& text) {
    json j = json::parse(text);
    FunctionElement f;
    f.domain.id = j.at("domain_id").get<std::string>();
    f.domain.center = j.at("center").get<double>();
    f.domain.radius = j.at("radius").get<double>();
    f.domain.lo = j.at("lo").get<double>();
    f.domain.hi = j.at("hi").get<double>();
    f.domain.dyn_lo = j.value("dyn_lo", f.domain.lo);
    f.domain.dyn_hi = j.value("dyn_hi", f.domain.hi);
    f.domain.chart = j.at("chart").get<bool>();
    f.domain.chart_pole = j.at("chart_pole").get<double>();
    f.domain.weighted = j.at("weighted").get<bool>();
    f.domain.build_nodes((int)j.at("nodes").size());
    const auto& vals = j.at("values");
    int d = (int)vals.at(0).size();
    f.values.resize(f.domain.n_nodes, d);
    for (int i = 0; i < f.domain.n_nodes; ++i)
        for (int c = 0; c < d; ++c)
            f.values(i, c) =
                cplx(vals.at(i).at(c).at(0).get<double>(), vals.at(i).at(c).at(1).get<double>());
    return f;
}

namespace {

double mapped_boundary_excess(const GroupElement& mover, const DiskDomain& target,
                              const DiskDomain& source, int samples) {
    double worst = -std::numeric_limits<double>::infinity();
    double r = target.radius * (1.0 - 1e-8);
    for (int k = 0; k < samples; ++k) {
        double th = 2.0 * PI * k / samples;
        cplx zeta = target.center + r * std::exp(cplx(0.0, th));
        cplx z = target.z_of_working(zeta);
        cplx y = mover.apply(z);
        cplx w = source.working_of_z(y);
        double ex;
        if (is_point_at_infinity(w))
            ex = std::numeric_limits<double>::infinity();
        else
            ex = std::abs(w - source.center) - source.radius;
        worst = std::max(worst, ex);
    }
    return worst;
}

} // namespace

double inclusion_margin(const GroupElement& mover, const DiskDomain& target,
                        const DiskDomain& source, int samples) {
    return -mapped_boundary_excess(mover, target, source, samples);
}

InclusionCheck certify_inclusion(const GroupElement& g, const DiskDomain& src,
                                 const DiskDomain& dst, int samples) {
    InclusionCheck res;
    res.margin = inclusion_margin(g.inverse(), src, dst, samples);
    res.ok = res.margin > 0.0;
    return res;
}

namespace {

struct Requirement {
    GroupElement mover;
    int target = 0, source = 0;
    std::string desc;
    double min_margin = 0.0;
};

// disk geometry defaults; the certification loop shrinks radii from here.
// Node intervals extend slightly past the parabolic expansion points so the
// cardinal Taylor extraction stays inside the node hull (conditioning).
std::vector<DiskDomain> initial_disks(const HeckeFamily& fam) {
    std::vector<DiskDomain> disks;
    auto mk = [](std::string id, double lo, double hi, double dlo, double dhi, double c, double r,
                 bool chart = false, double pole = 0.0, bool weighted = false) {
        DiskDomain d;
        d.id = std::move(id);
        d.lo = lo;
        d.hi = hi;
        d.dyn_lo = dlo;
        d.dyn_hi = dhi;
        d.center = c;
        d.radius = r;
        d.chart = chart;
        d.chart_pole = pole;
        d.weighted = weighted;
        return d;
    };
    // The expansion margin past a parabolic fixed point is kept small (the
    // Taylor circle lives inside it); wide margins feed unstable collocation
    // modes through the polynomial extrapolation of the node hull.
    // Node hulls start exactly at the parabolic fixed points (interior
    // expansion points feed unstable collocation modes) and extend on the
    // right just enough to cover every arising image point.
    switch (fam.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            double b = 1.0 / fam.ell;
            // image points reach 1/ell = b; keep a healthy hull margin past them
            double hi_m1 = 1.3 * b;
            if (fam.q == 3) {
                disks.push_back(mk("Dm1", 0.0, 1.18, 0.0, 1.0, 0.75, 1.05));
                return disks;
            }
            double hw = 0.5 * (1.0 - b);
            bool even = fam.kind == FamilyKind::CofiniteEven;
            double lo_0 = b - 0.3 * hw;
            // even q: the Q g_{q/2} mover sends the lower rim near
            // g_{q/2}^{-1}.infinity > 1, so D0 must reach past it
            double hi_0 = even ? 1.0 + 1.1 * hw : 1.0 + 0.3 * hw;
            double shift = even ? 0.25 * hw : 0.0;
            double rad = even ? 1.9 * hw : 1.55 * hw;
            disks.push_back(mk("D0", lo_0, hi_0, b, 1.0, 0.5 * (b + 1.0) + shift, rad));
            disks.push_back(mk("Dm1", 0.0, hi_m1, 0.0, b, 0.75 * b, 1.05 * b));
            return disks;
        }
        case FamilyKind::Theta:
            disks.push_back(mk("Ea", -1.0, 0.05, -1.0, 0.0, -0.5, 0.93));
            disks.push_back(mk("Eb", 0.0, 1.25, 0.0, 1.0, 0.7, 1.15));
            disks.push_back(mk("Ec", 0.0, 1.25, 0.0, 1.0, 1.0, 1.2, true, 0.0, true));
            return disks;
        case FamilyKind::NonCofinite:
            disks.push_back(mk("E1", -1.0, 1.0, -1.0, 1.0, 0.0, 1.3));
            disks.push_back(
                mk("E2", 0.0, 1.2, 0.0, 1.0, 1.0, 1.2, true, fam.ell - 2.0, true));
            return disks;
    }
    throw config_error("unknown family");
}

double min_containing_radius(const DiskDomain& d) {
    return std::max(std::abs(d.lo - d.center), std::abs(d.hi - d.center)) * (1.0 + 1e-3);
}

} // namespace

DomainFamily make_domain_family(const HeckeFamily& fam, double shrink, int n_nodes) {
    if (!(shrink > 0.0 && shrink <= 1.0)) throw config_error("shrink must be in (0,1]");
    DomainFamily dfam;
    dfam.family = fam;
    dfam.disks = initial_disks(fam);
    for (auto& d : dfam.disks) d.radius = std::max(d.radius, 1.02 * min_containing_radius(d));

    OperatorStructure st = fast_structure(fam);
    const int n_parabolic_check = 6;

    std::vector<Requirement> reqs;
    for (const auto& ft : st.finite) {
        GroupElement h = word_matrix(ft.h_word, fam.ell);
        reqs.push_back({h.inverse(), ft.row, ft.col, ft.desc, 0.0});
    }
    for (const auto& sm : st.sums) {
        GroupElement p = word_matrix(sm.p_word, fam.ell);
        GroupElement pre = word_matrix(sm.pre_word, fam.ell);
        for (int n = 1; n <= n_parabolic_check; ++n) {
            GroupElement el = pre * p.pow(n);
            reqs.push_back({el.inverse(), sm.row, sm.col,
                            sm.desc + " (n=" + std::to_string(n) + ")", 0.0});
        }
    }

    const double floor_frac = 1e-3;
    for (int round = 0;; ++round) {
        bool all_ok = true;
        int worst_target = -1;
        double worst_margin = std::numeric_limits<double>::infinity();
        std::string worst_desc;
        dfam.certificate.clear();
        for (const auto& rq : reqs) {
            double margin = inclusion_margin(rq.mover, dfam.disks[rq.target],
                                             dfam.disks[rq.source], 256);
            std::ostringstream os;
            os << rq.desc << ": " << dfam.disks[rq.target].id << " -> "
               << dfam.disks[rq.source].id << " margin " << margin;
            dfam.certificate.push_back(os.str());
            double need = floor_frac * dfam.disks[rq.source].radius;
            if (!(margin > need)) {
                all_ok = false;
                if (margin < worst_margin) {
                    worst_margin = margin;
                    worst_target = rq.target;
                    worst_desc = rq.desc;
                }
            }
        }
        // beyond the checked depth the images nest toward the parabolic fixed
        // point, which must sit strictly inside the source component
        if (all_ok) {
            for (const auto& sm : st.sums) {
                GroupElement p = word_matrix(sm.p_word, fam.ell);
                ParabolicConjugation pc = deduce_translation_structure(p);
                const DiskDomain& src = dfam.disks[sm.col];
                cplx w_fp = pc.translation_at_infinity
                                ? src.working_of_z(point_at_infinity())
                                : src.working_of_z(cplx(pc.fixed_point, 0.0));
                double margin = src.radius - std::abs(w_fp - cplx(src.center, 0.0));
                if (!(margin > floor_frac * src.radius)) {
                    all_ok = false;
                    worst_target = sm.col;
                    worst_desc = sm.desc + " (fixed point not interior)";
                    break;
                }
            }
        }
        if (all_ok) break;
        if (round >= 20)
            throw no_convergence("make_domain_family: inclusion certification failed for " +
                                 worst_desc + " after 20 shrink rounds");
        DiskDomain& t = dfam.disks[worst_target];
        double min_r = min_containing_radius(t);
        double excess = t.radius - min_r;
        if (excess <= 1e-9)
            throw no_convergence("make_domain_family: no radius satisfies inclusion for " +
                                 worst_desc);
        t.radius = min_r + excess * shrink;
    }

    for (auto& d : dfam.disks) d.build_nodes(n_nodes);
    dfam.inclusion_certified = true;
    return dfam;
}

int DomainFamily::disk_index(const std::string& id) const {
    for (size_t i = 0; i < disks.size(); ++i)
        if (disks[i].id == id) return (int)i;
    throw config_error("no disk with id " + id);
}

Eigen::MatrixXcd cardinal_taylor_matrix(const DiskDomain& dom, const cplx& w0, double rho, int M,
                                        int samples) {
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(M, dom.n_nodes);
    for (int m = 0; m < samples; ++m) {
        double th = 2.0 * PI * m / samples;
        cplx zeta = w0 + rho * std::exp(cplx(0.0, th));
        Eigen::RowVectorXcd row = bary_kernel(dom, zeta);
        cplx rot = 1.0;
        cplx step = std::exp(cplx(0.0, -th));
        double rp = 1.0;
        for (int k = 0; k < M; ++k) {
            L.row(k) += row * (rot / rp);
            rot *= step;
            rp *= rho;
        }
    }
    return L / (double)samples;
}

} // namespace hecke
