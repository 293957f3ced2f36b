#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hecke/common.hpp"
#include "hecke/group.hpp"

namespace hecke {

// Complex disk around one interval of the discretization, in a working
// coordinate. Unbounded intervals are handled in the chart w = 1/(z - pole);
// those components carry the weight ((z - pole)^2)^{-s}: the stored data F
// represents f(z) = ((z - pole)^2)^{-s} F(1/(z - pole)).
struct DiskDomain {
    std::string id;
    double center = 0.0; // working coordinate
    double radius = 1.0;
    double lo = 0.0, hi = 1.0;         // node interval, working coordinate
    double dyn_lo = 0.0, dyn_hi = 1.0; // the family's interval (node interval
                                       // may extend past it for conditioning)
    bool chart = false;
    double chart_pole = 0.0;
    bool weighted = false;
    int n_nodes = 0;
    std::vector<double> nodes;  // Chebyshev 2nd kind on [lo, hi]
    std::vector<double> bary_w; // barycentric weights

    void build_nodes(int n);
    cplx working_of_z(const cplx& z) const;   // physical -> working
    cplx z_of_working(const cplx& w) const;   // working -> physical
    bool contains_working(const cplx& w, double slack = 0.0) const {
        return std::abs(w - center) <= radius + slack;
    }
    std::string physical_interval() const;
};

// kernel of cardinal values: row k with interp(f)(w) = sum_j k_j f(x_j)
Eigen::RowVectorXcd bary_kernel(const DiskDomain& dom, const cplx& w);

// Values of a holomorphic V-valued function at the collocation nodes of one
// disk; evaluable anywhere in the closed disk through the interpolant.
struct FunctionElement {
    DiskDomain domain;
    Eigen::MatrixXcd values; // n_nodes x dim

    int dim() const { return (int)values.cols(); }
    // interpolant of the stored (working-coordinate) data
    Eigen::VectorXcd eval_raw(const cplx& w) const;
    // physical value, chart and weight applied
    Eigen::VectorXcd eval_physical(const cplx& z, const cplx& s) const;

    std::string to_json() const;
    static FunctionElement from_json(const std::string& text);
};

FunctionElement interpolate(const DiskDomain& dom,
                            const std::vector<Eigen::VectorXcd>& point_values);

struct InclusionCheck {
    bool ok = false;
    double margin = 0.0; // min distance of mapped src boundary to dst boundary
};

// Maps boundary points of src under g^{-1} and measures the margin to dst's
// boundary (positive = strictly inside). The boundary is sampled a hair
// inside the circle so that closed-vs-open inclusion is decided sanely.
InclusionCheck certify_inclusion(const GroupElement& g, const DiskDomain& src,
                                 const DiskDomain& dst, int samples = 256);

// margin of mover.closure(target disk) inside the open source disk
double inclusion_margin(const GroupElement& mover, const DiskDomain& target,
                        const DiskDomain& source, int samples = 256);

struct DomainFamily {
    HeckeFamily family;
    std::vector<DiskDomain> disks;
    bool inclusion_certified = false;
    std::vector<std::string> certificate; // per-requirement margins, for audit

    int disk_index(const std::string& id) const;
};

// One disk per interval of the family's fast discretization, inclusion
// checks run for the full fast acting set (parabolic families checked to
// depth with nesting margins); on failure the offending target disk radius
// excess is scaled by `shrink` and the check rerun, up to 20 times.
DomainFamily make_domain_family(const HeckeFamily& fam, double shrink = 0.9, int n_nodes = 32);

// Taylor coefficients (rows k = 0..M-1) of the cardinal basis of `dom`
// around working point w0, through a Cauchy circle of radius rho.
Eigen::MatrixXcd cardinal_taylor_matrix(const DiskDomain& dom, const cplx& w0, double rho, int M,
                                        int samples = 256);

} // namespace hecke
