#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hecke/common.hpp"
#include "hecke/group.hpp"
#include "hecke/representation.hpp"

namespace hecke {

// j_s(g, z): the weight-s cocycle of g at z, in one of the two branch
// conventions. V1 is ( |det g| (cz+d)^-2 )^s, V2 is |det g|^s |cz+d|^-2s
// holomorphically extended to the cut plane. For real z with cz+d > 0 both
// agree with |g'(z)|^s. Throws domain_violation within 1e-8 of the cut or
// the pole -d/c.
cplx cocycle(BranchVariant variant, const GroupElement& g, const cplx& z, const cplx& s);

// sign weight attached to a term of an odd transfer operator
inline int parity_weight(const GroupElement& g, Parity parity) {
    return parity == Parity::Even ? 1 : g.det_sign;
}

using VectorFunction = std::function<Eigen::VectorXcd(const cplx&)>;

// alpha_s(g^{-1}) f at the target nodes: j_s(g, x) chi(g^{-1}) f(g.x).
// `g_word` spells g so that chi(g^{-1}) can be formed.
std::vector<Eigen::VectorXcd> alpha_apply(BranchVariant variant, const GroupElement& g,
                                          const std::vector<Gen>& g_word, const cplx& s,
                                          const Representation& chi, const VectorFunction& f,
                                          const std::vector<cplx>& target_nodes);

// One summand of a transfer operator: weight * j_s(mover, x) * twist * f(mover.x),
// where mover = h^{-1} for the term alpha_s(h) and twist = chi(h).
struct ActionTerm {
    GroupElement mover;          // moves the evaluation point
    std::vector<Gen> mover_word; // spelling of the mover (for chi and audit)
    Eigen::MatrixXcd twist;      // chi factor of the term
    int det_sign = 1;            // det sign of the alpha argument (parity weight)
    double base_weight = 1.0;    // e.g. 1/2 for the even-q half terms

    double weight(Parity p) const { return base_weight * parity_weight_value(p); }
    int parity_weight_value(Parity p) const { return p == Parity::Even ? 1 : det_sign; }

    // term built from the alpha argument h: mover = h^{-1}, twist = chi(h)
    static ActionTerm from_alpha_argument(const GroupElement& h, const std::vector<Gen>& h_word,
                                          const Representation& chi, double base_weight = 1.0);
};

cplx term_cocycle(BranchVariant variant, const ActionTerm& t, const cplx& z, const cplx& s);

} // namespace hecke
