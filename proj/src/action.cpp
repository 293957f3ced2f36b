#include "hecke/action.hpp"

#include <cmath>

namespace hecke {

namespace {

// row-normalized (c, d): projective sign chosen so that c > 0, or c = 0, d > 0
void normalized_row(const GroupElement& g, double& c, double& d) {
    c = g.c;
    d = g.d;
    if (c < 0.0 || (c == 0.0 && d < 0.0)) {
        c = -c;
        d = -d;
    }
}

constexpr double kBranchGuard = 1e-8;

} // namespace

cplx cocycle(BranchVariant variant, const GroupElement& g, const cplx& z, const cplx& s) {
    double c, d;
    normalized_row(g, c, d);
    cplx w = c * z + d;
    double scale = std::abs(w) + 1.0;
    if (std::abs(w) < kBranchGuard) throw domain_violation("cocycle: z within 1e-8 of pole -d/c");
    if (variant == BranchVariant::V1) {
        // ((cz+d)^-2)^s, principal branch; cut where cz+d is purely imaginary
        if (std::abs(w.real()) < kBranchGuard * scale)
            throw domain_violation("cocycle V1: z within 1e-8 of the branch cut");
        return std::exp(-s * std::log(w * w));
    }
    // V2: |cz+d|^-2s extended to the cut plane C \ (-inf, -d/c]
    if (w.real() <= 0.0 && std::abs(w.imag()) < kBranchGuard * scale)
        throw domain_violation("cocycle V2: z within 1e-8 of the cut (-inf, -d/c]");
    return std::exp(-2.0 * s * std::log(w));
}

std::vector<Eigen::VectorXcd> alpha_apply(BranchVariant variant, const GroupElement& g,
                                          const std::vector<Gen>& g_word, const cplx& s,
                                          const Representation& chi, const VectorFunction& f,
                                          const std::vector<cplx>& target_nodes) {
    Eigen::MatrixXcd twist = chi.evaluate_inverse(g_word);
    std::vector<Eigen::VectorXcd> out;
    out.reserve(target_nodes.size());
    for (const cplx& x : target_nodes) {
        cplx j = cocycle(variant, g, x, s);
        out.push_back(j * (twist * f(g.apply(x))));
    }
    return out;
}

ActionTerm ActionTerm::from_alpha_argument(const GroupElement& h, const std::vector<Gen>& h_word,
                                           const Representation& chi, double base_weight) {
    ActionTerm t;
    t.mover = h.inverse();
    t.mover_word.reserve(h_word.size());
    for (auto it = h_word.rbegin(); it != h_word.rend(); ++it) {
        switch (*it) {
            case Gen::S: t.mover_word.push_back(Gen::S); break;
            case Gen::T: t.mover_word.push_back(Gen::Tinv); break;
            case Gen::Tinv: t.mover_word.push_back(Gen::T); break;
            case Gen::Q: t.mover_word.push_back(Gen::Q); break;
        }
    }
    t.twist = chi.evaluate(h_word);
    t.det_sign = h.det_sign;
    t.base_weight = base_weight;
    return t;
}

cplx term_cocycle(BranchVariant variant, const ActionTerm& t, const cplx& z, const cplx& s) {
    // cocycle of the term alpha_s(h) evaluated via the mover h^{-1}: j_s(h^{-1}, z)
    return cocycle(variant, t.mover, z, s);
}

} // namespace hecke
