#pragma once

#include <optional>
#include <vector>

#include "hecke/common.hpp"

namespace hecke {

enum class FamilyKind { CofiniteOdd, CofiniteEven, Theta, NonCofinite };

// One of the four Hecke triangle group families treated here.
// Fuchsian condition: ell = 2cos(pi/q) (cofinite), ell = 2 (Theta), ell > 2 (non-cofinite).
struct HeckeFamily {
    FamilyKind kind;
    int q = 0;        // cofinite only
    double ell = 0.0;
    int m = 0;        // floor((q-1)/2), cofinite only

    static HeckeFamily cofinite(int q);
    static HeckeFamily theta();
    static HeckeFamily noncofinite(double ell);
    static HeckeFamily parse(const std::string& spec); // "q:5" | "theta" | "ell:2.5"

    bool cofinite_kind() const {
        return kind == FamilyKind::CofiniteOdd || kind == FamilyKind::CofiniteEven;
    }
    std::string label() const;
};

// sin(m pi / q) / sin(pi / q), reduced mod 2q before the sine
double sigma(long m, int q);

// Element of PGL_2(R), stored with |det| = 1 and the first nonzero entry in
// column-major order positive; that fixes the projective scalar for equality
// tests and hashing.
struct GroupElement {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    int det_sign = 1;

    GroupElement() = default;
    GroupElement(double a_, double b_, double c_, double d_);

    static GroupElement identity() { return {}; }

    GroupElement inverse() const;
    GroupElement pow(long n) const;
    double trace() const { return a + d; }
    bool approx_equal(const GroupElement& o, double tol = 1e-12) const;
    bool is_identity(double tol = 1e-12) const { return approx_equal(identity(), tol); }
    bool is_parabolic(double tol = 1e-9) const;

    // Moebius action with the paper's conventions at infinity and at poles.
    cplx apply(const cplx& z) const;
};

GroupElement operator*(const GroupElement& g, const GroupElement& h);

inline cplx mobius_apply(const GroupElement& g, const cplx& z) { return g.apply(z); }

GroupElement gen_S();
GroupElement gen_T(double ell);
GroupElement gen_Q();
GroupElement gen_J();

// g_{q,k} = ((T_q S)^k S)^{-1}
GroupElement g_element(int q, long k);
// the sigma-entry matrix for g_{q,k}^{-1}
GroupElement g_inverse_sigma(int q, long k);
// Q^{r1} h_{q,k} Q^{r2} with h_{q,k} = g_{q,k}^{-1}; q = nullopt means the
// integer degeneration (sigma values replaced by their arguments)
GroupElement conjugated_h(int r1, std::optional<int> q, long k, int r2);

// Letters for words over the generators. T/Tinv are T_ell for the family.
enum class Gen : int { S = 0, T = 1, Tinv = 2, Q = 3 };

GroupElement gen_matrix(Gen g, double ell);
GroupElement word_matrix(const std::vector<Gen>& word, double ell);
std::string word_string(const std::vector<Gen>& word);

class Representation; // action module

// Primitive hyperbolic conjugacy class with its Euler-product data.
struct ConjClass {
    GroupElement rep;
    std::vector<Gen> word; // cyclically reduced spelling over {S, T, T^-1}
    double trace = 0.0;
    double norm = 0.0; // N(h) = ((|tr| + sqrt(tr^2-4))/2)^2
    bool primitive = true;
    std::vector<std::vector<cplx>> chi_factor; // chi(h), dim x dim
};

// All primitive hyperbolic conjugacy classes whose cyclically reduced word
// over {S,T,T^-1} has length <= max_word_len, deduplicated under rotation,
// ordered by (word length, lexicographic word).
std::vector<ConjClass> enumerate_primitive_classes(const HeckeFamily& fam,
                                                   const Representation& chi,
                                                   int max_word_len);

double class_norm_from_trace(double tr);

} // namespace hecke
