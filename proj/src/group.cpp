#include "hecke/group.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hecke/representation.hpp"

namespace hecke {

HeckeFamily HeckeFamily::cofinite(int q) {
    if (q < 3) throw config_error("cofinite family needs q >= 3");
    HeckeFamily f;
    f.kind = (q % 2 == 1) ? FamilyKind::CofiniteOdd : FamilyKind::CofiniteEven;
    f.q = q;
    f.ell = 2.0 * std::cos(PI / q);
    f.m = (q - 1) / 2;
    return f;
}

HeckeFamily HeckeFamily::theta() {
    HeckeFamily f;
    f.kind = FamilyKind::Theta;
    f.ell = 2.0;
    return f;
}

HeckeFamily HeckeFamily::noncofinite(double ell) {
    if (!(ell > 2.0)) throw config_error("non-cofinite family needs ell > 2");
    HeckeFamily f;
    f.kind = FamilyKind::NonCofinite;
    f.ell = ell;
    return f;
}

HeckeFamily HeckeFamily::parse(const std::string& spec) {
    if (spec == "theta") return theta();
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string key = spec.substr(0, colon);
        std::string val = spec.substr(colon + 1);
        try {
            if (key == "q") return cofinite(std::stoi(val));
            if (key == "ell") {
                double ell = std::stod(val);
                if (ell == 2.0) return theta();
                return noncofinite(ell);
            }
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("cannot parse family spec '" + spec + "'");
        }
    }
    throw config_error("unknown family spec '" + spec + "' (expected q:N, theta, ell:X)");
}

std::string HeckeFamily::label() const {
    switch (kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: return "q:" + std::to_string(q);
        case FamilyKind::Theta: return "theta";
        case FamilyKind::NonCofinite: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "ell:%g", ell);
            return buf;
        }
    }
    return "?";
}

double sigma(long m, int q) {
    if (q < 3) throw config_error("sigma needs q >= 3");
    long two_q = 2L * q;
    long r = m % two_q;
    if (r < 0) r += two_q;
    double sign = 1.0;
    if (r >= q) {
        r -= q;
        sign = -1.0;
    }
    // sin(r pi / q) with r in [0, q); reflect for best accuracy
    long rr = std::min(r, (long)q - r);
    return sign * std::sin(PI * (double)rr / q) / std::sin(PI / q);
}

GroupElement::GroupElement(double a_, double b_, double c_, double d_)
    : a(a_), b(b_), c(c_), d(d_) {
    double det = a * d - b * c;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det))
        throw domain_violation("singular matrix in GroupElement");
    det_sign = det > 0 ? 1 : -1;
    double scale = std::sqrt(std::abs(det));
    a /= scale;
    b /= scale;
    c /= scale;
    d /= scale;
    // column-major first nonzero entry made positive
    const double tol = 1e-14;
    double lead = 0.0;
    for (double v : {a, c, b, d}) {
        if (std::abs(v) > tol) {
            lead = v;
            break;
        }
    }
    if (lead < 0.0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
    }
}

GroupElement GroupElement::inverse() const {
    GroupElement g(d, -b, -c, a);
    return g;
}

GroupElement operator*(const GroupElement& g, const GroupElement& h) {
    return GroupElement(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
                        g.c * h.b + g.d * h.d);
}

GroupElement GroupElement::pow(long n) const {
    if (n == 0) return identity();
    GroupElement base = n > 0 ? *this : inverse();
    unsigned long k = n > 0 ? (unsigned long)n : (unsigned long)(-n);
    GroupElement acc = identity();
    while (k) {
        if (k & 1UL) acc = acc * base;
        base = base * base;
        k >>= 1UL;
    }
    return acc;
}

bool GroupElement::approx_equal(const GroupElement& o, double tol) const {
    return det_sign == o.det_sign && std::abs(a - o.a) < tol && std::abs(b - o.b) < tol &&
           std::abs(c - o.c) < tol && std::abs(d - o.d) < tol;
}

bool GroupElement::is_parabolic(double tol) const {
    return det_sign == 1 && std::abs(std::abs(trace()) - 2.0) < tol && !is_identity(1e-9);
}

cplx GroupElement::apply(const cplx& z) const {
    if (is_point_at_infinity(z)) {
        if (c != 0.0) return {a / c, 0.0};
        return point_at_infinity();
    }
    cplx den = c * z + d;
    if (den == cplx(0.0, 0.0)) return point_at_infinity();
    return (a * z + b) / den;
}

GroupElement gen_S() { return GroupElement(0, 1, -1, 0); }
GroupElement gen_T(double ell) { return GroupElement(1, ell, 0, 1); }
GroupElement gen_Q() { return GroupElement(0, 1, 1, 0); }
GroupElement gen_J() { return GroupElement(-1, 0, 0, 1); }

GroupElement gen_matrix(Gen g, double ell) {
    switch (g) {
        case Gen::S: return gen_S();
        case Gen::T: return gen_T(ell);
        case Gen::Tinv: return gen_T(ell).inverse();
        case Gen::Q: return gen_Q();
    }
    throw config_error("bad generator");
}

GroupElement word_matrix(const std::vector<Gen>& word, double ell) {
    GroupElement acc = GroupElement::identity();
    for (Gen g : word) acc = acc * gen_matrix(g, ell);
    return acc;
}

std::string word_string(const std::vector<Gen>& word) {
    std::string s;
    for (Gen g : word) {
        switch (g) {
            case Gen::S: s += 'S'; break;
            case Gen::T: s += 'T'; break;
            case Gen::Tinv: s += 't'; break;
            case Gen::Q: s += 'Q'; break;
        }
    }
    return s;
}

GroupElement g_element(int q, long k) {
    double ell = 2.0 * std::cos(PI / q);
    GroupElement U = gen_T(ell) * gen_S();
    return (U.pow(k) * gen_S()).inverse();
}

GroupElement g_inverse_sigma(int q, long k) {
    return GroupElement(sigma(k, q), sigma(k + 1, q), sigma(k - 1, q), sigma(k, q));
}

GroupElement conjugated_h(int r1, std::optional<int> q, long k, int r2) {
    if ((r1 != 0 && r1 != 1) || (r2 != 0 && r2 != 1))
        throw config_error("conjugated_h needs r1, r2 in {0,1}");
    long e11 = k - r1 + r2;
    long e12 = k + 1 - r1 - r2;
    long e21 = k - 1 + r1 + r2;
    long e22 = k + r1 - r2;
    if (!q) return GroupElement((double)e11, (double)e12, (double)e21, (double)e22);
    return GroupElement(sigma(e11, *q), sigma(e12, *q), sigma(e21, *q), sigma(e22, *q));
}

double class_norm_from_trace(double tr) {
    double t = std::abs(tr);
    if (t <= 2.0) throw domain_violation("norm defined for hyperbolic traces only");
    double lam = (t + std::sqrt(t * t - 4.0)) / 2.0;
    return lam * lam;
}

namespace {

// ----- conjugacy class enumeration -------------------------------------
//
// Every infinite-order element of the free product <S> * <U> (U = TS of
// order q, or <S> * <T> for ell >= 2) is conjugate to an alternating word
// U^{a_1} S ... U^{a_n} S, unique up to rotation of (a_1..a_n). Necklaces
// give conjugacy classes, aperiodic necklaces the primitive ones.

// spelled block for U^a S over {S, T, T^-1}, exponent balanced mod q
std::vector<Gen> cofinite_block(int a, int q) {
    std::vector<Gen> w;
    if (2 * a <= q) {
        // (TS)^a S -> T (S T)^{a-1}
        w.push_back(Gen::T);
        for (int i = 1; i < a; ++i) {
            w.push_back(Gen::S);
            w.push_back(Gen::T);
        }
    } else {
        // (S T^-1)^{q-a} S -> S (T^-1 S)^{q-a}
        w.push_back(Gen::S);
        for (int i = 0; i < q - a; ++i) {
            w.push_back(Gen::Tinv);
            w.push_back(Gen::S);
        }
    }
    return w;
}

// block for T^b S (Theta / non-cofinite)
std::vector<Gen> free_block(long b) {
    std::vector<Gen> w;
    Gen letter = b > 0 ? Gen::T : Gen::Tinv;
    for (long i = 0; i < std::labs(b); ++i) w.push_back(letter);
    w.push_back(Gen::S);
    return w;
}

bool cancels(Gen x, Gen y) {
    return (x == Gen::S && y == Gen::S) || (x == Gen::T && y == Gen::Tinv) ||
           (x == Gen::Tinv && y == Gen::T);
}

// cyclic free reduction over {S, T, T^-1} with S^2 = 1
std::vector<Gen> cyclic_reduce(std::vector<Gen> w) {
    bool changed = true;
    while (changed && !w.empty()) {
        changed = false;
        std::vector<Gen> out;
        out.reserve(w.size());
        for (Gen g : w) {
            if (!out.empty() && cancels(out.back(), g)) {
                out.pop_back();
                changed = true;
            } else {
                out.push_back(g);
            }
        }
        while (out.size() >= 2 && cancels(out.front(), out.back())) {
            out.erase(out.begin());
            out.pop_back();
            changed = true;
        }
        w = std::move(out);
    }
    return w;
}

template <typename Letter>
bool is_least_rotation(const std::vector<Letter>& v) {
    size_t n = v.size();
    for (size_t r = 1; r < n; ++r) {
        for (size_t i = 0; i < n; ++i) {
            Letter rot = v[(i + r) % n];
            if (rot < v[i]) return false;
            if (v[i] < rot) break;
        }
    }
    return true;
}

template <typename Letter>
bool is_aperiodic(const std::vector<Letter>& v) {
    size_t n = v.size();
    for (size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool periodic = true;
        for (size_t i = 0; i < n && periodic; ++i)
            if (!(v[i] == v[i % d])) periodic = false;
        if (periodic) return false;
    }
    return true;
}

struct RawClass {
    std::vector<Gen> word;
    GroupElement rep;
};

// depth-first enumeration of necklaces with a spelled-length budget
template <typename Letter, typename BlockFn>
void enumerate_necklaces(const std::vector<Letter>& alphabet, const BlockFn& block_len,
                         int max_len, std::vector<std::vector<Letter>>& out) {
    std::vector<Letter> cur;
    std::function<void(int)> dfs = [&](int used) {
        if (!cur.empty()) {
            if (is_least_rotation(cur) && is_aperiodic(cur)) out.push_back(cur);
        }
        for (Letter a : alphabet) {
            int bl = block_len(a);
            if (used + bl > max_len) continue;
            cur.push_back(a);
            dfs(used + bl);
            cur.pop_back();
        }
    };
    dfs(0);
}

} // namespace

std::vector<ConjClass> enumerate_primitive_classes(const HeckeFamily& fam,
                                                   const Representation& chi,
                                                   int max_word_len) {
    if (max_word_len < 1) throw config_error("max_word_len >= 1 required");
    if (max_word_len > 24)
        throw config_error("max_word_len above safety bound 24 (combinatorial blowup)");

    std::vector<RawClass> raws;

    if (fam.cofinite_kind()) {
        std::vector<int> alphabet;
        for (int a = 1; a < fam.q; ++a) alphabet.push_back(a);
        std::vector<std::vector<int>> necks;
        enumerate_necklaces(
            alphabet, [&](int a) { return (int)cofinite_block(a, fam.q).size(); }, max_word_len,
            necks);
        for (const auto& nk : necks) {
            std::vector<Gen> w;
            for (int a : nk) {
                auto blk = cofinite_block(a, fam.q);
                w.insert(w.end(), blk.begin(), blk.end());
            }
            w = cyclic_reduce(std::move(w));
            if ((int)w.size() > max_word_len || w.empty()) continue;
            raws.push_back({std::move(w), GroupElement::identity()});
        }
    } else {
        long bmax = max_word_len - 1;
        std::vector<long> alphabet;
        for (long b = 1; b <= bmax; ++b) {
            alphabet.push_back(b);
            alphabet.push_back(-b);
        }
        std::sort(alphabet.begin(), alphabet.end());
        std::vector<std::vector<long>> necks;
        enumerate_necklaces(
            alphabet, [&](long b) { return (int)(std::labs(b) + 1); }, max_word_len, necks);
        for (const auto& nk : necks) {
            std::vector<Gen> w;
            for (long b : nk) {
                auto blk = free_block(b);
                w.insert(w.end(), blk.begin(), blk.end());
            }
            w = cyclic_reduce(std::move(w));
            if ((int)w.size() > max_word_len || w.empty()) continue;
            raws.push_back({std::move(w), GroupElement::identity()});
        }
    }

    std::vector<ConjClass> classes;
    for (auto& r : raws) {
        GroupElement h = word_matrix(r.word, fam.ell);
        double tr = h.trace();
        if (std::abs(tr) <= 2.0 + 1e-9) continue; // elliptic or parabolic necklace
        ConjClass c;
        c.rep = h;
        c.word = r.word;
        c.trace = tr;
        c.norm = class_norm_from_trace(tr);
        c.primitive = true;
        Eigen::MatrixXcd m = chi.evaluate(r.word);
        c.chi_factor.assign(m.rows(), std::vector<cplx>(m.cols()));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) c.chi_factor[i][j] = m(i, j);
        classes.push_back(std::move(c));
    }

    std::stable_sort(classes.begin(), classes.end(), [](const ConjClass& x, const ConjClass& y) {
        if (x.word.size() != y.word.size()) return x.word.size() < y.word.size();
        return x.word < y.word;
    });
    return classes;
}

} // namespace hecke
