#include "hecke/structure.hpp"

namespace hecke {

std::vector<Gen> g_minus_k_word(int k) {
    std::vector<Gen> w{Gen::S};
    for (int i = 0; i < k; ++i) {
        w.push_back(Gen::T);
        w.push_back(Gen::S);
    }
    return w;
}

std::vector<Gen> g_half_word(int q) {
    std::vector<Gen> w{Gen::S};
    for (int i = 0; i < q / 2; ++i) {
        w.push_back(Gen::S);
        w.push_back(Gen::Tinv);
    }
    return w;
}

namespace {

std::vector<Gen> with_Q(const std::vector<Gen>& w) {
    std::vector<Gen> out{Gen::Q};
    out.insert(out.end(), w.begin(), w.end());
    return out;
}

const std::vector<Gen> kWordK2{Gen::Tinv, Gen::S};              // k2 = a2 = T^-1 S
const std::vector<Gen> kWordK2J{Gen::Tinv, Gen::S, Gen::Q, Gen::S}; // k2 J, J = QS
const std::vector<Gen> kWordTinv{Gen::Tinv};                    // k1^-1 = a1^-1 = T^-1

} // namespace

OperatorStructure fast_structure(const HeckeFamily& fam) {
    OperatorStructure st;
    switch (fam.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            auto p_word = g_minus_k_word(1);
            if (fam.q == 3) {
                st.n_disks = 1;
                st.sums.push_back({p_word, {Gen::Q}, 1.0, 0, 0, "Q g_{-1}^n"});
                return st;
            }
            st.n_disks = 2; // 0 = D0, 1 = Dm1
            for (int k = 2; k <= fam.m; ++k) {
                auto w = g_minus_k_word(k);
                std::string nm = "g_{-" + std::to_string(k) + "}";
                for (int row : {0, 1}) {
                    st.finite.push_back({w, 1.0, row, 0, nm});
                    st.finite.push_back({with_Q(w), 1.0, row, 0, "Q " + nm});
                }
            }
            if (fam.kind == FamilyKind::CofiniteEven) {
                auto w = g_half_word(fam.q);
                std::string nm = "g_{q/2}";
                for (int row : {0, 1}) {
                    st.finite.push_back({w, 0.5, row, 0, nm});
                    st.finite.push_back({with_Q(w), 0.5, row, 0, "Q " + nm});
                }
            }
            st.sums.push_back({p_word, {}, 1.0, 0, 1, "g_{-1}^n"});
            st.sums.push_back({p_word, {Gen::Q}, 1.0, 0, 1, "Q g_{-1}^n"});
            st.sums.push_back({p_word, {Gen::Q}, 1.0, 1, 1, "Q g_{-1}^n"});
            return st;
        }
        case FamilyKind::Theta: {
            st.n_disks = 3; // 0 = Ea, 1 = Eb, 2 = Ec
            for (int row : {0, 1, 2}) st.finite.push_back({kWordK2J, 1.0, row, 1, "k2 J"});
            st.sums.push_back({kWordK2, {}, 1.0, 1, 0, "k2^n"});
            st.sums.push_back({kWordK2, {}, 1.0, 2, 0, "k2^n"});
            st.sums.push_back({kWordTinv, {}, 1.0, 0, 2, "k1^{-n}"});
            st.sums.push_back({kWordTinv, {}, 1.0, 1, 2, "k1^{-n}"});
            return st;
        }
        case FamilyKind::NonCofinite: {
            st.n_disks = 2; // 0 = E1, 1 = E2
            for (int row : {0, 1}) {
                st.finite.push_back({kWordK2, 1.0, row, 0, "a2"});
                st.finite.push_back({kWordK2J, 1.0, row, 0, "a2 J"});
            }
            st.sums.push_back({kWordTinv, {}, 1.0, 0, 1, "a1^{-n}"});
            return st;
        }
    }
    throw config_error("unknown family");
}

OperatorStructure slow_structure(const HeckeFamily& fam) {
    OperatorStructure st;
    switch (fam.kind) {
        case FamilyKind::CofiniteOdd:
        case FamilyKind::CofiniteEven: {
            st.n_disks = fam.q == 3 ? 1 : 2;
            for (int k = 1; k <= fam.m; ++k) {
                auto w = g_minus_k_word(k);
                std::string nm = "g_{-" + std::to_string(k) + "}";
                st.finite.push_back({w, 1.0, -1, -1, nm});
                st.finite.push_back({with_Q(w), 1.0, -1, -1, "Q " + nm});
            }
            if (fam.kind == FamilyKind::CofiniteEven) {
                auto w = g_half_word(fam.q);
                st.finite.push_back({w, 0.5, -1, -1, "g_{q/2}"});
                st.finite.push_back({with_Q(w), 0.5, -1, -1, "Q g_{q/2}"});
            }
            return st;
        }
        case FamilyKind::Theta:
            st.n_disks = 3;
            st.finite.push_back({kWordTinv, 1.0, -1, -1, "k1^{-1}"});
            st.finite.push_back({kWordK2, 1.0, -1, -1, "k2"});
            st.finite.push_back({kWordK2J, 1.0, -1, -1, "k2 J"});
            return st;
        case FamilyKind::NonCofinite:
            st.n_disks = 2;
            st.finite.push_back({kWordK2, 1.0, -1, -1, "a2"});
            st.finite.push_back({kWordTinv, 1.0, -1, -1, "a1^{-1}"});
            st.finite.push_back({kWordK2J, 1.0, -1, -1, "a2 J"});
            return st;
    }
    throw config_error("unknown family");
}

} // namespace hecke
