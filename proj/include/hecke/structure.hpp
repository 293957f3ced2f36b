#pragma once

#include <string>
#include <vector>

#include "hecke/group.hpp"

namespace hecke {

// structural term lists of the transfer operators, shared between domain
// certification and matrix assembly

struct FiniteTermSpec {
    std::vector<Gen> h_word; // the alpha argument
    double weight = 1.0;
    int row = -1, col = -1; // disk indices; -1 = resolved per disk (slow)
    std::string desc;
};

struct ParabolicSumSpec {
    std::vector<Gen> p_word;   // parabolic p; the block sums alpha_s(pre * p^n), n >= 1
    std::vector<Gen> pre_word; // optional finite prefix (e.g. Q)
    double weight = 1.0;
    int row = -1, col = -1;
    std::string desc;
};

struct OperatorStructure {
    int n_disks = 1;
    std::vector<FiniteTermSpec> finite;
    std::vector<ParabolicSumSpec> sums;
};

OperatorStructure fast_structure(const HeckeFamily& fam);
OperatorStructure slow_structure(const HeckeFamily& fam);

std::vector<Gen> g_minus_k_word(int k); // g_{q,-k} = S (TS)^k, k >= 1
std::vector<Gen> g_half_word(int q);    // g_{q,q/2} = S (TS)^{-q/2}

} // namespace hecke
