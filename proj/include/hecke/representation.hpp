#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hecke/common.hpp"
#include "hecke/group.hpp"

namespace hecke {

// Finite-dimensional unitary representation of the extended triangle group,
// given by its values on the generators T, S, Q. J is derived (J = QS).
class Representation {
  public:
    Representation() = default;
    Representation(int dim, Eigen::MatrixXcd T, Eigen::MatrixXcd S, Eigen::MatrixXcd Q,
                   std::string label);

    static Representation trivial(int dim = 1);
    // one-dimensional character chi(S) = s_val, chi(T) = t_val, chi(Q) = q_val
    static Representation character(cplx t_val, cplx s_val, cplx q_val, std::string label);
    static Representation direct_sum(const Representation& x, const Representation& y);
    static Representation from_json_file(const std::string& path);
    std::string to_json() const;

    int dim() const { return dim_; }
    const std::string& label() const { return label_; }
    const Eigen::MatrixXcd& T() const { return T_; }
    const Eigen::MatrixXcd& S() const { return S_; }
    const Eigen::MatrixXcd& Q() const { return Q_; }

    Eigen::MatrixXcd evaluate(const std::vector<Gen>& word) const;
    Eigen::MatrixXcd evaluate_inverse(const std::vector<Gen>& word) const;

    // unitarity of the generator images plus the group relations for the
    // family (S^2, (TS)^q for cofinite, Q^2, QSQ=S, QTQ=ST^-1S); throws on failure
    void validate(const HeckeFamily& fam, double tol = 1e-10) const;

    bool is_trivial() const;

  private:
    int dim_ = 1;
    Eigen::MatrixXcd T_, S_, Q_;
    std::string label_ = "trivial";
};

} // namespace hecke
