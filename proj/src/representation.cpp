#include "hecke/representation.hpp"

#include <fstream>

#include <json.hpp>

namespace hecke {

using nlohmann::json;

Representation::Representation(int dim, Eigen::MatrixXcd T, Eigen::MatrixXcd S,
                               Eigen::MatrixXcd Q, std::string label)
    : dim_(dim), T_(std::move(T)), S_(std::move(S)), Q_(std::move(Q)), label_(std::move(label)) {
    if (dim_ < 1 || T_.rows() != dim_ || T_.cols() != dim_ || S_.rows() != dim_ ||
        S_.cols() != dim_ || Q_.rows() != dim_ || Q_.cols() != dim_)
        throw config_error("representation matrices must be dim x dim");
}

Representation Representation::trivial(int dim) {
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
    return Representation(dim, id, id, id, dim == 1 ? "trivial" : "trivial^" + std::to_string(dim));
}

Representation Representation::character(cplx t_val, cplx s_val, cplx q_val, std::string label) {
    Eigen::MatrixXcd T(1, 1), S(1, 1), Q(1, 1);
    T << t_val;
    S << s_val;
    Q << q_val;
    return Representation(1, T, S, Q, std::move(label));
}

Representation Representation::direct_sum(const Representation& x, const Representation& y) {
    int d = x.dim_ + y.dim_;
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(d, d), S = Eigen::MatrixXcd::Zero(d, d),
                     Q = Eigen::MatrixXcd::Zero(d, d);
    T.topLeftCorner(x.dim_, x.dim_) = x.T_;
    T.bottomRightCorner(y.dim_, y.dim_) = y.T_;
    S.topLeftCorner(x.dim_, x.dim_) = x.S_;
    S.bottomRightCorner(y.dim_, y.dim_) = y.S_;
    Q.topLeftCorner(x.dim_, x.dim_) = x.Q_;
    Q.bottomRightCorner(y.dim_, y.dim_) = y.Q_;
    return Representation(d, T, S, Q, x.label_ + "+" + y.label_);
}

namespace {

Eigen::MatrixXcd matrix_from_json(const json& j, int dim, const char* name) {
    if (!j.is_array() || (int)j.size() != dim)
        throw config_error(std::string("representation JSON: bad matrix ") + name);
    Eigen::MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const auto& row = j.at(r);
        if (!row.is_array() || (int)row.size() != dim)
            throw config_error(std::string("representation JSON: bad row in ") + name);
        for (int c = 0; c < dim; ++c) {
            const auto& e = row.at(c);
            if (!e.is_array() || e.size() != 2)
                throw config_error("representation JSON: entries must be [re, im]");
            m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

} // namespace

Representation Representation::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open representation file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw config_error("representation JSON parse error: " + std::string(e.what()));
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string k = it.key();
        if (k != "dim" && k != "T" && k != "S" && k != "Q" && k != "label")
            throw config_error("representation JSON: unknown key '" + k + "'");
    }
    int dim = j.at("dim").get<int>();
    return Representation(dim, matrix_from_json(j.at("T"), dim, "T"),
                          matrix_from_json(j.at("S"), dim, "S"),
                          matrix_from_json(j.at("Q"), dim, "Q"),
                          j.value("label", std::string("user")));
}

std::string Representation::to_json() const {
    json j;
    j["dim"] = dim_;
    j["T"] = matrix_to_json(T_);
    j["S"] = matrix_to_json(S_);
    j["Q"] = matrix_to_json(Q_);
    j["label"] = label_;
    return j.dump(2);
}

Eigen::MatrixXcd Representation::evaluate(const std::vector<Gen>& word) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim_, dim_);
    for (Gen g : word) {
        switch (g) {
            case Gen::S: m = m * S_; break;
            case Gen::T: m = m * T_; break;
            case Gen::Tinv: m = m * T_.adjoint(); break; // unitary inverse
            case Gen::Q: m = m * Q_; break;
        }
    }
    return m;
}

Eigen::MatrixXcd Representation::evaluate_inverse(const std::vector<Gen>& word) const {
    return evaluate(word).adjoint();
}

void Representation::validate(const HeckeFamily& fam, double tol) const {
    auto id = Eigen::MatrixXcd::Identity(dim_, dim_);
    auto unitary = [&](const Eigen::MatrixXcd& m, const char* name) {
        if ((m.adjoint() * m - id).cwiseAbs().maxCoeff() > tol)
            throw config_error(std::string("representation: ") + name + " is not unitary");
    };
    unitary(T_, "chi(T)");
    unitary(S_, "chi(S)");
    unitary(Q_, "chi(Q)");
    auto relation = [&](const Eigen::MatrixXcd& lhs, const Eigen::MatrixXcd& rhs,
                        const char* name) {
        if ((lhs - rhs).cwiseAbs().maxCoeff() > tol)
            throw config_error(std::string("representation: relation ") + name + " violated");
    };
    relation(S_ * S_, id, "chi(S)^2 = 1");
    relation(Q_ * Q_, id, "chi(Q)^2 = 1");
    relation(Q_ * S_ * Q_, S_, "chi(QSQ) = chi(S)");
    // QTQ = S T^-1 S in the extended group
    relation(Q_ * T_ * Q_, S_ * T_.adjoint() * S_, "chi(QTQ) = chi(S T^-1 S)");
    if (fam.cofinite_kind()) {
        Eigen::MatrixXcd ts = T_ * S_;
        Eigen::MatrixXcd p = id;
        for (int i = 0; i < fam.q; ++i) p = p * ts;
        relation(p, id, "chi(TS)^q = 1");
    }
}

bool Representation::is_trivial() const {
    auto id = Eigen::MatrixXcd::Identity(dim_, dim_);
    double d = (T_ - id).cwiseAbs().maxCoeff() + (S_ - id).cwiseAbs().maxCoeff() +
               (Q_ - id).cwiseAbs().maxCoeff();
    return d < 1e-14;
}

} // namespace hecke
