#include "affdim/error.hpp"
#include "affdim/ifs.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace affdim {

using json = nlohmann::json;
using Code = ConfigIssue::Code;

namespace {

bool read_numbers(const json& node, std::size_t expected, std::vector<double>& out, const std::string& where,
                  std::vector<ConfigIssue>& issues) {
    if (!node.is_array()) {
        issues.push_back({Code::MissingField, where + " must be an array of numbers"});
        return false;
    }
    if (node.size() != expected) {
        issues.push_back({Code::DimensionMismatch,
                          where + " has " + std::to_string(node.size()) + " entries, expected " + std::to_string(expected)});
        return false;
    }
    out.clear();
    for (const auto& x : node) {
        if (!x.is_number()) {
            issues.push_back({Code::Syntax, where + " contains a non-numeric entry"});
            return false;
        }
        const double v = x.get<double>();
        if (!std::isfinite(v)) {
            issues.push_back({Code::NonFinite, where + " contains a non-finite entry"});
            return false;
        }
        out.push_back(v);
    }
    return true;
}

Matrix to_matrix(const std::vector<double>& flat, int d) {
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = flat[static_cast<std::size_t>(i * d + j)];
    return m;
}

void check_invertible(const Matrix& A, const std::string& where, std::vector<ConfigIssue>& issues) {
    const Vector sv = singular_values(A);
    if (sv(0) == 0 || sv(sv.size() - 1) <= 1e-13 * sv(0))
        issues.push_back({Code::SingularLinearPart, where + " is not invertible"});
}

}  // namespace

void validate_system(const AffineIFS& ifs) {
    std::vector<ConfigIssue> issues;
    if (ifs.dim < 1) issues.push_back({Code::DimensionMismatch, "dim must be positive"});
    if (ifs.dim > kMaxDim) issues.push_back({Code::DimensionTooLarge, "dim exceeds " + std::to_string(kMaxDim)});
    if (ifs.maps.size() < 2) issues.push_back({Code::AlphabetTooSmall, "at least two maps are required"});
    if (!issues.empty()) throw ConfigError(issues);
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        const auto& m = ifs.maps[i];
        const std::string where = "maps[" + std::to_string(i) + "]";
        if (m.A.rows() != ifs.dim || m.A.cols() != ifs.dim || m.v.size() != ifs.dim) {
            issues.push_back({Code::DimensionMismatch, where + " has the wrong shape"});
            continue;
        }
        if (!m.A.allFinite() || !m.v.allFinite()) {
            issues.push_back({Code::NonFinite, where + " has non-finite entries"});
            continue;
        }
        check_invertible(m.A, where + ".A", issues);
    }
    if (ifs.probs) {
        const auto& p = ifs.probs->probs;
        if (p.size() != ifs.maps.size()) {
            issues.push_back({Code::DimensionMismatch, "probs length differs from the number of maps"});
        } else {
            double sum = 0;
            bool ok = true;
            for (double x : p) {
                if (!std::isfinite(x) || x < 0) ok = false;
                sum += x;
            }
            if (!ok) issues.push_back({Code::NonFinite, "probs must be finite and non-negative"});
            else if (std::abs(sum - 1.0) > 1e-12)
                issues.push_back({Code::ProbsNotNormalized, "probs sum to " + std::to_string(sum)});
        }
    }
    if (ifs.Q) {
        const Matrix& Q = *ifs.Q;
        if (Q.rows() != ifs.dim || Q.cols() != ifs.dim) {
            issues.push_back({Code::DimensionMismatch, "Q has the wrong shape"});
        } else if (!Q.allFinite()) {
            issues.push_back({Code::NonFinite, "Q has non-finite entries"});
        } else {
            Eigen::LLT<Matrix> llt(Q);
            if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()) ||
                llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0)
                issues.push_back({Code::NormNotPositiveDefinite, "Q must be symmetric positive definite"});
        }
    }
    if (ifs.soc_ball) {
        if (ifs.soc_ball->center.size() != ifs.dim)
            issues.push_back({Code::DimensionMismatch, "soc_ball.center has the wrong length"});
        if (!(ifs.soc_ball->radius > 0) || !std::isfinite(ifs.soc_ball->radius))
            issues.push_back({Code::NonFinite, "soc_ball.radius must be positive"});
    }
    if (!issues.empty()) throw ConfigError(issues);
}

AffineIFS parse_system(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({{Code::Syntax, e.what()}});
    }
    std::vector<ConfigIssue> issues;
    if (!root.is_object()) throw ConfigError({{Code::Syntax, "config must be a JSON object"}});
    if (!root.contains("dim") || !root["dim"].is_number_integer())
        throw ConfigError({{Code::MissingField, "dim (integer) is required"}});
    AffineIFS ifs;
    ifs.dim = root["dim"].get<int>();
    if (ifs.dim < 1) throw ConfigError({{Code::DimensionMismatch, "dim must be positive"}});
    if (ifs.dim > kMaxDim) throw ConfigError({{Code::DimensionTooLarge, "dim exceeds " + std::to_string(kMaxDim)}});
    const auto d = static_cast<std::size_t>(ifs.dim);
    if (!root.contains("maps") || !root["maps"].is_array()) {
        issues.push_back({Code::MissingField, "maps (array) is required"});
    } else {
        const auto& maps = root["maps"];
        if (maps.size() < 2) issues.push_back({Code::AlphabetTooSmall, "at least two maps are required, got " + std::to_string(maps.size())});
        for (std::size_t i = 0; i < maps.size(); ++i) {
            const std::string where = "maps[" + std::to_string(i) + "]";
            const auto& m = maps[i];
            if (!m.is_object() || !m.contains("A")) {
                issues.push_back({Code::MissingField, where + ".A is required"});
                continue;
            }
            std::vector<double> a, v;
            const bool ok_a = read_numbers(m["A"], d * d, a, where + ".A", issues);
            bool ok_v = true;
            if (m.contains("v")) ok_v = read_numbers(m["v"], d, v, where + ".v", issues);
            else v.assign(d, 0.0);
            if (!ok_a || !ok_v) continue;
            AffineMap map{to_matrix(a, ifs.dim), Eigen::Map<const Vector>(v.data(), ifs.dim)};
            check_invertible(map.A, where + ".A", issues);
            ifs.maps.push_back(std::move(map));
        }
    }
    if (root.contains("probs")) {
        std::vector<double> p;
        const std::size_t m = root.contains("maps") && root["maps"].is_array() ? root["maps"].size() : 0;
        if (read_numbers(root["probs"], m, p, "probs", issues)) {
            double sum = 0;
            bool neg = false;
            for (double x : p) {
                sum += x;
                neg = neg || x < 0;
            }
            if (neg) issues.push_back({Code::ProbsNotNormalized, "probs must be non-negative"});
            else if (std::abs(sum - 1.0) > 1e-12)
                issues.push_back({Code::ProbsNotNormalized, "probs sum to " + std::to_string(sum)});
            else ifs.probs = BernoulliMeasure{p};
        }
    }
    if (root.contains("Q")) {
        std::vector<double> q;
        if (read_numbers(root["Q"], d * d, q, "Q", issues)) ifs.Q = to_matrix(q, ifs.dim);
    }
    if (root.contains("soc_ball")) {
        const auto& b = root["soc_ball"];
        std::vector<double> c;
        if (!b.is_object() || !b.contains("center") || !b.contains("radius") || !b["radius"].is_number()) {
            issues.push_back({Code::MissingField, "soc_ball needs center and radius"});
        } else if (read_numbers(b["center"], d, c, "soc_ball.center", issues)) {
            ifs.soc_ball = Ball{Eigen::Map<const Vector>(c.data(), ifs.dim), b["radius"].get<double>()};
        }
    }
    if (!issues.empty()) throw ConfigError(issues);
    validate_system(ifs);
    return ifs;
}

AffineIFS load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({{Code::Syntax, "cannot open config file '" + path + "'"}});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_system(ss.str());
}

std::string system_to_json(const AffineIFS& ifs) {
    json root;
    root["dim"] = ifs.dim;
    json maps = json::array();
    for (const auto& m : ifs.maps) {
        json a = json::array(), v = json::array();
        for (int i = 0; i < ifs.dim; ++i)
            for (int j = 0; j < ifs.dim; ++j) a.push_back(m.A(i, j));
        for (int i = 0; i < ifs.dim; ++i) v.push_back(m.v(i));
        maps.push_back({{"A", a}, {"v", v}});
    }
    root["maps"] = maps;
    if (ifs.probs) root["probs"] = ifs.probs->probs;
    if (ifs.Q) {
        json q = json::array();
        for (int i = 0; i < ifs.dim; ++i)
            for (int j = 0; j < ifs.dim; ++j) q.push_back((*ifs.Q)(i, j));
        root["Q"] = q;
    }
    if (ifs.soc_ball) {
        json c = json::array();
        for (int i = 0; i < ifs.dim; ++i) c.push_back(ifs.soc_ball->center(i));
        root["soc_ball"] = {{"center", c}, {"radius", ifs.soc_ball->radius}};
    }
    return root.dump(2);
}

}  // namespace affdim
