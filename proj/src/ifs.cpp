#include "affdim/ifs.hpp"

#include "affdim/error.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace affdim {

std::string word_to_string(const Word& w, int alphabet_size) {
    std::string out;
    const bool compact = alphabet_size <= 9;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!compact && i > 0) out += ',';
        out += std::to_string(w[i] + 1);
    }
    return out;
}

Word parse_word(const std::string& text, int alphabet_size) {
    Word w;
    auto push = [&](long letter) {
        if (letter < 1 || letter > alphabet_size)
            throw InvalidInput("letter " + std::to_string(letter) + " outside alphabet 1.." + std::to_string(alphabet_size));
        w.push_back(static_cast<int>(letter - 1));
    };
    if (text.find(',') != std::string::npos || alphabet_size > 9) {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) throw InvalidInput("empty letter in word '" + text + "'");
            std::size_t pos = 0;
            long letter = 0;
            try {
                letter = std::stol(item, &pos);
            } catch (const std::exception&) {
                throw InvalidInput("bad letter '" + item + "'");
            }
            if (pos != item.size()) throw InvalidInput("bad letter '" + item + "'");
            push(letter);
        }
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw InvalidInput("bad letter '" + std::string(1, c) + "'");
            push(c - '0');
        }
    }
    if (w.empty()) throw InvalidInput("empty word");
    return w;
}

BernoulliMeasure BernoulliMeasure::uniform(std::size_t m) {
    return {std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

void BernoulliMeasure::validate(std::size_t alphabet_size) const {
    if (probs.size() != alphabet_size)
        throw InvalidInput("probability vector has " + std::to_string(probs.size()) + " entries, alphabet has " +
                           std::to_string(alphabet_size));
    double sum = 0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0) throw InvalidInput("probabilities must be finite and non-negative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("probabilities sum to " + std::to_string(sum));
}

bool BernoulliMeasure::nondegenerate() const {
    for (double p : probs)
        if (p <= 0) return false;
    return true;
}

double BernoulliMeasure::entropy() const {
    double h = 0;
    for (double p : probs)
        if (p > 0) h -= p * std::log(p);
    return h;
}

Matrix AffineIFS::norm_factor() const {
    if (!Q) return Matrix::Identity(dim, dim);
    Eigen::LLT<Matrix> llt(*Q);
    if (llt.info() != Eigen::Success) throw InvalidInput("norm form Q is not positive definite");
    return llt.matrixL();
}

Word AffineIFS::base_word(const Word& w) const {
    if (labels.empty()) return w;
    Word out;
    for (int letter : w) out.insert(out.end(), labels[letter].begin(), labels[letter].end());
    return out;
}

AffineMap AffineIFS::base_product(const Word& base) const {
    if (labels.empty()) return word_product(*this, base);
    AffineIFS plain;
    plain.dim = dim;
    plain.maps = base_maps;
    return word_product(plain, base);
}

AffineIFS lift(const AffineIFS& ifs, const std::vector<Word>& words) {
    if (words.empty()) throw InvalidInput("cannot lift to an empty word set");
    AffineIFS out;
    out.dim = ifs.dim;
    out.Q = ifs.Q;
    out.soc_ball = ifs.soc_ball;
    out.base_alphabet = ifs.base_size();
    out.base_maps = ifs.labels.empty() ? ifs.maps : ifs.base_maps;
    const std::size_t len = words.front().size();
    for (const auto& w : words) {
        if (w.size() != len || len == 0) throw InvalidInput("lifted words must share one positive length");
        out.maps.push_back(word_product(ifs, w));
        out.labels.push_back(ifs.base_word(w));
    }
    out.base_length = static_cast<int>(len) * ifs.base_length;
    return out;
}

AffineMap word_product(const AffineIFS& ifs, const Word& w) {
    if (w.empty()) throw InvalidInput("empty word");
    AffineMap acc{Matrix::Identity(ifs.dim, ifs.dim), Vector::Zero(ifs.dim)};
    for (int letter : w) {
        if (letter < 0 || letter >= ifs.size()) throw InvalidInput("letter outside alphabet");
        const auto& m = ifs.maps[letter];
        // (acc o T)(x) = acc.A (A x + v) + acc.v
        acc.v = acc.A * m.v + acc.v;
        acc.A = acc.A * m.A;
    }
    return acc;
}

Matrix linear_word_product(const AffineIFS& ifs, const Word& w) {
    if (w.empty()) throw InvalidInput("empty word");
    Matrix acc = Matrix::Identity(ifs.dim, ifs.dim);
    for (int letter : w) {
        if (letter < 0 || letter >= ifs.size()) throw InvalidInput("letter outside alphabet");
        acc = acc * ifs.maps[letter].A;
    }
    return acc;
}

Vector cartan_vector(const Matrix& A) {
    require_finite(A, "cartan_vector input");
    const int d = static_cast<int>(A.rows());
    Vector out = d <= kMaxDim ? Vector(log_singular_values(SmallMatrix(A))) : Vector(singular_values(A).array().log().matrix());
    if (!out.allFinite()) throw InvalidInput("cartan_vector of a singular matrix");
    return out;
}

ContractionCertificate contraction_certificate(const AffineIFS& ifs) {
    const Matrix L = ifs.norm_factor();
    ContractionCertificate cert;
    for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        const double n = q_operator_norm(ifs.maps[i].A, L);
        cert.norms.push_back(n);
        if (i == 0 || n > cert.tau) {
            cert.tau = n;
            cert.worst_index = i;
        }
    }
    if (cert.tau >= 1.0) throw NotContracting(cert.tau, cert.worst_index);
    return cert;
}

InvariantBall invariant_ball(const AffineIFS& ifs) {
    const auto cert = contraction_certificate(ifs);
    const Matrix L = ifs.norm_factor();
    double vmax = 0;
    for (const auto& m : ifs.maps) vmax = std::max(vmax, q_norm(m.v, L));
    InvariantBall out;
    out.ball.center = Vector::Zero(ifs.dim);
    out.ball.radius = vmax / (1.0 - cert.tau);
    out.tau = cert.tau;
    out.singleton_attractor = vmax == 0;
    return out;
}

}  // namespace affdim
