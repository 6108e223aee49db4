#include "affdim/error.hpp"
#include "affdim/prox.hpp"
#include "affdim/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace affdim {

AffineIFS linear_system(const std::vector<Matrix>& mats) {
    if (mats.empty()) throw InvalidInput("empty matrix family");
    AffineIFS ifs;
    ifs.dim = static_cast<int>(mats.front().rows());
    for (const auto& A : mats) ifs.maps.push_back({A, Vector::Zero(ifs.dim)});
    return ifs;
}

namespace {

// Words of length 1..L in length-then-lexicographic order, at most cap of them.
std::vector<Word> short_words(int m, int L, std::size_t cap) {
    std::vector<Word> out;
    for (int len = 1; len <= L && out.size() < cap; ++len) {
        const std::size_t total = ipow(static_cast<std::size_t>(m), len);
        for (std::size_t i = 0; i < total && out.size() < cap; ++i) out.push_back(index_to_word(i, m, len));
    }
    return out;
}

std::vector<Matrix> lifted_generators(const AffineIFS& ifs, int k) {
    std::vector<Matrix> g;
    for (const auto& m : ifs.maps) g.push_back(exterior_power(m.A, k));
    return g;
}

Matrix product(const std::vector<Matrix>& gens, const Word& w) {
    Matrix P = gens[static_cast<std::size_t>(w[0])];
    for (std::size_t j = 1; j < w.size(); ++j) P = P * gens[static_cast<std::size_t>(w[j])];
    return P;
}

bool is_eigenvector(const Matrix& A, const Vector& v) {
    const double lam = v.dot(A * v);
    return (A * v - lam * v).norm() <= 1e-8 * std::max(1e-300, A.norm());
}

void add_candidates(const std::vector<Matrix>& gens, bool transpose, const char* kind, std::vector<InvariantCandidate>& out) {
    for (const auto& G0 : gens) {
        const Matrix G = transpose ? Matrix(G0.transpose()) : G0;
        Eigen::EigenSolver<Matrix> es(G, true);
        if (es.info() != Eigen::Success) continue;
        for (Eigen::Index i = 0; i < G.rows(); ++i) {
            const Eigen::VectorXcd vc = es.eigenvectors().col(i);
            if (vc.imag().norm() > 1e-10 * vc.norm()) continue;
            const Vector v = normalize_sign(vc.real());
            bool common = true;
            for (const auto& H0 : gens) {
                const Matrix H = transpose ? Matrix(H0.transpose()) : H0;
                common = common && is_eigenvector(H, v);
            }
            if (!common) continue;
            bool dup = false;
            for (const auto& c : out)
                if (c.kind == kind && proj_distance(c.vector, v) < 1e-8) dup = true;
            if (!dup) out.push_back({kind, v});
        }
    }
}

}  // namespace

IrreducibilityReport irreducibility_proxy(const AffineIFS& ifs, int k, int L, std::size_t word_cap) {
    if (k < 1 || k > ifs.dim) throw InvalidInput("exterior power degree out of range");
    if (L < 1) throw InvalidInput("word-length horizon must be >= 1");
    IrreducibilityReport rep;
    rep.k = k;
    rep.L = L;
    const auto gens = lifted_generators(ifs, k);
    const Eigen::Index D = gens.front().rows();
    rep.full_dim = static_cast<std::size_t>(D * D);
    std::vector<Vector> basis;
    for (const auto& w : short_words(ifs.size(), L, word_cap)) {
        const Matrix P = product(gens, w);
        Vector v = Eigen::Map<const Vector>(P.data(), D * D) / P.norm();
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > 1e-10) basis.push_back(v / n);
        if (basis.size() == rep.full_dim) break;
    }
    rep.span_dim = basis.size();
    rep.burnside_pass = rep.span_dim == rep.full_dim;
    rep.tag = rep.burnside_pass ? Tag::Certified : Tag::Heuristic;
    if (!rep.burnside_pass) {
        add_candidates(gens, false, "line", rep.candidates);
        add_candidates(gens, true, "hyperplane", rep.candidates);
    }
    return rep;
}

ProximalityIndex proximality_index_proxy(const AffineIFS& ifs, int k, int L, double tol, std::size_t word_cap) {
    if (k < 1 || k > ifs.dim) throw InvalidInput("exterior power degree out of range");
    ProximalityIndex out;
    out.k = k;
    const auto gens = lifted_generators(ifs, k);
    out.index = static_cast<int>(gens.front().rows());
    for (const auto& w : short_words(ifs.size(), L, word_cap)) {
        Matrix P = product(gens, w);
        P /= P.norm();
        for (int j = 0; j <= 20; ++j) {
            const Vector sv = singular_values(P);
            int rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv(i) > tol * sv(0)) ++rank;
            if (rank < out.index) {
                out.index = rank;
                out.witness = w;
                out.squarings = j;
            }
            if (out.index == 1) return out;
            P = P * P;
            const double n = P.norm();
            if (!(n > 0) || !std::isfinite(n)) break;
            P /= n;
        }
    }
    return out;
}

std::vector<int> default_k_set(const AffineIFS& ifs, const std::vector<double>& lambdas, int L) {
    std::vector<int> ks;
    for (int k = 1; k < ifs.dim; ++k) {
        if (static_cast<int>(lambdas.size()) > k && !(lambdas[static_cast<std::size_t>(k - 1)] > lambdas[static_cast<std::size_t>(k)] + 1e-9))
            continue;
        if (proximality_index_proxy(ifs, k, L).index == 1) ks.push_back(k);
    }
    return ks;
}

}  // namespace affdim
