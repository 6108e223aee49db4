#include "affdim/error.hpp"
#include "affdim/extract.hpp"
#include "affdim/spectrum.hpp"

#include <algorithm>
#include <limits>

namespace affdim {

namespace {

// Words of length 1..max_len in length-then-lexicographic order.
template <class F>
bool for_short_words(int m, int max_len, const F& visit) {
    for (int len = 1; len <= max_len; ++len) {
        const std::size_t total = ipow(static_cast<std::size_t>(m), len);
        for (std::size_t i = 0; i < total; ++i)
            if (visit(index_to_word(i, m, len))) return true;
    }
    return false;
}

}  // namespace

SuffixWitness find_separating_suffix(const AffineIFS& ifs, int max_length, int fixed_point_depth) {
    if (!ifs.soc_ball) throw InvalidInput("a separating suffix needs an open ball U (soc_ball)");
    const Ball& U = *ifs.soc_ball;
    if (U.center.size() != ifs.dim || !(U.radius > 0)) throw InvalidInput("soc_ball has the wrong dimension or radius");
    const Matrix L = ifs.norm_factor();
    const int m = ifs.base_size();
    const int d = ifs.dim;

    SuffixWitness out;
    out.kappa = 0;
    for_short_words(m, fixed_point_depth, [&](const Word& w) {
        const AffineMap T = ifs.base_product(w);
        const Matrix IA = Matrix::Identity(d, d) - T.A;
        Eigen::FullPivLU<Matrix> lu(IA);
        if (!lu.isInvertible()) return false;
        const Vector x = lu.solve(T.v);
        const double dist = q_norm(x - U.center, L);
        if (U.radius - dist > out.kappa) {
            out.x0 = x;
            out.x0_word = w;
            out.kappa = U.radius - dist;
        }
        return false;
    });
    if (!(out.kappa > 0)) throw NotFound("no word fixed point of length <= " + std::to_string(fixed_point_depth) + " lies inside U");

    const bool found = for_short_words(m, max_length, [&](const Word& w) {
        const AffineMap T = ifs.base_product(w);
        const double offset = q_norm(T.apply(U.center) - out.x0, L);
        const double radius = q_operator_norm(T.A, L) * U.radius;
        if (offset + radius < out.kappa) {
            out.suffix = w;
            out.image_offset = offset;
            out.image_radius = radius;
            out.soc_margin = U.radius - q_norm(T.apply(U.center) - U.center, L) - radius;
            return true;
        }
        return false;
    });
    if (!found) throw NotFound("no suffix of length <= " + std::to_string(max_length) + " maps U into the ball around x0");

    // The open set condition data itself: images of U under the letters.
    std::vector<Vector> centers;
    std::vector<double> radii;
    out.soc_images_inside = true;
    for (int i = 0; i < m; ++i) {
        const AffineMap T = ifs.base_product(Word{i});
        centers.push_back(T.apply(U.center));
        radii.push_back(q_operator_norm(T.A, L) * U.radius);
        if (q_norm(centers.back() - U.center, L) + radii.back() > U.radius * (1 + 1e-12)) out.soc_images_inside = false;
    }
    out.soc_images_disjoint = true;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (q_norm(centers[static_cast<std::size_t>(i)] - centers[static_cast<std::size_t>(j)], L) <
                radii[static_cast<std::size_t>(i)] + radii[static_cast<std::size_t>(j)] * (1 - 1e-12))
                out.soc_images_disjoint = false;
    return out;
}

SeparationCertificate strong_separation_certificate(const AffineIFS& ifs, const std::vector<Word>& J, const Ball& ball) {
    if (ball.center.size() != ifs.dim) throw InvalidInput("ball has the wrong dimension");
    const Matrix L = ifs.norm_factor();
    std::vector<Vector> centers;
    std::vector<double> radii;
    SeparationCertificate out;
    out.images_inside = true;
    for (const auto& w : J) {
        const AffineMap T = word_product(ifs, w);
        centers.push_back(T.apply(ball.center));
        radii.push_back(q_operator_norm(T.A, L) * ball.radius);
        if (q_norm(centers.back() - ball.center, L) + radii.back() > ball.radius * (1 + 1e-12)) out.images_inside = false;
    }
    out.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < J.size(); ++i)
        for (std::size_t j = i + 1; j < J.size(); ++j)
            out.min_gap = std::min(out.min_gap, q_norm(centers[i] - centers[j], L) - radii[i] - radii[j]);
    out.pass = out.min_gap > 0;
    out.label = out.pass ? "CERTIFIED" : "INCONCLUSIVE";
    return out;
}

}  // namespace affdim
