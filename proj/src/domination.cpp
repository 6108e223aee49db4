#include "affdim/error.hpp"
#include "affdim/parallel.hpp"
#include "affdim/prox.hpp"
#include "affdim/rng.hpp"
#include "affdim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace affdim {

const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Dominated: return "DOMINATED";
    case Verdict::NotDominated: return "NOT_DOMINATED";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

namespace {

double level_max_log_ratio(const LevelTable& level, int k) {
    const std::size_t blocks = block_count(level.count);
    std::vector<double> part(blocks, -std::numeric_limits<double>::infinity());
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(level.count, lo + kBlock);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t w = lo; w < hi; ++w) {
            const double* S = level.at(w);
            const double ls_k = S[k - 1] - (k >= 2 ? S[k - 2] : 0.0);
            const double ls_k1 = S[k] - S[k - 1];
            best = std::max(best, ls_k1 - ls_k);
        }
        part[b] = best;
    });
    return *std::max_element(part.begin(), part.end());
}

Vector top_left_singular(const Matrix& A) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU);
    return normalize_sign(svd.matrixU().col(0));
}

double distance_to_set(const Vector& x, const std::vector<Vector>& set) {
    double best = 1.0;
    for (const auto& p : set) best = std::min(best, proj_distance(x, p));
    return best;
}

ConeWitness search_cone(const AffineIFS& ifs, int k, std::uint64_t seed) {
    ConeWitness cw;
    std::vector<Matrix> gens;
    for (const auto& m : ifs.maps) gens.push_back(exterior_power(m.A, k));
    const int m = ifs.size();
    // Attracting directions of moderately long words span the candidate cone core.
    const int len = 6;
    const std::size_t total = ipow(static_cast<std::size_t>(m), len);
    CounterRng rng(seed, 0x434fULL);
    std::vector<Vector> centers;
    const std::size_t want = std::min<std::size_t>(total, 64);
    for (std::size_t i = 0; i < want; ++i) {
        const Word w = index_to_word(total <= 64 ? i : rng.below(total), m, len);
        Matrix P = gens[static_cast<std::size_t>(w[0])];
        for (std::size_t j = 1; j < w.size(); ++j) P = P * gens[static_cast<std::size_t>(w[j])];
        centers.push_back(top_left_singular(P));
    }
    cw.centers = centers.size();
    double best = std::numeric_limits<double>::infinity();
    for (double rho : {0.05, 0.1, 0.2, 0.4}) {
        double worst = 0;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            for (int t = 0; t < 8; ++t) {
                Vector dir(centers[c].size());
                for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = rng.normal();
                dir -= dir.dot(centers[c]) * centers[c];
                if (dir.norm() == 0) continue;
                dir.normalize();
                const Vector x = std::cos(std::asin(rho)) * centers[c] + rho * dir;
                for (const auto& g : gens) worst = std::max(worst, distance_to_set(g * x, centers) / rho);
            }
            for (const auto& g : gens) worst = std::max(worst, distance_to_set(g * centers[c], centers) / rho);
        }
        if (worst < best) {
            best = worst;
            cw.radius = rho;
        }
    }
    cw.contraction = best;
    cw.found = best < 1.0;
    return cw;
}

}  // namespace

DominationReport domination_test(const AffineIFS& ifs, int k, const DominationOptions& options) {
    const int d = ifs.dim;
    if (k < 1 || k > d - 1) throw InvalidInput("domination index k must lie in [1, d-1]");
    const WordTables tables = build_word_tables(ifs, options.budget, options.n_max);
    if (tables.levels.size() < 2) throw InsufficientBudget("domination test needs at least two word lengths");
    DominationReport rep;
    rep.k = k;
    for (const auto& level : tables.levels) {
        rep.ns.push_back(level.n);
        rep.log_m.push_back(level_max_log_ratio(level, k));
    }
    const std::size_t N = rep.ns.size();
    const std::size_t start = std::min(N / 2, N - 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(N - start);
    for (std::size_t i = start; i < N; ++i) {
        sx += rep.ns[i];
        sy += rep.log_m[i];
        sxx += static_cast<double>(rep.ns[i]) * rep.ns[i];
        sxy += rep.ns[i] * rep.log_m[i];
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / cnt;
    double res = 0;
    for (std::size_t i = start; i < N; ++i) res = std::max(res, std::abs(rep.log_m[i] - (icpt + slope * rep.ns[i])));
    rep.fit_residual = res;
    rep.rate = -slope;
    rep.n0 = rep.ns[start];
    const double worst = *std::max_element(rep.log_m.begin() + static_cast<std::ptrdiff_t>(start), rep.log_m.end());
    if (worst >= -1e-9) {
        rep.verdict = Verdict::NotDominated;
        rep.reason = "some word of a trailing length has sigma_{k+1} = sigma_k";
    } else if (rep.rate <= options.margin) {
        rep.verdict = Verdict::NotDominated;
        rep.reason = "no exponential decay of the singular value ratio";
    } else {
        rep.epsilon_hat = 1.0 - std::exp(-rep.rate / 2);
        bool ok = true;
        for (std::size_t i = start; i < N; ++i) ok = ok && rep.log_m[i] <= rep.ns[i] * std::log1p(-rep.epsilon_hat);
        if (ok) {
            rep.verdict = Verdict::Dominated;
            rep.reason = "max ratio decays exponentially on all trailing levels";
        } else {
            rep.verdict = Verdict::Inconclusive;
            rep.reason = "decay rate positive but trailing levels exceed the fitted envelope";
        }
    }
    if (options.cone_witness) rep.cone = search_cone(ifs, k, options.seed);
    return rep;
}

}  // namespace affdim
