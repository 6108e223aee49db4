#include "affdim/thermo.hpp"

#include "affdim/error.hpp"
#include "affdim/parallel.hpp"
#include "affdim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace affdim {

double log_svf(const Matrix& A, double s) {
    if (!(s >= 0)) throw InvalidInput("singular value function needs s >= 0");
    const auto S = partial_sums(A);
    return log_svf_partial(S.data(), static_cast<int>(A.rows()), s);
}

double svf(const Matrix& A, double s) { return std::exp(log_svf(A, s)); }

bool is_multiplicative(const AffineIFS& ifs) {
    bool similarity = true;
    for (const auto& m : ifs.maps) {
        const Vector sv = singular_values(m.A);
        if (sv(0) > sv(sv.size() - 1) * (1 + 1e-12)) similarity = false;
    }
    if (similarity) return true;
    for (const auto& m : ifs.maps) {
        Matrix off = m.A;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() != 0) return false;
    }
    for (int a = 0; a < ifs.dim; ++a) {
        for (int b = a + 1; b < ifs.dim; ++b) {
            bool ge = true, le = true;
            for (const auto& m : ifs.maps) {
                const double x = std::abs(m.A(a, a)), y = std::abs(m.A(b, b));
                ge = ge && x >= y;
                le = le && x <= y;
            }
            if (!ge && !le) return false;
        }
    }
    return true;
}

namespace {

struct LseSlope {
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0;
    double wsum = 0;

    void add(double x, double g) {
        if (x <= max) {
            const double e = std::exp(x - max);
            sum += e;
            wsum += e * g;
        } else {
            const double scale = std::exp(max - x);
            sum = sum * scale + 1.0;
            wsum = wsum * scale + g;
            max = x;
        }
    }
    void merge(const LseSlope& o) {
        if (o.max == -std::numeric_limits<double>::infinity()) return;
        if (o.max <= max) {
            const double e = std::exp(o.max - max);
            sum += o.sum * e;
            wsum += o.wsum * e;
        } else {
            const double e = std::exp(max - o.max);
            sum = sum * e + o.sum;
            wsum = wsum * e + o.wsum;
            max = o.max;
        }
    }
};

LseSlope level_lse(const LevelTable& level, double s) {
    const std::size_t blocks = block_count(level.count);
    std::vector<LseSlope> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(level.count, lo + kBlock);
        LseSlope acc;
        for (std::size_t w = lo; w < hi; ++w) {
            const double* S = level.at(w);
            acc.add(log_svf_partial(S, level.d, s), log_svf_slope(S, level.d, s));
        }
        partial[b] = acc;
    });
    LseSlope total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

// Bracket [a, b] of the root of a decreasing function with f(a) >= 0 > f(b).
struct RootBracket {
    double a;
    double b;
};

template <class F>
RootBracket solve_decreasing(const F& f, double a, double b, double tol) {
    double ga = 0;
    double x = a;
    double fx = f(a, &ga);
    double gx = ga;
    double width_before = b - a;
    int since_check = 0;
    for (int it = 0; it < 400 && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        double cand = mid;
        if (gx < 0 && std::isfinite(gx) && std::isfinite(fx)) {
            cand = x - fx / gx;
            // Step slightly past the predicted root so both ends tighten.
            cand += (fx >= 0 ? 0.25 : -0.25) * tol;
        }
        if (++since_check >= 3) {
            if (b - a > 0.5 * width_before) cand = mid;
            width_before = b - a;
            since_check = 0;
        }
        if (!(cand > a && cand < b)) cand = mid;
        double g = 0;
        const double fc = f(cand, &g);
        if (fc >= 0) a = cand;
        else b = cand;
        x = cand;
        fx = fc;
        gx = g;
    }
    return {a, b};
}

// Finds b > a0 with f(b) < 0 by doubling; returns NaN if none below cap.
template <class F>
double find_negative(const F& f, double start, double cap) {
    for (double b = start; b <= cap; b *= 2) {
        if (f(b, nullptr) < 0) return b;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

PressureModel::PressureModel(const AffineIFS& ifs, const PressureOptions& options) : d_(ifs.dim) {
    tables_ = build_word_tables(ifs, options.budget);
    if (tables_.levels.size() < 2)
        throw InsufficientBudget("budget " + std::to_string(options.budget) + " does not reach word length 2 for " +
                                 std::to_string(ifs.size()) + " maps");
    exact_ = is_multiplicative(ifs);
    for (const auto& m : ifs.maps) letter_S_.push_back(partial_sums(m.A));
    const int m = ifs.size();
    defects_.resize(tables_.levels.size());
    parallel_for(tables_.levels.size(), [&](std::size_t i) {
        const int n = tables_.levels[i].n;
        CounterRng rng(options.seed, 0x5157ULL * 1000 + static_cast<std::uint64_t>(n));
        auto& out = defects_[i];
        out.reserve(options.pairs_per_level * static_cast<std::size_t>(d_));
        for (std::size_t p = 0; p < options.pairs_per_level; ++p) {
            const int lu = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const int lv = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            const auto& tu = tables_.levels[static_cast<std::size_t>(lu - 1)];
            const auto& tv = tables_.levels[static_cast<std::size_t>(lv - 1)];
            const std::size_t iu = rng.below(tu.count), iv = rng.below(tv.count);
            Word w = index_to_word(iu, m, lu);
            const Word wv = index_to_word(iv, m, lv);
            w.insert(w.end(), wv.begin(), wv.end());
            const auto S = partial_sums(linear_word_product(ifs, w));
            const double* Su = tu.at(iu);
            const double* Sv = tv.at(iv);
            for (int k = 0; k < d_; ++k) out.push_back(S[static_cast<std::size_t>(k)] - Su[k] - Sv[k]);
            // Determinants multiply exactly; remove rounding from the top partial sum.
            out.back() = 0;
        }
    });
}

double PressureModel::level_u(int i, double s, double* slope) const {
    const auto& level = tables_.levels[static_cast<std::size_t>(i)];
    const LseSlope t = level_lse(level, s);
    if (slope) *slope = t.wsum / t.sum / level.n;
    return (t.max + std::log(t.sum)) / level.n;
}

double PressureModel::level_log_c(int i, double s, double* slope) const {
    const auto& D = defects_[static_cast<std::size_t>(i)];
    double best = 0, best_slope = 0;
    for (std::size_t p = 0; p + static_cast<std::size_t>(d_) <= D.size(); p += static_cast<std::size_t>(d_)) {
        const double v = log_svf_partial(D.data() + p, d_, s);
        if (v < best) {
            best = v;
            best_slope = log_svf_slope(D.data() + p, d_, s);
        }
    }
    if (slope) *slope = best_slope;
    return best;
}

double PressureModel::exact_pressure(double s, double* slope) const {
    LseSlope t;
    for (const auto& S : letter_S_) t.add(log_svf_partial(S.data(), d_, s), log_svf_slope(S.data(), d_, s));
    if (slope) *slope = t.wsum / t.sum;
    return t.max + std::log(t.sum);
}

PressureEstimate PressureModel::evaluate(double s) const {
    if (!(s >= 0)) throw InvalidInput("pressure needs s >= 0");
    PressureEstimate est;
    est.s = s;
    est.exact = exact_;
    est.budget_limited = tables_.budget_limited;
    est.words = tables_.evaluated;
    est.hi = std::numeric_limits<double>::infinity();
    est.lo = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < level_count(); ++i) {
        PressureLevel lv;
        lv.n = tables_.levels[static_cast<std::size_t>(i)].n;
        lv.u = level_u(i, s);
        lv.log_c = level_log_c(i, s);
        lv.lower = lv.u + lv.log_c / lv.n;
        est.hi = std::min(est.hi, lv.u);
        est.lo = std::max(est.lo, lv.lower);
        est.levels.push_back(lv);
    }
    est.lo = std::min(est.lo, est.hi);
    if (exact_) {
        est.hi = est.lo = exact_pressure(s);
        est.hi_tag = est.lo_tag = Tag::Exact;
    }
    return est;
}

PressureEstimate pressure(const AffineIFS& ifs, double s, const PressureOptions& options) {
    return PressureModel(ifs, options).evaluate(s);
}

AffinityDimension affinity_dimension(const AffineIFS& ifs, double tol, const PressureOptions& options) {
    contraction_certificate(ifs);
    const PressureModel model(ifs, options);
    return affinity_dimension(model, tol);
}

AffinityDimension affinity_dimension(const PressureModel& model, double tol) {
    if (!(tol > 0)) throw InvalidInput("tolerance must be positive");
    AffinityDimension out;
    out.levels = model.level_count();
    out.words = model.tables().evaluated;
    const double cap = 1e4;
    if (model.exact()) {
        auto f = [&](double s, double* g) { return model.exact_pressure(s, g); };
        const double b = find_negative(f, 1.0, cap);
        if (std::isnan(b)) {
            out.diagnostic = "pressure stays non-negative up to s = 1e4";
            out.hi = std::numeric_limits<double>::infinity();
            return out;
        }
        const auto br = solve_decreasing(f, 0.0, b, tol);
        out.lo = br.a;
        out.hi = br.b;
        out.estimate = 0.5 * (br.a + br.b);
        out.lo_tag = out.hi_tag = Tag::Exact;
        out.exact = true;
        out.converged = true;
        return out;
    }
    double s_hi = std::numeric_limits<double>::infinity(), estimate = s_hi;
    std::vector<double> upper_b(static_cast<std::size_t>(model.level_count()), std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < model.level_count(); ++i) {
        auto f = [&](double s, double* g) { return model.level_u(i, s, g); };
        const double b = find_negative(f, 1.0, cap);
        if (std::isnan(b)) continue;
        const auto br = solve_decreasing(f, 0.0, b, tol);
        upper_b[static_cast<std::size_t>(i)] = br.b;
        if (br.b < s_hi) {
            s_hi = br.b;
            estimate = 0.5 * (br.a + br.b);
        }
    }
    if (!std::isfinite(s_hi)) {
        out.diagnostic = "no computed level has negative pressure below s = 1e4";
        out.hi = s_hi;
        return out;
    }
    double s_lo = 0;
    for (int i = 0; i < model.level_count(); ++i) {
        const double b = upper_b[static_cast<std::size_t>(i)];
        if (std::isnan(b)) continue;
        auto f = [&](double s, double* g) {
            double gu = 0, gc = 0;
            const double n = model.tables().levels[static_cast<std::size_t>(i)].n;
            const double v = model.level_u(i, s, g ? &gu : nullptr) + model.level_log_c(i, s, g ? &gc : nullptr) / n;
            if (g) *g = gu + gc / n;
            return v;
        };
        const auto br = solve_decreasing(f, 0.0, b, tol);
        s_lo = std::max(s_lo, br.a);
    }
    out.lo = std::min(s_lo, s_hi);
    out.hi = s_hi;
    out.estimate = estimate;
    out.converged = out.hi - out.lo <= tol;
    if (!out.converged)
        out.diagnostic = "bracket not closed: the heuristic lower side is limited by the sampled quasi-multiplicativity "
                         "constant at the deepest affordable level";
    return out;
}

std::vector<Word> all_words(int alphabet, int n) {
    const std::size_t count = ipow(static_cast<std::size_t>(alphabet), n);
    std::vector<Word> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(index_to_word(i, alphabet, n));
    return out;
}

namespace {

const LevelTable& table_for_level(const WordTables& t, int n) {
    if (static_cast<int>(t.levels.size()) < n)
        throw InsufficientBudget("budget does not reach word length " + std::to_string(n));
    return t.levels[static_cast<std::size_t>(n - 1)];
}

std::vector<double> log_word_probs(const LevelTable& level, const std::vector<double>& letter_probs, int alphabet) {
    std::vector<double> lp(letter_probs.size());
    for (std::size_t i = 0; i < lp.size(); ++i)
        lp[i] = letter_probs[i] > 0 ? std::log(letter_probs[i]) : -std::numeric_limits<double>::infinity();
    std::vector<double> out(level.count);
    parallel_for(block_count(level.count), [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(level.count, lo + kBlock);
        for (std::size_t w = lo; w < hi; ++w) {
            std::size_t idx = w;
            double acc = 0;
            for (int j = 0; j < level.n; ++j) {
                acc += lp[idx % static_cast<std::size_t>(alphabet)];
                idx /= static_cast<std::size_t>(alphabet);
            }
            out[w] = acc;
        }
    });
    return out;
}

// Per-k expectations sum_w p_w S_k(w), reduced in block order.
std::vector<double> expected_partials(const LevelTable& level, const std::vector<double>& logp) {
    const std::size_t blocks = block_count(level.count);
    const int d = level.d;
    std::vector<double> partial(blocks * static_cast<std::size_t>(d), 0.0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(level.count, lo + kBlock);
        double* acc = partial.data() + b * static_cast<std::size_t>(d);
        for (std::size_t w = lo; w < hi; ++w) {
            if (logp[w] == -std::numeric_limits<double>::infinity()) continue;
            const double p = std::exp(logp[w]);
            const double* S = level.at(w);
            for (int k = 0; k < d; ++k) acc[k] += p * S[k];
        }
    });
    std::vector<double> total(static_cast<std::size_t>(d), 0.0);
    for (std::size_t b = 0; b < blocks; ++b)
        for (int k = 0; k < d; ++k) total[static_cast<std::size_t>(k)] += partial[b * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
    return total;
}

int sample_letter(CounterRng& rng, const std::vector<double>& cdf) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    int idx = static_cast<int>(it - cdf.begin());
    if (idx >= static_cast<int>(cdf.size())) idx = static_cast<int>(cdf.size()) - 1;
    return idx;
}

std::vector<double> make_cdf(const std::vector<double>& p) {
    std::vector<double> cdf(p.size());
    double acc = 0;
    for (std::size_t i = 0; i < p.size(); ++i) cdf[i] = (acc += p[i]);
    // Letters with zero probability must never be drawn; pin the total to the last positive entry.
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i] > 0) {
            for (std::size_t j = i; j < p.size(); ++j) cdf[j] = 2.0;
            break;
        }
    }
    return cdf;
}

LyapunovSpectrum exact_spectrum(const AffineIFS& ifs, const BernoulliMeasure& measure, const LyapunovOptions& options) {
    const WordTables tables = build_word_tables(ifs, options.budget);
    if (tables.levels.empty()) throw InsufficientBudget("budget does not reach word length 1");
    const int d = ifs.dim;
    const int m = ifs.size();
    LyapunovSpectrum out;
    out.mode = LyapunovMode::ExactLevels;
    out.entropy = measure.entropy();
    out.partial_sums.assign(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    out.partial_sums_lower.assign(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
    const auto cdf = make_cdf(measure.probs);
    for (const auto& level : tables.levels) {
        const auto logp = log_word_probs(level, measure.probs, m);
        auto E = expected_partials(level, logp);
        LyapunovLevel lv;
        lv.n = level.n;
        for (double& e : E) lv.partial.push_back(e / level.n);
        for (int k = 0; k < d; ++k)
            out.partial_sums[static_cast<std::size_t>(k)] = std::min(out.partial_sums[static_cast<std::size_t>(k)], lv.partial[static_cast<std::size_t>(k)]);
        // Lower side: sampled super-multiplicativity defects for pairs of measure-typical words.
        CounterRng rng(options.seed, 0x4c59ULL * 1000 + static_cast<std::uint64_t>(level.n));
        std::vector<double> worst(static_cast<std::size_t>(d), 0.0);
        for (std::size_t p = 0; p < options.pairs_per_level; ++p) {
            Word u, v;
            for (int j = 0; j < level.n; ++j) u.push_back(sample_letter(rng, cdf));
            for (int j = 0; j < level.n; ++j) v.push_back(sample_letter(rng, cdf));
            const double* Su = level.at(word_to_index(u, m));
            const double* Sv = level.at(word_to_index(v, m));
            Word uv = u;
            uv.insert(uv.end(), v.begin(), v.end());
            const auto S = partial_sums(linear_word_product(ifs, uv));
            for (int k = 0; k < d - 1; ++k)
                worst[static_cast<std::size_t>(k)] = std::min(worst[static_cast<std::size_t>(k)], S[static_cast<std::size_t>(k)] - Su[k] - Sv[k]);
        }
        for (int k = 0; k < d; ++k) {
            const double lo = (E[static_cast<std::size_t>(k)] + worst[static_cast<std::size_t>(k)]) / level.n;
            out.partial_sums_lower[static_cast<std::size_t>(k)] = std::max(out.partial_sums_lower[static_cast<std::size_t>(k)], lo);
        }
        out.levels.push_back(std::move(lv));
    }
    // The determinant term is additive, so level 1 is exact.
    out.partial_sums[static_cast<std::size_t>(d - 1)] = out.levels.front().partial[static_cast<std::size_t>(d - 1)];
    out.partial_sums_lower[static_cast<std::size_t>(d - 1)] = out.partial_sums[static_cast<std::size_t>(d - 1)];
    for (int k = 0; k < d; ++k)
        out.partial_sums_lower[static_cast<std::size_t>(k)] =
            std::min(out.partial_sums_lower[static_cast<std::size_t>(k)], out.partial_sums[static_cast<std::size_t>(k)]);
    double prev = 0;
    for (int k = 0; k < d; ++k) {
        out.lambdas.push_back(out.partial_sums[static_cast<std::size_t>(k)] - prev);
        prev = out.partial_sums[static_cast<std::size_t>(k)];
    }
    out.errors.assign(static_cast<std::size_t>(d), 0.0);
    if (out.levels.size() >= 2) {
        const auto& a = out.levels[out.levels.size() - 1].partial;
        const auto& b = out.levels[out.levels.size() - 2].partial;
        double pa = 0, pb = 0;
        for (int k = 0; k < d; ++k) {
            const double la = a[static_cast<std::size_t>(k)] - pa, lb = b[static_cast<std::size_t>(k)] - pb;
            out.errors[static_cast<std::size_t>(k)] = std::abs(la - lb);
            pa = a[static_cast<std::size_t>(k)];
            pb = b[static_cast<std::size_t>(k)];
        }
    }
    out.tag = is_multiplicative(ifs) ? Tag::Exact : Tag::Heuristic;
    return out;
}

LyapunovSpectrum monte_carlo_spectrum(const AffineIFS& ifs, const BernoulliMeasure& measure, const LyapunovOptions& options) {
    const int d = ifs.dim;
    const std::size_t N = std::max<std::size_t>(2, options.trajectories);
    const std::size_t L = std::max<std::size_t>(1, options.steps);
    const auto cdf = make_cdf(measure.probs);
    std::vector<SmallMatrix> mats;
    for (const auto& m : ifs.maps) mats.emplace_back(m.A);
    std::vector<double> per(N * static_cast<std::size_t>(d), 0.0);
    parallel_for(N, [&](std::size_t t) {
        CounterRng rng(options.seed, 0x4d43ULL * 1000000 + t);
        SmallMatrix Q = SmallMatrix::Identity(d, d);
        std::vector<double> acc(static_cast<std::size_t>(d), 0.0);
        for (std::size_t step = 0; step < L; ++step) {
            const SmallMatrix M = mats[static_cast<std::size_t>(sample_letter(rng, cdf))] * Q;
            Eigen::HouseholderQR<SmallMatrix> qr(M);
            const SmallMatrix R = qr.matrixQR().template triangularView<Eigen::Upper>();
            Q = qr.householderQ() * SmallMatrix::Identity(d, d);
            for (int k = 0; k < d; ++k) acc[static_cast<std::size_t>(k)] += std::log(std::abs(R(k, k)));
        }
        // Partial sums per trajectory: log-volume growth of the first k frame vectors.
        double run = 0;
        std::vector<double> sorted = acc;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        for (int k = 0; k < d; ++k) {
            run += sorted[static_cast<std::size_t>(k)];
            per[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] = run / static_cast<double>(L);
        }
    });
    LyapunovSpectrum out;
    out.mode = LyapunovMode::MonteCarlo;
    out.entropy = measure.entropy();
    out.tag = Tag::Sampled;
    std::vector<double> lam_mean(static_cast<std::size_t>(d), 0.0), lam_var(static_cast<std::size_t>(d), 0.0);
    std::vector<double> ps_mean(static_cast<std::size_t>(d), 0.0), ps_var(static_cast<std::size_t>(d), 0.0);
    auto lambda_of = [&](std::size_t t, int k) {
        const double cur = per[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)];
        return k == 0 ? cur : cur - per[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(k - 1)];
    };
    for (std::size_t t = 0; t < N; ++t)
        for (int k = 0; k < d; ++k) {
            lam_mean[static_cast<std::size_t>(k)] += lambda_of(t, k) / static_cast<double>(N);
            ps_mean[static_cast<std::size_t>(k)] += per[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] / static_cast<double>(N);
        }
    for (std::size_t t = 0; t < N; ++t)
        for (int k = 0; k < d; ++k) {
            const double a = lambda_of(t, k) - lam_mean[static_cast<std::size_t>(k)];
            const double b = per[t * static_cast<std::size_t>(d) + static_cast<std::size_t>(k)] - ps_mean[static_cast<std::size_t>(k)];
            lam_var[static_cast<std::size_t>(k)] += a * a / static_cast<double>(N - 1);
            ps_var[static_cast<std::size_t>(k)] += b * b / static_cast<double>(N - 1);
        }
    for (int k = 0; k < d; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        out.lambdas.push_back(lam_mean[kk]);
        out.errors.push_back(std::sqrt(lam_var[kk] / static_cast<double>(N)));
        out.partial_sums.push_back(ps_mean[kk]);
        out.partial_sums_lower.push_back(ps_mean[kk] - 2.0 * std::sqrt(ps_var[kk] / static_cast<double>(N)));
    }
    return out;
}

// First crossing of h + Lambda_s through zero, scanning the linear pieces.
double first_root(double h, const std::vector<double>& P) {
    const int d = static_cast<int>(P.size());
    if (h <= 0) return 0;
    double prev = 0;
    for (int k = 0; k < d; ++k) {
        const double cur = P[static_cast<std::size_t>(k)];
        if (h + cur <= 0) {
            const double slope = cur - prev;
            return k + (h + prev) / (-slope);
        }
        prev = cur;
    }
    if (P.back() >= 0) return std::numeric_limits<double>::infinity();
    return -h * d / P.back();
}

}  // namespace

LyapunovSpectrum lyapunov_exponents(const AffineIFS& ifs, const BernoulliMeasure& measure, const LyapunovOptions& options) {
    measure.validate(static_cast<std::size_t>(ifs.size()));
    if (options.mode == LyapunovMode::MonteCarlo) return monte_carlo_spectrum(ifs, measure, options);
    return exact_spectrum(ifs, measure, options);
}

double lyapunov_dimension(double entropy, const std::vector<double>& partial_sums) {
    if (partial_sums.empty()) throw InvalidSpectrum("empty spectrum");
    double prev = 0;
    for (std::size_t k = 0; k < partial_sums.size(); ++k) {
        if (!(partial_sums[k] - prev < 0))
            throw InvalidSpectrum("Lyapunov exponent " + std::to_string(k + 1) + " is not negative");
        prev = partial_sums[k];
    }
    if (entropy <= 0) return 0;
    return first_root(entropy, partial_sums);
}

double lyapunov_dimension_from_exponents(double entropy, const std::vector<double>& lambdas) {
    std::vector<double> P;
    double acc = 0;
    for (double l : lambdas) P.push_back(acc += l);
    return lyapunov_dimension(entropy, P);
}

LyapunovDimension lyapunov_dimension(const AffineIFS& ifs, const BernoulliMeasure& measure, const LyapunovOptions& options) {
    LyapunovDimension out;
    out.spectrum = lyapunov_exponents(ifs, measure, options);
    out.value = lyapunov_dimension(out.spectrum.entropy, out.spectrum.partial_sums);
    out.lower = std::min(out.value, first_root(out.spectrum.entropy, out.spectrum.partial_sums_lower));
    out.tag = out.spectrum.tag;
    return out;
}

BernoulliMeasure gibbs_weights(const AffineIFS& ifs, double s, int n, std::size_t budget) {
    if (!(s >= 0)) throw InvalidInput("Gibbs weights need s >= 0");
    if (n < 1) throw InvalidInput("Gibbs level must be >= 1");
    const WordTables t = build_word_tables(ifs, budget, n);
    const LevelTable& level = table_for_level(t, n);
    const LseSlope z = level_lse(level, s);
    const double logZ = z.max + std::log(z.sum);
    BernoulliMeasure out;
    out.probs.resize(level.count);
    for (std::size_t w = 0; w < level.count; ++w) out.probs[w] = std::exp(log_svf_partial(level.at(w), level.d, s) - logZ);
    // Renormalise so the weights sum to one in floating point.
    double sum = 0;
    for (double p : out.probs) sum += p;
    for (double& p : out.probs) p /= sum;
    return out;
}

double level_pressure(const AffineIFS& ifs, double s, int n) {
    const WordTables t = build_word_tables(ifs, std::numeric_limits<std::size_t>::max(), n);
    const LevelTable& level = table_for_level(t, n);
    const LseSlope l = level_lse(level, s);
    return (l.max + std::log(l.sum)) / n;
}

double level_variational_value(const AffineIFS& ifs, const std::vector<double>& q, int n, double s) {
    const WordTables t = build_word_tables(ifs, std::numeric_limits<std::size_t>::max(), n);
    const LevelTable& level = table_for_level(t, n);
    if (q.size() != level.count) throw InvalidInput("measure size does not match the number of words");
    double acc = 0;
    for (std::size_t w = 0; w < level.count; ++w) {
        if (q[w] <= 0) continue;
        acc += q[w] * (log_svf_partial(level.at(w), level.d, s) - std::log(q[w]));
    }
    return acc / n;
}

std::string pressure_curve_csv(const PressureModel& model, const std::vector<double>& grid) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "s,n,u_n,l_n,hi,lo\n";
    for (double s : grid) {
        const auto est = model.evaluate(s);
        for (const auto& lv : est.levels)
            os << s << ',' << lv.n << ',' << lv.u << ',' << lv.lower << ',' << est.hi << ',' << est.lo << '\n';
    }
    return os.str();
}

}  // namespace affdim
