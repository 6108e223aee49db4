#include "affdim/spectrum.hpp"

#include "affdim/error.hpp"
#include "affdim/parallel.hpp"

#include <cmath>
#include <limits>

namespace affdim {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) return std::numeric_limits<std::size_t>::max();
        r *= base;
    }
    return r;
}

Word index_to_word(std::size_t index, int alphabet, int n) {
    Word w(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(alphabet));
        index /= static_cast<std::size_t>(alphabet);
    }
    return w;
}

std::size_t word_to_index(const Word& w, int alphabet) {
    std::size_t idx = 0;
    for (int letter : w) idx = idx * static_cast<std::size_t>(alphabet) + static_cast<std::size_t>(letter);
    return idx;
}

std::size_t block_count(std::size_t count) { return (count + kBlock - 1) / kBlock; }

double ordered_sum(std::size_t count, const std::function<double(std::size_t)>& f) {
    const std::size_t blocks = block_count(count);
    std::vector<double> partial(blocks, 0.0);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock, hi = std::min(count, lo + kBlock);
        double acc = 0;
        for (std::size_t w = lo; w < hi; ++w) acc += f(w);
        partial[b] = acc;
    });
    double total = 0;
    for (double p : partial) total += p;
    return total;
}

std::vector<double> partial_sums(const Matrix& A) {
    const SmallMatrix M = A;
    const SmallVector ls = log_singular_values(M);
    std::vector<double> out(static_cast<std::size_t>(ls.size()));
    double acc = 0;
    for (Eigen::Index k = 0; k < ls.size(); ++k) {
        acc += ls(k);
        out[static_cast<std::size_t>(k)] = acc;
    }
    out.back() = log_abs_det(A);
    return out;
}

double log_svf_partial(const double* S, int d, double s) {
    if (s >= d) return s / d * S[d - 1];
    const int k = static_cast<int>(std::floor(s));
    const double frac = s - k;
    const double lo = k == 0 ? 0.0 : S[k - 1];
    if (frac == 0) return lo;
    return lo + frac * (S[k] - lo);
}

double log_svf_slope(const double* S, int d, double s) {
    if (s >= d) return S[d - 1] / d;
    const int k = static_cast<int>(std::floor(s));
    const double lo = k == 0 ? 0.0 : S[k - 1];
    return S[k] - lo;
}

namespace {

// Writes partial sums for all words sharing one prefix, suffixes enumerated depth-first.
void fill_block(const std::vector<SmallMatrix>& mats, const std::vector<double>& logdet, const Word& prefix,
                int suffix_len, double* out, int d) {
    const int m = static_cast<int>(mats.size());
    SmallMatrix base = SmallMatrix::Identity(d, d);
    double base_det = 0;
    for (int letter : prefix) {
        base = base * mats[static_cast<std::size_t>(letter)];
        base_det += logdet[static_cast<std::size_t>(letter)];
    }
    if (suffix_len == 0) {
        const SmallVector ls = log_singular_values(base);
        double acc = 0;
        for (int k = 0; k < d - 1; ++k) out[k] = (acc += ls(k));
        out[d - 1] = base_det;
        return;
    }
    std::vector<SmallMatrix> stack(static_cast<std::size_t>(suffix_len) + 1);
    std::vector<double> dets(static_cast<std::size_t>(suffix_len) + 1);
    std::vector<int> digit(static_cast<std::size_t>(suffix_len), 0);
    stack[0] = base;
    dets[0] = base_det;
    for (int i = 1; i <= suffix_len; ++i) {
        stack[i] = stack[i - 1] * mats[0];
        dets[i] = dets[i - 1] + logdet[0];
    }
    std::size_t w = 0;
    while (true) {
        const SmallVector ls = log_singular_values(stack[suffix_len]);
        double* row = out + w * static_cast<std::size_t>(d);
        double acc = 0;
        for (int k = 0; k < d - 1; ++k) row[k] = (acc += ls(k));
        row[d - 1] = dets[suffix_len];
        ++w;
        int pos = suffix_len - 1;
        while (pos >= 0 && digit[pos] == m - 1) --pos;
        if (pos < 0) break;
        ++digit[pos];
        for (int j = pos; j < suffix_len; ++j) {
            if (j > pos) digit[j] = 0;
            stack[j + 1] = stack[j] * mats[static_cast<std::size_t>(digit[j])];
            dets[j + 1] = dets[j] + logdet[static_cast<std::size_t>(digit[j])];
        }
    }
}

}  // namespace

WordTables build_word_tables(const AffineIFS& ifs, std::size_t budget, int max_level) {
    WordTables t;
    t.d = ifs.dim;
    t.alphabet = ifs.size();
    const int d = ifs.dim;
    const std::size_t m = static_cast<std::size_t>(ifs.size());
    std::vector<SmallMatrix> mats;
    std::vector<double> logdet;
    for (const auto& map : ifs.maps) {
        mats.emplace_back(map.A);
        logdet.push_back(log_abs_det(map.A));
    }
    // Suffix depth per block: the smallest p with m^p >= 1024.
    int p0 = 1;
    while (m > 1 && ipow(m, p0) < 1024) ++p0;
    for (int n = 1; n <= max_level; ++n) {
        const std::size_t count = ipow(m, n);
        if (count == std::numeric_limits<std::size_t>::max() || t.evaluated + count > budget) {
            t.budget_limited = true;
            break;
        }
        LevelTable level;
        level.n = n;
        level.d = d;
        level.count = count;
        level.S.assign(count * static_cast<std::size_t>(d), 0.0);
        const int p = std::min(n, p0);
        const std::size_t per = ipow(m, p);
        const std::size_t prefixes = count / per;
        parallel_for(prefixes, [&](std::size_t b) {
            const Word prefix = index_to_word(b, static_cast<int>(m), n - p);
            fill_block(mats, logdet, prefix, p, level.S.data() + b * per * static_cast<std::size_t>(d), d);
        });
        t.evaluated += count;
        t.levels.push_back(std::move(level));
    }
    return t;
}

}  // namespace affdim
