#pragma once

#include "affdim/ifs.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace affdim {

// Partial sums S_k(A_w) = log sigma_1 + ... + log sigma_k for every word of one
// length, words indexed lexicographically (first letter most significant).
struct LevelTable {
    int n = 0;
    int d = 0;
    std::size_t count = 0;
    std::vector<double> S;  // count * d

    const double* at(std::size_t w) const { return S.data() + w * static_cast<std::size_t>(d); }
};

struct WordTables {
    int d = 0;
    int alphabet = 0;
    std::vector<LevelTable> levels;  // levels[i].n == i + 1
    std::size_t evaluated = 0;
    // True when enumeration stopped because the next level exceeded the budget.
    bool budget_limited = false;
};

// Enumerates levels 1, 2, ... while the cumulative word count stays within budget.
WordTables build_word_tables(const AffineIFS& ifs, std::size_t budget, int max_level = 64);

// Partial sums for a single matrix.
std::vector<double> partial_sums(const Matrix& A);

// log phi^s from partial sums; s >= d uses (s/d) S_d.
double log_svf_partial(const double* S, int d, double s);
// d/ds of log_svf_partial (right derivative at integers).
double log_svf_slope(const double* S, int d, double s);

Word index_to_word(std::size_t index, int alphabet, int n);
std::size_t word_to_index(const Word& w, int alphabet);
std::size_t ipow(std::size_t base, int exp);

// Fixed-size blocks used by every reduction over a level, so the reduction
// order is independent of the worker count.
constexpr std::size_t kBlock = 4096;
std::size_t block_count(std::size_t count);

// Sum over words in index order of f(w); blocks are reduced in parallel and
// merged sequentially.
double ordered_sum(std::size_t count, const std::function<double(std::size_t)>& f);

}  // namespace affdim
