#pragma once

#include "affdim/ifs.hpp"
#include "affdim/spectrum.hpp"
#include "affdim/tag.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace affdim {

constexpr std::size_t kDefaultBudget = 10'000'000;

double svf(const Matrix& A, double s);
double log_svf(const Matrix& A, double s);

// True when phi^s is multiplicative on the generated semigroup: every map a
// similarity, or all maps diagonal with a common ordering of |entries|.
bool is_multiplicative(const AffineIFS& ifs);

struct PressureOptions {
    std::size_t budget = kDefaultBudget;
    std::size_t pairs_per_level = 2048;
    std::uint64_t seed = 0;
};

struct PressureLevel {
    int n = 0;
    double u = 0;      // (1/n) log sum_{|w|=n} phi^s(A_w)
    double log_c = 0;  // sampled quasi-multiplicativity constant, <= 0
    double lower = 0;  // u + log_c / n
};

struct PressureEstimate {
    double s = 0;
    std::vector<PressureLevel> levels;
    double lo = 0;
    double hi = 0;
    Tag lo_tag = Tag::Heuristic;
    Tag hi_tag = Tag::Certified;
    bool exact = false;
    bool budget_limited = false;
    std::size_t words = 0;
};

// Word tables plus sampled pair defects, reusable across many values of s.
class PressureModel {
public:
    // Throws InsufficientBudget when level 2 cannot be enumerated.
    PressureModel(const AffineIFS& ifs, const PressureOptions& options);

    int level_count() const { return static_cast<int>(tables_.levels.size()); }
    const WordTables& tables() const { return tables_; }
    bool exact() const { return exact_; }

    // u_n(s) for levels[i]; slope receives du/ds when non-null.
    double level_u(int i, double s, double* slope = nullptr) const;
    double level_log_c(int i, double s, double* slope = nullptr) const;
    // log sum_i phi^s(A_i), the pressure of a multiplicative system.
    double exact_pressure(double s, double* slope = nullptr) const;

    PressureEstimate evaluate(double s) const;

private:
    int d_ = 0;
    bool exact_ = false;
    WordTables tables_;
    std::vector<std::vector<double>> defects_;  // per level: pairs * d
    std::vector<std::vector<double>> letter_S_;
};

PressureEstimate pressure(const AffineIFS& ifs, double s, const PressureOptions& options = {});

struct AffinityDimension {
    double estimate = 0;
    double lo = 0;
    double hi = 0;
    Tag lo_tag = Tag::Heuristic;
    Tag hi_tag = Tag::Certified;
    bool converged = false;
    bool exact = false;
    int levels = 0;
    std::size_t words = 0;
    std::string diagnostic;
};

// Throws NotContracting, InsufficientBudget.
AffinityDimension affinity_dimension(const AffineIFS& ifs, double tol = 1e-8, const PressureOptions& options = {});
AffinityDimension affinity_dimension(const PressureModel& model, double tol = 1e-8);

enum class LyapunovMode { ExactLevels, MonteCarlo };

struct LyapunovOptions {
    LyapunovMode mode = LyapunovMode::ExactLevels;
    std::size_t budget = kDefaultBudget;
    std::size_t trajectories = 256;
    std::size_t steps = 2000;
    std::size_t pairs_per_level = 512;
    std::uint64_t seed = 0;
};

struct LyapunovLevel {
    int n = 0;
    std::vector<double> partial;  // E[S_k(A_w)] / n, k = 1..d
};

struct LyapunovSpectrum {
    std::vector<double> lambdas;  // nats per symbol, non-increasing
    std::vector<double> errors;
    std::vector<double> partial_sums;
    // Heuristic lower estimates of the partial sums from sampled pair defects.
    std::vector<double> partial_sums_lower;
    double entropy = 0;
    LyapunovMode mode = LyapunovMode::ExactLevels;
    std::vector<LyapunovLevel> levels;
    Tag tag = Tag::Heuristic;
};

LyapunovSpectrum lyapunov_exponents(const AffineIFS& ifs, const BernoulliMeasure& measure,
                                    const LyapunovOptions& options = {});

// Root of s -> h + Lambda_s with Lambda_s interpolating the given partial sums.
// Throws InvalidSpectrum when the partial sums do not give a unique root.
double lyapunov_dimension(double entropy, const std::vector<double>& partial_sums);
double lyapunov_dimension_from_exponents(double entropy, const std::vector<double>& lambdas);

struct LyapunovDimension {
    double value = 0;
    double lower = 0;
    Tag tag = Tag::Heuristic;
    LyapunovSpectrum spectrum;
};

LyapunovDimension lyapunov_dimension(const AffineIFS& ifs, const BernoulliMeasure& measure,
                                     const LyapunovOptions& options = {});

// p_w proportional to phi^s(A_w) over I^n in lexicographic word order.
BernoulliMeasure gibbs_weights(const AffineIFS& ifs, double s, int n, std::size_t budget = kDefaultBudget);

// (1/n) log sum_{|w|=n} phi^s(A_w), by direct enumeration.
double level_pressure(const AffineIFS& ifs, double s, int n);
// (h(q) + sum_w q_w log phi^s(A_w)) / n for a Bernoulli measure q on I^n.
double level_variational_value(const AffineIFS& ifs, const std::vector<double>& q, int n, double s);

std::vector<Word> all_words(int alphabet, int n);

// CSV rows "s,n,u_n,l_n,hi,lo" with a header line.
std::string pressure_curve_csv(const PressureModel& model, const std::vector<double>& grid);

}  // namespace affdim
