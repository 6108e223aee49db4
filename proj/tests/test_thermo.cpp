#include "affdim/error.hpp"
#include "affdim/spectrum.hpp"
#include "affdim/thermo.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace affdim;
using namespace testing_support;

TEST(Svf, Examples) {
    for (double s : {0.0, 0.5, 1.0, 1.7, 2.0, 3.5}) EXPECT_NEAR(svf(Matrix::Identity(2, 2), s), 1.0, 1e-15);
    EXPECT_NEAR(svf(diag2(0.5, 1.0 / 3), 1.5), 0.5 * std::sqrt(1.0 / 3), 1e-15);
    // s >= d uses |det|^(s/d).
    EXPECT_NEAR(svf(diag2(0.5, 0.25), 3.0), std::pow(0.125, 1.5), 1e-15);
}

TEST(Svf, MatchesClosedFormSingularValues) {
    CounterRng rng(31, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix A = random_matrix(rng, 2, 0.5);
        const double s = 2.5 * rng.uniform();
        EXPECT_NEAR(svf(A, s), oracle::svf_2x2(A, s), 1e-12 * (1 + oracle::svf_2x2(A, s)));
    }
}

TEST(Svf, IsSubmultiplicative) {
    CounterRng rng(32, 0);
    for (int d : {2, 3})
        for (double s : {0.5, 1.0, 1.5, 2.5})
            for (int trial = 0; trial < 300; ++trial) {
                const Matrix A = random_matrix(rng, d), B = random_matrix(rng, d);
                EXPECT_LE(svf(A * B, s), svf(A, s) * svf(B, s) * (1 + 1e-12));
            }
}

TEST(Pressure, SimilarityClosedForm) {
    const AffineIFS ifs = similarity_ifs(3, 0.25);
    EXPECT_TRUE(is_multiplicative(ifs));
    for (double s : {0.3, 0.79, 1.4}) {
        const PressureEstimate p = pressure(ifs, s, PressureOptions{200'000});
        const double expected = std::log(3 * std::pow(0.25, s));
        for (const auto& level : p.levels) EXPECT_NEAR(level.u, expected, 1e-12) << "n=" << level.n;
        EXPECT_NEAR(p.hi, expected, 1e-12);
        EXPECT_NEAR(p.lo, expected, 1e-12);
    }
}

TEST(Pressure, DiagonalFactorisation) {
    const AffineIFS ifs = make_ifs({diag2(0.7, 0.3), diag2(0.6, 0.2)});
    for (double s : {1.2, 1.5, 1.9}) {
        const double expected = std::log(0.7 * std::pow(0.3, s - 1) + 0.6 * std::pow(0.2, s - 1));
        const PressureEstimate p = pressure(ifs, s, PressureOptions{100'000});
        ASSERT_GE(p.levels.size(), 10u);
        for (const auto& level : p.levels) EXPECT_NEAR(level.u, expected, 1e-10) << "n=" << level.n;
    }
}

TEST(Pressure, ZeroExponentCountsWords) {
    CounterRng rng(33, 0);
    const AffineIFS ifs = random_contracting_ifs(rng, 2, 3);
    const PressureEstimate p = pressure(ifs, 0.0, PressureOptions{10'000});
    for (const auto& level : p.levels) EXPECT_NEAR(level.u, std::log(3.0), 1e-12);
}

TEST(Pressure, LevelMatchesBruteForce) {
    CounterRng rng(34, 0);
    for (int sys = 0; sys < 5; ++sys) {
        const AffineIFS ifs = random_contracting_ifs(rng, 2, 2);
        const double s = 0.3 + 1.5 * rng.uniform();
        for (int n = 1; n <= 6; ++n) {
            double total = 0;
            for (const Word& w : all_words(2, n)) total += oracle::svf_2x2(linear_word_product(ifs, w), s);
            EXPECT_NEAR(level_pressure(ifs, s, n), std::log(total) / n, 1e-11);
        }
    }
}

TEST(Pressure, DecreasesInS) {
    CounterRng rng(35, 0);
    for (int sys = 0; sys < 10; ++sys) {
        const AffineIFS ifs = random_contracting_ifs(rng, 2, 3);
        const PressureModel model(ifs, PressureOptions{20'000});
        double last = std::numeric_limits<double>::infinity();
        for (double s = 0; s <= 3.0; s += 0.1) {
            const double hi = model.evaluate(s).hi;
            EXPECT_LT(hi, last + 1e-12);
            last = hi;
        }
    }
}

TEST(Pressure, BracketOrdersLevels) {
    const AffineIFS ifs = rotated_diagonal();
    const PressureEstimate p = pressure(ifs, 1.2, PressureOptions{100'000});
    EXPECT_LE(p.lo, p.hi);
    for (const auto& level : p.levels) EXPECT_GE(level.u, p.hi - 1e-12);
}

TEST(Pressure, BudgetTooSmall) {
    const AffineIFS ifs = similarity_ifs(3, 0.25);
    EXPECT_THROW(pressure(ifs, 1.0, PressureOptions{5}), InsufficientBudget);
}

TEST(AffinityDimension, SimilarityRoot) {
    const AffinityDimension d = affinity_dimension(similarity_ifs(3, 0.25));
    EXPECT_TRUE(d.exact);
    EXPECT_NEAR(d.estimate, std::log(3.0) / std::log(4.0), 1e-8);
    EXPECT_NEAR(affinity_dimension(similarity_ifs(2, 0.5)).estimate, 1.0, 1e-8);
}

TEST(AffinityDimension, DiagonalBelowOne) {
    const AffineIFS ifs = make_ifs({diag2(0.5, 0.1), diag2(0.3, 0.2)});
    const double expected = oracle::bisect([](double s) { return std::pow(0.5, s) + std::pow(0.3, s) - 1; }, 0, 1);
    const AffinityDimension d = affinity_dimension(ifs, 1e-8, PressureOptions{100'000});
    EXPECT_NEAR(d.estimate, expected, 1e-7);
    EXPECT_LE(d.lo, d.hi);
}

TEST(AffinityDimension, DiagonalAboveOne) {
    const AffineIFS ifs = make_ifs({diag2(0.7, 0.3), diag2(0.6, 0.2)});
    const double expected = oracle::bisect(
        [](double s) { return 0.7 * std::pow(0.3, s - 1) + 0.6 * std::pow(0.2, s - 1) - 1; }, 1, 2);
    const AffinityDimension d = affinity_dimension(ifs, 1e-8, PressureOptions{100'000});
    EXPECT_NEAR(d.estimate, expected, 1e-6);
}

TEST(AffinityDimension, NotContracting) {
    const AffineIFS ifs = make_ifs({diag2(1.2, 0.5), diag2(0.5, 0.5)});
    EXPECT_THROW(affinity_dimension(ifs), NotContracting);
}

TEST(AffinityDimension, BracketHoldsForGeneralSystems) {
    const AffinityDimension d = affinity_dimension(rotated_diagonal(), 1e-6, PressureOptions{200'000});
    EXPECT_LE(d.lo, d.hi);
    EXPECT_GT(d.lo, 1.0);
    EXPECT_LT(d.hi, 2.0);
    EXPECT_GE(d.estimate, d.lo);
    EXPECT_LE(d.estimate, d.hi);
}

TEST(Lyapunov, DeterministicProduct) {
    const AffineIFS ifs = make_ifs({diag2(0.6, 0.3), diag2(0.5, 0.4)});
    const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure{{1.0, 0.0}});
    EXPECT_NEAR(spectrum.lambdas[0], std::log(0.6), 1e-12);
    EXPECT_NEAR(spectrum.lambdas[1], std::log(0.3), 1e-12);
}

TEST(Lyapunov, CommutingDiagonals) {
    const AffineIFS ifs = make_ifs({diag2(0.6, 0.3), diag2(0.5, 0.2)});
    const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure::uniform(2));
    EXPECT_NEAR(spectrum.lambdas[0], 0.5 * std::log(0.6) + 0.5 * std::log(0.5), 1e-12);
    EXPECT_NEAR(spectrum.lambdas[1], 0.5 * std::log(0.3) + 0.5 * std::log(0.2), 1e-12);
    for (const auto& level : spectrum.levels)
        EXPECT_NEAR(level.partial[0], 0.5 * std::log(0.6) + 0.5 * std::log(0.5), 1e-12) << "n=" << level.n;
}

TEST(Lyapunov, SimilarityExponentsAreEqual) {
    const LyapunovSpectrum spectrum = lyapunov_exponents(similarity_ifs(3, 0.25), BernoulliMeasure::uniform(3));
    for (double l : spectrum.lambdas) EXPECT_NEAR(l, std::log(0.25), 1e-12);
}

TEST(Lyapunov, MonteCarloAgreesWithExactLevels) {
    const AffineIFS ifs = make_ifs({diag2(0.6, 0.3), diag2(0.5, 0.2)});
    LyapunovOptions mc;
    mc.mode = LyapunovMode::MonteCarlo;
    mc.trajectories = 64;
    mc.steps = 4000;
    const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure::uniform(2), mc);
    EXPECT_NEAR(spectrum.lambdas[0], 0.5 * std::log(0.6) + 0.5 * std::log(0.5), 0.01);
    EXPECT_NEAR(spectrum.lambdas[1], 0.5 * std::log(0.3) + 0.5 * std::log(0.2), 0.01);
}

TEST(Lyapunov, ExponentsAreOrderedAndSumToLogDet) {
    CounterRng rng(36, 0);
    for (int sys = 0; sys < 5; ++sys) {
        const AffineIFS ifs = random_contracting_ifs(rng, 3, 2);
        const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure::uniform(2), LyapunovOptions{.budget = 50'000});
        for (std::size_t k = 1; k < spectrum.lambdas.size(); ++k) EXPECT_GE(spectrum.lambdas[k - 1], spectrum.lambdas[k] - 1e-12);
        const double expected =
            0.5 * std::log(std::abs(ifs.maps[0].A.determinant())) + 0.5 * std::log(std::abs(ifs.maps[1].A.determinant()));
        EXPECT_NEAR(std::accumulate(spectrum.lambdas.begin(), spectrum.lambdas.end(), 0.0), expected, 1e-9);
    }
}

TEST(LyapunovDimension, ZeroEntropy) { EXPECT_EQ(lyapunov_dimension(0.0, {-1.0, -3.0}), 0.0); }

TEST(LyapunovDimension, ScalarRootOracle) {
    const double h = std::log(2.0);
    const std::vector<double> lambdas{-0.5, -1.4};
    const std::vector<double> sums{-0.5, -1.9};
    const double expected = oracle::bisect(
        [&](double s) { return h + (s <= 1 ? s * lambdas[0] : lambdas[0] + (s - 1) * lambdas[1]); }, 0, 2);
    EXPECT_NEAR(lyapunov_dimension(h, sums), expected, 1e-12);
    EXPECT_NEAR(lyapunov_dimension_from_exponents(h, lambdas), expected, 1e-12);
}

TEST(LyapunovDimension, HutchinsonFormula) {
    const AffineIFS ifs = interval_ifs({{1.0 / 3, 0}, {1.0 / 3, 2.0 / 3}});
    const LyapunovDimension d = lyapunov_dimension(ifs, BernoulliMeasure::uniform(2));
    EXPECT_NEAR(d.value, std::log(2.0) / std::log(3.0), 1e-9);
}

TEST(LyapunovDimension, WeightedHutchinsonFormula) {
    const AffineIFS ifs = interval_ifs({{0.2, 0}, {0.5, 0.5}});
    const BernoulliMeasure p{{0.3, 0.7}};
    const double expected =
        (0.3 * std::log(0.3) + 0.7 * std::log(0.7)) / (0.3 * std::log(0.2) + 0.7 * std::log(0.5));
    EXPECT_NEAR(lyapunov_dimension(ifs, p).value, expected, 1e-9);
}

TEST(Gibbs, ZeroExponentIsUniform) {
    const BernoulliMeasure q = gibbs_weights(rotated_diagonal(), 0.0, 3);
    ASSERT_EQ(q.probs.size(), 8u);
    for (double p : q.probs) EXPECT_NEAR(p, 1.0 / 8, 1e-15);
}

TEST(Gibbs, SimilarityWeightsFactor) {
    const AffineIFS ifs = interval_ifs({{0.3, 0}, {0.5, 0.5}});
    const double s = 0.7;
    const double z = std::pow(0.3, s) + std::pow(0.5, s);
    const double p0 = std::pow(0.3, s) / z, p1 = std::pow(0.5, s) / z;
    const BernoulliMeasure q = gibbs_weights(ifs, s, 3);
    const auto words = all_words(2, 3);
    for (std::size_t i = 0; i < words.size(); ++i) {
        double expected = 1;
        for (int letter : words[i]) expected *= letter == 0 ? p0 : p1;
        EXPECT_NEAR(q.probs[i], expected, 1e-14);
    }
}

TEST(Gibbs, VariationalInequality) {
    CounterRng rng(37, 0);
    for (int sys = 0; sys < 10; ++sys) {
        const AffineIFS ifs = random_contracting_ifs(rng, 2, 2);
        const double s = 0.2 + 1.6 * rng.uniform();
        for (int n = 1; n <= 4; ++n) {
            const double u = level_pressure(ifs, s, n);
            const BernoulliMeasure q = gibbs_weights(ifs, s, n);
            // The Gibbs measure attains the finite-level supremum.
            EXPECT_NEAR(level_variational_value(ifs, q.probs, n, s), u, 1e-10);
            std::vector<double> random(q.probs.size());
            double total = 0;
            for (auto& x : random) total += (x = rng.uniform() + 1e-3);
            for (auto& x : random) x /= total;
            EXPECT_LE(level_variational_value(ifs, random, n, s), u + 1e-10);
        }
    }
}

TEST(PressureCurve, CsvShape) {
    const PressureModel model(similarity_ifs(2, 0.5), PressureOptions{100});
    const std::string csv = pressure_curve_csv(model, {0.5, 1.0});
    EXPECT_EQ(csv.rfind("s,n,u_n,l_n,hi,lo\n", 0), 0u);
    const auto rows = std::count(csv.begin(), csv.end(), '\n');
    EXPECT_EQ(rows, 1 + 2 * model.level_count());
}
