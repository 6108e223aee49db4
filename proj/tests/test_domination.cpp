#include "affdim/error.hpp"
#include "affdim/prox.hpp"
#include "affdim/thermo.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace affdim;
using namespace testing_support;

TEST(Domination, DiagonalPairRate) {
    const AffineIFS ifs = make_ifs({diag2(0.5, 0.25), diag2(0.3, 0.2)});
    const DominationReport r = domination_test(ifs, 1);
    EXPECT_EQ(r.verdict, Verdict::Dominated);
    EXPECT_NEAR(r.rate, std::log(1.5), 1e-9);
    // Every level attains the per-letter bound (2/3)^n exactly.
    for (std::size_t i = 0; i < r.ns.size(); ++i) EXPECT_NEAR(r.log_m[i], r.ns[i] * std::log(2.0 / 3), 1e-9);
}

TEST(Domination, ConformalWordIsNotDominated) {
    const AffineIFS ifs = make_ifs({diag2(0.6, 0.3), diag2(0.3, 0.6)});
    const DominationReport r = domination_test(ifs, 1);
    EXPECT_EQ(r.verdict, Verdict::NotDominated);
}

TEST(Domination, RotationFamilyIsNotDominated) {
    const AffineIFS ifs = make_ifs({0.5 * rotation(0.3), 0.4 * rotation(-0.3) * diag2(1.0, 0.9)});
    EXPECT_NE(domination_test(ifs, 1).verdict, Verdict::Dominated);
}

TEST(Domination, SingleProximalMatrix) {
    const AffineIFS ifs = make_ifs({diag2(0.8, 0.2)});
    const DominationReport r = domination_test(ifs, 1);
    EXPECT_EQ(r.verdict, Verdict::Dominated);
    EXPECT_NEAR(r.rate, std::log(4.0), 1e-9);
}

TEST(Domination, ExteriorPowerConsistency) {
    CounterRng rng(51, 0);
    for (int sys = 0; sys < 20; ++sys) {
        const AffineIFS ifs = random_contracting_ifs(rng, 3, 2);
        std::vector<Matrix> wedge;
        for (const auto& m : ifs.maps) wedge.push_back(exterior_power(m.A, 2));
        const DominationOptions opts{.budget = 20'000};
        const DominationReport direct = domination_test(ifs, 2, opts);
        const DominationReport lifted = domination_test(linear_system(wedge), 1, opts);
        EXPECT_EQ(direct.verdict, lifted.verdict);
        EXPECT_NEAR(direct.rate, lifted.rate, 1e-8);
    }
}

TEST(Domination, IndexOutOfRange) {
    const AffineIFS ifs = rotated_diagonal();
    EXPECT_THROW(domination_test(ifs, 0), InvalidInput);
    EXPECT_THROW(domination_test(ifs, 2), InvalidInput);
}

TEST(Domination, BudgetTooSmall) {
    EXPECT_THROW(domination_test(rotated_diagonal(), 1, DominationOptions{.budget = 3}), InsufficientBudget);
}

TEST(Domination, ConeWitnessForDiagonalPair) {
    const AffineIFS ifs = make_ifs({diag2(0.5, 0.25), diag2(0.3, 0.2)});
    const DominationReport r = domination_test(ifs, 1, DominationOptions{.cone_witness = true});
    ASSERT_TRUE(r.cone.has_value());
    EXPECT_TRUE(r.cone->found);
    EXPECT_LT(r.cone->contraction, 1.0);
}

TEST(Irreducibility, DiagonalFamilyIsReducible) {
    const AffineIFS ifs = make_ifs({diag2(0.5, 0.25), diag2(0.3, 0.2)});
    const IrreducibilityReport r = irreducibility_proxy(ifs, 1, 3);
    EXPECT_LE(r.span_dim, 2u);
    EXPECT_FALSE(r.burnside_pass);
    EXPECT_EQ(r.tag, Tag::Heuristic);
    bool has_axis = false;
    for (const auto& c : r.candidates)
        if (c.kind == "line" && std::abs(std::abs(c.vector.normalized()(0)) - 1) < 1e-9) has_axis = true;
    EXPECT_TRUE(has_axis);
}

TEST(Irreducibility, RotatedPairSpansEverything) {
    const Matrix g = diag2(2, 0.5);
    const AffineIFS ifs = make_ifs({g, rotation(M_PI / 4) * g * rotation(-M_PI / 4)});
    const IrreducibilityReport r = irreducibility_proxy(ifs, 1, 2);
    EXPECT_EQ(r.span_dim, 4u);
    EXPECT_TRUE(r.burnside_pass);
    EXPECT_EQ(r.tag, Tag::Certified);
}

TEST(Irreducibility, IdentityFamily) {
    const AffineIFS ifs = make_ifs({Matrix::Identity(2, 2), Matrix::Identity(2, 2)});
    const IrreducibilityReport r = irreducibility_proxy(ifs, 1, 3);
    EXPECT_EQ(r.span_dim, 1u);
    EXPECT_FALSE(r.burnside_pass);
}

TEST(ProximalityIndex, DiagonalReachesOne) {
    const AffineIFS ifs = make_ifs({diag2(4, 0.25), rotation(0.5)});
    EXPECT_EQ(proximality_index_proxy(ifs, 1, 2).index, 1);
}

TEST(ProximalityIndex, RotationsStayFull) {
    const AffineIFS ifs = make_ifs({rotation(0.5), rotation(1.7)});
    EXPECT_EQ(proximality_index_proxy(ifs, 1, 3).index, 2);
}

TEST(ProximalityIndex, JordanBlock) {
    Matrix J(2, 2);
    J << 1, 1, 0, 1;
    const AffineIFS ifs = make_ifs({0.5 * J, 0.5 * J});
    const ProximalityIndex p = proximality_index_proxy(ifs, 1, 1);
    EXPECT_EQ(p.index, 1);
    EXPECT_GT(p.squarings, 0);
}

TEST(DefaultKSet, RotatedDiagonal) {
    const AffineIFS ifs = rotated_diagonal();
    const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure::uniform(2), LyapunovOptions{.budget = 100'000});
    EXPECT_EQ(default_k_set(ifs, spectrum.lambdas), std::vector<int>{1});
}

TEST(DefaultKSet, SimilarityHasNoGap) {
    const AffineIFS ifs = similarity_ifs(3, 0.25);
    const LyapunovSpectrum spectrum = lyapunov_exponents(ifs, BernoulliMeasure::uniform(3), LyapunovOptions{.budget = 10'000});
    EXPECT_TRUE(default_k_set(ifs, spectrum.lambdas).empty());
}
