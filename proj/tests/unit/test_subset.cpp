#include "oracles.hpp"
#include "test_util.hpp"

#include "spk/subset.hpp"
#include "spk/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using spk::ErrorCode;
using spk::MarkovChain;
using spk::Vector;

std::vector<MarkovChain> chains(std::uint64_t seed, int count, bool reversible, int lo = 3, int hi = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(lo, hi);
    std::vector<MarkovChain> out;
    for (int i = 0; i < count; ++i)
        out.push_back(reversible ? spk::random_reversible_chain(size(rng), rng) : spk::random_chain(size(rng), rng));
    return out;
}

/// inf over nonnegative f on S of E/Var by scanning the positive orthant of the unit sphere.
double lambda_scan(const MarkovChain& c, const std::vector<int>& s) {
    const int n = c.size();
    auto quotient = [&](const std::vector<double>& vals) {
        Vector f = Vector::Zero(n);
        for (std::size_t i = 0; i < s.size(); ++i) f(s[i]) = vals[i];
        return oracle::energy(c.kernel(), c.pi(), f) / oracle::variance(c.pi(), f);
    };
    const double h = std::numbers::pi / 2;
    double best = std::numeric_limits<double>::infinity();
    if (s.size() == 1) return quotient({1.0});
    if (s.size() == 2) {
        for (int i = 0; i <= 200000; ++i) {
            double th = h * i / 200000;
            best = std::min(best, quotient({std::cos(th), std::sin(th)}));
        }
        return best;
    }
    const int m = 700;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            double a = h * i / m, b = h * j / m;
            best = std::min(best, quotient({std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b)}));
        }
    return best;
}

TEST(Subset, MassBoundaryAndComponents) {
    auto c = spk::cycle(8);
    auto s = spk::Subset::make(c, {5, 0, 1, 4});
    EXPECT_EQ(s.members(), (std::vector<int>{0, 1, 4, 5}));
    EXPECT_DOUBLE_EQ(s.mass(), 0.5);
    EXPECT_NEAR(s.boundary(), 4 * (1.0 / 8) * 0.5, 1e-15);
    EXPECT_EQ(s.components().size(), 2u);
    EXPECT_FALSE(s.connected());
    EXPECT_FALSE(s.full_space());
    auto all = spk::Subset::make(c, {0, 1, 2, 3, 4, 5, 6, 7});
    EXPECT_TRUE(all.full_space());
    EXPECT_NEAR(all.boundary(), 0.0, 1e-15);
    Vector ind = s.indicator(8);
    EXPECT_EQ(ind.sum(), 4.0);
    EXPECT_EQ(ind(4), 1.0);
    EXPECT_SPK_ERROR(spk::Subset::make(c, {}), ErrorCode::EmptySubset);
    EXPECT_SPK_ERROR(spk::Subset::make(c, {8}), ErrorCode::DimensionMismatch);
}

TEST(Subset, MembersOfMask) {
    EXPECT_EQ(spk::members_of(0b101101, 6), (std::vector<int>{0, 2, 3, 5}));
}

TEST(Subset, Lambda0MatchesCharacteristicPolynomial) {
    for (bool rev : {true, false}) {
        for (const auto& c : chains(31, 25, rev)) {
            const int n = c.size();
            for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
                auto s = oracle::members(mask, n);
                if (s.size() > 4) continue;
                double ref = oracle::lambda0_charpoly(c.kernel(), c.pi(), s);
                EXPECT_NEAR(spk::lambda0(c, s), ref, 1e-10) << "mask " << mask;
            }
        }
    }
}

TEST(Subset, SingletonLambda0IsEscapeRate) {
    for (const auto& c : chains(32, 10, false)) {
        for (int x = 0; x < c.size(); ++x) EXPECT_NEAR(spk::lambda0(c, {x}), 1.0 - c.kernel()(x, x), 1e-14);
    }
}

TEST(Subset, Lambda0IsMonotoneUnderInclusion) {
    for (const auto& c : chains(33, 20, true)) {
        const int n = c.size();
        const std::uint64_t full = (1ULL << n) - 1;
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            double a = spk::lambda0(c, oracle::members(mask, n));
            for (int x = 0; x < n; ++x) {
                std::uint64_t bigger = mask | (1ULL << x);
                if (bigger == mask || bigger == full) continue;
                EXPECT_LE(spk::lambda0(c, oracle::members(bigger, n)), a + 1e-12);
            }
        }
    }
}

TEST(Subset, GroundStateSolvesDirichletProblem) {
    for (const auto& c : chains(34, 10, true)) {
        const int n = c.size();
        std::vector<int> s;
        for (int x = 0; x < n - 1; ++x) s.push_back(x);
        auto sub = spk::Subset::make(c, s);
        if (!sub.connected()) continue;
        auto de = spk::dirichlet_eigen(c, s);
        ASSERT_EQ(de.ground_state.size(), static_cast<int>(s.size()));
        EXPECT_GT(de.ground_state.minCoeff(), 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) {
            double kf = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) kf += c.kernel()(s[i], s[j]) * de.ground_state(j);
            EXPECT_NEAR(de.ground_state(i) - kf, de.value * de.ground_state(i), 1e-10);
        }
    }
}

TEST(Subset, InverseIterationAgreesWithDenseSolve) {
    auto [g, c] = spk::viscek(4, 2);
    spk::EigenOptions dense, iterative;
    iterative.dense_cutoff = 1;
    for (int k = 0; k < static_cast<int>(g.blocks.size()) - 1; k += 7) {
        const auto& v = g.blocks[k].vertices;
        EXPECT_NEAR(spk::lambda0(c, v, iterative), spk::lambda0(c, v, dense), 1e-10);
    }
}

TEST(Subset, BracketHolds) {
    for (const auto& c : chains(35, 15, true)) {
        const int n = c.size();
        for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); mask += 5) {
            auto sub = spk::Subset::make(c, oracle::members(mask, n));
            auto b = spk::lambda_bracket(c, sub);
            EXPECT_LE(b.lower, b.upper);
            EXPECT_NEAR(b.upper, b.lambda0 / (1.0 - sub.mass()), 1e-14);
            auto v = spk::lambda_by_components(c, sub);
            EXPECT_GE(v.value, b.lambda0 * (1 - 1e-9));
            EXPECT_LE(v.value, b.upper * (1 + 1e-9));
        }
    }
}

TEST(Subset, VariationalMatchesSphereScan) {
    for (const auto& c : chains(36, 10, true, 4, 6)) {
        const int n = c.size();
        for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
            auto s = oracle::members(mask, n);
            if (s.size() > 3) continue;
            auto sub = spk::Subset::make(c, s);
            auto v = spk::lambda_variational(c, sub);
            double ref = lambda_scan(c, s);
            EXPECT_LE(v.value, ref + 1e-9);
            EXPECT_GE(v.value, ref * (1 - 1e-4));
            EXPECT_NEAR(spk::rayleigh_quotient(c, v.argmin), v.value, 1e-9 * v.value);
            EXPECT_GE(v.argmin.minCoeff(), 0.0);
            for (int x = 0; x < n; ++x)
                if (!(mask >> x & 1ULL)) EXPECT_EQ(v.argmin(x), 0.0);
        }
    }
}

TEST(Subset, NonReversibleUsesAdditiveSymmetrization) {
    for (const auto& c : chains(37, 10, false)) {
        if (c.reversible()) continue;
        auto sub = spk::Subset::make(c, {0, 1});
        auto b = spk::lambda_bracket(c, sub);
        EXPECT_TRUE(b.via_additive_symmetrization);
        auto rl = spk::restricted_laplacian(c, {0, 1});
        EXPECT_TRUE(rl.symmetrized.has_value());
    }
}

}  // namespace
