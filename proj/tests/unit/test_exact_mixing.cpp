#include "oracles.hpp"
#include "test_util.hpp"

#include "spk/exact_mixing.hpp"
#include "spk/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

namespace {

using spk::ErrorCode;
using spk::kInfinityNorm;
using spk::MarkovChain;
using spk::Matrix;
using spk::Vector;

const double kInvE = std::exp(-1.0);

std::vector<MarkovChain> chains(std::uint64_t seed, int count, bool reversible) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(3, 8);
    std::vector<MarkovChain> out;
    for (int i = 0; i < count; ++i)
        out.push_back(reversible ? spk::random_reversible_chain(size(rng), rng) : spk::random_chain(size(rng), rng));
    return out;
}

double lp_oracle(const Vector& mu, const Vector& nu, const Vector& pi, double p) {
    if (std::isinf(p)) {
        double m = 0.0;
        for (int i = 0; i < pi.size(); ++i) m = std::max(m, std::abs((mu(i) - nu(i)) / pi(i)));
        return m;
    }
    double s = 0.0;
    for (int i = 0; i < pi.size(); ++i) s += pi(i) * std::pow(std::abs((mu(i) - nu(i)) / pi(i)), p);
    return std::pow(s, 1.0 / p);
}

/// sup_x || H(x,.)/pi - 1 ||_p from a full kernel matrix.
double sup_distance(const Matrix& H, const Vector& pi, double p) {
    double best = 0.0;
    for (int x = 0; x < H.rows(); ++x) best = std::max(best, lp_oracle(H.row(x).transpose(), pi, pi, p));
    return best;
}

TEST(Distance, LpNorms) {
    Vector pi(3), mu(3), nu(3);
    pi << 0.2, 0.3, 0.5;
    mu << 0.5, 0.25, 0.25;
    nu = pi;
    for (double p : {1.0, 2.0, 3.5, kInfinityNorm}) EXPECT_NEAR(spk::lp_distance(mu, nu, pi, p), lp_oracle(mu, nu, pi, p), 1e-15);
    EXPECT_NEAR(spk::lp_distance(mu, nu, pi, 1.0), 2 * 0.3, 1e-15);
}

TEST(Distance, CompleteGraphClosedForms) {
    for (int n : {3, 10}) {
        auto c = spk::complete_graph(n);
        spk::DistanceEvaluator eval(c);
        for (double t : {0.1, 1.0, 3.0}) {
            EXPECT_NEAR(eval.continuous(kInfinityNorm, t), (n - 1) * std::exp(-t), 1e-12);
            EXPECT_NEAR(eval.continuous(2.0, t), std::sqrt(n - 1.0) * std::exp(-t), 1e-12);
            EXPECT_NEAR(eval.continuous(1.0, t), 2.0 * (n - 1) / n * std::exp(-t), 1e-12);
        }
    }
}

TEST(Distance, MatchesMatrixExponential) {
    for (bool rev : {true, false})
        for (const auto& c : chains(81, 10, rev)) {
            spk::DistanceEvaluator eval(c);
            for (double t : {0.05, 0.8, 4.0, 15.0}) {
                Matrix H = oracle::heat(c.kernel(), t);
                for (double p : {1.0, 2.0, kInfinityNorm})
                    EXPECT_NEAR(eval.continuous(p, t), sup_distance(H, c.pi(), p), 1e-10) << "p=" << p << " t=" << t;
                EXPECT_NEAR(eval.continuous(kInfinityNorm, t), oracle::sup_density_distance(H, c.pi()), 1e-10);
                double diag = 0.0;
                for (int x = 0; x < c.size(); ++x) diag = std::max(diag, H(x, x) / c.pi()(x));
                EXPECT_NEAR(eval.max_diagonal_density(t), diag, 1e-10);
                double l2 = sup_distance(H, c.pi(), 2.0);
                EXPECT_NEAR(eval.max_l2_squared(t), l2 * l2, 1e-10);
            }
        }
}

TEST(Distance, ReversibleDiagonalIdentity) {
    for (const auto& c : chains(82, 10, true)) {
        spk::DistanceEvaluator eval(c);
        for (double t : {0.2, 1.0, 6.0}) {
            EXPECT_NEAR(eval.max_l2_squared(t), eval.max_diagonal_density(2 * t) - 1.0, 1e-11);
            EXPECT_NEAR(eval.continuous(kInfinityNorm, t), eval.max_diagonal_density(t) - 1.0, 1e-11);
        }
    }
}

TEST(Distance, DiscreteMatchesPowers) {
    for (bool rev : {true, false})
        for (const auto& c : chains(83, 8, rev)) {
            spk::DistanceEvaluator eval(c);
            for (long long m : {1LL, 3LL, 10LL}) {
                Matrix P = oracle::power(c.kernel(), m);
                for (double p : {1.0, 2.0, kInfinityNorm}) EXPECT_NEAR(eval.discrete(p, m), sup_distance(P, c.pi(), p), 1e-10);
            }
        }
}

TEST(Distance, ReversibleCurvesAreNonIncreasing) {
    for (const auto& c : chains(84, 8, true)) {
        auto curve = spk::distance_curve(c, kInfinityNorm, spk::default_time_grid(c));
        for (std::size_t i = 1; i < curve.values.size(); ++i) EXPECT_LE(curve.values[i], curve.values[i - 1] * (1 + 1e-12) + 1e-15);
    }
}

TEST(ExactTau, CompleteGraph) {
    for (int n : {4, 10, 25}) {
        auto tau = spk::exact_tau(spk::complete_graph(n), kInfinityNorm, kInvE);
        EXPECT_NEAR(tau.value, 1.0 + std::log(n - 1.0), 1e-7);
        EXPECT_FALSE(tau.non_monotone_warning);
        auto tau2 = spk::exact_tau(spk::complete_graph(n), 2.0, 0.1);
        EXPECT_NEAR(tau2.value, std::log(std::sqrt(n - 1.0) / 0.1), 1e-7);
    }
}

TEST(ExactTau, IsTheFirstCrossing) {
    for (bool rev : {true, false})
        for (const auto& c : chains(85, 10, rev)) {
            for (double eps : {0.5, kInvE, 0.05}) {
                auto tau = spk::exact_tau(c, kInfinityNorm, eps);
                Matrix at = oracle::heat(c.kernel(), tau.value * (1 + 1e-6));
                Matrix before = oracle::heat(c.kernel(), tau.value * (1 - 1e-6));
                EXPECT_LE(oracle::sup_density_distance(at, c.pi()), eps * (1 + 1e-9));
                EXPECT_GT(oracle::sup_density_distance(before, c.pi()), eps * (1 - 1e-9));
            }
        }
}

TEST(ExactTau, DiscreteStepCount) {
    for (bool rev : {true, false})
        for (const auto& base : chains(86, 8, rev)) {
            auto c = spk::add_laziness(base, 0.3);
            auto tau = spk::exact_tau(c, kInfinityNorm, kInvE, spk::TimeMode::Discrete);
            auto m = static_cast<long long>(tau.value);
            EXPECT_EQ(static_cast<double>(m), tau.value);
            EXPECT_LE(oracle::sup_density_distance(oracle::power(c.kernel(), m), c.pi()), kInvE);
            if (m > 0) EXPECT_GT(oracle::sup_density_distance(oracle::power(c.kernel(), m - 1), c.pi()), kInvE);
        }
}

TEST(ExactTau, PeriodicChainsHaveNoDiscreteMixingTime) {
    EXPECT_SPK_ERROR(spk::exact_tau(spk::cycle(8), kInfinityNorm, kInvE, spk::TimeMode::Discrete), ErrorCode::Periodic);
    EXPECT_NO_THROW(spk::exact_tau(spk::cycle(9), kInfinityNorm, kInvE, spk::TimeMode::Discrete));
    EXPECT_NO_THROW(spk::exact_tau(spk::cycle(8), kInfinityNorm, kInvE));
}

TEST(ExactTau, WindowExhaustion) {
    spk::ExactTauOptions opts;
    opts.t_max = 1.0;
    EXPECT_SPK_ERROR(spk::exact_tau(spk::cycle(32), kInfinityNorm, kInvE, spk::TimeMode::Continuous, opts),
                     ErrorCode::NoConvergenceInWindow);
}

TEST(ExactTau, DiffusiveScalingOnCycles) {
    double t16 = spk::exact_tau(spk::cycle(16), kInfinityNorm, kInvE).value;
    double t32 = spk::exact_tau(spk::cycle(32), kInfinityNorm, kInvE).value;
    EXPECT_GT(t32 / t16, 3.3);
    EXPECT_LT(t32 / t16, 4.7);
}

TEST(Curve, CsvAndGrid) {
    auto c = spk::cycle(6);
    auto grid = spk::default_time_grid(c);
    const double l1 = 1 - std::cos(2 * M_PI / 6);
    EXPECT_NEAR(grid.front(), 1e-3 / l1, 1e-15);
    EXPECT_NEAR(grid.back(), 20.0 / l1, 1e-12);
    auto curve = spk::distance_curve(c, 2.0, {0.5, 1.0});
    std::stringstream ss;
    spk::write_csv(ss, curve);
    std::string header;
    std::getline(ss, header);
    EXPECT_EQ(header, "t,value");
    int rows = 0;
    for (std::string line; std::getline(ss, line);) ++rows;
    EXPECT_EQ(rows, 2);
}

}  // namespace
