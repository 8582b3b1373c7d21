#include "oracles.hpp"
#include "test_util.hpp"

#include "spk/chain.hpp"
#include "spk/chain_io.hpp"
#include "spk/zoo.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace {

using spk::ErrorCode;
using spk::Matrix;
using spk::MarkovChain;
using spk::Vector;

std::vector<MarkovChain> sample_chains(std::uint64_t seed, int count, bool reversible) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(2, 9);
    std::vector<MarkovChain> out;
    for (int i = 0; i < count; ++i) {
        int n = size(rng);
        out.push_back(reversible ? spk::random_reversible_chain(n, rng) : spk::random_chain(n, rng));
    }
    return out;
}

Vector random_function(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector f(n);
    for (int i = 0; i < n; ++i) f(i) = g(rng);
    return f;
}

TEST(Chain, StationaryMatchesPowerIteration) {
    for (bool rev : {true, false}) {
        for (const auto& c : sample_chains(11, 20, rev)) {
            Vector ref = oracle::stationary(c.kernel());
            EXPECT_LT((c.pi() - ref).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_NEAR(c.pi().sum(), 1.0, 1e-14);
            EXPECT_DOUBLE_EQ(c.pi_star(), c.pi().minCoeff());
        }
    }
}

TEST(Chain, ReversibilityMatchesDetailedBalance) {
    for (bool rev : {true, false}) {
        for (const auto& c : sample_chains(12, 20, rev)) {
            const Matrix& K = c.kernel();
            double worst = 0.0;
            for (int x = 0; x < c.size(); ++x)
                for (int y = 0; y < c.size(); ++y)
                    worst = std::max(worst, std::abs(c.pi()(x) * K(x, y) - c.pi()(y) * K(y, x)));
            EXPECT_EQ(c.reversible(), worst <= 1e-12);
            if (rev) EXPECT_TRUE(c.reversible());
        }
    }
}

TEST(Chain, HoldingIsMinimalDiagonal) {
    auto c = spk::cycle(7, 0.3);
    EXPECT_NEAR(c.holding_alpha(), 0.3, 1e-15);
    EXPECT_EQ(spk::cycle(7).holding_alpha(), 0.0);
}

TEST(Chain, AdjointPreservesPi) {
    for (const auto& c : sample_chains(13, 15, false)) {
        Matrix A = spk::adjoint(c);
        EXPECT_LT((A.rowwise().sum() - Vector::Ones(c.size())).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((c.pi().transpose() * A - c.pi().transpose()).cwiseAbs().maxCoeff(), 1e-12);
        for (int x = 0; x < c.size(); ++x)
            for (int y = 0; y < c.size(); ++y)
                EXPECT_NEAR(c.pi()(x) * A(x, y), c.pi()(y) * c.kernel()(y, x), 1e-15);
    }
    for (const auto& c : sample_chains(14, 10, true))
        EXPECT_LT((spk::adjoint(c) - c.kernel()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Chain, DirichletFormAgreesWithEdgeEnergy) {
    std::mt19937_64 rng(15);
    for (bool rev : {true, false}) {
        for (const auto& c : sample_chains(16, 15, rev)) {
            Vector f = random_function(c.size(), rng);
            double e = oracle::energy(c.kernel(), c.pi(), f);
            EXPECT_NEAR(spk::dirichlet_form(c, f, f), e, 1e-12);
            EXPECT_NEAR(spk::dirichlet_energy(c, f), e, 1e-12);
            Matrix L = spk::energy_matrix(c);
            EXPECT_NEAR(f.dot(L * f), e, 1e-12);
            EXPECT_NEAR(spk::variance(c, f), oracle::variance(c.pi(), f), 1e-12);
            EXPECT_NEAR(spk::expectation(c, f), c.pi().dot(f), 1e-13);
        }
    }
}

TEST(Chain, FlowIsBalancedAcrossCuts) {
    for (const auto& c : sample_chains(17, 15, false)) {
        const int n = c.size();
        for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); mask += 3) {
            auto s = oracle::members(mask, n);
            auto sc = oracle::members(~mask & ((1ULL << n) - 1), n);
            double out = spk::flow(c, s, sc);
            EXPECT_NEAR(out, spk::flow(c, sc, s), 1e-14);
            EXPECT_NEAR(out, oracle::boundary(c.kernel(), c.pi(), s), 1e-14);
        }
    }
}

TEST(Chain, HeatKernelMatchesMatrixExponential) {
    for (bool rev : {true, false}) {
        for (const auto& c : sample_chains(18, 8, rev)) {
            for (double t : {0.0, 0.05, 1.0, 7.3, 60.0}) {
                Matrix ref = oracle::heat(c.kernel(), t);
                auto uni = spk::heat_kernel(c, t, 1e-13, spk::HeatKernelMethod::Uniformization);
                EXPECT_LT((uni.Ht - ref).cwiseAbs().maxCoeff(), 1e-11) << "t=" << t;
                if (rev) {
                    auto spec = spk::heat_kernel(c, t, 1e-13, spk::HeatKernelMethod::Spectral);
                    EXPECT_LT((spec.Ht - ref).cwiseAbs().maxCoeff(), 1e-11) << "t=" << t;
                }
            }
        }
    }
}

TEST(Chain, HeatKernelIsASemigroup) {
    for (const auto& c : sample_chains(19, 8, false)) {
        Matrix a = spk::heat_kernel(c, 0.7).Ht;
        Matrix b = spk::heat_kernel(c, 2.1).Ht;
        Matrix ab = spk::heat_kernel(c, 2.8).Ht;
        EXPECT_LT((a * b - ab).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((ab.rowwise().sum() - Vector::Ones(c.size())).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GE(ab.minCoeff(), -1e-15);
    }
}

TEST(Chain, VarianceDecaysAtTwiceTheEnergy) {
    std::mt19937_64 rng(20);
    for (const auto& c : sample_chains(21, 8, false)) {
        Vector f = random_function(c.size(), rng);
        const double t = 0.4, h = 1e-4;
        auto var_at = [&](double s) {
            Vector g = spk::heat_kernel(c, s).Ht * f;
            return spk::variance(c, g);
        };
        double deriv = (var_at(t + h) - var_at(t - h)) / (2 * h);
        Vector g = spk::heat_kernel(c, t).Ht * f;
        EXPECT_NEAR(deriv, -2.0 * spk::dirichlet_energy(c, g), 1e-6);
    }
}

TEST(Chain, SpectralDecompositionReproducesKernels) {
    for (const auto& c : sample_chains(22, 8, true)) {
        spk::SpectralDecomposition sd(c);
        EXPECT_NEAR(sd.laplacian_eigenvalues()(0), 0.0, 1e-12);
        const double t = 1.7;
        Matrix ref = oracle::heat(c.kernel(), t);
        EXPECT_LT((sd.heat_kernel(t) - ref).cwiseAbs().maxCoeff(), 1e-12);
        Vector diag = sd.diagonal_excess(t);
        Matrix dens = sd.density_excess(t);
        for (int x = 0; x < c.size(); ++x) {
            EXPECT_NEAR(diag(x), ref(x, x) / c.pi()(x) - 1.0, 1e-10);
            for (int y = 0; y < c.size(); ++y) EXPECT_NEAR(dens(x, y), ref(x, y) / c.pi()(y) - 1.0, 1e-10);
        }
        Matrix p7 = oracle::power(c.kernel(), 7);
        Matrix dd = sd.discrete_density_excess(7);
        for (int x = 0; x < c.size(); ++x)
            for (int y = 0; y < c.size(); ++y) EXPECT_NEAR(dd(x, y), p7(x, y) / c.pi()(y) - 1.0, 1e-10);
    }
}

TEST(Chain, DiscretePowerMatchesRepeatedProduct) {
    for (const auto& c : sample_chains(23, 8, false)) {
        for (long long m : {0LL, 1LL, 2LL, 5LL, 13LL}) {
            EXPECT_LT((spk::discrete_power(c, m) - oracle::power(c.kernel(), m)).cwiseAbs().maxCoeff(), 1e-13);
        }
    }
    EXPECT_SPK_ERROR(spk::discrete_power(spk::cycle(4), -1), ErrorCode::InvalidArgument);
}

TEST(Chain, LazinessRoundTrip) {
    auto c = spk::cycle(9);
    auto lazy = spk::add_laziness(c, 0.25);
    EXPECT_NEAR(lazy.holding_alpha(), 0.25, 1e-15);
    auto back = spk::remove_laziness(lazy, 0.25);
    EXPECT_LT((back.kernel() - c.kernel()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_SPK_ERROR(spk::remove_laziness(lazy, 0.3), ErrorCode::AlphaExceedsHolding);
    EXPECT_SPK_ERROR(spk::add_laziness(c, 1.0), ErrorCode::AlphaOutOfRange);
    EXPECT_SPK_ERROR(spk::add_laziness(c, -0.1), ErrorCode::AlphaOutOfRange);
}

TEST(Chain, PeriodOfCycles) {
    EXPECT_EQ(spk::period(spk::cycle(8).kernel()), 2);
    EXPECT_EQ(spk::period(spk::cycle(9).kernel()), 1);
    EXPECT_EQ(spk::period(spk::cycle(8, 0.5).kernel()), 1);
    Matrix rot = Matrix::Zero(3, 3);
    rot(0, 1) = rot(1, 2) = rot(2, 0) = 1.0;
    EXPECT_EQ(spk::period(rot), 3);
}

TEST(Chain, ComponentsAndIrreducibility) {
    Matrix K = Matrix::Zero(4, 4);
    K(0, 1) = K(1, 0) = 1.0;
    K(2, 3) = K(3, 2) = 1.0;
    EXPECT_FALSE(spk::is_irreducible(K));
    auto comp = spk::strongly_connected_components(K);
    EXPECT_EQ(comp[0], comp[1]);
    EXPECT_EQ(comp[2], comp[3]);
    EXPECT_NE(comp[0], comp[2]);
    EXPECT_SPK_ERROR(spk::build_chain(K), ErrorCode::Reducible);
}

TEST(Chain, ValidationErrors) {
    Matrix K = Matrix::Constant(3, 3, 0.3);
    EXPECT_SPK_ERROR(spk::build_chain(K), ErrorCode::NotStochastic);
    Matrix neg = Matrix::Constant(2, 2, 0.5);
    neg(0, 0) = 1.5;
    neg(0, 1) = -0.5;
    EXPECT_SPK_ERROR(spk::build_chain(neg), ErrorCode::NotStochastic);
    EXPECT_SPK_ERROR(spk::build_chain(Matrix::Constant(2, 3, 0.5)), ErrorCode::DimensionMismatch);
    EXPECT_SPK_ERROR(MarkovChain::build(Matrix::Constant(2, 2, 0.5), {}, {"a"}), ErrorCode::DimensionMismatch);
}

TEST(Chain, SmallRowErrorsAreRenormalized) {
    Matrix K = Matrix::Constant(3, 3, 1.0 / 3.0);
    K(0, 0) += 5e-10;
    auto c = spk::build_chain(K);
    EXPECT_NEAR(c.kernel().row(0).sum(), 1.0, 1e-15);
}

TEST(Chain, SymmetrizationsAreReversibleAndStochastic) {
    for (const auto& c : sample_chains(24, 8, false)) {
        auto ms = spk::multiplicative_symmetrizations(c);
        for (const Matrix* M : {&ms.kk_star, &ms.k_star_k}) {
            EXPECT_LT((M->rowwise().sum() - Vector::Ones(c.size())).cwiseAbs().maxCoeff(), 1e-12);
            for (int x = 0; x < c.size(); ++x)
                for (int y = 0; y < c.size(); ++y)
                    EXPECT_NEAR(c.pi()(x) * (*M)(x, y), c.pi()(y) * (*M)(y, x), 1e-14);
        }
        Matrix S = spk::symmetrized_kernel(c);
        EXPECT_LT((S - S.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(ChainIO, JsonRoundTripIsBitExact) {
    std::mt19937_64 rng(25);
    for (int i = 0; i < 20; ++i) {
        auto c = (i % 2) ? spk::random_chain(2 + i % 7, rng) : spk::random_reversible_chain(2 + i % 7, rng);
        std::stringstream ss;
        spk::write_chain_json(ss, c);
        auto back = spk::read_chain_json(ss);
        ASSERT_EQ(back.size(), c.size());
        for (int x = 0; x < c.size(); ++x)
            for (int y = 0; y < c.size(); ++y) EXPECT_EQ(back.kernel()(x, y), c.kernel()(x, y));
        EXPECT_EQ(back.labels(), c.labels());
    }
}

TEST(ChainIO, LabelsSurviveJson) {
    auto c = spk::torus_product(3, 4);
    auto back = spk::chain_from_json(spk::chain_to_json(c));
    EXPECT_EQ(back.labels(), c.labels());
    EXPECT_EQ(back.labels()[5], "(1,1)");
}

TEST(ChainIO, MalformedJson) {
    std::stringstream bad("{\"n\": 2, \"kernel\": [[1, 0]");
    EXPECT_SPK_ERROR(spk::read_chain_json(bad), ErrorCode::ParseError);
    std::stringstream mismatch("{\"n\": 3, \"kernel\": [[0.5, 0.5], [0.5, 0.5]]}");
    EXPECT_SPK_ERROR(spk::read_chain_json(mismatch), ErrorCode::DimensionMismatch);
    std::stringstream substochastic("{\"n\": 2, \"kernel\": [[0.5, 0.4], [0.5, 0.5]]}");
    EXPECT_SPK_ERROR(spk::read_chain_json(substochastic), ErrorCode::NotStochastic);
}

TEST(ChainIO, EdgeListWithLabels) {
    std::stringstream csv("src,dst,prob\n# two-state flip\nup,down,0.5\nup,up,0.25\nup,up,0.25\ndown,up,1\n");
    auto c = spk::read_edge_list_csv(csv);
    ASSERT_EQ(c.size(), 2);
    EXPECT_EQ(c.labels()[0], "up");
    EXPECT_EQ(c.labels()[1], "down");
    EXPECT_DOUBLE_EQ(c.kernel()(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(c.kernel()(1, 0), 1.0);
    EXPECT_NEAR(c.pi()(0), 2.0 / 3.0, 1e-15);
}

TEST(ChainIO, EdgeListWithIndices) {
    std::stringstream csv("0,1,1\n1,2,1\n2,0,1\n");
    auto c = spk::read_edge_list_csv(csv);
    ASSERT_EQ(c.size(), 3);
    EXPECT_EQ(spk::period(c.kernel()), 3);
    std::stringstream bad("0,1\n");
    EXPECT_SPK_ERROR(spk::read_edge_list_csv(bad), ErrorCode::ParseError);
    std::stringstream empty("src,dst,prob\n");
    EXPECT_SPK_ERROR(spk::read_edge_list_csv(empty), ErrorCode::ParseError);
}

}  // namespace
