#include "oracles.hpp"
#include "test_util.hpp"

#include "spk/profiles.hpp"
#include "spk/zoo.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace {

using spk::MarkovChain;
using spk::Matrix;
using spk::Vector;

std::vector<MarkovChain> chains(std::uint64_t seed, int count, bool reversible, int lo = 3, int hi = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> size(lo, hi);
    std::vector<MarkovChain> out;
    for (int i = 0; i < count; ++i)
        out.push_back(reversible ? spk::random_reversible_chain(size(rng), rng) : spk::random_chain(size(rng), rng));
    return out;
}

bool connected_mask(const std::vector<std::vector<int>>& adj, std::uint64_t mask) {
    int start = std::countr_zero(mask);
    std::uint64_t seen = 1ULL << start;
    std::vector<int> stack{start};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if ((mask >> v & 1ULL) && !(seen >> v & 1ULL)) {
                seen |= 1ULL << v;
                stack.push_back(v);
            }
    }
    return seen == mask;
}

/// Phi(r) by brute force over every proper subset.
double conductance_oracle(const MarkovChain& c, double r) {
    const int n = c.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask) {
        auto s = oracle::members(mask, n);
        double m = oracle::mass(c.pi(), s);
        if (m <= r * (1 + 1e-12)) best = std::min(best, oracle::boundary(c.kernel(), c.pi(), s) / m);
    }
    return best;
}

double gap_oracle(const MarkovChain& c) {
    const int n = c.size();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::dirichlet_matrix(c.kernel(), c.pi(), all));
    return es.eigenvalues()(1);
}

MarkovChain tree_walk(const std::vector<std::pair<int, int>>& edges, int n) {
    std::vector<int> deg(n, 0);
    for (auto [a, b] : edges) ++deg[a], ++deg[b];
    Matrix K = Matrix::Zero(n, n);
    for (auto [a, b] : edges) {
        K(a, b) = 1.0 / deg[a];
        K(b, a) = 1.0 / deg[b];
    }
    return spk::build_chain(K);
}

TEST(SpectralGap, CycleAndCompleteGraph) {
    for (int n : {5, 8, 12, 31}) EXPECT_NEAR(spk::spectral_gap(spk::cycle(n)), 1 - std::cos(2 * std::numbers::pi / n), 1e-12);
    EXPECT_NEAR(spk::spectral_gap(spk::complete_graph(7)), 1.0, 1e-12);
}

TEST(SpectralGap, MatchesSymmetrizedSpectrum) {
    for (bool rev : {true, false})
        for (const auto& c : chains(51, 15, rev)) {
            auto gp = spk::spectral_gap_pair(c);
            EXPECT_NEAR(gp.value, gap_oracle(c), 1e-12);
            EXPECT_NEAR(spk::expectation(c, gp.function.cwiseAbs2()), 1.0, 1e-10);
            EXPECT_NEAR(spk::expectation(c, gp.function), 0.0, 1e-10);
        }
}

TEST(SpectralProfile, CycleArcsHaveDirichletPathEigenvalues) {
    for (int n : {5, 8, 12}) {
        auto c = spk::cycle(n);
        spk::ProfileOptions po;
        po.survey.mode = spk::EnumerationMode::Exhaustive;
        auto band = spk::spectral_profile_exhaustive(c, po);
        for (int s = 1; s < n; ++s) {
            double r = static_cast<double>(s) / n;
            EXPECT_NEAR(band.lambda0_min(r), 1 - std::cos(std::numbers::pi / (s + 1)), 1e-10) << n << " " << s;
        }
        EXPECT_NEAR(band.lambda1, 1 - std::cos(2 * std::numbers::pi / n), 1e-12);
        EXPECT_FALSE(band.truncated);
    }
}

TEST(SpectralProfile, CompleteGraphIsIdenticallyOne) {
    for (int n : {4, 10}) {
        auto c = spk::complete_graph(n);
        auto band = spk::spectral_profile_exhaustive(c);
        for (int s = 1; s < n; ++s) {
            double r = static_cast<double>(s) / n;
            EXPECT_NEAR(band.lambda0_min(r), 1.0 - r, 1e-12);
            EXPECT_NEAR(band.lower(r), 1.0, 1e-12);
        }
    }
}

TEST(Survey, RecordsEveryConnectedProperSubset) {
    for (bool rev : {true, false})
        for (const auto& c : chains(52, 10, rev)) {
            const int n = c.size();
            const auto adj = oracle::adjacency_of(c.kernel());
            spk::SurveyOptions so;
            so.mode = spk::EnumerationMode::Exhaustive;
            auto sv = spk::survey_subsets(c, so);
            std::vector<std::uint64_t> expected;
            for (std::uint64_t mask = 1; mask + 1 < (1ULL << n); ++mask)
                if (connected_mask(adj, mask)) expected.push_back(mask);
            std::vector<std::uint64_t> got;
            for (const auto& rec : sv.records) got.push_back(rec.mask);
            std::sort(got.begin(), got.end());
            EXPECT_EQ(got, expected);
            for (const auto& rec : sv.records) {
                auto s = oracle::members(rec.mask, n);
                EXPECT_NEAR(rec.mass, oracle::mass(c.pi(), s), 1e-14);
                EXPECT_NEAR(rec.boundary, oracle::boundary(c.kernel(), c.pi(), s), 1e-14);
                Eigen::SelfAdjointEigenSolver<Matrix> es(oracle::dirichlet_matrix(c.kernel(), c.pi(), s));
                EXPECT_NEAR(rec.lambda0, es.eigenvalues()(0), 1e-11);
            }
            EXPECT_TRUE(sv.covers_all_proper);
        }
}

TEST(Survey, ConnectedModeAgreesWithExhaustive) {
    for (const auto& c : chains(53, 10, true, 4, 10)) {
        spk::SurveyOptions ex, co;
        ex.mode = spk::EnumerationMode::Exhaustive;
        co.mode = spk::EnumerationMode::Connected;
        ex.r_max = co.r_max = 0.6;
        auto a = spk::survey_subsets(c, ex), b = spk::survey_subsets(c, co);
        auto key = [](const spk::SetRecord& r) { return r.mask; };
        auto sorted = [&](std::vector<spk::SetRecord> v) {
            std::sort(v.begin(), v.end(), [&](auto& x, auto& y) { return key(x) < key(y); });
            return v;
        };
        auto sa = sorted(a.records), sb = sorted(b.records);
        ASSERT_EQ(sa.size(), sb.size());
        for (std::size_t i = 0; i < sa.size(); ++i) {
            EXPECT_EQ(sa[i].mask, sb[i].mask);
            EXPECT_LE(sa[i].mass, 0.6 + 1e-12);
            EXPECT_NEAR(sa[i].lambda0, sb[i].lambda0, 1e-12);
        }
    }
}

TEST(Survey, ThreadCountDoesNotChangeResults) {
    auto [g, c] = spk::viscek(4, 1);
    spk::SurveyOptions one, many;
    one.threads = 1;
    many.threads = 4;
    one.r_max = many.r_max = 0.5;
    auto a = spk::survey_subsets(c, one), b = spk::survey_subsets(c, many);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].mask, b.records[i].mask);
        EXPECT_EQ(a.records[i].lambda0, b.records[i].lambda0);
    }
}

TEST(Survey, BudgetAndCap) {
    spk::SurveyOptions so;
    so.max_sets = 10;
    EXPECT_SPK_ERROR(spk::survey_subsets(spk::cycle(30), so), spk::ErrorCode::TooLarge);
    spk::ProfileOptions po;
    po.survey.mode = spk::EnumerationMode::Exhaustive;
    EXPECT_SPK_ERROR(spk::spectral_profile_exhaustive(spk::cycle(21), po), spk::ErrorCode::TooLarge);
}

TEST(SpectralProfile, BandIsOrdered) {
    for (bool rev : {true, false})
        for (const auto& c : chains(54, 12, rev)) {
            auto band = spk::spectral_profile_exhaustive(c);
            for (double r = c.pi_star(); r <= 1.0; r += 0.01) {
                EXPECT_GE(band.lower(r), band.lambda1 - 1e-12);
                EXPECT_LE(band.lower(r), band.upper(r) * (1 + 1e-9) + 1e-12) << r;
            }
            EXPECT_LE(band.upper(0.5), 2 * band.lambda1 * (1 + 1e-12));
            EXPECT_TRUE(band.lower.non_increasing());
            EXPECT_TRUE(band.upper.non_increasing());
            for (const auto& am : band.argmin)
                EXPECT_NEAR(spk::lambda0(c, am.members), am.lambda0, 1e-10);
        }
}

TEST(SpectralProfile, UpperEdgeIsAttainedByATestFunction) {
    for (const auto& c : chains(55, 8, true)) {
        auto band = spk::spectral_profile_exhaustive(c);
        // Every upper value is E(f)/Var(f) for some f, so it can never beat lambda1's variational floor.
        EXPECT_GE(band.upper.min_value(), band.lambda1 * (1 - 1e-9));
    }
}

TEST(Conductance, EnumerationMatchesBruteForce) {
    for (bool rev : {true, false})
        for (const auto& c : chains(56, 12, rev)) {
            auto cp = spk::conductance_profile(c, spk::ConductanceMethod::Enumeration);
            EXPECT_TRUE(cp.exact);
            for (double r = c.pi_star(); r < 1.0; r += 0.013) EXPECT_NEAR(cp.phi(r), conductance_oracle(c, r), 1e-13) << r;
            EXPECT_NEAR(cp.phi_star(0.8), cp.phi(0.5), 1e-15);
        }
}

TEST(Conductance, TreeProgramMatchesEnumeration) {
    std::mt19937_64 rng(57);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 3 + trial % 12;
        std::vector<std::pair<int, int>> edges;
        for (int v = 1; v < n; ++v) edges.emplace_back(std::uniform_int_distribution<int>(0, v - 1)(rng), v);
        auto c = tree_walk(edges, n);
        ASSERT_TRUE(spk::is_tree_walk(c));
        auto dp = spk::conductance_profile(c, spk::ConductanceMethod::TreeDynamicProgram);
        auto en = spk::conductance_profile(c, spk::ConductanceMethod::Enumeration);
        for (double r = c.pi_star(); r < 1.0; r += 0.007) EXPECT_NEAR(dp.phi(r), en.phi(r), 1e-13) << n << " " << r;
    }
    EXPECT_FALSE(spk::is_tree_walk(spk::cycle(6)));
    EXPECT_FALSE(spk::is_tree_walk(spk::complete_graph(3)));
}

TEST(Conductance, TreeProgramOnViscekMatchesConnectedSurvey) {
    auto [g, c] = spk::viscek(4, 1);
    ASSERT_TRUE(spk::is_tree_walk(c));
    auto dp = spk::conductance_profile(c, spk::ConductanceMethod::TreeDynamicProgram);
    spk::SurveyOptions so;
    so.eigensolve = false;
    auto en = spk::conductance_from_survey(spk::survey_subsets(c, so));
    for (double r = c.pi_star(); r < 1.0; r += 0.005) EXPECT_NEAR(dp.phi(r), en.phi(r), 1e-13) << r;
}

TEST(Conductance, SweepIsAnUpperEnvelope) {
    for (const auto& c : chains(58, 12, false)) {
        auto sw = spk::conductance_profile(c, spk::ConductanceMethod::Sweep);
        EXPECT_FALSE(sw.exact);
        EXPECT_EQ(sw.phi.kind(), spk::ProfileKind::UpperEnvelope);
        for (double r = c.pi_star(); r < 1.0; r += 0.01)
            if (std::isfinite(sw.phi(r))) EXPECT_GE(sw.phi(r), conductance_oracle(c, r) - 1e-13);
    }
}

TEST(Cheeger, EnvelopesBracketTheProfile) {
    for (const auto& c : chains(59, 12, true)) {
        auto band = spk::spectral_profile_exhaustive(c);
        auto cp = spk::conductance_profile(c);
        auto env = spk::cheeger_envelopes(cp.phi);
        ASSERT_FALSE(env.lower.empty());
        ASSERT_FALSE(env.upper.empty());
        for (double r = c.pi_star(); r < 1.0; r += 0.01) {
            EXPECT_LE(env.lower(r), band.lambda0_min(r) + 1e-12);
            EXPECT_GE(env.upper(r), band.lower(r) - 1e-12);
        }
    }
    spk::StepProfile up({0.1}, {1.0}, spk::ProfileKind::UpperEnvelope, spk::ProfileSource::Sweep);
    EXPECT_TRUE(spk::cheeger_envelopes(up).lower.empty());
    spk::StepProfile lo({0.1}, {1.0}, spk::ProfileKind::LowerEnvelope, spk::ProfileSource::Volume);
    EXPECT_TRUE(spk::cheeger_envelopes(lo).upper.empty());
}

TEST(Growth, BallVolumesMatchBfs) {
    for (const auto& c : chains(60, 10, false)) {
        auto g = spk::growth_data(c);
        auto d = oracle::bfs_distances(oracle::adjacency_of(c.kernel()));
        int diam = 0;
        for (auto& row : d) diam = std::max(diam, *std::max_element(row.begin(), row.end()));
        EXPECT_EQ(g.diameter, diam);
        for (int x = 0; x < c.size(); ++x)
            for (int r = 0; r <= diam; ++r) {
                double v = 0.0;
                for (int y = 0; y < c.size(); ++y)
                    if (d[x][y] <= r) v += c.pi()(y);
                EXPECT_NEAR(g.volume[x][r], v, 1e-14);
            }
    }
}

TEST(Growth, InverseVolumeFunctions) {
    auto c = spk::cycle(10);
    auto g = spk::growth_data(c);
    EXPECT_EQ(g.diameter, 5);
    EXPECT_NEAR(g.v_star[2], 0.5, 1e-15);
    EXPECT_EQ(g.w(0.05), 0);
    EXPECT_EQ(g.w(0.1), 1);
    EXPECT_EQ(g.w(1.0), 6);
    EXPECT_EQ(g.W(0.1), 0);
    EXPECT_EQ(g.W(0.3), 1);
    EXPECT_EQ(g.W(0.5), 2);
    EXPECT_EQ(g.W(1.0), 5);
}

TEST(Growth, EnvelopesStayBelowTheProfile) {
    std::vector<MarkovChain> zoo = {spk::cycle(8), spk::cycle(12), spk::complete_graph(6), spk::torus_product(3, 4)};
    for (const auto& c : chains(61, 8, true)) zoo.push_back(c);
    for (const auto& c : zoo) {
        auto band = spk::spectral_profile_exhaustive(c);
        auto g = spk::growth_data(c);
        auto vol = spk::volume_profile_bound(c, g);
        for (double r = c.pi_star(); r <= 1.0; r += 0.005) {
            EXPECT_LE(vol(r), band.upper(r) + 1e-12);
            if (r < 1.0 - 1e-9) EXPECT_LE(vol(r), band.lambda0_min(r) + 1e-12) << r;
        }
    }
    for (const auto& c : {spk::cycle(8), spk::cycle(12), spk::torus_product(3, 4)}) {
        auto band = spk::spectral_profile_exhaustive(c);
        auto g = spk::growth_data(c);
        auto poi = spk::poincare_profile_bound(c, g, spk::group_walk_poincare_constant(c));
        for (double r = c.pi_star(); r <= 1.0; r += 0.005) EXPECT_LE(poi(r), band.lower(r) + 1e-12) << r;
    }
}

TEST(Growth, GroupWalkPoincareConstant) {
    EXPECT_DOUBLE_EQ(spk::group_walk_poincare_constant(spk::cycle(9)), 4.0);
    EXPECT_DOUBLE_EQ(spk::group_walk_poincare_constant(spk::torus_product(3, 5)), 8.0);
}

TEST(Growth, MinimalGrowthConstantIsTight) {
    for (const auto& c : {spk::cycle(16), spk::torus_product(3, 9), spk::torus_product(4, 6)}) {
        auto g = spk::growth_data(c);
        for (double d : {1.0, 2.0}) {
            double A = spk::minimal_growth_constant(g, d);
            EXPECT_TRUE(spk::moderate_growth_check(g, A * (1 + 1e-12), d).holds);
            if (A > 1.0) EXPECT_FALSE(spk::moderate_growth_check(g, A * 0.99, d).holds);
        }
    }
}

TEST(Nash, ModerateGrowthConstants) {
    auto nc = spk::moderate_growth_nash(2.0, 1.0, 4.0, 8);
    EXPECT_NEAR(nc.C, 4.0 * 4.0 * 4.0 * 4.0 * 64.0, 1e-9);
    EXPECT_DOUBLE_EQ(nc.D, 0.25);
    EXPECT_DOUBLE_EQ(nc.T, 256.0);
    auto p = spk::nash_profile_bound(nc.C, nc.D, nc.T, 1e-3);
    for (double r = 1e-3; r < 1.0; r *= 1.1)
        EXPECT_LE(p(r), std::max(0.0, 1.0 / (nc.C * std::pow(r, 2.0)) - 1.0 / nc.T) + 1e-15);
}

TEST(LogSobolev, FactorLimitAndMonotonicity) {
    EXPECT_NEAR(spk::logsob_factor(1.0 - 1e-9), 1.0, 1e-8);
    EXPECT_NEAR(spk::logsob_factor(0.5), std::log(2.0) / 0.5, 1e-15);
    double prev = spk::logsob_factor(1e-6);
    for (double r = 2e-6; r < 1.0; r *= 1.5) {
        double v = spk::logsob_factor(r);
        EXPECT_LE(v, prev);
        prev = v;
    }
    auto p = spk::logsob_profile_bound(0.3, 1e-4);
    for (double r = 1e-4; r < 1.0; r *= 1.07) EXPECT_LE(p(r), 0.3 * spk::logsob_factor(r) + 1e-15);
}

TEST(LogSobolev, CompleteGraphConstants) {
    for (int n : {3, 4, 6}) {
        auto est = spk::estimate_logsob(spk::complete_graph(n));
        double rho = (1.0 - 2.0 / n) / std::log(n - 1.0);
        EXPECT_NEAR(est.value, rho, 1e-6 * rho) << n;
        EXPECT_NEAR(spk::logsob_quotient(spk::complete_graph(n), est.argmin), est.value, 1e-12);
    }
}

TEST(LogSobolev, EstimateMatchesGridScan) {
    auto c = spk::cycle(3, 0.2);
    double best = std::numeric_limits<double>::infinity();
    const int m = 600;
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            double a = std::numbers::pi / 2 * i / m, b = std::numbers::pi / 2 * j / m;
            Vector f(3);
            f << std::cos(a), std::sin(a) * std::cos(b), std::sin(a) * std::sin(b);
            best = std::min(best, spk::logsob_quotient(c, f));
        }
    auto est = spk::estimate_logsob(c);
    EXPECT_LE(est.value, best + 1e-12);
    EXPECT_GE(est.value, best * (1 - 1e-4));
    EXPECT_LE(est.value, spk::spectral_gap(c) / 2 + 1e-12);
}

TEST(LogSobolev, EntropyOfConstantIsZero) {
    auto c = spk::cycle(5);
    EXPECT_NEAR(spk::entropy(c, Vector::Constant(5, 3.0)), 0.0, 1e-15);
    Vector f = Vector::Zero(5);
    f(0) = 1.0;
    EXPECT_NEAR(spk::entropy(c, f), 0.2 * std::log(5.0), 1e-15);
}

}  // namespace
