#include "test_util.hpp"

#include "spk/step_profile.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace {

using spk::ProfileKind;
using spk::ProfileSource;
using spk::StepProfile;

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(StepProfile, EvaluationIsRightContinuous) {
    StepProfile p({0.1, 0.3, 0.5}, {4.0, 2.0, 1.0}, ProfileKind::Exact, ProfileSource::Enumeration);
    EXPECT_EQ(p(0.05), kInf);
    EXPECT_EQ(p(0.1), 4.0);
    EXPECT_EQ(p(0.29), 4.0);
    EXPECT_EQ(p(0.3), 2.0);
    EXPECT_EQ(p(0.7), 1.0);
    EXPECT_EQ(p(1e9), 1.0);
    EXPECT_TRUE(p.non_increasing());
    EXPECT_EQ(p.min_value(), 1.0);
    EXPECT_EQ(StepProfile()(0.5), kInf);
}

TEST(StepProfile, ConstructorValidates) {
    EXPECT_SPK_ERROR(StepProfile({0.1, 0.1}, {1.0, 1.0}, ProfileKind::Exact, ProfileSource::Enumeration),
                     spk::ErrorCode::InvalidArgument);
    EXPECT_SPK_ERROR(StepProfile({0.1}, {1.0, 1.0}, ProfileKind::Exact, ProfileSource::Enumeration),
                     spk::ErrorCode::DimensionMismatch);
}

TEST(StepProfile, RunningMinMatchesBruteForce) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<double, double>> samples;
        for (int i = 0; i < 40; ++i) samples.emplace_back(u(rng), 10 * u(rng));
        auto p = StepProfile::running_min(samples, ProfileKind::Exact, ProfileSource::Enumeration);
        EXPECT_TRUE(p.non_increasing());
        for (int k = 0; k < 200; ++k) {
            double r = 1.1 * u(rng);
            double ref = kInf;
            for (auto [ri, vi] : samples)
                if (ri <= r) ref = std::min(ref, vi);
            EXPECT_EQ(p(r), ref) << "r=" << r;
        }
    }
}

TEST(StepProfile, DiscretizeGivesLowerEnvelope) {
    auto fn = [](double r) { return 1.0 / r; };
    auto grid = spk::log_grid(0.01, 1.0, 16);
    auto p = StepProfile::discretize_nonincreasing(fn, grid, 0.5, ProfileSource::LogSobolev);
    EXPECT_EQ(p.kind(), ProfileKind::LowerEnvelope);
    for (double r = 0.01; r < 1.0; r *= 1.013) EXPECT_LE(p(r), fn(r) * (1 + 1e-12));
    EXPECT_EQ(p(5.0), 0.5);
}

TEST(StepProfile, PointwiseMaxAndMin) {
    StepProfile a({0.1, 0.5}, {3.0, 1.0}, ProfileKind::LowerEnvelope, ProfileSource::Volume);
    StepProfile b({0.2, 0.4}, {2.0, 1.5}, ProfileKind::LowerEnvelope, ProfileSource::Cheeger);
    auto mx = spk::pointwise_max({a, b}, ProfileKind::LowerEnvelope);
    auto mn = spk::pointwise_min({a, b}, ProfileKind::UpperEnvelope);
    for (double r : {0.1, 0.15, 0.2, 0.3, 0.4, 0.45, 0.5, 0.9}) {
        double av = a(r), bv = b(r);
        double expect_max = std::isfinite(bv) ? std::max(av, bv) : av;
        EXPECT_EQ(mx(r), expect_max) << r;
        EXPECT_EQ(mn(r), std::min(av, bv)) << r;
    }
}

TEST(StepProfile, MapAndFreeze) {
    StepProfile p({0.1, 0.3, 0.6}, {4.0, 2.0, 1.0}, ProfileKind::Exact, ProfileSource::Enumeration);
    auto sq = p.map([](double, double v) { return v * v / 2; }, ProfileKind::LowerEnvelope, ProfileSource::Cheeger);
    EXPECT_EQ(sq(0.35), 2.0);
    EXPECT_EQ(sq.source(), ProfileSource::Cheeger);
    auto frozen = p.freeze_after(0.5);
    EXPECT_EQ(frozen(0.9), 2.0);
    EXPECT_EQ(frozen(0.2), 4.0);
}

TEST(StepProfile, LogGrid) {
    auto g = spk::log_grid(1e-3, 10.0, 64);
    EXPECT_EQ(g.front(), 1e-3);
    EXPECT_EQ(g.back(), 10.0);
    EXPECT_EQ(g.size(), 4u * 64u + 1u);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 1.0 / 64), 1e-12);
    EXPECT_SPK_ERROR(spk::log_grid(0.0, 1.0, 4), spk::ErrorCode::InvalidArgument);
}

TEST(StepProfile, JsonRoundTrip) {
    StepProfile p({0.1, 1.0 / 3.0, 0.7}, {std::sqrt(2.0), 0.1, 1e-300}, ProfileKind::UpperEnvelope,
                  ProfileSource::Sweep);
    auto back = spk::profile_from_json(nlohmann::json::parse(spk::to_json(p).dump()));
    EXPECT_EQ(back.breakpoints(), p.breakpoints());
    EXPECT_EQ(back.values(), p.values());
    EXPECT_EQ(back.kind(), p.kind());
    EXPECT_EQ(back.source(), p.source());
    EXPECT_SPK_ERROR(spk::profile_from_json(nlohmann::json::parse("{\"kind\":\"exact\"}")), spk::ErrorCode::ParseError);
}

TEST(StepProfile, CsvHasOneRowPerBreakpoint) {
    StepProfile p({0.25, 0.5}, {2.0, 1.0}, ProfileKind::Exact, ProfileSource::Enumeration);
    std::stringstream ss;
    spk::write_csv(ss, p);
    std::string header, row1, row2, extra;
    std::getline(ss, header);
    std::getline(ss, row1);
    std::getline(ss, row2);
    EXPECT_EQ(header, "r,value,kind,source");
    EXPECT_EQ(row1.substr(0, 7), "0.25,2,");
    EXPECT_FALSE(std::getline(ss, extra));
}

TEST(StepProfile, EnumNamesRoundTrip) {
    for (auto k : {ProfileKind::Exact, ProfileKind::LowerEnvelope, ProfileKind::UpperEnvelope})
        EXPECT_EQ(spk::profile_kind_from_string(spk::to_string(k)), k);
    for (int s = 0; s <= static_cast<int>(ProfileSource::Combined); ++s) {
        auto src = static_cast<ProfileSource>(s);
        EXPECT_EQ(spk::profile_source_from_string(spk::to_string(src)), src);
    }
    EXPECT_SPK_ERROR(spk::profile_kind_from_string("bogus"), spk::ErrorCode::ParseError);
}

}  // namespace
