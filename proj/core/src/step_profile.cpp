#include "spk/step_profile.hpp"

#include "spk/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

namespace spk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct KindName {
    ProfileKind kind;
    std::string_view name;
};

constexpr KindName kKindNames[] = {
    {ProfileKind::Exact, "exact"},
    {ProfileKind::LowerEnvelope, "lower_envelope"},
    {ProfileKind::UpperEnvelope, "upper_envelope"},
};

struct SourceName {
    ProfileSource source;
    std::string_view name;
};

constexpr SourceName kSourceNames[] = {
    {ProfileSource::Enumeration, "enumeration"},
    {ProfileSource::Cheeger, "cheeger"},
    {ProfileSource::Volume, "volume"},
    {ProfileSource::Poincare, "poincare"},
    {ProfileSource::LogSobolev, "logsob"},
    {ProfileSource::Nash, "nash"},
    {ProfileSource::TestFunction, "test_function"},
    {ProfileSource::SpectralGap, "spectral_gap"},
    {ProfileSource::Sweep, "sweep"},
    {ProfileSource::TreeDynamicProgram, "tree_dp"},
    {ProfileSource::Combined, "combined"},
};

// Relative slack used when locating r among breakpoints, so that r = 3/8
// computed one way finds a breakpoint 3/8 accumulated another way.
constexpr double kLookupSlack = 1e-12;

}  // namespace

std::string_view to_string(ProfileKind kind) noexcept {
    for (const auto& k : kKindNames)
        if (k.kind == kind) return k.name;
    return "exact";
}

std::string_view to_string(ProfileSource source) noexcept {
    for (const auto& s : kSourceNames)
        if (s.source == source) return s.name;
    return "combined";
}

ProfileKind profile_kind_from_string(std::string_view s) {
    for (const auto& k : kKindNames)
        if (k.name == s) return k.kind;
    throw Error(ErrorCode::ParseError, "unknown profile kind '" + std::string(s) + "'");
}

ProfileSource profile_source_from_string(std::string_view s) {
    for (const auto& src : kSourceNames)
        if (src.name == s) return src.source;
    throw Error(ErrorCode::ParseError, "unknown profile source '" + std::string(s) + "'");
}

StepProfile::StepProfile(std::vector<double> breakpoints, std::vector<double> values,
                         ProfileKind kind, ProfileSource source)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), kind_(kind),
      source_(source) {
    if (breakpoints_.size() != values_.size())
        throw Error(ErrorCode::DimensionMismatch, "breakpoints and values differ in length");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
}

StepProfile StepProfile::running_min(std::vector<std::pair<double, double>> samples,
                                     ProfileKind kind, ProfileSource source, double merge_tol) {
    std::sort(samples.begin(), samples.end());
    std::vector<double> bps;
    std::vector<double> vals;
    double best = kInf;
    for (const auto& [r, v] : samples) {
        best = std::min(best, v);
        if (!bps.empty() && r <= bps.back() * (1.0 + merge_tol)) {
            vals.back() = best;
            continue;
        }
        if (!vals.empty() && best == vals.back()) continue;
        bps.push_back(r);
        vals.push_back(best);
    }
    return StepProfile(std::move(bps), std::move(vals), kind, source);
}

StepProfile StepProfile::discretize_nonincreasing(const std::function<double(double)>& fn,
                                                  std::vector<double> grid, double tail,
                                                  ProfileSource source) {
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) vals[i] = std::max(0.0, fn(grid[i + 1]));
    if (!grid.empty()) vals.back() = std::max(0.0, tail);
    return StepProfile(std::move(grid), std::move(vals), ProfileKind::LowerEnvelope, source);
}

double StepProfile::operator()(double r) const {
    if (breakpoints_.empty()) return kInf;
    const double probe = r + kLookupSlack * std::max(1.0, std::abs(r));
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), probe);
    if (it == breakpoints_.begin()) return kInf;
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

bool StepProfile::non_increasing(double tol) const {
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] > values_[i - 1] + tol) return false;
    return true;
}

double StepProfile::min_value() const {
    if (values_.empty()) return kInf;
    return *std::min_element(values_.begin(), values_.end());
}

StepProfile StepProfile::with_kind(ProfileKind kind) const {
    StepProfile out = *this;
    out.kind_ = kind;
    return out;
}

StepProfile StepProfile::with_source(ProfileSource source) const {
    StepProfile out = *this;
    out.source_ = source;
    return out;
}

StepProfile StepProfile::map(const std::function<double(double, double)>& fn, ProfileKind kind,
                             ProfileSource source) const {
    std::vector<double> vals(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) vals[i] = fn(breakpoints_[i], values_[i]);
    return StepProfile(breakpoints_, std::move(vals), kind, source);
}

StepProfile StepProfile::freeze_after(double r_end) const {
    std::vector<double> bps;
    std::vector<double> vals;
    for (std::size_t i = 0; i < breakpoints_.size() && breakpoints_[i] < r_end; ++i) {
        bps.push_back(breakpoints_[i]);
        vals.push_back(values_[i]);
    }
    const double at_end = (*this)(r_end);
    if (std::isfinite(at_end) && (vals.empty() || vals.back() != at_end)) {
        bps.push_back(r_end);
        vals.push_back(at_end);
    }
    return StepProfile(std::move(bps), std::move(vals), kind_, source_);
}

namespace {

StepProfile combine(const std::vector<StepProfile>& profiles, ProfileKind kind,
                    ProfileSource source, bool take_max) {
    std::vector<double> grid;
    for (const auto& p : profiles) grid.insert(grid.end(), p.breakpoints().begin(), p.breakpoints().end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> bps;
    std::vector<double> vals;
    for (double r : grid) {
        double v = take_max ? -kInf : kInf;
        for (const auto& p : profiles) {
            const double pv = p(r);
            // Below its first breakpoint a profile says nothing useful about a
            // lower bound, so max skips it; min honors +inf literally.
            if (take_max && !std::isfinite(pv)) continue;
            v = take_max ? std::max(v, pv) : std::min(v, pv);
        }
        if (!std::isfinite(v)) continue;
        if (!vals.empty() && vals.back() == v) continue;
        bps.push_back(r);
        vals.push_back(v);
    }
    return StepProfile(std::move(bps), std::move(vals), kind, source);
}

}  // namespace

StepProfile pointwise_max(const std::vector<StepProfile>& profiles, ProfileKind kind,
                          ProfileSource source) {
    return combine(profiles, kind, source, true);
}

StepProfile pointwise_min(const std::vector<StepProfile>& profiles, ProfileKind kind,
                          ProfileSource source) {
    return combine(profiles, kind, source, false);
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1)
        throw Error(ErrorCode::InvalidArgument, "log_grid needs 0 < lo <= hi and per_decade >= 1");
    const double decades = std::log10(hi / lo);
    const int steps = std::max(1, static_cast<int>(std::ceil(decades * per_decade)));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
    out.front() = lo;
    out.back() = hi;
    return out;
}

void write_csv(std::ostream& os, const StepProfile& profile) {
    const auto prec = os.precision(17);
    os << "r,value,kind,source\n";
    for (std::size_t i = 0; i < profile.size(); ++i)
        os << profile.breakpoints()[i] << ',' << profile.values()[i] << ','
           << to_string(profile.kind()) << ',' << to_string(profile.source()) << '\n';
    os.precision(prec);
}

nlohmann::json to_json(const StepProfile& profile) {
    return {{"kind", to_string(profile.kind())},
            {"source", to_string(profile.source())},
            {"breakpoints", profile.breakpoints()},
            {"values", profile.values()}};
}

StepProfile profile_from_json(const nlohmann::json& j) {
    try {
        return StepProfile(j.at("breakpoints").get<std::vector<double>>(),
                           j.at("values").get<std::vector<double>>(),
                           profile_kind_from_string(j.at("kind").get<std::string>()),
                           profile_source_from_string(j.at("source").get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace spk
