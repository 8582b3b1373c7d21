#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spk {

enum class ProfileKind { Exact, LowerEnvelope, UpperEnvelope };

enum class ProfileSource {
    Enumeration,
    Cheeger,
    Volume,
    Poincare,
    LogSobolev,
    Nash,
    TestFunction,
    SpectralGap,
    Sweep,
    TreeDynamicProgram,
    Combined,
};

std::string_view to_string(ProfileKind kind) noexcept;
std::string_view to_string(ProfileSource source) noexcept;
ProfileKind profile_kind_from_string(std::string_view s);
ProfileSource profile_source_from_string(std::string_view s);

/// Right-continuous step function r -> value. On [breakpoints[i], breakpoints[i+1])
/// the value is values[i]; the last value extends to infinity. Below the first
/// breakpoint the profile is an infimum over an empty family and evaluates to
/// +infinity.
class StepProfile {
public:
    StepProfile() = default;
    StepProfile(std::vector<double> breakpoints, std::vector<double> values, ProfileKind kind,
                ProfileSource source);

    /// Builds the running minimum of (r, value) samples: the profile
    /// r -> inf{value_i : r_i <= r}. Samples need not be sorted.
    static StepProfile running_min(std::vector<std::pair<double, double>> samples, ProfileKind kind,
                                   ProfileSource source, double merge_tol = 1e-12);

    /// Step lower envelope of a non-increasing function on the given grid: the
    /// piece starting at grid[i] takes fn(grid[i+1]) and the final piece takes
    /// `tail`.
    static StepProfile discretize_nonincreasing(const std::function<double(double)>& fn,
                                                std::vector<double> grid, double tail,
                                                ProfileSource source);

    double operator()(double r) const;
    double value_at(double r) const { return (*this)(r); }

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& values() const noexcept { return values_; }
    ProfileKind kind() const noexcept { return kind_; }
    ProfileSource source() const noexcept { return source_; }
    bool empty() const noexcept { return breakpoints_.empty(); }
    std::size_t size() const noexcept { return breakpoints_.size(); }

    bool non_increasing(double tol = 0.0) const;
    double min_value() const;

    StepProfile with_kind(ProfileKind kind) const;
    StepProfile with_source(ProfileSource source) const;
    /// Applies fn to every value (breakpoints unchanged).
    StepProfile map(const std::function<double(double, double)>& fn, ProfileKind kind,
                    ProfileSource source) const;
    /// Restricted to [.., r_end): the value at r_end extends beyond.
    StepProfile freeze_after(double r_end) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    ProfileKind kind_ = ProfileKind::Exact;
    ProfileSource source_ = ProfileSource::Enumeration;
};

/// Pointwise max / min over the union of breakpoints. +infinity below a
/// profile's first breakpoint is honored (max ignores it only via min semantics).
StepProfile pointwise_max(const std::vector<StepProfile>& profiles, ProfileKind kind,
                          ProfileSource source = ProfileSource::Combined);
StepProfile pointwise_min(const std::vector<StepProfile>& profiles, ProfileKind kind,
                          ProfileSource source = ProfileSource::Combined);

/// Geometric grid from lo to hi (inclusive) with `per_decade` points per decade.
std::vector<double> log_grid(double lo, double hi, int per_decade);

void write_csv(std::ostream& os, const StepProfile& profile);
nlohmann::json to_json(const StepProfile& profile);
StepProfile profile_from_json(const nlohmann::json& j);

}  // namespace spk
