#pragma once

#include "spk/bounds.hpp"
#include "spk/exact_mixing.hpp"
#include "spk/profiles.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spk {

enum class ProfileMode {
    /// Exhaustive up to the enumeration cap, connected up to 64 states, envelopes beyond.
    Automatic,
    Exhaustive,
    Connected,
    /// Volume, Poincare, Cheeger and functional-inequality envelopes only.
    Envelopes,
};

std::string_view to_string(ProfileMode mode) noexcept;
ProfileMode profile_mode_from_string(std::string_view s);

struct AnalysisOptions {
    double epsilon = 0.36787944117144233;
    ProfileMode mode = ProfileMode::Automatic;
    ProfileOptions profile;
    /// Holding probability for the discrete-time bounds; defaults to min_x K(x,x).
    std::optional<double> alpha;
    /// Known log-Sobolev constant. Without it an estimate is used and flagged.
    std::optional<double> rho;
    bool estimate_rho = true;
    std::optional<NashInput> nash;
    /// Local Poincare constant a; enables the Poincare envelope.
    std::optional<double> poincare_a;
    /// Moderate growth exponent d; A defaults to the smallest constant that works.
    std::optional<double> growth_d;
    std::optional<double> growth_A;
    /// Regularity parameters tried for the anti-Faber-Krahn bound.
    std::vector<double> deltas = {0.5, 0.25, 1.0 / 6.0, 0.125};
    /// Extra sets offered to the Dirichlet-set lower bound.
    std::vector<std::vector<int>> candidate_sets;
    bool exact = true;
    bool discrete = true;
};

struct ChainAnalysis {
    std::string label;
    double epsilon = 0.0;
    int n = 0;
    double pi_star = 0.0;
    double lambda1 = 0.0;
    bool reversible = false;
    double holding = 0.0;
    ProfileMode mode_used = ProfileMode::Envelopes;
    /// Lower bound on Lambda consumed by the profile mixing bounds.
    StepProfile lambda_lower;
    std::optional<SpectralProfileBand> band;
    std::optional<ConductanceProfiles> conductance;
    std::vector<BoundReport> reports;
    std::optional<ExactTau> exact;
    std::optional<ExactTau> exact_discrete;
    /// Bounds that were skipped and why.
    std::vector<std::string> notes;
};

/// Runs every bound that applies to the chain and, if requested, the exact mixing times.
ChainAnalysis analyze_chain(const MarkovChain& chain, const AnalysisOptions& opts = {}, std::string label = {});

/// Enumeration-based band following the mode rules; nullopt in envelope mode or
/// when the enumeration budget is exhausted at every mass cutoff tried.
std::optional<SpectralProfileBand> enumerate_profile(const MarkovChain& chain, ProfileMode mode,
                                                     const ProfileOptions& opts, SubsetSurvey* survey_out = nullptr,
                                                     ProfileMode* mode_used = nullptr);

struct DominanceViolation {
    std::string name;
    double value = 0.0;
    double exact = 0.0;
};

/// Unflagged upper reports must be >= the exact value and lower reports <= it
/// (relative tolerance tol); step-count reports compare with the discrete value.
/// Upper reports on tau_2 and lower reports on weaker distances are compared only
/// where the ordering of distances makes the comparison valid.
std::vector<DominanceViolation> check_dominance(const ChainAnalysis& analysis, double tol = 1e-9);

nlohmann::json to_json(const ChainAnalysis& analysis);
/// One row per report: chain,name,validity,distance,discrete,epsilon,value,exact,ratio,flags.
void write_report_csv(std::ostream& os, const std::vector<ChainAnalysis>& analyses);
/// Human-readable table with 9 significant digits.
void write_report_table(std::ostream& os, const ChainAnalysis& analysis);

/// Shortest decimal that round-trips, '.' separator regardless of locale.
std::string format_shortest(double v);
/// 9 significant digits.
std::string format_9(double v);

// ---------------------------------------------------------------------------
// Invariant suites

struct SuiteResult {
    std::string suite;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    /// Smallest slack seen (>= -tolerance passes).
    double worst_slack = 0.0;
    bool passed() const { return failures.empty(); }
};

struct SuiteOptions {
    std::uint64_t seed = 7;
    int chains = 50;
    int max_states = 8;
    int samples = 500;
    double tolerance = 1e-12;
};

/// Suites: "cheeger", "sandwich", "abs", "ebound", "dominance".
std::vector<std::string> suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace spk
