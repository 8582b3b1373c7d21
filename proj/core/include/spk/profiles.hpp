#pragma once

#include "spk/chain.hpp"
#include "spk/step_profile.hpp"
#include "spk/subset.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace spk {

/// Second-smallest eigenvalue of (Delta + Delta*)/2 in L^2(pi).
double spectral_gap(const MarkovChain& chain);

/// Eigenpair behind spectral_gap: the value and an L^2(pi)-normalized eigenfunction.
struct GapEigenpair {
    double value = 0.0;
    Vector function;
};
GapEigenpair spectral_gap_pair(const MarkovChain& chain);

// ---------------------------------------------------------------------------
// Subset enumeration

enum class EnumerationMode {
    /// Every bitmask, connectivity filtered afterwards (n <= enumeration_cap).
    Exhaustive,
    /// Connected sets only, grown from their smallest vertex (n <= 64).
    Connected,
};

struct SurveyOptions {
    EnumerationMode mode = EnumerationMode::Connected;
    /// Only sets with pi(S) <= r_max are recorded.
    double r_max = 1.0;
    int enumeration_cap = 20;
    /// Connected mode gives up with TooLarge after this many recorded sets.
    std::size_t max_sets = 4'000'000;
    /// 0 means SPK_THREADS or the hardware concurrency.
    int threads = 0;
    bool eigensolve = true;
};

struct SetRecord {
    std::uint64_t mask = 0;
    double mass = 0.0;
    double lambda0 = 0.0;
    double boundary = 0.0;
};

/// All connected proper subsets with mass <= r_max, with lambda0 and |dS|.
struct SubsetSurvey {
    std::vector<SetRecord> records;
    double r_max = 1.0;
    /// True when r_max reaches every proper subset (r_max >= 1 - pi_*).
    bool covers_all_proper = false;
    std::size_t masks_visited = 0;
};

int worker_count(int requested = 0);

SubsetSurvey survey_subsets(const MarkovChain& chain, const SurveyOptions& opts = {});

// ---------------------------------------------------------------------------
// Spectral profile

struct ArgminSet {
    std::vector<int> members;
    double mass = 0.0;
    double lambda0 = 0.0;
};

struct ProfileOptions {
    SurveyOptions survey;
    bool refine_upper = true;
    int refine_cap = 64;
    VariationalOptions variational;
    int argmin_cap = 32;
};

struct SpectralProfileBand {
    /// max(min lambda0, lambda1); the edge every mixing bound consumes.
    StepProfile lower;
    /// min over sets of min(lambda0/(1-pi(S)), variational estimate), capped by 2 lambda1 from r = 1/2.
    StepProfile upper;
    /// r -> min{lambda0(S) : pi(S) <= r} without the lambda1 floor; an anti-Faber-Krahn function.
    StepProfile lambda0_min;
    double lambda1 = 0.0;
    std::vector<ArgminSet> argmin;
    std::size_t sets_eigensolved = 0;
    std::size_t sets_refined = 0;
    bool truncated = false;
};

/// Lambda(r) from enumeration. Throws TooLarge above the enumeration cap or
/// when the connected enumeration exceeds its budget.
SpectralProfileBand spectral_profile_exhaustive(const MarkovChain& chain,
                                                const ProfileOptions& opts = {});
SpectralProfileBand spectral_profile_from_survey(const MarkovChain& chain,
                                                 const SubsetSurvey& survey, double lambda1,
                                                 const ProfileOptions& opts = {});

// ---------------------------------------------------------------------------
// Conductance

enum class ConductanceMethod { Automatic, Enumeration, TreeDynamicProgram, Sweep };

struct ConductanceProfiles {
    StepProfile phi;
    /// Phi frozen at Phi(1/2) for r >= 1/2.
    StepProfile phi_star;
    ConductanceMethod method = ConductanceMethod::Enumeration;
    bool exact = true;
};

/// Automatic: enumeration within the cap, the tree program for simple random
/// walks on trees, and ball/Fiedler sweeps (upper envelope) otherwise.
ConductanceProfiles conductance_profile(const MarkovChain& chain,
                                        ConductanceMethod method = ConductanceMethod::Automatic,
                                        const SurveyOptions& opts = {});
ConductanceProfiles conductance_from_survey(const SubsetSurvey& survey);
StepProfile truncate_conductance(const StepProfile& phi);

/// True when the support graph is a tree carrying equal flow on every edge and
/// no holding, i.e. simple random walk on a tree.
bool is_tree_walk(const MarkovChain& chain, double tol = 1e-12);

struct CheegerEnvelopes {
    StepProfile lower;
    StepProfile upper;
};

/// Phi^2/2 (valid from an exact or lower-envelope Phi) and the running minimum
/// of Phi(r_i)/(1 - r_i) over breakpoints r_i < 1 (valid from an exact or
/// upper-envelope Phi). The envelope that the input cannot support is empty.
CheegerEnvelopes cheeger_envelopes(const StepProfile& phi);

// ---------------------------------------------------------------------------
// Volume growth

struct GrowthData {
    /// volume[x][r] = pi(B(x, r)) for r = 0..diameter.
    std::vector<std::vector<double>> volume;
    /// min_x volume[x][r]
    std::vector<double> v_star;
    int diameter = 0;

    /// inf{k : V_*(k) > r}; diameter + 1 when no such k (r >= 1).
    int w(double r) const;
    /// inf{r : V_*(r) >= v}
    int W(double v) const;
};

GrowthData growth_data(const MarkovChain& chain);

/// Q_* = min over support edges of pi(x)K(x,y) + pi(y)K(y,x).
double minimal_edge_flow(const MarkovChain& chain);

/// r -> Q_*/(4 r w(r)).
StepProfile volume_profile_bound(const MarkovChain& chain, const GrowthData& growth);

struct ModerateGrowthCheck {
    bool holds = true;
    int witness_x = -1;
    int witness_r = -1;
    double slack = 0.0;
};

/// V(x,r) >= (1/A)((r+1)/gamma)^d for all x and 0 <= r <= gamma.
ModerateGrowthCheck moderate_growth_check(const GrowthData& growth, double A, double d);
/// Smallest A for which moderate_growth_check passes with this d.
double minimal_growth_constant(const GrowthData& growth, double d);

/// v -> 1/(4 a W(2v)^2) on v <= 1/2 and half the value at 1/2 beyond.
StepProfile poincare_profile_bound(const MarkovChain& chain, const GrowthData& growth, double a);

/// Local Poincare constant 2|generators| for a walk on a group; the number of
/// generators is read off as the out-degree of state 0 in the support digraph.
double group_walk_poincare_constant(const MarkovChain& chain);

// ---------------------------------------------------------------------------
// Functional inequalities

/// log(1/r)/(1-r) with the r -> 1 limit handled by a series.
double logsob_factor(double r);

/// r -> rho log(1/r)/(1-r), discretized on a log grid from r_min.
StepProfile logsob_profile_bound(double rho, double r_min, int per_decade = 64);
/// r -> max(0, 1/(C r^{1/2D}) - 1/T), discretized on a log grid from r_min.
StepProfile nash_profile_bound(double C, double D, double T, double r_min, int per_decade = 64);

struct NashConstants {
    double C = 0.0;
    double D = 0.0;
    double T = 0.0;
};

/// The Nash inequality implied by (A,d)-moderate growth and a local Poincare
/// constant a: exponent 2+4/d (so D = d/4), T = a gamma^2 and
/// C = (1+1/d)^2 (1+d)^{2/d} A^{2/d} a gamma^2.
NashConstants moderate_growth_nash(double A, double d, double a, int gamma);

struct LogSobolevOptions {
    int restarts = 24;
    int max_iterations = 4000;
    double tolerance = 1e-13;
    std::uint64_t seed = 0x10950b;
};

struct LogSobolevEstimate {
    /// Best quotient found; an upper estimate of rho.
    double value = 0.0;
    Vector argmin;
    bool converged = false;
};

double entropy(const MarkovChain& chain, const Vector& f);
double logsob_quotient(const MarkovChain& chain, const Vector& f);
LogSobolevEstimate estimate_logsob(const MarkovChain& chain, const LogSobolevOptions& opts = {});

}  // namespace spk
