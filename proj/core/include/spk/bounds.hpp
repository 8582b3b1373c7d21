#pragma once

#include "spk/step_profile.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace spk {

enum class Validity { Upper, Lower };
std::string_view to_string(Validity v) noexcept;

struct BoundReport {
    std::string name;
    double value = 0.0;
    double epsilon = 0.0;
    Validity validity = Validity::Upper;
    /// Step-count bound (value is an integer).
    bool discrete = false;
    /// Distance the bound controls: "inf", "2" or "1".
    std::string distance = "inf";
    std::map<std::string, double> inputs;
    /// Hypotheses that were checked, e.g. "reversible", "DC>=T:violated".
    std::vector<std::string> assumptions;
    /// Short description of the result the formula comes from.
    std::string anchor;
    /// Which profile fed the bound: "lower_edge", "envelope", "constant", ...
    std::string profile_edge;
    /// A hypothesis failed or an input is only an estimate; the number is
    /// diagnostic and carries no guarantee.
    bool hypothesis_violated = false;
    /// The integration range was empty (4/eps <= 4 pi_*); value is 0.
    bool empty_range = false;
};

nlohmann::json to_json(const BoundReport& report);

/// Closed-form solution of t = int_{v0}^{V(t)} dv/(v L(v)) for a positive step
/// profile L. Below the profile's first breakpoint the first value applies.
class VFunction {
public:
    VFunction(const StepProfile& profile, double v0);

    /// V(t)
    double operator()(double t) const;
    /// int_{v0}^{v} du/(u L(u)); negative for v < v0.
    double time_to(double v) const;
    /// (log V)'(t) = L(V(t)), the right derivative.
    double log_derivative(double t) const;
    double v0() const noexcept { return v0_; }

private:
    double v0_ = 0.0;
    std::vector<double> knot_v_;  // piece starts, knot_v_[0] = v0
    std::vector<double> knot_t_;  // time at each piece start
    std::vector<double> rate_;    // L on each piece
};

/// int_{lo}^{hi} dv/(v L(v)) over a step profile. Throws EpsilonTooLarge when hi <= lo.
double inverse_profile_integral(const StepProfile& profile, double lo, double hi);

/// 2 int_{4 pi_*}^{4/eps} dv/(v Lambda(v)).
BoundReport tau_upper_spectral(const StepProfile& lambda, double eps, double pi_star);
/// 4 int_{4 pi_*}^{4/eps} dv/(v Phi_*(v)^2).
BoundReport tau_upper_conductance(const StepProfile& phi_star, double eps, double pi_star);
/// sup_x d_2(H_t(x,.), pi)^2 <= 4/V(t).
double tau_l2_upper(const StepProfile& lambda, double pi_star, double t);

struct GapBounds {
    BoundReport tau2;
    BoundReport tau_inf;
};
/// tau_2(eps) <= log(1/(eps sqrt(pi_*)))/lambda1 and
/// tau_inf(eps) <= log(1/(eps pi_*))/lambda1 (= (1 + log(1/pi_*))/lambda1 at eps = 1/e).
GapBounds tau_upper_spectral_gap(double lambda1, double pi_star, double eps);

/// 2 ceil(int dv/(alpha v Lambda(v))).
BoundReport tau_discrete_upper(const StepProfile& lambda, double alpha, double eps, double pi_star);
/// Through the multiplicative symmetrizations: 2 ceil(2 max(I_{KK*}, I_{K*K})).
BoundReport tau_discrete_upper_symmetrized(const StepProfile& lambda_kk_star,
                                           const StepProfile& lambda_k_star_k, bool kk_star_irreducible,
                                           bool k_star_k_irreducible, double eps, double pi_star);

struct DiscreteConductanceBounds {
    BoundReport rescaled;
    BoundReport morris_peres;
};
DiscreteConductanceBounds tau_discrete_conductance(const StepProfile& phi_star, double alpha, double eps,
                                                   double pi_star);

struct NashInput {
    double C = 0.0;
    double D = 0.0;
    double T = 0.0;
};

/// The log-Sobolev, Nash and mixed bounds (whichever inputs allow) followed by
/// the Aldous-Fill comparator when both rho and Nash constants are given.
/// `rho_is_estimate` marks every report that used rho as diagnostic.
std::vector<BoundReport> tau_upper_combined(double lambda1, std::optional<double> rho,
                                            std::optional<NashInput> nash, double pi_star, double eps,
                                            bool rho_is_estimate = false);

/// exp(-t lambda0(S)) / (2 pi(S))
double heat_diag_lower(double lambda0_s, double pi_s, double t);

struct CandidateSet {
    double mass = 0.0;
    double lambda0 = 0.0;
};
/// max over candidate sets of the last time the heat_diag_lower curve exceeds 1 + eps.
BoundReport tau_lower_lb1(const std::vector<CandidateSet>& sets, double eps, bool reversible);

struct RegularityCheck {
    bool regular = true;
    double witness_t = 0.0;
    double witness_s = 0.0;
    /// min over checked pairs of g(s) - delta g(t) with g the log-derivative.
    double margin = 0.0;
};

/// delta-regularity of sampled f on a log grid restricted to (0, window):
/// f'(s)/f(s) >= delta f'(t)/f(t) whenever t < s <= 2t < window. Log-derivatives
/// come from centered differences. Throws GridTooCoarse under 32 points per decade.
RegularityCheck delta_regularity(const std::vector<double>& times, const std::vector<double>& values,
                                 double delta, double window, double rel_tol = 1e-6);
/// Samples Gamma on a log grid over (t_min, window) and runs the sampled check.
RegularityCheck delta_regularity(const VFunction& gamma, double delta, double window, double t_min,
                                 int per_decade = 64);
/// Largest grid window (0, T] with T <= t_max on which Gamma is delta-regular,
/// confirmed with the sampling tau_lower_anti_fk uses; 0 if none exceeds t_min.
double max_regular_window(const VFunction& gamma, double delta, double t_min, double t_max,
                          int per_decade = 64);

/// sup_x h_t(x,x) >= 1/(2 Gamma(2t/delta)) for t < delta T / 2.
double anti_fk_curve(const VFunction& gamma, double delta, double t);

/// Lower bound on tau_inf(eps) from an anti-Faber-Krahn function L: Gamma solves
/// t = int_{pi_*}^{Gamma(t)} dv/(v L(v)) and must be delta-regular on (0, T).
/// Throws NotReversible, RegularityFailed.
BoundReport tau_lower_anti_fk(const StepProfile& L, double delta, double T, double eps, double pi_star,
                              bool reversible);

struct GapLowerBounds {
    BoundReport tau_inf;
    BoundReport tau_1;
};
/// tau_inf(eps) >= log(1/eps)/lambda1 and tau_1(1/e) >= 1/lambda1.
GapLowerBounds tau_lower_spectral_gap(double lambda1, double eps, bool reversible);

/// gamma^2 / (4^{2d+1} A^2), flagged unless gamma >= A 4^{d+1}.
BoundReport dsc_moderate_growth_lower(double A, double d, int gamma);

}  // namespace spk
