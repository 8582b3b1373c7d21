#include "spk/bounds.hpp"

#include "spk/error.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace spk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAntiFkGridStart = 1e-6;

void check_epsilon(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

void check_pi_star(double pi_star) {
    if (!(pi_star > 0.0 && pi_star <= 1.0)) throw Error(ErrorCode::InvalidArgument, "pi_star must lie in (0,1]");
}

// The L-infinity integral 2 int_{4 pi_*}^{4/eps}, evaluated with `weight` times
// the inverse-profile integral. An empty range yields 0 with the flag set.
BoundReport profile_integral_report(std::string name, const StepProfile& profile, double weight, double eps,
                                    double pi_star, std::string anchor) {
    check_epsilon(eps);
    check_pi_star(pi_star);
    BoundReport r;
    r.name = std::move(name);
    r.epsilon = eps;
    r.validity = Validity::Upper;
    r.anchor = std::move(anchor);
    r.inputs["pi_star"] = pi_star;
    r.profile_edge = std::string(to_string(profile.kind()));
    const double lo = 4.0 * pi_star;
    const double hi = 4.0 / eps;
    if (hi <= lo) {
        r.value = 0.0;
        r.empty_range = true;
        r.assumptions.push_back("empty_integration_range");
        return r;
    }
    r.value = weight * inverse_profile_integral(profile, lo, hi);
    if (profile.kind() == ProfileKind::UpperEnvelope) {
        r.hypothesis_violated = true;
        r.assumptions.push_back("profile_is_upper_envelope");
    }
    return r;
}

StepProfile squared(const StepProfile& p) {
    return p.map([](double, double v) { return v * v; }, p.kind(), p.source());
}

}  // namespace

std::string_view to_string(Validity v) noexcept { return v == Validity::Upper ? "upper" : "lower"; }

nlohmann::json to_json(const BoundReport& report) {
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [k, v] : report.inputs) inputs[k] = v;
    nlohmann::json j = {{"name", report.name},
                        {"value", report.value},
                        {"epsilon", report.epsilon},
                        {"validity", to_string(report.validity)},
                        {"discrete", report.discrete},
                        {"distance", report.distance},
                        {"inputs", inputs},
                        {"assumptions", report.assumptions},
                        {"anchor", report.anchor},
                        {"profile_edge", report.profile_edge},
                        {"hypothesis_violated", report.hypothesis_violated},
                        {"empty_range", report.empty_range}};
    if (!std::isfinite(report.value)) j["value"] = report.value > 0 ? "inf" : "nan";
    return j;
}

// ---------------------------------------------------------------------------

VFunction::VFunction(const StepProfile& profile, double v0) : v0_(v0) {
    if (!(v0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "V function needs a positive starting volume");
    if (profile.empty()) throw Error(ErrorCode::NonpositiveProfile, "empty profile");
    double first = profile(v0);
    if (!std::isfinite(first)) first = profile.values().front();
    knot_v_.push_back(v0);
    knot_t_.push_back(0.0);
    rate_.push_back(first);
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double b = profile.breakpoints()[i];
        if (b <= v0) continue;
        const double prev_rate = rate_.back();
        knot_t_.push_back(knot_t_.back() + std::log(b / knot_v_.back()) / prev_rate);
        knot_v_.push_back(b);
        rate_.push_back(profile.values()[i]);
    }
    for (double r : rate_)
        if (!(r > 0.0)) throw Error(ErrorCode::NonpositiveProfile, "profile must be positive from v0 on");
}

double VFunction::operator()(double t) const {
    if (t <= 0.0) return v0_ * std::exp(rate_.front() * t);
    auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - knot_t_.begin()) - 1;
    return knot_v_[k] * std::exp(rate_[k] * (t - knot_t_[k]));
}

double VFunction::time_to(double v) const {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "volume must be positive");
    if (v <= v0_) return std::log(v / v0_) / rate_.front();
    auto it = std::upper_bound(knot_v_.begin(), knot_v_.end(), v);
    const std::size_t k = static_cast<std::size_t>(it - knot_v_.begin()) - 1;
    return knot_t_[k] + std::log(v / knot_v_[k]) / rate_[k];
}

double VFunction::log_derivative(double t) const {
    if (t < 0.0) return rate_.front();
    auto it = std::upper_bound(knot_t_.begin(), knot_t_.end(), t);
    return rate_[static_cast<std::size_t>(it - knot_t_.begin()) - 1];
}

double inverse_profile_integral(const StepProfile& profile, double lo, double hi) {
    if (!(hi > lo)) throw Error(ErrorCode::EpsilonTooLarge, "integration range is empty");
    return VFunction(profile, lo).time_to(hi);
}

// ---------------------------------------------------------------------------

BoundReport tau_upper_spectral(const StepProfile& lambda, double eps, double pi_star) {
    return profile_integral_report("tau_upper_spectral", lambda, 2.0, eps, pi_star,
                                   "spectral profile bound on the L-infinity mixing time");
}

BoundReport tau_upper_conductance(const StepProfile& phi_star, double eps, double pi_star) {
    return profile_integral_report("tau_upper_conductance", squared(phi_star), 4.0, eps, pi_star,
                                   "truncated conductance profile bound on the L-infinity mixing time");
}

double tau_l2_upper(const StepProfile& lambda, double pi_star, double t) {
    check_pi_star(pi_star);
    if (t < 0.0) throw Error(ErrorCode::InvalidArgument, "time must be nonnegative");
    return 4.0 / VFunction(lambda, 4.0 * pi_star)(t);
}

GapBounds tau_upper_spectral_gap(double lambda1, double pi_star, double eps) {
    check_epsilon(eps);
    check_pi_star(pi_star);
    if (!(lambda1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectral gap must be positive");
    GapBounds out;
    out.tau2.name = "tau2_upper_spectral_gap";
    out.tau2.value = std::max(0.0, std::log(1.0 / (eps * std::sqrt(pi_star))) / lambda1);
    out.tau2.anchor = "spectral gap bound on the L2 mixing time";
    out.tau2.distance = "2";
    out.tau_inf.name = "tau_inf_upper_spectral_gap";
    out.tau_inf.value = std::max(0.0, std::log(1.0 / (eps * pi_star)) / lambda1);
    out.tau_inf.anchor = "spectral gap bound on the L-infinity mixing time";
    for (BoundReport* r : {&out.tau2, &out.tau_inf}) {
        r->epsilon = eps;
        r->validity = Validity::Upper;
        r->inputs = {{"lambda1", lambda1}, {"pi_star", pi_star}};
        r->profile_edge = "constant";
    }
    return out;
}

BoundReport tau_discrete_upper(const StepProfile& lambda, double alpha, double eps, double pi_star) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::ZeroHolding, "holding route needs min_x K(x,x) > 0");
    if (!(alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "holding probability must be below 1");
    BoundReport r = profile_integral_report("tau_discrete_upper_holding", lambda, 1.0, eps, pi_star,
                                            "discrete-time spectral profile bound with holding");
    r.discrete = true;
    r.inputs["alpha"] = alpha;
    if (!r.empty_range) r.value = 2.0 * std::ceil(r.value / alpha);
    return r;
}

BoundReport tau_discrete_upper_symmetrized(const StepProfile& lambda_kk_star, const StepProfile& lambda_k_star_k,
                                           bool kk_star_irreducible, bool k_star_k_irreducible, double eps,
                                           double pi_star) {
    if (!kk_star_irreducible || !k_star_k_irreducible)
        throw Error(ErrorCode::ReducibleSymmetrization, "KK* and K*K must both be irreducible");
    BoundReport a = profile_integral_report("tau_discrete_upper_symmetrized", lambda_kk_star, 1.0, eps, pi_star,
                                            "discrete-time bound through the multiplicative symmetrizations");
    const BoundReport b = profile_integral_report("tau_discrete_upper_symmetrized", lambda_k_star_k, 1.0, eps,
                                                  pi_star, a.anchor);
    a.discrete = true;
    a.hypothesis_violated = a.hypothesis_violated || b.hypothesis_violated;
    if (!a.empty_range) a.value = 2.0 * std::ceil(2.0 * std::max(a.value, b.value));
    a.assumptions.push_back("KK*_irreducible");
    a.assumptions.push_back("K*K_irreducible");
    return a;
}

DiscreteConductanceBounds tau_discrete_conductance(const StepProfile& phi_star, double alpha, double eps,
                                                   double pi_star) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0,1)");
    const double rescaled_factor = alpha / (1.0 - alpha);
    const double mp_factor = std::min(rescaled_factor * rescaled_factor, 1.0);
    DiscreteConductanceBounds out;
    out.rescaled = profile_integral_report("tau_discrete_conductance_rescaled", squared(phi_star), 1.0, eps,
                                           pi_star, "rescaled discrete-time conductance bound");
    out.morris_peres = profile_integral_report("tau_discrete_conductance_morris_peres", squared(phi_star), 1.0,
                                               eps, pi_star, "Morris-Peres discrete-time conductance bound");
    const double integral = out.rescaled.value;
    out.rescaled.discrete = out.morris_peres.discrete = true;
    out.rescaled.inputs["alpha"] = out.morris_peres.inputs["alpha"] = alpha;
    out.rescaled.inputs["factor"] = rescaled_factor;
    out.morris_peres.inputs["factor"] = mp_factor;
    if (!out.rescaled.empty_range) {
        out.rescaled.value = 2.0 * std::ceil(2.0 * integral / rescaled_factor);
        out.morris_peres.value = 2.0 * std::ceil(2.0 * integral / mp_factor);
    }
    return out;
}

std::vector<BoundReport> tau_upper_combined(double lambda1, std::optional<double> rho, std::optional<NashInput> nash,
                                            double pi_star, double eps, bool rho_is_estimate) {
    check_epsilon(eps);
    check_pi_star(pi_star);
    if (!(lambda1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectral gap must be positive");
    if (rho && !(*rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-Sobolev constant must be positive");

    std::vector<std::string> shared;
    bool shared_violation = false;
    auto check = [&](bool ok, const std::string& what) {
        shared.push_back(what + (ok ? "" : ":violated"));
        if (!ok) shared_violation = true;
    };
    check(pi_star <= 1.0 / (4.0 * std::exp(1.0)), "pi_star<=1/(4e)");
    check(eps <= 8.0, "eps<=8");
    if (nash) {
        if (!(nash->C > 0.0 && nash->D > 0.0 && nash->T > 0.0))
            throw Error(ErrorCode::InvalidArgument, "Nash constants must be positive");
        check(nash->D * nash->C >= nash->T, "DC>=T");
        check(nash->D >= 1.0, "D>=1");
    }

    std::vector<BoundReport> out;
    auto make = [&](std::string name, double value, std::string anchor, bool uses_rho) {
        BoundReport r;
        r.name = std::move(name);
        r.value = value;
        r.epsilon = eps;
        r.validity = Validity::Upper;
        r.anchor = std::move(anchor);
        r.assumptions = shared;
        r.hypothesis_violated = shared_violation;
        r.profile_edge = "functional_inequality";
        r.inputs = {{"lambda1", lambda1}, {"pi_star", pi_star}};
        if (uses_rho) {
            r.inputs["rho"] = *rho;
            if (rho_is_estimate) {
                r.assumptions.push_back("rho_is_estimate");
                r.hypothesis_violated = true;
            }
        }
        if (nash) {
            r.inputs["C"] = nash->C;
            r.inputs["D"] = nash->D;
            r.inputs["T"] = nash->T;
        }
        if (!std::isfinite(r.value)) r.hypothesis_violated = true;
        out.push_back(std::move(r));
    };

    const double gap_tail = 2.0 / lambda1 * std::log(8.0 / eps);
    if (rho) {
        make("tau_upper_logsob", 2.0 / *rho * std::log(std::log(1.0 / (4.0 * pi_star))) + gap_tail,
             "log-Sobolev and spectral gap bound", true);
    }
    if (nash) {
        const auto [C, D, T] = *nash;
        make("tau_upper_nash",
             4.0 * T + 2.0 / lambda1 * (2.0 * D * std::log(2.0 * D * C / T) + std::log(4.0 / eps)),
             "Nash and spectral gap bound", false);
        if (rho) {
            make("tau_upper_mixed",
                 4.0 * T + 2.0 / *rho * std::log(std::log(std::pow(2.0 * D * C / T, 2.0 * D))) + gap_tail,
                 "Nash, log-Sobolev and spectral gap bound", true);
            make("tau_upper_aldous_fill",
                 2.0 * T + 1.0 / *rho * std::log(std::log(std::pow(D * C / T, D))) +
                     1.0 / lambda1 * (4.0 + std::log(1.0 / eps)),
                 "Aldous-Fill comparator", true);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double heat_diag_lower(double lambda0_s, double pi_s, double t) {
    if (!(pi_s > 0.0 && pi_s <= 1.0)) throw Error(ErrorCode::InvalidArgument, "set mass must lie in (0,1]");
    return std::exp(-t * lambda0_s) / (2.0 * pi_s);
}

BoundReport tau_lower_lb1(const std::vector<CandidateSet>& sets, double eps, bool reversible) {
    check_epsilon(eps);
    if (!reversible) throw Error(ErrorCode::NotReversible, "heat kernel diagonal bound needs a reversible chain");
    BoundReport r;
    r.name = "tau_lower_dirichlet_set";
    r.epsilon = eps;
    r.validity = Validity::Lower;
    r.anchor = "Dirichlet eigenvalue lower bound on the heat kernel diagonal";
    r.profile_edge = "candidate_sets";
    r.assumptions.push_back("reversible");
    double best = 0.0;
    for (const auto& s : sets) {
        if (!(s.lambda0 > 0.0)) continue;
        const double t = std::log(1.0 / (2.0 * s.mass * (1.0 + eps))) / s.lambda0;
        if (t > best) {
            best = t;
            r.inputs["mass"] = s.mass;
            r.inputs["lambda0"] = s.lambda0;
        }
    }
    r.value = best;
    return r;
}

RegularityCheck delta_regularity(const std::vector<double>& times, const std::vector<double>& values, double delta,
                                 double window, double rel_tol) {
    const std::size_t n = times.size();
    if (n != values.size()) throw Error(ErrorCode::DimensionMismatch, "times and values differ in length");
    if (n < 3) throw Error(ErrorCode::GridTooCoarse, "need at least three samples");
    const double decades = std::log10(times.back() / times.front());
    if (decades > 0.0 && (static_cast<double>(n) - 1.0) / decades < 32.0 - 1e-9)
        throw Error(ErrorCode::GridTooCoarse, "delta-regularity needs at least 32 points per decade");

    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
        g[i] = (std::log(values[hi]) - std::log(values[lo])) / (times[hi] - times[lo]);
    }
    RegularityCheck out;
    out.margin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = times[i];
        if (!(2.0 * t < window)) break;
        for (std::size_t j = i + 1; j < n && times[j] <= 2.0 * t * (1.0 + 1e-12); ++j) {
            const double m = g[j] - delta * g[i];
            out.margin = std::min(out.margin, m);
            if (m < -rel_tol * std::abs(delta * g[i]) && out.regular) {
                out.regular = false;
                out.witness_t = t;
                out.witness_s = times[j];
            }
        }
    }
    return out;
}

namespace {

void sample_gamma(const VFunction& gamma, double t_min, double t_max, int per_decade, std::vector<double>& ts,
                  std::vector<double>& vs) {
    ts = log_grid(t_min, t_max, per_decade);
    vs.resize(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) vs[i] = gamma(ts[i]);
}

}  // namespace

RegularityCheck delta_regularity(const VFunction& gamma, double delta, double window, double t_min,
                                 int per_decade) {
    std::vector<double> ts, vs;
    sample_gamma(gamma, t_min, window, per_decade, ts, vs);
    return delta_regularity(ts, vs, delta, window);
}

double max_regular_window(const VFunction& gamma, double delta, double t_min, double t_max, int per_decade) {
    std::vector<double> ts, vs;
    sample_gamma(gamma, t_min, t_max, per_decade, ts, vs);
    // A violating pair (t, s) rules out every window T > 2t; the check reports
    // the violation with the smallest t.
    const RegularityCheck c = delta_regularity(ts, vs, delta, t_max);
    double T = c.regular ? t_max : std::min(t_max, 2.0 * c.witness_t);
    // Confirm on the grid tau_lower_anti_fk samples, which starts at T * 1e-6.
    for (int attempt = 0; attempt < 200 && T > t_min; ++attempt) {
        const RegularityCheck confirm = delta_regularity(gamma, delta, T, T * kAntiFkGridStart, per_decade);
        if (confirm.regular) return T;
        T = std::min(0.95 * T, 2.0 * confirm.witness_t);
    }
    return 0.0;
}

double anti_fk_curve(const VFunction& gamma, double delta, double t) {
    return 1.0 / (2.0 * gamma(2.0 * t / delta));
}

BoundReport tau_lower_anti_fk(const StepProfile& L, double delta, double T, double eps, double pi_star,
                              bool reversible) {
    check_epsilon(eps);
    check_pi_star(pi_star);
    if (!reversible) throw Error(ErrorCode::NotReversible, "anti-Faber-Krahn bound needs a reversible chain");
    if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1]");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be positive");
    const VFunction gamma(L, pi_star);
    const RegularityCheck reg = delta_regularity(gamma, delta, T, T * kAntiFkGridStart);
    if (!reg.regular)
        throw Error(ErrorCode::RegularityFailed, "Gamma is not delta-regular on the requested window");

    BoundReport r;
    r.name = "tau_lower_anti_faber_krahn";
    r.epsilon = eps;
    r.validity = Validity::Lower;
    r.anchor = "anti-Faber-Krahn lower bound on the heat kernel diagonal";
    r.profile_edge = std::string(to_string(L.kind()));
    r.inputs = {{"delta", delta}, {"T", T}, {"pi_star", pi_star}};
    r.assumptions = {"reversible", "delta_regular"};
    const double target = 1.0 / (2.0 * (1.0 + eps));
    if (target <= pi_star) {
        r.value = 0.0;
        return r;
    }
    r.value = std::min(0.5 * delta * gamma.time_to(target), 0.5 * delta * T);
    return r;
}

GapLowerBounds tau_lower_spectral_gap(double lambda1, double eps, bool reversible) {
    check_epsilon(eps);
    if (!reversible) throw Error(ErrorCode::NotReversible, "eigenfunction lower bound needs a reversible chain");
    if (!(lambda1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectral gap must be positive");
    GapLowerBounds out;
    out.tau_inf.name = "tau_inf_lower_spectral_gap";
    out.tau_inf.value = std::max(0.0, std::log(1.0 / eps) / lambda1);
    out.tau_inf.epsilon = eps;
    out.tau_inf.anchor = "eigenfunction lower bound on the L-infinity distance";
    out.tau_1.name = "tau1_lower_spectral_gap";
    out.tau_1.value = 1.0 / lambda1;
    out.tau_1.epsilon = std::exp(-1.0);
    out.tau_1.anchor = "relaxation time lower bound on the L1 mixing time";
    out.tau_1.distance = "1";
    for (BoundReport* r : {&out.tau_inf, &out.tau_1}) {
        r->validity = Validity::Lower;
        r->inputs = {{"lambda1", lambda1}};
        r->assumptions = {"reversible"};
        r->profile_edge = "constant";
    }
    return out;
}

BoundReport dsc_moderate_growth_lower(double A, double d, int gamma) {
    if (!(A >= 1.0 && d >= 1.0)) throw Error(ErrorCode::InvalidArgument, "moderate growth needs A, d >= 1");
    BoundReport r;
    r.name = "tau_lower_moderate_growth";
    r.epsilon = std::exp(-1.0);
    r.validity = Validity::Lower;
    r.anchor = "Diaconis-Saloff-Coste moderate growth lower bound";
    r.profile_edge = "constant";
    r.inputs = {{"A", A}, {"d", d}, {"gamma", static_cast<double>(gamma)}};
    const double g = gamma;
    r.value = g * g / (std::pow(4.0, 2.0 * d + 1.0) * A * A);
    const bool ok = g >= A * std::pow(4.0, d + 1.0);
    r.assumptions.push_back(ok ? "gamma>=A*4^(d+1)" : "gamma>=A*4^(d+1):violated");
    r.assumptions.push_back("group_walk");
    r.hypothesis_violated = !ok;
    return r;
}

}  // namespace spk
