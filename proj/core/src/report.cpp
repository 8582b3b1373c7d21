#include "spk/report.hpp"

#include "spk/error.hpp"
#include "spk/subset.hpp"
#include "spk/zoo.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace spk {

std::string_view to_string(ProfileMode mode) noexcept {
    switch (mode) {
        case ProfileMode::Automatic: return "automatic";
        case ProfileMode::Exhaustive: return "exhaustive";
        case ProfileMode::Connected: return "connected";
        case ProfileMode::Envelopes: return "envelopes";
    }
    return "automatic";
}

ProfileMode profile_mode_from_string(std::string_view s) {
    for (ProfileMode m : {ProfileMode::Automatic, ProfileMode::Exhaustive, ProfileMode::Connected,
                          ProfileMode::Envelopes})
        if (s == to_string(m)) return m;
    throw Error(ErrorCode::ParseError, "unknown profile mode '" + std::string(s) + "'");
}

std::string format_shortest(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------

std::optional<SpectralProfileBand> enumerate_profile(const MarkovChain& chain, ProfileMode mode,
                                                     const ProfileOptions& opts, SubsetSurvey* survey_out,
                                                     ProfileMode* mode_used) {
    const int n = chain.size();
    if (mode_used) *mode_used = ProfileMode::Envelopes;
    if (mode == ProfileMode::Envelopes) return std::nullopt;
    const bool automatic = mode == ProfileMode::Automatic;
    if (automatic) {
        if (n <= opts.survey.enumeration_cap)
            mode = ProfileMode::Exhaustive;
        else if (n <= 64)
            mode = ProfileMode::Connected;
        else
            return std::nullopt;
    }
    const double lambda1 = spectral_gap(chain);
    ProfileOptions po = opts;
    if (mode == ProfileMode::Exhaustive) {
        if (n > opts.survey.enumeration_cap)
            throw Error(ErrorCode::TooLarge, std::to_string(n) + " states exceed the exhaustive enumeration cap of " +
                                                 std::to_string(opts.survey.enumeration_cap));
        po.survey.mode = EnumerationMode::Exhaustive;
        SubsetSurvey survey = survey_subsets(chain, po.survey);
        SpectralProfileBand band = spectral_profile_from_survey(chain, survey, lambda1, po);
        if (survey_out) *survey_out = std::move(survey);
        if (mode_used) *mode_used = ProfileMode::Exhaustive;
        return band;
    }

    // Connected sets, halving the mass cutoff until the budget suffices.
    po.survey.mode = EnumerationMode::Connected;
    double r_max = opts.survey.r_max;
    for (int attempt = 0;; ++attempt) {
        po.survey.r_max = r_max;
        try {
            SubsetSurvey survey = survey_subsets(chain, po.survey);
            SpectralProfileBand band = spectral_profile_from_survey(chain, survey, lambda1, po);
            if (survey_out) *survey_out = std::move(survey);
            if (mode_used) *mode_used = ProfileMode::Connected;
            return band;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TooLarge) throw;
            if (r_max <= 4.0 * chain.pi_star() || attempt >= 12) {
                if (automatic) return std::nullopt;
                throw;
            }
            r_max *= 0.5;
        }
    }
}

namespace {

void add(ChainAnalysis& a, BoundReport r) { a.reports.push_back(std::move(r)); }

std::vector<int> ball(const std::vector<std::vector<int>>& dist, int x, int r) {
    std::vector<int> out;
    for (int y = 0; y < static_cast<int>(dist[x].size()); ++y)
        if (dist[x][y] >= 0 && dist[x][y] <= r) out.push_back(y);
    return out;
}

// Best anti-Faber-Krahn report over the regularity parameters tried.
std::optional<BoundReport> anti_fk(const StepProfile& L, const std::vector<double>& deltas, double eps,
                                   double pi_star, std::vector<std::string>& notes) {
    const double target = 1.0 / (2.0 * (1.0 + eps));
    if (target <= pi_star) {
        notes.push_back("anti-Faber-Krahn: 1/(2(1+eps)) <= pi_*, bound is trivial");
        return std::nullopt;
    }
    const VFunction gamma(L, pi_star);
    const double t_target = gamma.time_to(target);
    std::optional<BoundReport> best;
    for (double delta : deltas) {
        double T = max_regular_window(gamma, delta, 1e-6 * t_target, t_target);
        for (int tries = 0; tries < 8 && T > 0.0; ++tries, T *= 0.5) {
            try {
                BoundReport r = tau_lower_anti_fk(L, delta, T, eps, pi_star, true);
                if (!best || r.value > best->value) best = std::move(r);
                break;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::RegularityFailed) throw;
            }
        }
    }
    if (!best) notes.push_back("anti-Faber-Krahn: Gamma not delta-regular for any delta tried");
    return best;
}

}  // namespace

ChainAnalysis analyze_chain(const MarkovChain& chain, const AnalysisOptions& opts, std::string label) {
    ChainAnalysis a;
    a.label = std::move(label);
    a.n = chain.size();
    a.pi_star = chain.pi_star();
    a.reversible = chain.reversible();
    a.holding = chain.holding_alpha();
    a.lambda1 = spectral_gap(chain);
    const double eps = opts.epsilon;
    a.epsilon = eps;

    SubsetSurvey survey;
    a.band = enumerate_profile(chain, opts.mode, opts.profile, &survey, &a.mode_used);
    if (!a.band) {
        a.mode_used = ProfileMode::Envelopes;
        if (opts.mode != ProfileMode::Envelopes) a.notes.push_back("enumeration skipped: chain too large");
    }

    // Conductance.
    if (a.band && survey.r_max >= 0.5) {
        a.conductance = conductance_from_survey(survey);
    } else {
        SurveyOptions so = opts.profile.survey;
        a.conductance = conductance_profile(chain, ConductanceMethod::Automatic, so);
    }

    // Lower envelopes of Lambda.
    const GrowthData growth = growth_data(chain);
    std::vector<StepProfile> lower{
        StepProfile({chain.pi_star()}, {a.lambda1}, ProfileKind::LowerEnvelope, ProfileSource::SpectralGap),
        volume_profile_bound(chain, growth)};
    if (a.band) lower.push_back(a.band->lower);
    if (a.conductance->phi.kind() != ProfileKind::UpperEnvelope) {
        const CheegerEnvelopes ch = cheeger_envelopes(a.conductance->phi);
        if (!ch.lower.empty()) lower.push_back(ch.lower);
    }
    if (opts.poincare_a) lower.push_back(poincare_profile_bound(chain, growth, *opts.poincare_a));
    if (opts.rho) lower.push_back(logsob_profile_bound(*opts.rho, chain.pi_star()));
    if (opts.nash) lower.push_back(nash_profile_bound(opts.nash->C, opts.nash->D, opts.nash->T, chain.pi_star()));
    a.lambda_lower = pointwise_max(lower, ProfileKind::LowerEnvelope, ProfileSource::Combined);

    // Upper bounds.
    {
        BoundReport r = tau_upper_spectral(a.lambda_lower, eps, a.pi_star);
        r.inputs["lambda1"] = a.lambda1;
        add(a, std::move(r));
    }
    {
        BoundReport r = tau_upper_conductance(a.conductance->phi_star, eps, a.pi_star);
        r.assumptions.push_back(a.conductance->exact ? "conductance_exact" : "conductance_upper_envelope");
        if (!a.conductance->exact) r.hypothesis_violated = true;
        add(a, std::move(r));
    }
    {
        GapBounds g = tau_upper_spectral_gap(a.lambda1, a.pi_star, eps);
        add(a, std::move(g.tau_inf));
        add(a, std::move(g.tau2));
    }

    // Functional inequalities.
    std::optional<double> rho = opts.rho;
    bool rho_estimated = false;
    if (!rho && opts.estimate_rho) {
        if (a.n <= 64) {
            rho = estimate_logsob(chain).value;
            rho_estimated = true;
        } else {
            a.notes.push_back("log-Sobolev constant not estimated above 64 states");
        }
    }
    std::optional<NashInput> nash = opts.nash;
    if (opts.growth_d) {
        const double d = *opts.growth_d;
        const double A = opts.growth_A.value_or(minimal_growth_constant(growth, d));
        const ModerateGrowthCheck mg = moderate_growth_check(growth, A, d);
        if (!nash && opts.poincare_a && mg.holds) {
            const NashConstants c = moderate_growth_nash(A, d, *opts.poincare_a, growth.diameter);
            nash = NashInput{c.C, c.D, c.T};
        }
        BoundReport r = dsc_moderate_growth_lower(A, d, growth.diameter);
        if (!mg.holds) {
            r.hypothesis_violated = true;
            r.assumptions.push_back("moderate_growth:violated");
        }
        add(a, std::move(r));
    }
    if (rho || nash) {
        for (BoundReport& r : tau_upper_combined(a.lambda1, rho, nash, a.pi_star, eps, rho_estimated))
            add(a, std::move(r));
    }

    // Lower bounds.
    if (a.reversible) {
        GapLowerBounds g = tau_lower_spectral_gap(a.lambda1, eps, true);
        add(a, std::move(g.tau_inf));
        add(a, std::move(g.tau_1));

        std::vector<CandidateSet> candidates;
        candidates.reserve(survey.records.size() + 64);
        for (const auto& rec : survey.records)
            if (rec.mass < 1.0) candidates.push_back({rec.mass, rec.lambda0});
        const auto dist = hop_distances(support_graph(chain));
        for (int r = 0; r <= growth.diameter; ++r) {
            int x_min = 0;
            for (int x = 0; x < a.n; ++x)
                if (growth.volume[x][r] < growth.volume[x_min][r]) x_min = x;
            if (growth.volume[x_min][r] >= 1.0 - 1e-12) break;
            const auto members = ball(dist, x_min, r);
            candidates.push_back({growth.volume[x_min][r], lambda0(chain, members)});
        }
        for (const auto& members : opts.candidate_sets) {
            const Subset s = Subset::make(chain, members);
            if (s.mass() < 1.0) candidates.push_back({s.mass(), lambda0(chain, members)});
        }
        add(a, tau_lower_lb1(candidates, eps, true));

        if (a.band) {
            if (auto r = anti_fk(a.band->lambda0_min, opts.deltas, eps, a.pi_star, a.notes)) add(a, std::move(*r));
        }
    } else {
        a.notes.push_back("lower bounds need a reversible chain");
    }

    // Discrete time.
    if (opts.discrete) {
        const double alpha = opts.alpha.value_or(a.holding);
        if (alpha > a.holding + 1e-15) {
            a.notes.push_back("alpha exceeds min_x K(x,x); holding bounds skipped");
        } else if (alpha > 0.0 && alpha < 1.0) {
            BoundReport r = tau_discrete_upper(a.lambda_lower, alpha, eps, a.pi_star);
            add(a, std::move(r));
            DiscreteConductanceBounds c = tau_discrete_conductance(a.conductance->phi_star, alpha, eps, a.pi_star);
            for (BoundReport* rr : {&c.rescaled, &c.morris_peres}) {
                if (!a.conductance->exact) {
                    rr->hypothesis_violated = true;
                    rr->assumptions.push_back("conductance_upper_envelope");
                }
                add(a, std::move(*rr));
            }
        } else {
            a.notes.push_back("no holding probability; holding-based discrete bounds skipped");
        }
        const MultiplicativeSymmetrizations ms = multiplicative_symmetrizations(chain);
        if (ms.kk_star_irreducible && ms.k_star_k_irreducible) {
            auto lower_of = [&](const Matrix& k) {
                const MarkovChain c = MarkovChain::build(k, chain.options());
                const double gap = spectral_gap(c);
                std::vector<StepProfile> parts{
                    StepProfile({c.pi_star()}, {gap}, ProfileKind::LowerEnvelope, ProfileSource::SpectralGap)};
                ProfileOptions po = opts.profile;
                po.refine_upper = false;
                if (c.size() <= po.survey.enumeration_cap) {
                    if (auto b = enumerate_profile(c, ProfileMode::Exhaustive, po)) parts.push_back(b->lower);
                }
                return pointwise_max(parts, ProfileKind::LowerEnvelope, ProfileSource::Combined);
            };
            add(a, tau_discrete_upper_symmetrized(lower_of(ms.kk_star), lower_of(ms.k_star_k), true, true, eps,
                                                  a.pi_star));
        } else {
            a.notes.push_back("KK* or K*K reducible; symmetrized discrete bound skipped");
        }
    }

    // Exact values.
    if (opts.exact) {
        const DistanceEvaluator eval(chain);
        a.exact = exact_tau(eval, kInfinityNorm, eps);
        if (opts.discrete) {
            try {
                a.exact_discrete = exact_tau(eval, kInfinityNorm, eps, TimeMode::Discrete);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Periodic) throw;
                a.notes.push_back("chain is periodic; discrete distance does not converge");
            }
        }
    }
    return a;
}

std::vector<DominanceViolation> check_dominance(const ChainAnalysis& a, double tol) {
    std::vector<DominanceViolation> out;
    for (const BoundReport& r : a.reports) {
        if (r.hypothesis_violated || r.empty_range) continue;
        const std::optional<ExactTau>& ex = r.discrete ? a.exact_discrete : a.exact;
        if (!ex) continue;
        const double e = ex->value;
        if (r.validity == Validity::Upper) {
            if (r.distance != "inf") continue;
            if (r.value < e * (1.0 - tol) - tol) out.push_back({r.name, r.value, e});
        } else {
            // tau_1 and tau_2 never exceed tau_inf at the same epsilon.
            if (std::abs(r.epsilon - a.epsilon) > 1e-15) continue;
            if (r.value > e * (1.0 + tol) + tol) out.push_back({r.name, r.value, e});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const ChainAnalysis& a) {
    nlohmann::json reports = nlohmann::json::array();
    for (const auto& r : a.reports) {
        nlohmann::json j = to_json(r);
        const auto& ex = r.discrete ? a.exact_discrete : a.exact;
        if (ex && ex->value > 0.0) j["ratio"] = r.value / ex->value;
        reports.push_back(std::move(j));
    }
    nlohmann::json exact = nlohmann::json::object();
    if (a.exact) exact["tau_inf"] = a.exact->value;
    if (a.exact_discrete) exact["tau_inf_discrete"] = a.exact_discrete->value;
    return {{"chain", a.label},
            {"n", a.n},
            {"pi_star", a.pi_star},
            {"lambda1", a.lambda1},
            {"reversible", a.reversible},
            {"holding", a.holding},
            {"profile_mode", to_string(a.mode_used)},
            {"exact", exact},
            {"reports", reports},
            {"lambda_lower", to_json(a.lambda_lower)},
            {"notes", a.notes}};
}

void write_report_csv(std::ostream& os, const std::vector<ChainAnalysis>& analyses) {
    os << "chain,name,validity,distance,discrete,epsilon,value,exact,ratio,hypothesis_violated,empty_range\n";
    for (const auto& a : analyses)
        for (const auto& r : a.reports) {
            const auto& ex = r.discrete ? a.exact_discrete : a.exact;
            os << a.label << ',' << r.name << ',' << to_string(r.validity) << ',' << r.distance << ','
               << (r.discrete ? 1 : 0) << ',' << format_shortest(r.epsilon) << ',' << format_shortest(r.value)
               << ',';
            if (ex) os << format_shortest(ex->value);
            os << ',';
            if (ex && ex->value > 0.0) os << format_shortest(r.value / ex->value);
            os << ',' << (r.hypothesis_violated ? 1 : 0) << ',' << (r.empty_range ? 1 : 0) << '\n';
        }
}

void write_report_table(std::ostream& os, const ChainAnalysis& a) {
    os << "chain " << (a.label.empty() ? "(unnamed)" : a.label) << ": n=" << a.n << " pi_*=" << format_9(a.pi_star)
       << " lambda1=" << format_9(a.lambda1) << " profile=" << to_string(a.mode_used) << '\n';
    if (a.exact) os << "  exact tau_inf = " << format_9(a.exact->value) << '\n';
    if (a.exact_discrete) os << "  exact discrete tau_inf = " << format_9(a.exact_discrete->value) << '\n';
    os << "  " << std::left << std::setw(40) << "bound" << std::setw(8) << "kind" << std::setw(18) << "value"
       << std::setw(14) << "ratio" << "flags\n";
    for (const auto& r : a.reports) {
        const auto& ex = r.discrete ? a.exact_discrete : a.exact;
        std::string flags;
        if (r.hypothesis_violated) flags += "[hypothesis-violated] ";
        if (r.empty_range) flags += "[empty-range] ";
        if (r.discrete) flags += "[steps] ";
        if (r.distance != "inf") flags += "[L" + r.distance + "] ";
        os << "  " << std::left << std::setw(40) << r.name << std::setw(8) << to_string(r.validity) << std::setw(18)
           << format_9(r.value) << std::setw(14)
           << ((ex && ex->value > 0.0) ? format_9(r.value / ex->value) : std::string("-")) << flags << '\n';
    }
    for (const auto& n : a.notes) os << "  note: " << n << '\n';
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names() { return {"cheeger", "sandwich", "abs", "ebound", "dominance"}; }

namespace {

void record(SuiteResult& res, double slack, double tol, const std::string& what) {
    ++res.checks;
    res.worst_slack = std::min(res.worst_slack, slack);
    if (slack < -tol && res.failures.size() < 20) res.failures.push_back(what + " (slack " + format_9(slack) + ")");
    else if (slack < -tol) res.failures.push_back(what);
}

std::vector<MarkovChain> random_chains(const SuiteOptions& opts, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> size(3, std::max(3, opts.max_states));
    std::vector<MarkovChain> out;
    out.reserve(opts.chains);
    for (int i = 0; i < opts.chains; ++i) out.push_back(random_reversible_chain(size(rng), rng));
    return out;
}

Vector random_function(int n, std::mt19937_64& rng, bool nonnegative) {
    std::uniform_int_distribution<int> shape(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 1.0);
    Vector f(n);
    switch (shape(rng)) {
        case 0:
            for (int i = 0; i < n; ++i) f(i) = nonnegative ? u(rng) : g(rng);
            break;
        case 1:
            for (int i = 0; i < n; ++i) f(i) = u(rng) < 0.3 ? (nonnegative ? 1.0 + u(rng) : g(rng)) : 0.0;
            break;
        default:
            for (int i = 0; i < n; ++i) f(i) = nonnegative ? std::exp(3.0 * g(rng)) : g(rng) * std::exp(g(rng));
            break;
    }
    return f;
}

SuiteResult cheeger_suite(const SuiteOptions& opts) {
    SuiteResult res{"cheeger", 0, {}, 0.0};
    std::mt19937_64 rng(opts.seed);
    int idx = 0;
    for (const MarkovChain& c : random_chains(opts, rng)) {
        const int n = c.size();
        SurveyOptions so;
        so.mode = EnumerationMode::Exhaustive;
        const ConductanceProfiles phi = conductance_profile(c, ConductanceMethod::Enumeration, so);
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
            const auto members = members_of(mask, n);
            const Subset s = Subset::make(c, members);
            const double l0 = lambda0(c, members);
            const double p = phi.phi(s.mass());
            const std::string where = "chain " + std::to_string(idx) + " set " + std::to_string(mask);
            record(res, l0 - 0.5 * p * p, opts.tolerance, where + ": Phi^2/2 <= lambda0");
            record(res, s.boundary() / s.mass() - l0, opts.tolerance, where + ": lambda0 <= |dA|/pi(A)");
        }
        ++idx;
    }
    return res;
}

SuiteResult sandwich_suite(const SuiteOptions& opts) {
    SuiteResult res{"sandwich", 0, {}, 0.0};
    std::mt19937_64 rng(opts.seed);
    int idx = 0;
    for (const MarkovChain& c : random_chains(opts, rng)) {
        ProfileOptions po;
        po.survey.mode = EnumerationMode::Exhaustive;
        const SpectralProfileBand band = spectral_profile_exhaustive(c, po);
        const double l1 = band.lambda1;
        const std::string where = "chain " + std::to_string(idx);
        record(res, band.upper(0.5) - l1, opts.tolerance, where + ": lambda1 <= Lambda_upper(1/2)");
        record(res, 2.0 * l1 - band.lower(0.5), opts.tolerance, where + ": Lambda_lower(1/2) <= 2 lambda1");
        for (std::size_t i = 0; i < band.lower.size(); ++i)
            record(res, band.lower.values()[i] - l1, opts.tolerance, where + ": Lambda_lower >= lambda1");
        for (std::size_t i = 0; i < band.upper.size(); ++i) {
            const double r = band.upper.breakpoints()[i];
            record(res, band.upper.values()[i] - band.lower(r), opts.tolerance, where + ": lower <= upper");
        }
        ++idx;
    }
    return res;
}

SuiteResult abs_suite(const SuiteOptions& opts) {
    SuiteResult res{"abs", 0, {}, 0.0};
    std::mt19937_64 rng(opts.seed);
    int idx = 0;
    for (const MarkovChain& c : random_chains(opts, rng)) {
        for (int k = 0; k < opts.samples; ++k) {
            const Vector f = random_function(c.size(), rng, false);
            const Vector fp = f.cwiseMax(0.0);
            const Vector fm = (-f).cwiseMax(0.0);
            const double e = dirichlet_energy(c, f);
            const double split = dirichlet_energy(c, fp) + dirichlet_energy(c, fm);
            const double ea = dirichlet_energy(c, f.cwiseAbs());
            const double scale = std::max(1.0, e);
            const std::string where = "chain " + std::to_string(idx) + " sample " + std::to_string(k);
            record(res, (e - split) / scale, opts.tolerance, where + ": E(f) >= E(f+) + E(f-)");
            record(res, (split - ea) / scale, opts.tolerance, where + ": E(f+) + E(f-) >= E(|f|)");
        }
        ++idx;
    }
    return res;
}

SuiteResult ebound_suite(const SuiteOptions& opts) {
    SuiteResult res{"ebound", 0, {}, 0.0};
    std::mt19937_64 rng(opts.seed);
    int idx = 0;
    for (const MarkovChain& c : random_chains(opts, rng)) {
        ProfileOptions po;
        po.survey.mode = EnumerationMode::Exhaustive;
        po.refine_upper = false;
        const SpectralProfileBand band = spectral_profile_exhaustive(c, po);
        int taken = 0;
        while (taken < opts.samples) {
            const Vector u = random_function(c.size(), rng, true);
            const double var = variance(c, u);
            if (!(var > 1e-12 * std::max(1.0, c.pi().dot(u.cwiseAbs2())))) continue;
            ++taken;
            const double mean = expectation(c, u);
            const double lhs = dirichlet_energy(c, u) / var;
            const double rhs = 0.5 * band.lower(4.0 * mean * mean / var);
            record(res, (lhs - rhs) / std::max(1.0, lhs), opts.tolerance,
                   "chain " + std::to_string(idx) + " sample " + std::to_string(taken) + ": E(u)/Var(u) >= Lambda/2");
        }
        ++idx;
    }
    return res;
}

SuiteResult dominance_suite(const SuiteOptions&) {
    SuiteResult res{"dominance", 0, {}, 0.0};
    struct Item {
        std::string name;
        MarkovChain chain;
        AnalysisOptions opts;
    };
    std::vector<Item> items;
    auto group = [](const MarkovChain& c, double d) {
        AnalysisOptions o;
        o.poincare_a = group_walk_poincare_constant(c);
        o.growth_d = d;
        return o;
    };
    {
        MarkovChain c = complete_graph(4);
        AnalysisOptions o;
        o.rho = (1.0 - 2.0 / 4.0) / std::log(3.0);
        items.push_back({"complete-4", c, o});
    }
    for (int n : {8, 16}) {
        MarkovChain c = cycle(n);
        items.push_back({"cycle-" + std::to_string(n), c, group(c, 1.0)});
    }
    {
        MarkovChain c = cycle(16, 0.5);
        items.push_back({"lazy-cycle-16", c, group(c, 1.0)});
    }
    items.push_back({"viscek-4-1", viscek(4, 1).second, AnalysisOptions{}});
    for (auto& it : items) {
        const ChainAnalysis a = analyze_chain(it.chain, it.opts, it.name);
        for (const auto& r : a.reports) {
            if (r.hypothesis_violated || r.empty_range) continue;
            ++res.checks;
        }
        for (const auto& v : check_dominance(a))
            res.failures.push_back(it.name + ": " + v.name + " = " + format_9(v.value) + " vs exact " +
                                   format_9(v.exact));
    }
    return res;
}

}  // namespace

SuiteResult run_suite(const std::string& name, const SuiteOptions& opts) {
    if (name == "cheeger") return cheeger_suite(opts);
    if (name == "sandwich") return sandwich_suite(opts);
    if (name == "abs") return abs_suite(opts);
    if (name == "ebound") return ebound_suite(opts);
    if (name == "dominance") return dominance_suite(opts);
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
}

}  // namespace spk
