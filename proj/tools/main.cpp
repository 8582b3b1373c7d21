// spk: spectral-profile mixing bounds from the command line.

#include "spk/bounds.hpp"
#include "spk/chain_io.hpp"
#include "spk/error.hpp"
#include "spk/exact_mixing.hpp"
#include "spk/profiles.hpp"
#include "spk/report.hpp"
#include "spk/zoo.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSizeCap = 3;
constexpr int kExitParse = 4;

double parse_epsilon(const std::string& s) {
    if (s == "1/e") return std::exp(-1.0);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v > 0.0))
        throw spk::Error(spk::ErrorCode::ParseError, "epsilon must be a positive decimal or 1/e, got '" + s + "'");
    return v;
}

double parse_p(const std::string& s) {
    if (s == "inf" || s == "infinity") return spk::kInfinityNorm;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !(v >= 1.0))
        throw spk::Error(spk::ErrorCode::ParseError, "p must be >= 1 or 'inf', got '" + s + "'");
    return v;
}

// Writes to the named file, or stdout for "" / "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw spk::Error(spk::ErrorCode::ParseError, "cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct Common {
    std::string input = "-";
    std::string output;
    std::string eps = "1/e";
    std::string mode = "automatic";
    std::string format = "table";
    double r_max = 1.0;
    int threads = 0;
};

struct Constants {
    std::optional<double> alpha, rho, a, A, d, C, D, T, delta;
};

spk::AnalysisOptions analysis_options(const Common& c, const Constants& k) {
    spk::AnalysisOptions o;
    o.epsilon = parse_epsilon(c.eps);
    o.mode = spk::profile_mode_from_string(c.mode);
    o.profile.survey.r_max = c.r_max;
    o.profile.survey.threads = c.threads;
    o.alpha = k.alpha;
    o.rho = k.rho;
    o.poincare_a = k.a;
    o.growth_A = k.A;
    o.growth_d = k.d;
    if (k.C || k.D || k.T) {
        if (!(k.C && k.D && k.T))
            throw spk::Error(spk::ErrorCode::ParseError, "Nash constants need all of --C, --D and --T");
        o.nash = spk::NashInput{*k.C, *k.D, *k.T};
    }
    if (k.delta) o.deltas = {*k.delta};
    return o;
}

void add_constants(CLI::App* app, Constants& k) {
    app->add_option("--alpha", k.alpha, "holding probability for discrete-time bounds");
    app->add_option("--rho", k.rho, "log-Sobolev constant");
    app->add_option("--a", k.a, "local Poincare constant");
    app->add_option("--A", k.A, "moderate growth constant A");
    app->add_option("--d", k.d, "moderate growth exponent d");
    app->add_option("--C", k.C, "Nash constant C");
    app->add_option("--D", k.D, "Nash constant D");
    app->add_option("--T", k.T, "Nash constant T");
    app->add_option("--delta", k.delta, "regularity parameter for the anti-Faber-Krahn bound");
}

void add_common(CLI::App* app, Common& c, bool with_profile) {
    app->add_option("input", c.input, "chain JSON or CSV edge list ('-' for stdin)");
    app->add_option("-o,--output", c.output, "output file (default stdout)");
    if (with_profile) {
        app->add_option("--profile-mode", c.mode, "exhaustive, connected, envelopes or automatic")
            ->check(CLI::IsMember({"automatic", "exhaustive", "connected", "envelopes"}));
        app->add_option("--r-max", c.r_max, "largest set mass enumerated");
        app->add_option("--threads", c.threads, "worker threads (SPK_THREADS overrides the default)");
    }
}

int run_gen(const std::string& kind, int n, double lazy, int N, int gen, int a, int b, const std::string& out) {
    std::optional<spk::MarkovChain> chain;
    if (kind == "complete")
        chain = spk::complete_graph(n);
    else if (kind == "cycle")
        chain = spk::cycle(n, lazy);
    else if (kind == "viscek")
        chain = spk::viscek(N, gen).second;
    else if (kind == "torus")
        chain = spk::torus_product(a, b);
    Output o(out);
    spk::write_chain_json(o.stream(), *chain);
    return 0;
}

int run_profile(const Common& c, bool conductance) {
    const spk::MarkovChain chain = spk::load_chain(c.input);
    spk::ProfileOptions po;
    po.survey.r_max = c.r_max;
    po.survey.threads = c.threads;
    const spk::ProfileMode mode = spk::profile_mode_from_string(c.mode);
    std::vector<spk::StepProfile> profiles;
    if (conductance) {
        const auto cp = spk::conductance_profile(chain, spk::ConductanceMethod::Automatic, po.survey);
        profiles = {cp.phi, cp.phi_star};
    } else if (auto band = spk::enumerate_profile(chain, mode, po)) {
        profiles = {band->lower, band->upper};
    } else {
        spk::AnalysisOptions ao;
        ao.mode = spk::ProfileMode::Envelopes;
        ao.exact = false;
        ao.discrete = false;
        ao.estimate_rho = false;
        profiles = {spk::analyze_chain(chain, ao).lambda_lower};
    }
    Output o(c.output);
    if (c.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& p : profiles) j.push_back(spk::to_json(p));
        o.stream() << j.dump(2) << '\n';
    } else {
        bool header = true;
        for (const auto& p : profiles) {
            std::ostringstream ss;
            spk::write_csv(ss, p);
            std::string text = ss.str();
            if (!header) text = text.substr(text.find('\n') + 1);
            o.stream() << text;
            header = false;
        }
    }
    return 0;
}

int run_bound(const Common& c, const Constants& k) {
    const spk::MarkovChain chain = spk::load_chain(c.input);
    const spk::ChainAnalysis a = spk::analyze_chain(chain, analysis_options(c, k), c.input);
    Output o(c.output);
    if (c.format == "json")
        o.stream() << spk::to_json(a).dump(2) << '\n';
    else if (c.format == "csv")
        spk::write_report_csv(o.stream(), {a});
    else
        spk::write_report_table(o.stream(), a);
    return 0;
}

int run_exact(const Common& c, const std::string& p_text, const std::string& time_mode, const std::string& curve) {
    const spk::MarkovChain chain = spk::load_chain(c.input);
    const double p = parse_p(p_text);
    const double eps = parse_epsilon(c.eps);
    const spk::TimeMode mode = time_mode == "discrete" ? spk::TimeMode::Discrete : spk::TimeMode::Continuous;
    const spk::DistanceEvaluator eval(chain);
    const spk::ExactTau tau = spk::exact_tau(eval, p, eps, mode);
    Output o(c.output);
    if (c.format == "json") {
        nlohmann::json j = {{"p", std::isinf(p) ? nlohmann::json("inf") : nlohmann::json(p)},
                            {"epsilon", eps},
                            {"mode", time_mode},
                            {"tau", tau.value},
                            {"non_monotone_warning", tau.non_monotone_warning}};
        o.stream() << j.dump(2) << '\n';
    } else {
        o.stream() << spk::format_9(tau.value) << '\n';
        if (tau.non_monotone_warning) std::cerr << "warning: distance was not monotone near the crossing\n";
    }
    if (!curve.empty()) {
        std::ofstream f(curve);
        if (!f) throw spk::Error(spk::ErrorCode::ParseError, "cannot write " + curve);
        spk::write_csv(f, spk::distance_curve(eval, p, spk::default_time_grid(chain)));
    }
    return 0;
}

int run_verify(const std::string& suite, const spk::SuiteOptions& so) {
    std::vector<std::string> suites = suite == "all" ? spk::suite_names() : std::vector<std::string>{suite};
    bool ok = true;
    for (const auto& name : suites) {
        const spk::SuiteResult r = spk::run_suite(name, so);
        std::cout << (r.passed() ? "PASS " : "FAIL ") << name << ": " << r.checks << " checks, worst slack "
                  << spk::format_9(r.worst_slack) << '\n';
        for (const auto& f : r.failures) std::cout << "  violated: " << f << '\n';
        ok = ok && r.passed();
    }
    return ok ? 0 : kExitValidation;
}

int run_report(const std::vector<std::string>& inputs, const Common& c, const Constants& k,
               const std::string& csv_path, const std::string& json_path) {
    std::vector<spk::ChainAnalysis> all;
    const spk::AnalysisOptions opts = analysis_options(c, k);
    for (const auto& in : inputs) all.push_back(spk::analyze_chain(spk::load_chain(in), opts, in));
    for (const auto& a : all) spk::write_report_table(std::cout, a);
    if (!csv_path.empty()) {
        Output o(csv_path);
        spk::write_report_csv(o.stream(), all);
    }
    if (!json_path.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& a : all) j.push_back(spk::to_json(a));
        Output o(json_path);
        o.stream() << j.dump(2) << '\n';
    }
    bool dominated = true;
    for (const auto& a : all)
        for (const auto& v : spk::check_dominance(a)) {
            std::cerr << "dominance violated: " << a.label << " " << v.name << " = " << spk::format_9(v.value)
                      << " vs exact " << spk::format_9(v.exact) << '\n';
            dominated = false;
        }
    return dominated ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-profile bounds on Markov chain mixing times"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an example chain as JSON");
    std::string gen_kind;
    int gen_n = 10, gen_N = 4, gen_gen = 1, gen_a = 3, gen_b = 9;
    double gen_lazy = 0.0;
    std::string gen_out;
    gen->add_option("kind", gen_kind, "complete, cycle, viscek or torus")
        ->required()
        ->check(CLI::IsMember({"complete", "cycle", "viscek", "torus"}));
    gen->add_option("--n", gen_n, "number of states (complete, cycle)");
    gen->add_option("--lazy", gen_lazy, "laziness alpha for the cycle");
    gen->add_option("--N", gen_N, "Viscek branching parameter");
    gen->add_option("--gen", gen_gen, "Viscek generation");
    gen->add_option("--a", gen_a, "torus side a");
    gen->add_option("--b", gen_b, "torus side b");
    gen->add_option("-o,--output", gen_out, "output file (default stdout)");

    // profile
    auto* profile = app.add_subcommand("profile", "spectral or conductance profile as CSV/JSON");
    Common pc;
    pc.format = "csv";
    bool conductance = false;
    add_common(profile, pc, true);
    profile->add_option("--format", pc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    profile->add_flag("--conductance", conductance, "emit Phi and Phi_* instead of Lambda");

    // bound
    auto* bound = app.add_subcommand("bound", "all applicable mixing-time bounds and the exact value");
    Common bc;
    Constants bk;
    add_common(bound, bc, true);
    add_constants(bound, bk);
    bound->add_option("--eps", bc.eps, "epsilon (decimal or 1/e)");
    bound->add_option("--format", bc.format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}));

    // exact
    auto* exact = app.add_subcommand("exact", "exact mixing time");
    Common ec;
    ec.format = "text";
    std::string p_text = "inf", time_mode = "continuous", curve;
    add_common(exact, ec, false);
    exact->add_option("--p", p_text, "norm: a number >= 1 or inf");
    exact->add_option("--eps", ec.eps, "epsilon (decimal or 1/e)");
    exact->add_option("--mode", time_mode, "continuous or discrete")
        ->check(CLI::IsMember({"continuous", "discrete"}));
    exact->add_option("--curve", curve, "also write the distance curve t,value to this CSV");
    exact->add_option("--format", ec.format, "text or json")->check(CLI::IsMember({"text", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "run invariant suites; exit 2 on any violation");
    std::string suite = "all";
    spk::SuiteOptions so;
    std::vector<std::string> suite_choices = spk::suite_names();
    suite_choices.push_back("all");
    verify->add_option("--suite", suite, "suite name or all")->check(CLI::IsMember(suite_choices));
    verify->add_option("--seed", so.seed, "random seed");
    verify->add_option("--chains", so.chains, "number of random chains");
    verify->add_option("--samples", so.samples, "random functions per chain");
    verify->add_option("--max-states", so.max_states, "largest random chain");

    // report
    auto* report = app.add_subcommand("report", "per-chain comparison of all bounds with the exact value");
    Common rc;
    Constants rk;
    std::vector<std::string> report_inputs;
    std::string csv_path, json_path;
    report->add_option("inputs", report_inputs, "chain files")->required();
    report->add_option("--csv", csv_path, "write the table as CSV");
    report->add_option("--json", json_path, "write the table as JSON");
    report->add_option("--eps", rc.eps, "epsilon (decimal or 1/e)");
    report->add_option("--profile-mode", rc.mode, "exhaustive, connected, envelopes or automatic")
        ->check(CLI::IsMember({"automatic", "exhaustive", "connected", "envelopes"}));
    report->add_option("--r-max", rc.r_max, "largest set mass enumerated");
    add_constants(report, rk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitParse;
    }

    try {
        if (*gen) return run_gen(gen_kind, gen_n, gen_lazy, gen_N, gen_gen, gen_a, gen_b, gen_out);
        if (*profile) return run_profile(pc, conductance);
        if (*bound) return run_bound(bc, bk);
        if (*exact) return run_exact(ec, p_text, time_mode, curve);
        if (*verify) return run_verify(suite, so);
        if (*report) return run_report(report_inputs, rc, rk, csv_path, json_path);
    } catch (const spk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
            case spk::ErrorCode::ParseError: return kExitParse;
            case spk::ErrorCode::SizeCap:
            case spk::ErrorCode::TooLarge: return kExitSizeCap;
            default: return kExitValidation;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
