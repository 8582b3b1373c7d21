#include "spk/profiles.hpp"

#include "spk/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spk {

int GrowthData::w(double r) const {
    for (int k = 0; k <= diameter; ++k)
        if (v_star[k] > r) return k;
    return diameter + 1;
}

int GrowthData::W(double v) const {
    for (int r = 0; r <= diameter; ++r)
        if (v_star[r] >= v * (1.0 - 1e-12)) return r;
    return diameter;
}

GrowthData growth_data(const MarkovChain& chain) {
    const int n = chain.size();
    const auto adj = support_graph(chain);
    std::vector<std::vector<int>> dist(n);
    int diameter = 0;
    for (int x = 0; x < n; ++x) {
        auto& d = dist[x];
        d.assign(n, -1);
        d[x] = 0;
        std::vector<int> queue{x};
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (int w : adj[queue[h]])
                if (d[w] < 0) {
                    d[w] = d[queue[h]] + 1;
                    queue.push_back(w);
                }
        if (static_cast<int>(queue.size()) != n)
            throw Error(ErrorCode::Reducible, "support graph is disconnected");
        diameter = std::max(diameter, d[queue.back()]);
    }
    GrowthData g;
    g.diameter = diameter;
    g.volume.assign(n, std::vector<double>(static_cast<std::size_t>(diameter) + 1, 0.0));
    for (int x = 0; x < n; ++x) {
        auto& v = g.volume[x];
        for (int y = 0; y < n; ++y) v[dist[x][y]] += chain.pi()(y);
        for (int r = 1; r <= diameter; ++r) v[r] += v[r - 1];
        v[diameter] = 1.0;
    }
    g.v_star.assign(static_cast<std::size_t>(diameter) + 1, 1.0);
    for (int r = 0; r <= diameter; ++r)
        for (int x = 0; x < n; ++x) g.v_star[r] = std::min(g.v_star[r], g.volume[x][r]);
    return g;
}

double minimal_edge_flow(const MarkovChain& chain) {
    const Matrix& k = chain.kernel();
    const Vector& pi = chain.pi();
    double q = std::numeric_limits<double>::infinity();
    for (int x = 0; x < chain.size(); ++x)
        for (int y = x + 1; y < chain.size(); ++y) {
            const double f = pi(x) * k(x, y) + pi(y) * k(y, x);
            if (f > 0.0) q = std::min(q, f);
        }
    return q;
}

StepProfile volume_profile_bound(const MarkovChain& chain, const GrowthData& growth) {
    const double q_star = minimal_edge_flow(chain);
    const double lo = chain.pi_star();
    std::vector<double> grid = log_grid(lo, 1.0, 64);
    for (double v : growth.v_star)
        if (v > lo && v < 1.0) grid.push_back(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> vals(grid.size(), 0.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        // w is constant on [grid[i], grid[i+1]) because every jump of w is a grid point.
        const int w = growth.w(grid[i]);
        vals[i] = q_star / (4.0 * grid[i + 1] * w);
    }
    return StepProfile(std::move(grid), std::move(vals), ProfileKind::LowerEnvelope, ProfileSource::Volume);
}

ModerateGrowthCheck moderate_growth_check(const GrowthData& growth, double A, double d) {
    if (!(A >= 1.0) || !(d >= 1.0 - 1e-15))
        throw Error(ErrorCode::InvalidArgument, "moderate growth needs A, d >= 1");
    ModerateGrowthCheck out;
    out.slack = std::numeric_limits<double>::infinity();
    const double gamma = growth.diameter;
    for (std::size_t x = 0; x < growth.volume.size(); ++x)
        for (int r = 0; r <= growth.diameter; ++r) {
            const double need = std::pow((r + 1.0) / gamma, d) / A;
            const double slack = growth.volume[x][r] - need;
            out.slack = std::min(out.slack, slack);
            if (slack < -1e-12 && out.holds) {
                out.holds = false;
                out.witness_x = static_cast<int>(x);
                out.witness_r = r;
            }
        }
    return out;
}

double minimal_growth_constant(const GrowthData& growth, double d) {
    const double gamma = growth.diameter;
    double A = 1.0;
    for (int r = 0; r <= growth.diameter; ++r)
        A = std::max(A, std::pow((r + 1.0) / gamma, d) / growth.v_star[r]);
    return A;
}

StepProfile poincare_profile_bound(const MarkovChain& chain, const GrowthData& growth, double a) {
    if (!(a > 0.0)) throw Error(ErrorCode::InvalidArgument, "Poincare constant must be positive");
    const double lo = chain.pi_star();
    std::vector<double> grid{lo, 0.5};
    for (double v : growth.v_star)
        if (v / 2.0 > lo && v / 2.0 < 0.5) grid.push_back(v / 2.0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // W(2v) is non-decreasing and left-continuous in v, so on [g_i, g_{i+1}) it
    // is at most W(2 g_{i+1}).
    auto bound = [&](double v) {
        const int W = std::max(1, growth.W(2.0 * v));
        return 1.0 / (4.0 * a * W * W);
    };
    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) vals[i] = bound(grid[i + 1]);
    vals.back() = bound(0.5) / 2.0;
    return StepProfile(std::move(grid), std::move(vals), ProfileKind::LowerEnvelope, ProfileSource::Poincare);
}

double group_walk_poincare_constant(const MarkovChain& chain) {
    const Matrix& k = chain.kernel();
    double p_min = std::numeric_limits<double>::infinity();
    for (int y = 1; y < chain.size(); ++y)
        if (k(0, y) > chain.options().support_eps) p_min = std::min(p_min, k(0, y));
    if (!std::isfinite(p_min)) throw Error(ErrorCode::InvalidArgument, "state 0 has no neighbors");
    return 2.0 / p_min;
}

// ---------------------------------------------------------------------------

double logsob_factor(double r) {
    if (!(r > 0.0)) return std::numeric_limits<double>::infinity();
    if (r >= 1.0) return 1.0;
    const double u = 1.0 - r;
    if (u < 1e-6) return 1.0 + u / 2.0 + u * u / 3.0;
    return -std::log(r) / u;
}

StepProfile logsob_profile_bound(double rho, double r_min, int per_decade) {
    if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "log-Sobolev constant must be positive");
    if (!(r_min > 0.0 && r_min < 1.0)) throw Error(ErrorCode::InvalidArgument, "r_min must lie in (0,1)");
    return StepProfile::discretize_nonincreasing([rho](double r) { return rho * logsob_factor(r); },
                                                 log_grid(r_min, 1.0, per_decade), rho,
                                                 ProfileSource::LogSobolev);
}

StepProfile nash_profile_bound(double C, double D, double T, double r_min, int per_decade) {
    if (!(C > 0.0 && D > 0.0 && T > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Nash constants must be positive");
    if (!(r_min > 0.0 && r_min < 1.0)) throw Error(ErrorCode::InvalidArgument, "r_min must lie in (0,1)");
    auto fn = [=](double r) { return 1.0 / (C * std::pow(r, 1.0 / (2.0 * D))) - 1.0 / T; };
    return StepProfile::discretize_nonincreasing(fn, log_grid(r_min, 1.0, per_decade), fn(1.0),
                                                 ProfileSource::Nash);
}

NashConstants moderate_growth_nash(double A, double d, double a, int gamma) {
    NashConstants c;
    const double g2 = static_cast<double>(gamma) * gamma;
    c.C = std::pow(1.0 + 1.0 / d, 2.0) * std::pow(1.0 + d, 2.0 / d) * std::pow(A, 2.0 / d) * a * g2;
    c.D = d / 4.0;
    c.T = a * g2;
    return c;
}

// ---------------------------------------------------------------------------

double entropy(const MarkovChain& chain, const Vector& f) {
    const Vector& pi = chain.pi();
    const Vector f2 = f.cwiseAbs2();
    const double norm2 = pi.dot(f2);
    if (!(norm2 > 0.0)) return 0.0;
    double ent = 0.0;
    for (Eigen::Index x = 0; x < f.size(); ++x)
        if (f2(x) > 0.0) ent += pi(x) * f2(x) * std::log(f2(x) / norm2);
    return ent;
}

double logsob_quotient(const MarkovChain& chain, const Vector& f) {
    const double ent = entropy(chain, f);
    if (!(ent > 0.0)) return std::numeric_limits<double>::infinity();
    return dirichlet_energy(chain, f) / ent;
}

namespace {

struct EntropyQuotient {
    Matrix lap;
    Vector pi;

    double value(const Vector& f, Vector* grad) const {
        const Vector lf = lap * f;
        const double e = f.dot(lf);
        const Vector f2 = f.cwiseAbs2();
        const double norm2 = pi.dot(f2);
        Vector logs = Vector::Zero(f.size());
        double ent = 0.0;
        for (Eigen::Index x = 0; x < f.size(); ++x)
            if (f2(x) > 0.0) {
                logs(x) = std::log(f2(x) / norm2);
                ent += pi(x) * f2(x) * logs(x);
            }
        if (!(ent > 1e-300)) return std::numeric_limits<double>::infinity();
        const double q = e / ent;
        if (grad) {
            const Vector dent = 2.0 * pi.cwiseProduct(f).cwiseProduct(logs);
            *grad = (2.0 * lf - q * dent) / ent;
        }
        return q;
    }
};

void normalize_l2(Vector& f, const Vector& pi) {
    const double n2 = std::sqrt(pi.dot(f.cwiseAbs2()));
    if (n2 > 0.0) f /= n2;
}

}  // namespace

LogSobolevEstimate estimate_logsob(const MarkovChain& chain, const LogSobolevOptions& opts) {
    const int n = chain.size();
    EntropyQuotient eq{energy_matrix(chain), chain.pi()};
    const Vector psi = spectral_gap_pair(chain).function;

    std::vector<Vector> starts;
    for (double s : {1e-2, 0.3, 1.0, 3.0}) {
        Vector f = Vector::Ones(n) + s * psi;
        starts.push_back(f.cwiseMax(0.0));
        Vector g = Vector::Ones(n) - s * psi;
        starts.push_back(g.cwiseMax(0.0));
    }
    for (int x = 0; x < n; ++x) {
        Vector f = Vector::Constant(n, 0.1);
        f(x) = 1.0;
        starts.push_back(f);
    }
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < opts.restarts; ++k) {
        Vector f(n);
        for (int x = 0; x < n; ++x) f(x) = unif(rng);
        starts.push_back(f);
    }

    LogSobolevEstimate best;
    best.value = std::numeric_limits<double>::infinity();
    for (Vector f : starts) {
        normalize_l2(f, eq.pi);
        Vector grad;
        double q = eq.value(f, &grad);
        if (!std::isfinite(q)) continue;
        double step = 1.0;
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            bool moved = false;
            for (int tries = 0; tries < 60; ++tries) {
                Vector cand = (f - step * grad).cwiseMax(0.0);
                normalize_l2(cand, eq.pi);
                Vector cgrad;
                const double qc = eq.value(cand, &cgrad);
                if (qc < q) {
                    const double change = q - qc;
                    f = std::move(cand);
                    grad = std::move(cgrad);
                    q = qc;
                    step *= 1.5;
                    moved = true;
                    if (change <= opts.tolerance * std::max(1.0, q)) converged = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) {
                converged = true;
                break;
            }
            if (converged) break;
        }
        if (q < best.value) {
            best.value = q;
            best.argmin = f;
            best.converged = converged;
        }
    }
    return best;
}

}  // namespace spk
