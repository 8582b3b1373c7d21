#include "spk/exact_mixing.hpp"

#include "spk/error.hpp"
#include "spk/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spk {

double lp_distance(const Vector& mu, const Vector& nu, const Vector& pi, double p) {
    if (mu.size() != nu.size() || mu.size() != pi.size())
        throw Error(ErrorCode::DimensionMismatch, "measures and pi differ in length");
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
    const Vector diff = ((mu - nu).array() / pi.array()).abs().matrix();
    if (std::isinf(p)) return diff.maxCoeff();
    if (p == 1.0) return pi.dot(diff);
    if (p == 2.0) return std::sqrt(pi.dot(diff.cwiseAbs2()));
    return std::pow(pi.dot(diff.array().pow(p).matrix()), 1.0 / p);
}

namespace {

// sup over rows of the L^p(pi) norm of a density-excess matrix.
double row_norm_sup(const Matrix& excess, const Vector& pi, double p) {
    if (std::isinf(p)) return excess.cwiseAbs().maxCoeff();
    double best = 0.0;
    for (Eigen::Index x = 0; x < excess.rows(); ++x) {
        const Vector row = excess.row(x).transpose().cwiseAbs();
        double v;
        if (p == 1.0)
            v = pi.dot(row);
        else if (p == 2.0)
            v = std::sqrt(pi.dot(row.cwiseAbs2()));
        else
            v = std::pow(pi.dot(row.array().pow(p).matrix()), 1.0 / p);
        best = std::max(best, v);
    }
    return best;
}

void check_p(double p) {
    if (!(p >= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must be at least 1");
}

}  // namespace

struct DistanceEvaluator::Spectral {
    SpectralDecomposition decomposition;
};

DistanceEvaluator::DistanceEvaluator(const MarkovChain& chain, double heat_tol)
    : chain_(&chain), heat_tol_(heat_tol) {
    if (chain.reversible()) spectral_ = std::make_unique<Spectral>(Spectral{SpectralDecomposition(chain)});
}

DistanceEvaluator::~DistanceEvaluator() = default;
DistanceEvaluator::DistanceEvaluator(DistanceEvaluator&&) noexcept = default;
DistanceEvaluator& DistanceEvaluator::operator=(DistanceEvaluator&&) noexcept = default;

Matrix DistanceEvaluator::density_excess(double t) const {
    if (spectral_) return spectral_->decomposition.density_excess(t);
    const HeatKernelSnapshot snap = heat_kernel(*chain_, t, heat_tol_, HeatKernelMethod::Uniformization);
    Matrix d = snap.density_matrix();
    d.array() -= 1.0;
    return d;
}

double DistanceEvaluator::max_diagonal_density(double t) const {
    if (spectral_) return 1.0 + spectral_->decomposition.diagonal_excess(t).maxCoeff();
    return 1.0 + density_excess(t).diagonal().maxCoeff();
}

double DistanceEvaluator::max_l2_squared(double t) const {
    // d_2(H_t(x,.), pi)^2 = h_{2t}(x,x) - 1 for reversible chains.
    if (spectral_) return spectral_->decomposition.diagonal_excess(2.0 * t).maxCoeff();
    const double d = row_norm_sup(density_excess(t), chain_->pi(), 2.0);
    return d * d;
}

double DistanceEvaluator::continuous(double p, double t) const {
    check_p(p);
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be non-negative");
    if (spectral_) {
        // Cauchy-Schwarz over positively weighted modes puts the sup on the diagonal.
        if (std::isinf(p)) return std::max(0.0, spectral_->decomposition.diagonal_excess(t).maxCoeff());
        if (p == 2.0) return std::sqrt(std::max(0.0, max_l2_squared(t)));
    }
    return row_norm_sup(density_excess(t), chain_->pi(), p);
}

double DistanceEvaluator::discrete(double p, long long m) const {
    check_p(p);
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "step count must be non-negative");
    Matrix excess;
    if (spectral_) {
        excess = spectral_->decomposition.discrete_density_excess(m);
    } else {
        excess = discrete_power(*chain_, m) * chain_->pi().cwiseInverse().asDiagonal();
        excess.array() -= 1.0;
    }
    return row_norm_sup(excess, chain_->pi(), p);
}

// ---------------------------------------------------------------------------

namespace {

ExactTau continuous_tau(const DistanceEvaluator& eval, double p, double eps, const ExactTauOptions& opts) {
    ExactTau out;
    out.mode = TimeMode::Continuous;
    auto dist = [&](double t) { return eval.continuous(p, t); };
    if (dist(0.0) <= eps) return out;

    double lo = 0.0;
    double hi = 1.0 / std::max(spectral_gap(eval.chain()), 1e-300) * 1e-3;
    while (dist(hi) > eps) {
        lo = hi;
        hi *= 2.0;
        if (hi > opts.t_max)
            throw Error(ErrorCode::NoConvergenceInWindow, "distance stays above eps up to t_max");
    }
    while (hi - lo > opts.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (dist(mid) > eps)
            lo = mid;
        else
            hi = mid;
    }
    out.value = hi;

    if (!eval.chain().reversible()) {
        // Certify against a non-monotone dip by rescanning [hi/2, 2 hi].
        for (int i = 0; i <= 64; ++i) {
            const double t = hi * std::pow(2.0, -1.0 + 2.0 * i / 64.0);
            const double d = dist(t);
            if ((t < lo && d <= eps * (1.0 - 1e-9)) || (t > hi && d > eps * (1.0 + 1e-9))) {
                out.non_monotone_warning = true;
                break;
            }
        }
    }
    return out;
}

ExactTau discrete_tau(const DistanceEvaluator& eval, double p, double eps, const ExactTauOptions& opts) {
    const MarkovChain& chain = eval.chain();
    if (period(chain.kernel(), chain.options().support_eps) > 1)
        throw Error(ErrorCode::Periodic, "discrete-time distance does not converge for a periodic chain");
    ExactTau out;
    out.mode = TimeMode::Discrete;
    auto dist = [&](long long m) { return eval.discrete(p, m); };
    if (dist(0) <= eps) return out;
    long long lo = 0;
    long long hi = 1;
    while (dist(hi) > eps) {
        lo = hi;
        hi *= 2;
        if (hi > opts.max_steps)
            throw Error(ErrorCode::NoConvergenceInWindow, "distance stays above eps up to max_steps");
    }
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (dist(mid) > eps)
            lo = mid;
        else
            hi = mid;
    }
    out.value = static_cast<double>(hi);
    return out;
}

}  // namespace

ExactTau exact_tau(const DistanceEvaluator& eval, double p, double eps, TimeMode mode, const ExactTauOptions& opts) {
    check_p(p);
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
    return mode == TimeMode::Continuous ? continuous_tau(eval, p, eps, opts) : discrete_tau(eval, p, eps, opts);
}

ExactTau exact_tau(const MarkovChain& chain, double p, double eps, TimeMode mode, const ExactTauOptions& opts) {
    const DistanceEvaluator eval(chain, opts.heat_tol);
    return exact_tau(eval, p, eps, mode, opts);
}

DistanceCurve distance_curve(const DistanceEvaluator& eval, double p, const std::vector<double>& times) {
    check_p(p);
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw Error(ErrorCode::InvalidArgument, "time grid must be increasing");
    DistanceCurve c;
    c.p = p;
    c.times = times;
    c.values.reserve(times.size());
    for (double t : times) c.values.push_back(eval.continuous(p, t));
    return c;
}

DistanceCurve distance_curve(const MarkovChain& chain, double p, const std::vector<double>& times) {
    const DistanceEvaluator eval(chain);
    return distance_curve(eval, p, times);
}

std::vector<double> default_time_grid(const MarkovChain& chain) {
    const double relax = 1.0 / spectral_gap(chain);
    return log_grid(1e-3 * relax, 20.0 * relax, 64);
}

void write_csv(std::ostream& os, const DistanceCurve& curve) {
    const auto prec = os.precision(17);
    os << "t,value\n";
    for (std::size_t i = 0; i < curve.times.size(); ++i) os << curve.times[i] << ',' << curve.values[i] << '\n';
    os.precision(prec);
}

}  // namespace spk
