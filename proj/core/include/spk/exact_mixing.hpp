#pragma once

#include "spk/chain.hpp"

#include <iosfwd>
#include <limits>
#include <memory>
#include <vector>

namespace spk {

inline constexpr double kInfinityNorm = std::numeric_limits<double>::infinity();

/// || mu/pi - nu/pi ||_{L^p(pi)}; p = kInfinityNorm gives the sup norm.
double lp_distance(const Vector& mu, const Vector& nu, const Vector& pi, double p);

enum class TimeMode { Continuous, Discrete };

/// Sup-over-start distances of H_t (or K^m) from stationarity. For p = infinity
/// this is the density form sup_{x,y} |h(x,y) - 1|. Reversible chains reuse one
/// eigendecomposition and never subtract the stationary mode numerically.
class DistanceEvaluator {
public:
    /// Keeps a reference to `chain`, which must outlive the evaluator.
    explicit DistanceEvaluator(const MarkovChain& chain, double heat_tol = 1e-13);
    DistanceEvaluator(MarkovChain&&, double = 1e-13) = delete;
    ~DistanceEvaluator();
    DistanceEvaluator(DistanceEvaluator&&) noexcept;
    DistanceEvaluator& operator=(DistanceEvaluator&&) noexcept;

    double continuous(double p, double t) const;
    double discrete(double p, long long m) const;
    /// sup_x h_t(x,x)
    double max_diagonal_density(double t) const;
    /// sup_x d_2(H_t(x,.), pi)^2
    double max_l2_squared(double t) const;
    /// h_t(x,y) - 1 for every pair.
    Matrix density_excess(double t) const;
    const MarkovChain& chain() const noexcept { return *chain_; }

private:
    const MarkovChain* chain_;
    double heat_tol_;
    struct Spectral;
    std::unique_ptr<Spectral> spectral_;
};

struct ExactTauOptions {
    double rel_tol = 1e-8;
    double t_max = 1e8;
    long long max_steps = 100'000'000;
    double heat_tol = 1e-13;
};

struct ExactTau {
    double value = 0.0;
    TimeMode mode = TimeMode::Continuous;
    /// Set when the certification rescan saw the distance increase.
    bool non_monotone_warning = false;
};

/// Smallest t (or integer m) with the sup-distance <= eps: doubling then
/// bisection to relative rel_tol. Throws Periodic (discrete mode on a
/// periodic chain) and NoConvergenceInWindow.
ExactTau exact_tau(const MarkovChain& chain, double p, double eps, TimeMode mode = TimeMode::Continuous,
                   const ExactTauOptions& opts = {});
ExactTau exact_tau(const DistanceEvaluator& eval, double p, double eps, TimeMode mode = TimeMode::Continuous,
                   const ExactTauOptions& opts = {});

struct DistanceCurve {
    double p = kInfinityNorm;
    std::vector<double> times;
    std::vector<double> values;
};

DistanceCurve distance_curve(const MarkovChain& chain, double p, const std::vector<double>& times);
DistanceCurve distance_curve(const DistanceEvaluator& eval, double p, const std::vector<double>& times);

/// 64 log-spaced points per decade from 1e-3/lambda1 to 20/lambda1.
std::vector<double> default_time_grid(const MarkovChain& chain);

void write_csv(std::ostream& os, const DistanceCurve& curve);

}  // namespace spk
