#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ChainOptions {
    /// Maximum |row sum - 1| accepted on input; rows are renormalized afterwards.
    double row_sum_tol = 1e-9;
    /// Absolute tolerance on pi(x)K(x,y) - pi(y)K(y,x).
    double reversibility_tol = 1e-12;
    /// Entries at or below this value are not edges of the support digraph.
    double support_eps = 1e-15;
};

/// An irreducible finite Markov chain with its stationary distribution.
///
/// Immutable after construction; all accessors are const and safe to share
/// between threads.
class MarkovChain {
public:
    static MarkovChain build(const Matrix& kernel, const ChainOptions& opts = {},
                             std::vector<std::string> labels = {});

    int size() const noexcept { return static_cast<int>(kernel_.rows()); }
    const Matrix& kernel() const noexcept { return kernel_; }
    const Vector& pi() const noexcept { return pi_; }
    double pi_star() const noexcept { return pi_star_; }
    bool reversible() const noexcept { return reversible_; }
    /// min_x K(x,x)
    double holding_alpha() const noexcept { return holding_alpha_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const ChainOptions& options() const noexcept { return options_; }

private:
    MarkovChain() = default;

    Matrix kernel_;
    Vector pi_;
    double pi_star_ = 0.0;
    bool reversible_ = false;
    double holding_alpha_ = 0.0;
    std::vector<std::string> labels_;
    ChainOptions options_;
};

inline MarkovChain build_chain(const Matrix& kernel, const ChainOptions& opts = {}) {
    return MarkovChain::build(kernel, opts);
}

/// Strongly connected components of the digraph {K(x,y) > eps} (Tarjan).
/// Returns the component index of every vertex; components are numbered in
/// reverse topological order.
std::vector<int> strongly_connected_components(const Matrix& kernel, double eps = 1e-15);
bool is_irreducible(const Matrix& kernel, double eps = 1e-15);

/// Period of an irreducible kernel (gcd of cycle lengths in the support digraph).
int period(const Matrix& kernel, double eps = 1e-15);

/// Solves pi K = pi, sum(pi) = 1 by a dense factorization of (K^T - I) with the
/// normalization row appended.
Vector stationary_distribution(const Matrix& kernel);

/// K*(x,y) = pi(y) K(y,x) / pi(x)
Matrix adjoint(const MarkovChain& chain);

/// <(I-K)f, g>_pi
double dirichlet_form(const MarkovChain& chain, const Vector& f, const Vector& g);
/// 1/2 sum_{x,y} (f(x)-f(y))^2 K(x,y) pi(x), evaluated edge by edge.
double dirichlet_energy(const MarkovChain& chain, const Vector& f);

double expectation(const MarkovChain& chain, const Vector& f);
double variance(const MarkovChain& chain, const Vector& f);

/// Q(A,B) = sum_{x in A, y in B} pi(x) K(x,y)
double flow(const MarkovChain& chain, std::span<const int> from, std::span<const int> to);

/// pi-weighted symmetric Laplacian matrix L with f^T L f = E(f,f):
/// L = diag(pi) - (diag(pi) K + K^T diag(pi)) / 2.
Matrix energy_matrix(const MarkovChain& chain);

/// D^{1/2} ((K + K*)/2) D^{-1/2}; symmetric, spectrum of the additive symmetrization.
Matrix symmetrized_kernel(const MarkovChain& chain);

/// Undirected support graph {x != y : pi(x)K(x,y) + pi(y)K(y,x) > 0} as adjacency lists.
std::vector<std::vector<int>> support_graph(const MarkovChain& chain);

struct HeatKernelSnapshot {
    double t = 0.0;
    Matrix Ht;
    Vector pi;

    /// h(x,y,t) = H_t(x,y) / pi(y)
    double density(int x, int y) const { return Ht(x, y) / pi(y); }
    Matrix density_matrix() const;
};

enum class HeatKernelMethod { Automatic, Uniformization, Spectral };

/// H_t = exp(-t (I - K)). Uniformization sums the Poisson-weighted powers until
/// the Poisson tail is below tol; large t is split into chunks and recombined by
/// repeated squaring. The spectral path (reversible chains only) synthesizes from
/// the eigendecomposition of D^{1/2} K D^{-1/2}.
HeatKernelSnapshot heat_kernel(const MarkovChain& chain, double t, double tol = 1e-13,
                               HeatKernelMethod method = HeatKernelMethod::Automatic);

/// Cached eigendecomposition of a reversible chain for repeated heat-kernel
/// evaluations. Eigenvalues are those of I - K (ascending), eigenvectors are
/// orthonormal in the D^{1/2}-symmetrized coordinates.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(const MarkovChain& chain);

    const Vector& laplacian_eigenvalues() const noexcept { return mu_; }
    const Matrix& eigenvectors() const noexcept { return vecs_; }
    const Vector& pi() const noexcept { return pi_; }
    int stationary_index() const noexcept { return stationary_; }

    Matrix heat_kernel(double t) const;
    /// h_t(x,x) - 1 for every x, summed without the stationary mode.
    Vector diagonal_excess(double t) const;
    /// h_t(x,y) - 1 for all pairs, without the stationary mode.
    Matrix density_excess(double t) const;
    /// K^m(x,y)/pi(y) - 1 for all pairs.
    Matrix discrete_density_excess(long long m) const;

private:
    Vector mu_;
    Matrix vecs_;
    Vector pi_;
    Vector sqrt_pi_;
    int stationary_ = 0;
};

struct MultiplicativeSymmetrizations {
    Matrix kk_star;
    Matrix k_star_k;
    bool kk_star_irreducible = false;
    bool k_star_k_irreducible = false;
};

MultiplicativeSymmetrizations multiplicative_symmetrizations(const MarkovChain& chain);

/// alpha I + (1 - alpha) K
MarkovChain add_laziness(const MarkovChain& chain, double alpha);
/// (K - alpha I) / (1 - alpha); requires alpha <= min_x K(x,x) and alpha < 1.
MarkovChain remove_laziness(const MarkovChain& chain, double alpha);

/// K^m by square-and-multiply.
Matrix discrete_power(const MarkovChain& chain, long long m);

}  // namespace spk
