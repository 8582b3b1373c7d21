#pragma once

#include "spk/chain.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace spk {

/// A non-empty set of states with its stationary mass, boundary flow and
/// connected components in the undirected support graph.
class Subset {
public:
    static Subset make(const MarkovChain& chain, std::vector<int> members);

    const std::vector<int>& members() const noexcept { return members_; }
    int size() const noexcept { return static_cast<int>(members_.size()); }
    double mass() const noexcept { return mass_; }
    /// |dS| = Q(S, S^c)
    double boundary() const noexcept { return boundary_; }
    const std::vector<std::vector<int>>& components() const noexcept { return components_; }
    bool connected() const noexcept { return components_.size() == 1; }
    bool full_space() const noexcept { return full_; }
    /// Indicator vector of length n.
    Vector indicator(int n) const;

private:
    std::vector<int> members_;
    double mass_ = 0.0;
    double boundary_ = 0.0;
    bool full_ = false;
    std::vector<std::vector<int>> components_;
};

/// Members of a bitmask subset (n <= 64).
std::vector<int> members_of(std::uint64_t mask, int n);

struct RestrictedLaplacian {
    /// I - K_S on the S-indexed block.
    Matrix block;
    /// (Delta_S + Delta_S^*)/2 with the adjoint taken in L^2(pi); present only
    /// for non-reversible chains.
    std::optional<Matrix> symmetrized;
};

RestrictedLaplacian restricted_laplacian(const MarkovChain& chain, const std::vector<int>& members);

struct EigenOptions {
    /// Full symmetric eigendecomposition up to this size; inverse iteration above.
    int dense_cutoff = 512;
    int max_inverse_iterations = 500;
    double inverse_iteration_tol = 1e-13;
};

struct DirichletEigen {
    double value = 0.0;
    /// Ground state as a function on S (pi-weighted coordinates undone), positive.
    Vector ground_state;
};

/// Smallest eigenvalue of the pi-symmetrized restricted Laplacian
/// D_S^{1/2} (I - (K_S + K_S^*)/2) D_S^{-1/2}. Equal to the reversible formula
/// when K is reversible; for non-reversible chains this is the additive
/// symmetrization.
DirichletEigen dirichlet_eigen(const MarkovChain& chain, const std::vector<int>& members,
                               const EigenOptions& opts = {});
double lambda0(const MarkovChain& chain, const std::vector<int>& members,
               const EigenOptions& opts = {});

struct LambdaBracket {
    double lambda0 = 0.0;
    double lower = 0.0;
    /// lambda0 / (1 - pi(S)); +infinity when S is the full space.
    double upper = std::numeric_limits<double>::infinity();
    std::optional<double> variational_estimate;
    /// Set when lambda0 came from the additive symmetrization of a
    /// non-reversible chain.
    bool via_additive_symmetrization = false;
};

LambdaBracket lambda_bracket(const MarkovChain& chain, const Subset& set,
                             const EigenOptions& opts = {});

struct VariationalOptions {
    int max_iterations = 4000;
    int restarts = 16;
    double tolerance = 1e-12;
    std::uint64_t seed = 0x5eed;
    /// Solve the generalized eigenproblem on the support found by the descent.
    bool polish = true;
};

struct VariationalResult {
    double value = 0.0;
    /// Minimizing nonnegative function on the full state space (zero off S).
    Vector argmin;
    bool converged = false;
    /// Set when the descent landed outside the eigenvalue bracket and was clamped.
    bool clamped = false;
    int iterations = 0;
};

/// E(f,f)/Var(f) for f supported on S (helper shared by optimizer and tests).
double rayleigh_quotient(const MarkovChain& chain, const Vector& f);

/// Estimate of lambda(S) = inf over nonnegative, S-supported, non-constant f of
/// E(f,f)/Var(f): projected gradient descent from several starts, each
/// finished by a generalized eigen-solve on the detected support.
VariationalResult lambda_variational(const MarkovChain& chain, const Subset& set,
                                     const VariationalOptions& opts = {});

/// min over connected components of lambda_variational.
VariationalResult lambda_by_components(const MarkovChain& chain, const Subset& set,
                                       const VariationalOptions& opts = {});

}  // namespace spk
