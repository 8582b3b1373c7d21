#include "spk/subset.hpp"

#include "spk/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace spk {

Subset Subset::make(const MarkovChain& chain, std::vector<int> members) {
    if (members.empty()) throw Error(ErrorCode::EmptySubset, "subset must be non-empty");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    const int n = chain.size();
    if (members.front() < 0 || members.back() >= n) {
        throw Error(ErrorCode::DimensionMismatch, "subset member out of range");
    }
    Subset s;
    s.members_ = std::move(members);
    s.full_ = static_cast<int>(s.members_.size()) == n;

    std::vector<char> in(n, 0);
    for (int x : s.members_) in[x] = 1;
    std::vector<int> complement;
    for (int x = 0; x < n; ++x)
        if (!in[x]) complement.push_back(x);
    for (int x : s.members_) s.mass_ += chain.pi()(x);
    if (s.full_) s.mass_ = 1.0;
    s.boundary_ = flow(chain, s.members_, complement);

    const auto adj = support_graph(chain);
    std::vector<char> seen(n, 0);
    for (int root : s.members_) {
        if (seen[root]) continue;
        std::vector<int> comp{root};
        seen[root] = 1;
        for (std::size_t head = 0; head < comp.size(); ++head) {
            for (int w : adj[comp[head]]) {
                if (in[w] && !seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        s.components_.push_back(std::move(comp));
    }
    return s;
}

Vector Subset::indicator(int n) const {
    Vector v = Vector::Zero(n);
    for (int x : members_) v(x) = 1.0;
    return v;
}

std::vector<int> members_of(std::uint64_t mask, int n) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (mask >> i & 1ULL) out.push_back(i);
    return out;
}

RestrictedLaplacian restricted_laplacian(const MarkovChain& chain, const std::vector<int>& members) {
    if (members.empty()) throw Error(ErrorCode::EmptySubset, "subset must be non-empty");
    const int s = static_cast<int>(members.size());
    RestrictedLaplacian out;
    out.block = Matrix::Identity(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) out.block(i, j) -= chain.kernel()(members[i], members[j]);
    if (!chain.reversible()) {
        Matrix adj(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j)
                adj(i, j) = chain.pi()(members[j]) * out.block(j, i) / chain.pi()(members[i]);
        out.symmetrized = 0.5 * (out.block + adj);
    }
    return out;
}

namespace {

Matrix symmetric_restricted(const MarkovChain& chain, const std::vector<int>& members) {
    const int s = static_cast<int>(members.size());
    Matrix a(s, s);
    for (int i = 0; i < s; ++i) {
        const double si = std::sqrt(chain.pi()(members[i]));
        for (int j = 0; j < s; ++j) {
            const double sj = std::sqrt(chain.pi()(members[j]));
            a(i, j) = si * chain.kernel()(members[i], members[j]) / sj;
        }
    }
    Matrix m = -0.5 * (a + a.transpose());
    m.diagonal().array() += 1.0;
    return m;
}

DirichletEigen finish(const MarkovChain& chain, const std::vector<int>& members, double value,
                      Vector u) {
    for (int i = 0; i < u.size(); ++i) u(i) /= std::sqrt(chain.pi()(members[i]));
    if (u.sum() < 0.0) u = -u;
    DirichletEigen out;
    out.value = std::max(0.0, value);
    out.ground_state = u;
    return out;
}

}  // namespace

DirichletEigen dirichlet_eigen(const MarkovChain& chain, const std::vector<int>& members,
                               const EigenOptions& opts) {
    if (members.empty()) throw Error(ErrorCode::EmptySubset, "subset must be non-empty");
    const Matrix m = symmetric_restricted(chain, members);
    const int s = static_cast<int>(members.size());
    if (s == 1) return finish(chain, members, m(0, 0), Vector::Ones(1));

    if (s <= opts.dense_cutoff || s == chain.size()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m);
        if (es.info() != Eigen::Success) {
            throw Error(ErrorCode::EigensolveFailure, "restricted Laplacian eigensolve failed");
        }
        return finish(chain, members, es.eigenvalues()(0), es.eigenvectors().col(0));
    }

    // Inverse iteration: the restricted operator of a proper subset is positive
    // definite, so an LDLT factorization is stable.
    Eigen::LDLT<Matrix> ldlt(m);
    if (ldlt.info() != Eigen::Success) {
        throw Error(ErrorCode::EigensolveFailure, "factorization for inverse iteration failed");
    }
    Vector u = Vector::Ones(s).normalized();
    double value = u.dot(m * u);
    for (int it = 0; it < opts.max_inverse_iterations; ++it) {
        Vector next = ldlt.solve(u);
        next.normalize();
        const double rq = next.dot(m * next);
        const double change = std::abs(rq - value);
        u = next;
        value = rq;
        if (change <= opts.inverse_iteration_tol * std::max(1.0, std::abs(value))) {
            return finish(chain, members, value, u);
        }
    }
    throw Error(ErrorCode::EigensolveFailure, "inverse iteration did not converge");
}

double lambda0(const MarkovChain& chain, const std::vector<int>& members, const EigenOptions& opts) {
    return dirichlet_eigen(chain, members, opts).value;
}

LambdaBracket lambda_bracket(const MarkovChain& chain, const Subset& set, const EigenOptions& opts) {
    LambdaBracket b;
    b.lambda0 = lambda0(chain, set.members(), opts);
    b.lower = b.lambda0;
    b.via_additive_symmetrization = !chain.reversible();
    if (!set.full_space() && set.mass() < 1.0) b.upper = b.lambda0 / (1.0 - set.mass());
    return b;
}

double rayleigh_quotient(const MarkovChain& chain, const Vector& f) {
    return dirichlet_energy(chain, f) / variance(chain, f);
}

namespace {

/// Quotient f^T A f / f^T B f on S-coordinates with B = D_S - pi_S pi_S^T.
struct Quotient {
    Matrix a;
    Vector pi;

    double denominator(const Vector& f) const {
        const double m = pi.dot(f);
        return f.dot(pi.cwiseProduct(f)) - m * m;
    }
    Vector b_times(const Vector& f) const { return pi.cwiseProduct(f) - pi * pi.dot(f); }
    double value(const Vector& f) const { return f.dot(a * f) / denominator(f); }
    Vector gradient(const Vector& f, double r) const {
        return 2.0 * (a * f - r * b_times(f)) / denominator(f);
    }
};

void normalize_mean(Vector& f, const Vector& pi) {
    const double m = pi.dot(f) / pi.sum();
    if (m > 0.0) f /= m;
}

struct Descent {
    Vector f;
    double value;
    int iterations;
    bool converged;
};

Descent projected_descent(const Quotient& q, Vector f, int max_iterations, double tol) {
    normalize_mean(f, q.pi);
    double r = q.value(f);
    double step = 1.0;
    int it = 0;
    bool converged = false;
    for (; it < max_iterations; ++it) {
        const Vector g = q.gradient(f, r);
        bool accepted = false;
        Vector candidate;
        double rc = r;
        while (step > 1e-18) {
            candidate = (f - step * g).cwiseMax(0.0);
            if (candidate.maxCoeff() <= 0.0 || !(q.denominator(candidate) > 0.0)) {
                step *= 0.5;
                continue;
            }
            normalize_mean(candidate, q.pi);
            rc = q.value(candidate);
            // Armijo condition along the projected direction.
            const double decrease = g.dot(f / (q.pi.dot(f) / q.pi.sum()) - candidate);
            if (rc <= r - 1e-4 * std::max(decrease, 0.0) && rc <= r) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            converged = true;
            break;
        }
        const double change = r - rc;
        f = candidate;
        r = rc;
        step = std::min(step * 2.0, 1e6);
        if (change <= tol * std::max(std::abs(r), 1e-300)) {
            converged = true;
            break;
        }
    }
    return {f, r, it, converged};
}

/// Smallest generalized eigenpair with a strictly positive eigenvector on the
/// face spanned by `support`.
std::optional<std::pair<double, Vector>> polish_on_support(const Quotient& q,
                                                           const std::vector<int>& support) {
    const int t = static_cast<int>(support.size());
    const int s = static_cast<int>(q.pi.size());
    if (t == 0) return std::nullopt;
    Matrix at(t, t), bt(t, t);
    Vector pit(t);
    for (int i = 0; i < t; ++i) pit(i) = q.pi(support[i]);
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) {
            at(i, j) = q.a(support[i], support[j]);
            bt(i, j) = (i == j ? pit(i) : 0.0) - pit(i) * pit(j);
        }
    Eigen::LLT<Matrix> llt(bt);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(at, bt);
    if (ges.info() != Eigen::Success) return std::nullopt;
    std::optional<std::pair<double, Vector>> best;
    for (int k = 0; k < t; ++k) {
        Vector v = ges.eigenvectors().col(k);
        if (v.sum() < 0.0) v = -v;
        if (v.minCoeff() <= 0.0) continue;
        Vector full = Vector::Zero(s);
        for (int i = 0; i < t; ++i) full(support[i]) = v(i);
        normalize_mean(full, q.pi);
        const double value = q.value(full);
        if (!best || value < best->first) best = std::make_pair(value, full);
    }
    return best;
}

}  // namespace

VariationalResult lambda_variational(const MarkovChain& chain, const Subset& set,
                                     const VariationalOptions& opts) {
    const auto& members = set.members();
    const int s = set.size();
    const int n = chain.size();
    const Matrix l = energy_matrix(chain);

    Quotient q;
    q.a.resize(s, s);
    q.pi.resize(s);
    for (int i = 0; i < s; ++i) {
        q.pi(i) = chain.pi()(members[i]);
        for (int j = 0; j < s; ++j) q.a(i, j) = l(members[i], members[j]);
    }

    auto lift = [&](const Vector& local) {
        Vector full = Vector::Zero(n);
        for (int i = 0; i < s; ++i) full(members[i]) = local(i);
        return full;
    };

    VariationalResult result;
    result.value = std::numeric_limits<double>::infinity();

    if (set.full_space()) {
        // lambda(X) is the spectral gap: shift the Fiedler function to be nonnegative.
        Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric_restricted(chain, members));
        Vector psi = es.eigenvectors().col(1);
        for (int i = 0; i < s; ++i) psi(i) /= std::sqrt(q.pi(i));
        psi.array() -= psi.minCoeff();
        result.value = es.eigenvalues()(1);
        result.argmin = lift(psi);
        result.converged = true;
        return result;
    }

    std::vector<Vector> starts;
    starts.push_back(dirichlet_eigen(chain, members).ground_state.cwiseAbs());
    starts.push_back(Vector::Ones(s));
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    while (static_cast<int>(starts.size()) < std::max(1, opts.restarts)) {
        Vector v(s);
        for (int i = 0; i < s; ++i) v(i) = unif(rng);
        starts.push_back(v);
    }

    bool any_converged = false;
    for (const auto& start : starts) {
        Descent d = projected_descent(q, start, opts.max_iterations, opts.tolerance);
        result.iterations += d.iterations;
        if (opts.polish) {
            // Active-set refinement: re-solve on the support, re-enter descent
            // if some inactive coordinate still has a negative gradient.
            for (int round = 0; round < 8; ++round) {
                std::vector<int> support;
                const double cutoff = 1e-9 * d.f.maxCoeff();
                for (int i = 0; i < s; ++i)
                    if (d.f(i) > cutoff) support.push_back(i);
                auto polished = polish_on_support(q, support);
                if (!polished || polished->first > d.value) break;
                d.f = polished->second;
                d.value = polished->first;
                const Vector g = q.gradient(d.f, d.value);
                bool kkt = true;
                for (int i = 0; i < s; ++i)
                    if (d.f(i) <= cutoff && g(i) < -1e-12 * std::max(1.0, g.norm())) kkt = false;
                if (kkt) {
                    d.converged = true;
                    break;
                }
                Descent again = projected_descent(q, d.f, opts.max_iterations, opts.tolerance);
                result.iterations += again.iterations;
                if (again.value < d.value) d = again;
            }
        }
        any_converged = any_converged || d.converged;
        if (d.value < result.value) {
            result.value = d.value;
            result.argmin = lift(d.f);
        }
    }
    result.converged = any_converged;

    const LambdaBracket b = lambda_bracket(chain, set);
    if (result.value < b.lower * (1.0 - 1e-8)) {
        result.value = b.lower;
        result.clamped = true;
    } else if (result.value > b.upper * (1.0 + 1e-8)) {
        result.value = b.upper;
        result.clamped = true;
    }
    return result;
}

VariationalResult lambda_by_components(const MarkovChain& chain, const Subset& set,
                                       const VariationalOptions& opts) {
    VariationalResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& comp : set.components()) {
        const Subset part = Subset::make(chain, comp);
        VariationalResult r = lambda_variational(chain, part, opts);
        best.iterations += r.iterations;
        if (r.value < best.value) {
            const int its = best.iterations;
            best = std::move(r);
            best.iterations = its;
        }
    }
    return best;
}

}  // namespace spk
