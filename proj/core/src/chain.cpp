#include "spk/chain.hpp"

#include "spk/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace spk {

namespace {

std::vector<std::vector<int>> support_digraph(const Matrix& kernel, double eps) {
    const int n = static_cast<int>(kernel.rows());
    std::vector<std::vector<int>> out(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (kernel(x, y) > eps) out[x].push_back(y);
    return out;
}

}  // namespace

std::vector<int> strongly_connected_components(const Matrix& kernel, double eps) {
    const int n = static_cast<int>(kernel.rows());
    const auto adj = support_digraph(kernel, eps);

    // Iterative Tarjan so that long path-like chains do not overflow the stack.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0;
    int next_comp = 0;

    struct Frame {
        int v;
        std::size_t edge;
    };
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& fr = call.back();
            const int v = fr.v;
            if (fr.edge < adj[v].size()) {
                const int w = adj[v][fr.edge++];
                if (index[w] < 0) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = next_comp;
                } while (w != v);
                ++next_comp;
            }
            call.pop_back();
            if (!call.empty()) {
                const int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comp;
}

bool is_irreducible(const Matrix& kernel, double eps) {
    if (kernel.rows() == 0) return false;
    const auto comp = strongly_connected_components(kernel, eps);
    return std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; });
}

int period(const Matrix& kernel, double eps) {
    const int n = static_cast<int>(kernel.rows());
    const auto adj = support_digraph(kernel, eps);
    std::vector<int> level(n, -1);
    std::vector<int> queue{0};
    level[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int v = queue[head];
        for (int w : adj[v]) {
            if (level[w] < 0) {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    int g = 0;
    for (int v = 0; v < n; ++v) {
        if (level[v] < 0) continue;
        for (int w : adj[v]) g = std::gcd(g, std::abs(level[v] + 1 - level[w]));
    }
    return g == 0 ? 1 : g;
}

Vector stationary_distribution(const Matrix& kernel) {
    const int n = static_cast<int>(kernel.rows());
    Matrix a = kernel.transpose() - Matrix::Identity(n, n);
    a.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::PartialPivLU<Matrix> lu(a);
    Vector pi = lu.solve(rhs);
    // One step of iterative refinement.
    pi += lu.solve(rhs - a * pi);
    return pi;
}

MarkovChain MarkovChain::build(const Matrix& kernel, const ChainOptions& opts,
                               std::vector<std::string> labels) {
    if (kernel.rows() == 0 || kernel.rows() != kernel.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "kernel must be a non-empty square matrix");
    }
    const int n = static_cast<int>(kernel.rows());
    if (!labels.empty() && static_cast<int>(labels.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "label count does not match state count");
    }
    Matrix k = kernel;
    for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
            if (!std::isfinite(k(x, y)) || k(x, y) < 0.0) {
                std::ostringstream msg;
                msg << "entry (" << x << "," << y << ") = " << k(x, y) << " is not a probability";
                throw Error(ErrorCode::NotStochastic, msg.str());
            }
        }
        const double s = k.row(x).sum();
        if (std::abs(s - 1.0) > opts.row_sum_tol) {
            std::ostringstream msg;
            msg << "row " << x << " sums to " << s;
            throw Error(ErrorCode::NotStochastic, msg.str());
        }
        // Rounding-level deviations are kept so serialized kernels round-trip bit for bit.
        if (std::abs(s - 1.0) > 8.0 * n * std::numeric_limits<double>::epsilon()) k.row(x) /= s;
    }
    if (!is_irreducible(k, opts.support_eps)) {
        throw Error(ErrorCode::Reducible, "support digraph has more than one strongly connected component");
    }

    Vector pi = stationary_distribution(k);
    for (int x = 0; x < n; ++x) {
        if (!(pi(x) > 0.0)) {
            std::ostringstream msg;
            msg << "pi(" << x << ") = " << pi(x);
            throw Error(ErrorCode::ZeroStationaryMass, msg.str());
        }
    }
    pi /= pi.sum();

    MarkovChain c;
    c.kernel_ = std::move(k);
    c.pi_ = std::move(pi);
    c.pi_star_ = c.pi_.minCoeff();
    c.holding_alpha_ = c.kernel_.diagonal().minCoeff();
    c.options_ = opts;
    c.labels_ = std::move(labels);

    bool rev = true;
    for (int x = 0; x < n && rev; ++x)
        for (int y = x + 1; y < n && rev; ++y)
            rev = std::abs(c.pi_(x) * c.kernel_(x, y) - c.pi_(y) * c.kernel_(y, x)) <=
                  opts.reversibility_tol;
    c.reversible_ = rev;
    return c;
}

Matrix adjoint(const MarkovChain& chain) {
    const auto& k = chain.kernel();
    const auto& pi = chain.pi();
    const int n = chain.size();
    Matrix out(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) out(x, y) = pi(y) * k(y, x) / pi(x);
    return out;
}

namespace {

void check_length(const MarkovChain& chain, const Vector& f) {
    if (f.size() != chain.size()) {
        throw Error(ErrorCode::DimensionMismatch, "function length " + std::to_string(f.size()) +
                                                      " does not match state count " +
                                                      std::to_string(chain.size()));
    }
}

}  // namespace

double dirichlet_form(const MarkovChain& chain, const Vector& f, const Vector& g) {
    check_length(chain, f);
    check_length(chain, g);
    const Vector lap = f - chain.kernel() * f;
    return (lap.array() * g.array() * chain.pi().array()).sum();
}

double dirichlet_energy(const MarkovChain& chain, const Vector& f) {
    check_length(chain, f);
    const auto& k = chain.kernel();
    const auto& pi = chain.pi();
    double total = 0.0;
    for (int x = 0; x < chain.size(); ++x) {
        for (int y = 0; y < chain.size(); ++y) {
            const double d = f(x) - f(y);
            total += d * d * k(x, y) * pi(x);
        }
    }
    return 0.5 * total;
}

double expectation(const MarkovChain& chain, const Vector& f) {
    check_length(chain, f);
    return f.dot(chain.pi());
}

double variance(const MarkovChain& chain, const Vector& f) {
    const double m = expectation(chain, f);
    return ((f.array() - m).square() * chain.pi().array()).sum();
}

double flow(const MarkovChain& chain, std::span<const int> from, std::span<const int> to) {
    double q = 0.0;
    for (int x : from)
        for (int y : to) q += chain.pi()(x) * chain.kernel()(x, y);
    return q;
}

Matrix energy_matrix(const MarkovChain& chain) {
    const Matrix q = chain.pi().asDiagonal() * chain.kernel();
    Matrix l = -0.5 * (q + q.transpose());
    l.diagonal() += chain.pi();
    return l;
}

Matrix symmetrized_kernel(const MarkovChain& chain) {
    const Vector s = chain.pi().cwiseSqrt();
    const Vector sinv = s.cwiseInverse();
    const Matrix a = s.asDiagonal() * chain.kernel() * sinv.asDiagonal();
    return 0.5 * (a + a.transpose());
}

std::vector<std::vector<int>> support_graph(const MarkovChain& chain) {
    const int n = chain.size();
    const auto& k = chain.kernel();
    const auto& pi = chain.pi();
    const double eps = chain.options().support_eps;
    std::vector<std::vector<int>> adj(n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y && pi(x) * k(x, y) + pi(y) * k(y, x) > eps) adj[x].push_back(y);
    return adj;
}

Matrix HeatKernelSnapshot::density_matrix() const {
    return Ht * pi.cwiseInverse().asDiagonal();
}

namespace {

Matrix matrix_power(const Matrix& base, long long m) {
    const auto n = base.rows();
    Matrix result = Matrix::Identity(n, n);
    Matrix sq = base;
    while (m > 0) {
        if (m & 1) result = result * sq;
        m >>= 1;
        if (m > 0) sq = sq * sq;
    }
    return result;
}

Matrix uniformization_chunk(const Matrix& k, double s, double tol) {
    const auto n = k.rows();
    Matrix power = Matrix::Identity(n, n);
    double weight = std::exp(-s);
    Matrix acc = weight * power;
    for (int j = 1;; ++j) {
        power = power * k;
        weight *= s / j;
        acc += weight * power;
        // Geometric bound on the remaining Poisson tail once j + 1 > s.
        const double ratio = s / (j + 2.0);
        if (ratio < 1.0) {
            const double tail = weight * (s / (j + 1.0)) / (1.0 - ratio);
            if (tail < tol) break;
        }
    }
    return acc;
}

}  // namespace

HeatKernelSnapshot heat_kernel(const MarkovChain& chain, double t, double tol,
                               HeatKernelMethod method) {
    if (!(tol > 0.0) || tol >= 1.0) {
        throw Error(ErrorCode::ToleranceTooLoose, "tol must lie in (0, 1)");
    }
    if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be non-negative");
    if (method == HeatKernelMethod::Spectral && !chain.reversible()) {
        throw Error(ErrorCode::NotReversible, "spectral heat kernel needs a reversible chain");
    }
    HeatKernelSnapshot snap;
    snap.t = t;
    snap.pi = chain.pi();
    const bool spectral = method == HeatKernelMethod::Spectral ||
                          (method == HeatKernelMethod::Automatic && chain.reversible());
    if (spectral) {
        snap.Ht = SpectralDecomposition(chain).heat_kernel(t);
        return snap;
    }
    constexpr double kChunk = 8.0;
    const long long chunks = std::max(1LL, static_cast<long long>(std::ceil(t / kChunk)));
    const double s = t / static_cast<double>(chunks);
    const Matrix hs = uniformization_chunk(chain.kernel(), s,
                                           std::max(tol / static_cast<double>(chunks), 1e-300));
    snap.Ht = matrix_power(hs, chunks);
    return snap;
}

SpectralDecomposition::SpectralDecomposition(const MarkovChain& chain) {
    if (!chain.reversible()) {
        throw Error(ErrorCode::NotReversible, "spectral decomposition needs a reversible chain");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized_kernel(chain));
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::EigensolveFailure, "symmetric eigensolver did not converge");
    }
    const int n = chain.size();
    // Eigen returns ascending kernel eigenvalues; reverse so I-K is ascending.
    mu_.resize(n);
    vecs_.resize(n, n);
    for (int i = 0; i < n; ++i) {
        mu_(i) = 1.0 - es.eigenvalues()(n - 1 - i);
        vecs_.col(i) = es.eigenvectors().col(n - 1 - i);
    }
    stationary_ = 0;
    pi_ = chain.pi();
    sqrt_pi_ = pi_.cwiseSqrt();
    // The stationary mode is sqrt(pi) exactly; pin it to avoid drift.
    vecs_.col(0) = sqrt_pi_;
    mu_(0) = 0.0;
}

Matrix SpectralDecomposition::heat_kernel(double t) const {
    const Vector decay = (-t * mu_.array()).exp();
    const Matrix sym = vecs_ * decay.asDiagonal() * vecs_.transpose();
    return sqrt_pi_.cwiseInverse().asDiagonal() * sym * sqrt_pi_.asDiagonal();
}

Vector SpectralDecomposition::diagonal_excess(double t) const {
    const int n = static_cast<int>(mu_.size());
    Vector out = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (i == stationary_) continue;
        const double w = std::exp(-t * mu_(i));
        out.array() += w * vecs_.col(i).array().square();
    }
    return out.cwiseQuotient(pi_);
}

Matrix SpectralDecomposition::density_excess(double t) const {
    Vector decay = (-t * mu_.array()).exp();
    decay(stationary_) = 0.0;
    const Matrix sym = vecs_ * decay.asDiagonal() * vecs_.transpose();
    const Vector inv = sqrt_pi_.cwiseInverse();
    return inv.asDiagonal() * sym * inv.asDiagonal();
}

Matrix SpectralDecomposition::discrete_density_excess(long long m) const {
    const int n = static_cast<int>(mu_.size());
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = std::pow(1.0 - mu_(i), static_cast<double>(m));
    w(stationary_) = 0.0;
    const Matrix sym = vecs_ * w.asDiagonal() * vecs_.transpose();
    const Vector inv = sqrt_pi_.cwiseInverse();
    return inv.asDiagonal() * sym * inv.asDiagonal();
}

MultiplicativeSymmetrizations multiplicative_symmetrizations(const MarkovChain& chain) {
    const Matrix ks = adjoint(chain);
    MultiplicativeSymmetrizations out;
    out.kk_star = chain.kernel() * ks;
    out.k_star_k = ks * chain.kernel();
    const double eps = chain.options().support_eps;
    out.kk_star_irreducible = is_irreducible(out.kk_star, eps);
    out.k_star_k_irreducible = is_irreducible(out.k_star_k, eps);
    return out;
}

MarkovChain add_laziness(const MarkovChain& chain, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::AlphaOutOfRange, "laziness must lie in [0, 1)");
    }
    const int n = chain.size();
    const Matrix k = alpha * Matrix::Identity(n, n) + (1.0 - alpha) * chain.kernel();
    return MarkovChain::build(k, chain.options(), chain.labels());
}

MarkovChain remove_laziness(const MarkovChain& chain, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw Error(ErrorCode::AlphaOutOfRange, "laziness must lie in [0, 1)");
    }
    if (alpha > chain.holding_alpha() + 1e-15) {
        std::ostringstream msg;
        msg << "alpha = " << alpha << " exceeds min holding " << chain.holding_alpha();
        throw Error(ErrorCode::AlphaExceedsHolding, msg.str());
    }
    const int n = chain.size();
    Matrix k = (chain.kernel() - alpha * Matrix::Identity(n, n)) / (1.0 - alpha);
    // Clear round-off on diagonals that should vanish.
    for (int x = 0; x < n; ++x)
        if (k(x, x) < 0.0) k(x, x) = 0.0;
    return MarkovChain::build(k, chain.options(), chain.labels());
}

Matrix discrete_power(const MarkovChain& chain, long long m) {
    if (m < 0) throw Error(ErrorCode::InvalidArgument, "power must be non-negative");
    return matrix_power(chain.kernel(), m);
}

}  // namespace spk
