#include "spk/profiles.hpp"

#include "spk/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace spk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

GapEigenpair spectral_gap_pair(const MarkovChain& chain) {
    const int n = chain.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "spectral gap needs at least two states");
    const Matrix lap = Matrix::Identity(n, n) - symmetrized_kernel(chain);
    Eigen::SelfAdjointEigenSolver<Matrix> es(lap);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "spectral gap eigensolve failed");
    GapEigenpair out;
    out.value = es.eigenvalues()(1);
    out.function = es.eigenvectors().col(1).cwiseQuotient(chain.pi().cwiseSqrt());
    return out;
}

double spectral_gap(const MarkovChain& chain) { return spectral_gap_pair(chain).value; }

int worker_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

namespace {

struct SurveyContext {
    int n = 0;
    Vector pi;
    Matrix q;       // pi(x) K(x,y)
    Matrix dirich;  // I - D^{1/2} ((K+K*)/2) D^{-1/2}
    std::vector<std::uint64_t> nbr;
    double r_max = 1.0;
    bool eigensolve = true;
};

SurveyContext make_context(const MarkovChain& chain, const SurveyOptions& opts) {
    SurveyContext ctx;
    ctx.n = chain.size();
    ctx.pi = chain.pi();
    ctx.q = chain.pi().asDiagonal() * chain.kernel();
    ctx.dirich = Matrix::Identity(ctx.n, ctx.n) - symmetrized_kernel(chain);
    ctx.nbr.assign(static_cast<std::size_t>(ctx.n), 0);
    const auto adj = support_graph(chain);
    for (int x = 0; x < ctx.n; ++x)
        for (int y : adj[x]) ctx.nbr[x] |= 1ULL << y;
    ctx.r_max = opts.r_max;
    ctx.eigensolve = opts.eigensolve;
    return ctx;
}

double block_min_eigenvalue(const SurveyContext& ctx, const std::vector<int>& members) {
    const int k = static_cast<int>(members.size());
    if (k == 1) return ctx.dirich(members[0], members[0]);
    Matrix block(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) block(i, j) = ctx.dirich(members[i], members[j]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolveFailure, "subset eigensolve failed");
    return std::max(0.0, es.eigenvalues()(0));
}

double boundary_of(const SurveyContext& ctx, const std::vector<int>& members, std::uint64_t mask) {
    double b = 0.0;
    for (int x : members)
        for (int y = 0; y < ctx.n; ++y)
            if (!(mask >> y & 1ULL)) b += ctx.q(x, y);
    return b;
}

bool mask_connected(const SurveyContext& ctx, std::uint64_t mask) {
    const std::uint64_t start = mask & (~mask + 1);
    std::uint64_t seen = start;
    std::uint64_t frontier = start;
    while (frontier) {
        std::uint64_t next = 0;
        for (std::uint64_t f = frontier; f; f &= f - 1) next |= ctx.nbr[std::countr_zero(f)];
        next &= mask & ~seen;
        seen |= next;
        frontier = next;
    }
    return seen == mask;
}

class ConnectedWalker {
public:
    ConnectedWalker(const SurveyContext& ctx, std::atomic<std::size_t>& budget_used, std::size_t budget,
                    std::atomic<bool>& overflow)
        : ctx_(ctx), used_(budget_used), budget_(budget), overflow_(overflow) {}

    /// With out == nullptr only the budget is consumed.
    void run_root(int root, std::vector<SetRecord>* out) {
        root_ = root;
        out_ = out;
        members_.assign(1, root);
        const std::uint64_t full = ctx_.n == 64 ? ~0ULL : ((1ULL << ctx_.n) - 1);
        full_ = full;
        const std::uint64_t above = full & ~((2ULL << root) - 1);
        const std::uint64_t mask = 1ULL << root;
        const double mass = ctx_.pi(root);
        if (mass > ctx_.r_max) return;
        const double boundary = ctx_.pi(root) - ctx_.q(root, root);
        extend(mask, ctx_.nbr[root] & above, mask | ctx_.nbr[root], mass, boundary, above);
    }

private:
    void extend(std::uint64_t mask, std::uint64_t ext, std::uint64_t closed, double mass, double boundary,
                std::uint64_t above) {
        if (overflow_.load(std::memory_order_relaxed)) return;
        if (mask != full_) record(mask, mass, boundary);
        while (ext) {
            const int w = std::countr_zero(ext);
            ext &= ext - 1;
            const double next_mass = mass + ctx_.pi(w);
            if (next_mass > ctx_.r_max) continue;
            double cross = 0.0;
            for (int x : members_) cross += ctx_.q(x, w) + ctx_.q(w, x);
            const double next_boundary = boundary + ctx_.pi(w) - ctx_.q(w, w) - cross;
            const std::uint64_t fresh = ctx_.nbr[w] & above & ~closed;
            members_.push_back(w);
            extend(mask | (1ULL << w), ext | fresh, closed | ctx_.nbr[w], next_mass, next_boundary, above);
            members_.pop_back();
        }
    }

    void record(std::uint64_t mask, double mass, double boundary) {
        if (used_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
            overflow_.store(true, std::memory_order_relaxed);
            return;
        }
        if (!out_) return;
        SetRecord rec;
        rec.mask = mask;
        rec.mass = mass;
        rec.boundary = std::max(0.0, boundary);
        if (ctx_.eigensolve) {
            sorted_ = members_;
            std::sort(sorted_.begin(), sorted_.end());
            rec.lambda0 = block_min_eigenvalue(ctx_, sorted_);
        }
        out_->push_back(rec);
    }

    const SurveyContext& ctx_;
    std::atomic<std::size_t>& used_;
    std::size_t budget_;
    std::atomic<bool>& overflow_;
    int root_ = 0;
    std::uint64_t full_ = 0;
    std::vector<int> members_;
    std::vector<int> sorted_;
    std::vector<SetRecord>* out_ = nullptr;
};

template <typename Job>
void run_parallel(int workers, int jobs, Job&& job) {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&](int worker) {
        try {
            for (int j = next.fetch_add(1); j < jobs; j = next.fetch_add(1)) job(worker, j);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

SubsetSurvey survey_subsets(const MarkovChain& chain, const SurveyOptions& opts) {
    const int n = chain.size();
    if (!(opts.r_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "r_max must be positive");
    if (opts.mode == EnumerationMode::Exhaustive && n > opts.enumeration_cap)
        throw Error(ErrorCode::TooLarge, "exhaustive enumeration is capped at n = " +
                                             std::to_string(opts.enumeration_cap));
    if (n > 64) throw Error(ErrorCode::TooLarge, "subset enumeration supports at most 64 states");

    const SurveyContext ctx = make_context(chain, opts);
    const int workers = worker_count(opts.threads);
    std::vector<std::vector<SetRecord>> local(static_cast<std::size_t>(workers));
    SubsetSurvey survey;
    survey.r_max = opts.r_max;
    survey.covers_all_proper = opts.r_max >= 1.0 - chain.pi_star();

    if (opts.mode == EnumerationMode::Exhaustive) {
        const std::uint64_t full = (1ULL << n) - 1;
        const std::uint64_t chunk = 1ULL << 12;
        const int jobs = static_cast<int>((full + chunk - 1) / chunk);
        run_parallel(workers, jobs, [&](int worker, int job) {
            std::vector<int> members;
            const std::uint64_t lo = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(job) * chunk);
            const std::uint64_t hi = std::min(full, (static_cast<std::uint64_t>(job) + 1) * chunk);
            for (std::uint64_t mask = lo; mask < hi; ++mask) {
                double mass = 0.0;
                for (std::uint64_t m = mask; m; m &= m - 1) mass += ctx.pi(std::countr_zero(m));
                if (mass > ctx.r_max || !mask_connected(ctx, mask)) continue;
                members = members_of(mask, n);
                SetRecord rec;
                rec.mask = mask;
                rec.mass = mass;
                rec.boundary = boundary_of(ctx, members, mask);
                if (ctx.eigensolve) rec.lambda0 = block_min_eigenvalue(ctx, members);
                local[static_cast<std::size_t>(worker)].push_back(rec);
            }
        });
        survey.masks_visited = static_cast<std::size_t>(full - 1);
    } else {
        std::atomic<std::size_t> used{0};
        std::atomic<bool> overflow{false};
        auto walk = [&](bool keep) {
            used = 0;
            run_parallel(workers, n, [&](int worker, int root) {
                ConnectedWalker walker(ctx, used, opts.max_sets, overflow);
                walker.run_root(root, keep ? &local[static_cast<std::size_t>(worker)] : nullptr);
            });
            if (overflow.load())
                throw Error(ErrorCode::TooLarge, "connected enumeration exceeded " +
                                                     std::to_string(opts.max_sets) +
                                                     " sets; lower r_max or use envelopes");
        };
        // Counting first keeps an over-budget attempt from paying for eigensolves.
        if (ctx.eigensolve) walk(false);
        walk(true);
        survey.masks_visited = used.load();
    }

    for (auto& part : local) survey.records.insert(survey.records.end(), part.begin(), part.end());
    std::sort(survey.records.begin(), survey.records.end(), [](const SetRecord& a, const SetRecord& b) {
        return a.mass != b.mass ? a.mass < b.mass : a.mask < b.mask;
    });
    return survey;
}

// ---------------------------------------------------------------------------

SpectralProfileBand spectral_profile_from_survey(const MarkovChain& chain, const SubsetSurvey& survey,
                                                 double lambda1, const ProfileOptions& opts) {
    const int n = chain.size();
    SpectralProfileBand band;
    band.lambda1 = lambda1;
    band.truncated = !survey.covers_all_proper;
    band.sets_eigensolved = survey.records.size();

    std::vector<std::pair<double, double>> low;
    low.reserve(survey.records.size() + 2);
    for (const auto& rec : survey.records) low.emplace_back(rec.mass, rec.lambda0);
    band.lambda0_min = StepProfile::running_min(low, ProfileKind::Exact, ProfileSource::Enumeration);

    // Past the enumerated range only lambda1 is known from below.
    if (band.truncated) low.emplace_back(survey.r_max, 0.0);
    low.emplace_back(1.0, 0.0);
    const StepProfile raw = StepProfile::running_min(low, ProfileKind::Exact, ProfileSource::Enumeration);
    const StepProfile floor({chain.pi_star()}, {lambda1}, ProfileKind::LowerEnvelope, ProfileSource::SpectralGap);
    band.lower = pointwise_max({raw, floor}, ProfileKind::Exact, ProfileSource::Enumeration);

    std::vector<double> upper_value(survey.records.size());
    for (std::size_t i = 0; i < survey.records.size(); ++i) {
        const auto& rec = survey.records[i];
        upper_value[i] = rec.mass < 1.0 ? rec.lambda0 / (1.0 - rec.mass) : kInf;
    }

    if (opts.refine_upper && !survey.records.empty()) {
        std::vector<std::size_t> targets;
        double best = kInf;
        for (std::size_t i = 0; i < survey.records.size(); ++i) {
            if (upper_value[i] < best) {
                best = upper_value[i];
                targets.push_back(i);
            }
        }
        if (static_cast<int>(targets.size()) > opts.refine_cap) {
            std::vector<std::size_t> thinned;
            const double step = static_cast<double>(targets.size()) / opts.refine_cap;
            for (int k = 0; k < opts.refine_cap; ++k)
                thinned.push_back(targets[static_cast<std::size_t>(k * step)]);
            targets = std::move(thinned);
        }
        for (std::size_t i : targets) {
            const auto& rec = survey.records[i];
            const Subset set = Subset::make(chain, members_of(rec.mask, n));
            const VariationalResult v = lambda_variational(chain, set, opts.variational);
            upper_value[i] = std::min(upper_value[i], v.value);
        }
        band.sets_refined = targets.size();
    }

    std::vector<std::pair<double, double>> up;
    up.reserve(survey.records.size() + 2);
    for (std::size_t i = 0; i < survey.records.size(); ++i) up.emplace_back(survey.records[i].mass, upper_value[i]);
    up.emplace_back(0.5, 2.0 * lambda1);
    up.emplace_back(1.0, lambda1);
    band.upper = StepProfile::running_min(up, ProfileKind::UpperEnvelope, ProfileSource::Enumeration);

    const auto& bps = band.lambda0_min.breakpoints();
    for (const auto& rec : survey.records) {
        if (static_cast<int>(band.argmin.size()) >= opts.argmin_cap) break;
        auto it = std::lower_bound(bps.begin(), bps.end(), rec.mass * (1.0 - 1e-12));
        if (it == bps.end() || std::abs(*it - rec.mass) > 1e-12 * std::max(1.0, rec.mass)) continue;
        const double v = band.lambda0_min.values()[static_cast<std::size_t>(it - bps.begin())];
        if (std::abs(rec.lambda0 - v) <= 1e-12 * std::max(1.0, v))
            band.argmin.push_back({members_of(rec.mask, n), rec.mass, rec.lambda0});
    }
    return band;
}

SpectralProfileBand spectral_profile_exhaustive(const MarkovChain& chain, const ProfileOptions& opts) {
    SurveyOptions so = opts.survey;
    so.eigensolve = true;
    if (so.mode == EnumerationMode::Exhaustive && chain.size() > so.enumeration_cap)
        throw Error(ErrorCode::TooLarge, "chain exceeds the enumeration cap; use envelope generators");
    const SubsetSurvey survey = survey_subsets(chain, so);
    return spectral_profile_from_survey(chain, survey, spectral_gap(chain), opts);
}

// ---------------------------------------------------------------------------

StepProfile truncate_conductance(const StepProfile& phi) { return phi.freeze_after(0.5); }

ConductanceProfiles conductance_from_survey(const SubsetSurvey& survey) {
    std::vector<std::pair<double, double>> samples;
    samples.reserve(survey.records.size());
    for (const auto& rec : survey.records)
        if (rec.mass < 1.0) samples.emplace_back(rec.mass, rec.boundary / rec.mass);
    const bool exact = survey.r_max >= 0.5;
    ConductanceProfiles out;
    out.exact = exact;
    out.method = ConductanceMethod::Enumeration;
    out.phi = StepProfile::running_min(std::move(samples),
                                       exact ? ProfileKind::Exact : ProfileKind::UpperEnvelope,
                                       ProfileSource::Enumeration);
    out.phi_star = truncate_conductance(out.phi);
    return out;
}

bool is_tree_walk(const MarkovChain& chain, double tol) {
    const int n = chain.size();
    const auto adj = support_graph(chain);
    std::size_t edges = 0;
    for (const auto& a : adj) edges += a.size();
    if (edges != 2 * static_cast<std::size_t>(n - 1)) return false;
    const Matrix& k = chain.kernel();
    const Vector& pi = chain.pi();
    double q = -1.0;
    for (int x = 0; x < n; ++x) {
        if (k(x, x) > tol) return false;
        for (int y : adj[x]) {
            const double f = pi(x) * k(x, y);
            if (q < 0.0) q = f;
            if (std::abs(f - q) > tol * std::max(1.0, q) && std::abs(f - q) > tol) return false;
            if (std::abs(pi(y) * k(y, x) - f) > tol) return false;
        }
    }
    return q > 0.0;
}

namespace {

// Simple random walk on a tree: every edge carries flow q in each direction,
// so a subtree with k vertices and b cut edges has mass q(2(k-1)+b) and
// conductance b/(2(k-1)+b). For each k the fewest cut edges dominates.
StepProfile tree_conductance(const MarkovChain& chain) {
    const int n = chain.size();
    const auto adj = support_graph(chain);
    const double q = chain.pi()(0) * chain.kernel()(0, adj[0].front());
    constexpr int kNone = std::numeric_limits<int>::max() / 4;

    std::vector<int> parent(n, -1), order;
    order.reserve(n);
    std::vector<int> stack{0};
    parent[0] = 0;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : adj[v])
            if (parent[c] == -1) {
                parent[c] = v;
                stack.push_back(c);
            }
    }

    std::vector<std::vector<int>> best(n);
    std::vector<int> min_cut(static_cast<std::size_t>(n) + 1, kNone);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int v = *it;
        std::vector<int> cur{kNone, 0};
        for (int c : adj[v]) {
            if (c == parent[v] && v != 0) continue;
            if (parent[c] != v) continue;
            const auto& bc = best[c];
            std::vector<int> next(cur.size() + bc.size() - 1, kNone);
            for (std::size_t k1 = 1; k1 < cur.size(); ++k1) {
                if (cur[k1] >= kNone) continue;
                next[k1] = std::min(next[k1], cur[k1] + 1);
                for (std::size_t k2 = 1; k2 < bc.size(); ++k2)
                    if (bc[k2] < kNone) next[k1 + k2] = std::min(next[k1 + k2], cur[k1] + bc[k2]);
            }
            cur = std::move(next);
            std::vector<int>().swap(best[c]);
        }
        const int up = v == 0 ? 0 : 1;
        for (std::size_t k = 1; k < cur.size(); ++k)
            if (cur[k] < kNone) min_cut[k] = std::min(min_cut[k], cur[k] + up);
        best[v] = std::move(cur);
    }

    std::vector<std::pair<double, double>> samples;
    for (int k = 1; k < n; ++k) {
        if (min_cut[k] >= kNone) continue;
        const double b = min_cut[k];
        const double internal = 2.0 * (k - 1);
        samples.emplace_back(q * (internal + b), b / (internal + b));
    }
    return StepProfile::running_min(std::move(samples), ProfileKind::Exact, ProfileSource::TreeDynamicProgram);
}

struct EdgeList {
    std::vector<int> from;
    std::vector<int> to;
    std::vector<double> weight;  // pi(x)K(x,y), directed
};

EdgeList directed_edges(const MarkovChain& chain) {
    EdgeList e;
    const Matrix& k = chain.kernel();
    const double eps = chain.options().support_eps;
    for (int x = 0; x < chain.size(); ++x)
        for (int y = 0; y < chain.size(); ++y)
            if (x != y && k(x, y) > eps) {
                e.from.push_back(x);
                e.to.push_back(y);
                e.weight.push_back(chain.pi()(x) * k(x, y));
            }
    return e;
}

StepProfile sweep_conductance(const MarkovChain& chain) {
    const int n = chain.size();
    const auto adj = support_graph(chain);
    const EdgeList edges = directed_edges(chain);
    const Vector& pi = chain.pi();
    std::vector<std::pair<double, double>> samples;

    auto evaluate = [&](const std::vector<char>& in) {
        double mass = 0.0, boundary = 0.0;
        for (int x = 0; x < n; ++x)
            if (in[x]) mass += pi(x);
        for (std::size_t i = 0; i < edges.from.size(); ++i)
            if (in[edges.from[i]] && !in[edges.to[i]]) boundary += edges.weight[i];
        if (mass < 1.0 - 1e-15 && mass > 0.0) samples.emplace_back(mass, boundary / mass);
    };

    // Balls around every vertex.
    for (int x = 0; x < n; ++x) {
        std::vector<int> dist(n, -1);
        std::vector<int> queue{x};
        dist[x] = 0;
        for (std::size_t h = 0; h < queue.size(); ++h)
            for (int w : adj[queue[h]])
                if (dist[w] < 0) {
                    dist[w] = dist[queue[h]] + 1;
                    queue.push_back(w);
                }
        const int ecc = dist[queue.back()];
        std::vector<char> in(n, 0);
        std::size_t pos = 0;
        for (int r = 0; r < ecc; ++r) {
            while (pos < queue.size() && dist[queue[pos]] <= r) in[queue[pos++]] = 1;
            evaluate(in);
        }
    }

    // Level sets of the Fiedler function, from both ends.
    const Vector psi = spectral_gap_pair(chain).function;
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return psi(a) < psi(b); });
    for (int dir = 0; dir < 2; ++dir) {
        std::vector<char> in(n, 0);
        for (int i = 0; i + 1 < n; ++i) {
            in[idx[dir == 0 ? i : n - 1 - i]] = 1;
            evaluate(in);
        }
    }
    return StepProfile::running_min(std::move(samples), ProfileKind::UpperEnvelope, ProfileSource::Sweep);
}

}  // namespace

ConductanceProfiles conductance_profile(const MarkovChain& chain, ConductanceMethod method,
                                        const SurveyOptions& opts) {
    if (method == ConductanceMethod::Automatic) {
        if (chain.size() <= opts.enumeration_cap)
            method = ConductanceMethod::Enumeration;
        else if (is_tree_walk(chain))
            method = ConductanceMethod::TreeDynamicProgram;
        else
            method = ConductanceMethod::Sweep;
    }
    ConductanceProfiles out;
    out.method = method;
    switch (method) {
        case ConductanceMethod::Enumeration: {
            SurveyOptions so = opts;
            so.eigensolve = false;
            so.r_max = std::max(so.r_max, 1.0);
            return conductance_from_survey(survey_subsets(chain, so));
        }
        case ConductanceMethod::TreeDynamicProgram:
            if (!is_tree_walk(chain))
                throw Error(ErrorCode::InvalidArgument, "tree program needs simple random walk on a tree");
            out.phi = tree_conductance(chain);
            out.exact = true;
            break;
        case ConductanceMethod::Sweep:
        case ConductanceMethod::Automatic:
            out.phi = sweep_conductance(chain);
            out.exact = false;
            break;
    }
    out.phi_star = truncate_conductance(out.phi);
    return out;
}

CheegerEnvelopes cheeger_envelopes(const StepProfile& phi) {
    CheegerEnvelopes out;
    if (phi.kind() != ProfileKind::UpperEnvelope)
        out.lower = phi.map([](double, double v) { return 0.5 * v * v; }, ProfileKind::LowerEnvelope,
                            ProfileSource::Cheeger);
    if (phi.kind() != ProfileKind::LowerEnvelope) {
        std::vector<std::pair<double, double>> samples;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            const double r = phi.breakpoints()[i];
            if (r < 1.0) samples.emplace_back(r, phi.values()[i] / (1.0 - r));
        }
        out.upper = StepProfile::running_min(std::move(samples), ProfileKind::UpperEnvelope, ProfileSource::Cheeger);
    }
    return out;
}

}  // namespace spk
