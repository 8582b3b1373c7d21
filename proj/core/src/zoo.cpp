#include "spk/zoo.hpp"

#include "spk/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>

namespace spk {

MarkovChain complete_graph(int n) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "complete graph needs n >= 2");
    return MarkovChain::build(Matrix::Constant(n, n, 1.0 / n));
}

MarkovChain cycle(int n, double lazy_alpha) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "cycle needs n >= 3");
    if (!(lazy_alpha >= 0.0 && lazy_alpha < 1.0))
        throw Error(ErrorCode::AlphaOutOfRange, "laziness must lie in [0, 1)");
    Matrix k = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        k(i, (i + 1) % n) += 0.5;
        k(i, (i + n - 1) % n) += 0.5;
    }
    MarkovChain c = MarkovChain::build(k);
    return lazy_alpha > 0.0 ? add_laziness(c, lazy_alpha) : c;
}

MarkovChain torus_product(int a, int b) {
    if (a < 3 || b < 3)
        throw Error(ErrorCode::DegenerateGenerators, "Z_a x Z_b needs a, b >= 3 for four distinct generators");
    const int n = a * b;
    Matrix k = Matrix::Zero(n, n);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) {
            const int x = i * b + j;
            k(x, ((i + 1) % a) * b + j) += 0.25;
            k(x, ((i + a - 1) % a) * b + j) += 0.25;
            k(x, i * b + (j + 1) % b) += 0.25;
            k(x, i * b + (j + b - 1) % b) += 0.25;
        }
    std::vector<std::string> labels;
    labels.reserve(n);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) labels.push_back("(" + std::to_string(i) + "," + std::to_string(j) + ")");
    return MarkovChain::build(k, {}, std::move(labels));
}

MarkovChain random_reversible_chain(int n, std::mt19937_64& rng, double edge_prob) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "random chain needs n >= 2");
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        const double v = weight(rng);
        w(order[i], order[i + 1]) = w(order[i + 1], order[i]) = v;
    }
    for (int x = 0; x < n; ++x) {
        if (coin(rng) < 0.5) w(x, x) = weight(rng);
        for (int y = x + 1; y < n; ++y)
            if (w(x, y) == 0.0 && coin(rng) < edge_prob) w(x, y) = w(y, x) = weight(rng);
    }
    for (int x = 0; x < n; ++x) w.row(x) /= w.row(x).sum();
    return MarkovChain::build(w);
}

MarkovChain random_chain(int n, std::mt19937_64& rng, double edge_prob) {
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "random chain needs n >= 2");
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) w(order[i], order[(i + 1) % n]) = weight(rng);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (w(x, y) == 0.0 && coin(rng) < edge_prob) w(x, y) = weight(rng);
    for (int x = 0; x < n; ++x) w.row(x) /= w.row(x).sum();
    return MarkovChain::build(w);
}

std::vector<std::vector<int>> hop_distances(const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    std::vector<int> queue(n);
    for (int s = 0; s < n; ++s) {
        auto& d = dist[s];
        int head = 0, tail = 0;
        queue[tail++] = s;
        d[s] = 0;
        while (head < tail) {
            const int u = queue[head++];
            for (int v : adjacency[u])
                if (d[v] < 0) {
                    d[v] = d[u] + 1;
                    queue[tail++] = v;
                }
        }
    }
    return dist;
}

int ViscekGraph::diameter() const {
    int d = 2;
    for (int i = 0; i < generation; ++i) d *= 3;
    return d;
}

std::vector<int> ViscekGraph::blocks_at_level(int k) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(blocks.size()); ++i)
        if (blocks[i].level == k) out.push_back(i);
    return out;
}

namespace {

std::vector<std::vector<int>> adjacency_of(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

// Lexicographically smallest N-set with all pairwise distances equal to diam.
std::vector<int> canonical_corners(const std::vector<std::vector<int>>& dist, int N, int diam) {
    const int n = static_cast<int>(dist.size());
    std::vector<int> peripheral;
    for (int v = 0; v < n; ++v)
        if (*std::max_element(dist[v].begin(), dist[v].end()) == diam) peripheral.push_back(v);
    std::vector<int> chosen;
    std::function<bool(std::size_t)> extend = [&](std::size_t from) {
        if (static_cast<int>(chosen.size()) == N) return true;
        for (std::size_t i = from; i < peripheral.size(); ++i) {
            const int v = peripheral[i];
            if (std::all_of(chosen.begin(), chosen.end(), [&](int u) { return dist[u][v] == diam; })) {
                chosen.push_back(v);
                if (extend(i + 1)) return true;
                chosen.pop_back();
            }
        }
        return false;
    };
    if (!extend(0)) throw Error(ErrorCode::InvalidArgument, "no corner set at full diameter");
    return chosen;
}

}  // namespace

std::pair<ViscekGraph, MarkovChain> viscek(int N, int n, int size_cap) {
    if (N < 2) throw Error(ErrorCode::InvalidArgument, "Viscek graphs need N >= 2");
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "generation must be non-negative");
    double expected = N;
    for (int i = 0; i < n; ++i) expected *= (N + 1);
    if (expected + 1 > size_cap)
        throw Error(ErrorCode::SizeCap, "V_" + std::to_string(N) + "(" + std::to_string(n) + ") has " +
                                            std::to_string(static_cast<long long>(expected + 1)) +
                                            " vertices, above the cap of " + std::to_string(size_cap));

    ViscekGraph g;
    g.N = N;
    g.generation = 0;
    g.vertex_count = N + 1;
    g.center = 0;
    for (int i = 1; i <= N; ++i) {
        g.edges.emplace_back(0, i);
        g.corners.push_back(i);
    }
    {
        ViscekBlock star;
        star.level = 0;
        star.vertices.resize(N + 1);
        std::iota(star.vertices.begin(), star.vertices.end(), 0);
        star.corners = g.corners;
        star.center = 0;
        g.blocks.push_back(std::move(star));
    }

    for (int gen = 1; gen <= n; ++gen) {
        const int old_n = g.vertex_count;
        ViscekGraph next;
        next.N = N;
        next.generation = gen;
        next.center = g.center;
        next.edges = g.edges;
        next.blocks = g.blocks;
        int next_id = old_n;
        for (int i = 1; i <= N; ++i) {
            const int glued = g.corners[i - 1];
            std::vector<int> map(old_n);
            for (int v = 0; v < old_n; ++v) map[v] = (v == glued) ? glued : next_id++;
            for (auto [u, v] : g.edges) next.edges.emplace_back(map[u], map[v]);
            for (const ViscekBlock& b : g.blocks) {
                ViscekBlock c;
                c.level = b.level;
                c.center = map[b.center];
                for (int v : b.vertices) c.vertices.push_back(map[v]);
                std::sort(c.vertices.begin(), c.vertices.end());
                for (int v : b.corners) c.corners.push_back(map[v]);
                next.blocks.push_back(std::move(c));
            }
        }
        next.vertex_count = next_id;
        next.adjacency = adjacency_of(next.vertex_count, next.edges);
        next.corners = canonical_corners(hop_distances(next.adjacency), N, next.diameter());
        ViscekBlock whole;
        whole.level = gen;
        whole.vertices.resize(next.vertex_count);
        std::iota(whole.vertices.begin(), whole.vertices.end(), 0);
        whole.corners = next.corners;
        whole.center = next.center;
        next.blocks.push_back(std::move(whole));
        g = std::move(next);
    }
    g.adjacency = adjacency_of(g.vertex_count, g.edges);
    std::stable_sort(g.blocks.begin(), g.blocks.end(),
                     [](const ViscekBlock& a, const ViscekBlock& b) { return a.level < b.level; });

    Matrix k = Matrix::Zero(g.vertex_count, g.vertex_count);
    for (int x = 0; x < g.vertex_count; ++x) {
        const double p = 1.0 / static_cast<double>(g.adjacency[x].size());
        for (int y : g.adjacency[x]) k(x, y) = p;
    }
    MarkovChain chain = MarkovChain::build(k);
    return {std::move(g), std::move(chain)};
}

ViscekTestFunction viscek_test_function(const ViscekGraph& graph, const MarkovChain& chain, int block_index) {
    if (block_index < 0 || block_index >= static_cast<int>(graph.blocks.size()))
        throw Error(ErrorCode::InvalidBlock, "block index " + std::to_string(block_index) + " out of range");
    if (chain.size() != graph.vertex_count)
        throw Error(ErrorCode::DimensionMismatch, "chain does not match the Viscek graph");
    const ViscekBlock& block = graph.blocks[block_index];
    const int n = graph.vertex_count;
    std::vector<char> inside(n, 0);
    for (int v : block.vertices) inside[v] = 1;

    // BFS tree from the center, restricted to the block.
    std::vector<int> dist(n, -1), parent(n, -1);
    std::deque<int> queue{block.center};
    dist[block.center] = 0;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : graph.adjacency[u])
            if (inside[v] && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            }
    }
    double half_diam = 1.0;
    for (int i = 0; i < block.level; ++i) half_diam *= 3.0;

    Vector f = Vector::Zero(n);
    std::vector<int> source(n, -1);
    std::vector<int> frontier;
    for (int c : block.corners)
        for (int v = c; v >= 0; v = parent[v])
            if (source[v] < 0) {
                source[v] = v;
                f(v) = 1.0 - dist[v] / half_diam;
                frontier.push_back(v);
            }

    // Layered multi-source BFS; a vertex takes the smallest-id nearest diagonal vertex.
    std::vector<int> layer_of(n, -1);
    for (int v : frontier) layer_of[v] = 0;
    for (int layer = 0; !frontier.empty(); ++layer) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v : graph.adjacency[u]) {
                if (!inside[v]) continue;
                if (layer_of[v] < 0) {
                    layer_of[v] = layer + 1;
                    source[v] = source[u];
                    next.push_back(v);
                } else if (layer_of[v] == layer + 1 && source[u] < source[v]) {
                    source[v] = source[u];
                }
            }
        for (int v : next) f(v) = f(source[v]);
        frontier = std::move(next);
    }

    ViscekTestFunction out;
    out.f = f;
    out.energy = dirichlet_energy(chain, f);
    out.norm_squared = chain.pi().dot(f.cwiseAbs2());
    out.variance = variance(chain, f);
    for (int v : block.vertices) out.mass += chain.pi()(v);
    out.lambda_upper = out.energy / out.variance;
    return out;
}

}  // namespace spk
