#pragma once

#include "spk/chain.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace spk {

/// Uniform kernel 1/n on all pairs, self-loops included.
MarkovChain complete_graph(int n);

/// Simple random walk on Z_n, made lazy by alpha I + (1 - alpha) K when alpha > 0.
MarkovChain cycle(int n, double lazy_alpha = 0.0);

/// Walk on Z_a x Z_b with probability 1/4 on each of (+-1, 0), (0, +-1).
/// Vertex (i, j) has index i * b + j. Throws DegenerateGenerators when a or b < 3.
MarkovChain torus_product(int a, int b);

struct ViscekBlock {
    int level = 0;
    std::vector<int> vertices;  // sorted
    std::vector<int> corners;
    int center = 0;
};

struct ViscekGraph {
    int N = 0;
    int generation = 0;
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adjacency;
    std::vector<int> corners;
    int center = 0;
    /// Every k-block for k = 0..generation; the last entry is the whole graph.
    std::vector<ViscekBlock> blocks;

    int diameter() const;
    std::vector<int> blocks_at_level(int k) const;
};

inline constexpr int kViscekSizeCap = 2000;

/// V_N(n) with its simple random walk (no holding, pi proportional to degree).
/// Corners at every generation are the lexicographically smallest N-set of
/// vertices at pairwise distance diam. Throws SizeCap above `size_cap` vertices.
std::pair<ViscekGraph, MarkovChain> viscek(int N, int n, int size_cap = kViscekSizeCap);

struct ViscekTestFunction {
    Vector f;
    double energy = 0.0;
    double norm_squared = 0.0;
    double variance = 0.0;
    /// pi(block)
    double mass = 0.0;
    /// energy / variance, an upper bound for Lambda(mass)
    double lambda_upper = 0.0;
};

/// f = 1 - d(o, x)/3^m along the diagonals of the block, extended to the rest of
/// the block from the nearest diagonal vertex (ties to the smallest id), 0 outside.
/// Throws InvalidBlock for an out-of-range index.
ViscekTestFunction viscek_test_function(const ViscekGraph& graph, const MarkovChain& chain, int block_index);

/// Symmetric random edge weights on a connected support (a random spanning path
/// plus each remaining pair with probability edge_prob), normalized by row.
MarkovChain random_reversible_chain(int n, std::mt19937_64& rng, double edge_prob = 0.5);
/// Random kernel whose support contains a random Hamiltonian cycle; generally
/// not reversible.
MarkovChain random_chain(int n, std::mt19937_64& rng, double edge_prob = 0.5);

/// All-pairs hop distances of an undirected graph given by adjacency lists.
std::vector<std::vector<int>> hop_distances(const std::vector<std::vector<int>>& adjacency);

}  // namespace spk
