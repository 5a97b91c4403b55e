#pragma once

#include "spin/dense.hpp"
#include "spin/rng.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace spin {

// Undirected graph with optional node features and class label.
// Edges are canonical: u < v, sorted, no duplicates, no self-loops.
struct Graph {
    std::size_t node_count = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    DenseMatrix features; // node_count x d (may be 0x0 before feature build)
    std::optional<int> label;

    // Sorts, dedupes, orients u < v, and drops self-loops.
    void canonicalize_edges();

    // Checks the structural invariants (endpoint bounds, canonical edge list,
    // feature row count). Feature matrix may be empty.
    bool valid() const;

    std::vector<std::size_t> degrees() const;
    std::vector<std::vector<std::uint32_t>> adjacency_list() const;
};

Graph make_graph(std::size_t n,
                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                 std::optional<int> label = std::nullopt);

// All generators attach the given feature matrix lazily; callers that need
// features set them afterwards (or use uniform_features).
Graph make_path(std::size_t n);
Graph make_cycle(std::size_t n);
Graph make_star(std::size_t leaves); // node 0 is the hub
Graph make_complete(std::size_t n);

// k-regular circulant graph on n nodes: node i connects to i +- 1..k/2
// (mod n), plus the antipode i + n/2 when k is odd (requires n even).
// Throws std::invalid_argument when n*k is odd or k >= n.
Graph make_circulant_regular(std::size_t n, std::size_t k);

Graph disjoint_union(const Graph& a, const Graph& b);

Graph erdos_renyi(std::size_t n, double p, Rng& rng);

// n x d feature matrix with every entry `value`.
DenseMatrix uniform_features(std::size_t n, std::size_t d = 1, double value = 1.0);

// Copy of g with node i renamed perm[i]; features and edges follow.
Graph relabel(const Graph& g, const std::vector<std::uint32_t>& perm);

} // namespace spin
