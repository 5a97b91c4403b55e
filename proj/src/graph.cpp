#include "spin/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace spin {

void Graph::canonicalize_edges() {
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [](const auto& e) { return e.first == e.second; }),
                edges.end());
}

bool Graph::valid() const {
    for (const auto& [u, v] : edges) {
        if (u >= node_count || v >= node_count) return false;
        if (u >= v) return false;
    }
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i - 1] < edges[i])) return false;
    if (features.rows != 0 && features.rows != node_count) return false;
    return true;
}

std::vector<std::size_t> Graph::degrees() const {
    std::vector<std::size_t> deg(node_count, 0);
    for (const auto& [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

std::vector<std::vector<std::uint32_t>> Graph::adjacency_list() const {
    std::vector<std::vector<std::uint32_t>> adj(node_count);
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

Graph make_graph(std::size_t n,
                 std::vector<std::pair<std::uint32_t, std::uint32_t>> edges,
                 std::optional<int> label) {
    Graph g;
    g.node_count = n;
    g.edges = std::move(edges);
    g.label = label;
    g.canonicalize_edges();
    return g;
}

Graph make_path(std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return make_graph(n, std::move(e));
}

Graph make_cycle(std::size_t n) {
    auto g = make_path(n);
    if (n >= 3) {
        g.edges.emplace_back(0, static_cast<std::uint32_t>(n - 1));
        g.canonicalize_edges();
    }
    return g;
}

Graph make_star(std::size_t leaves) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return make_graph(leaves + 1, std::move(e));
}

Graph make_complete(std::size_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return make_graph(n, std::move(e));
}

Graph make_circulant_regular(std::size_t n, std::size_t k) {
    if (k >= n) throw std::invalid_argument("circulant: degree must be < node count");
    if ((n * k) % 2 != 0) throw std::invalid_argument("circulant: no k-regular graph, n*k odd");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t off = 1; off <= k / 2; ++off)
            e.emplace_back(i, static_cast<std::uint32_t>((i + off) % n));
        if (k % 2 == 1)
            e.emplace_back(i, static_cast<std::uint32_t>((i + n / 2) % n));
    }
    return make_graph(n, std::move(e));
}

Graph disjoint_union(const Graph& a, const Graph& b) {
    Graph g;
    g.node_count = a.node_count + b.node_count;
    g.edges = a.edges;
    auto shift = static_cast<std::uint32_t>(a.node_count);
    for (const auto& [u, v] : b.edges) g.edges.emplace_back(u + shift, v + shift);
    g.canonicalize_edges();
    if (a.features.rows > 0 && b.features.rows > 0 && a.features.cols == b.features.cols) {
        g.features = DenseMatrix(g.node_count, a.features.cols);
        std::copy(a.features.data.begin(), a.features.data.end(), g.features.data.begin());
        std::copy(b.features.data.begin(), b.features.data.end(),
                  g.features.data.begin() + static_cast<std::ptrdiff_t>(a.features.data.size()));
    }
    return g;
}

Graph erdos_renyi(std::size_t n, double p, Rng& rng) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) e.emplace_back(i, j);
    return make_graph(n, std::move(e));
}

DenseMatrix uniform_features(std::size_t n, std::size_t d, double value) {
    return DenseMatrix(n, d, value);
}

Graph relabel(const Graph& g, const std::vector<std::uint32_t>& perm) {
    Graph out;
    out.node_count = g.node_count;
    out.label = g.label;
    out.edges.reserve(g.edges.size());
    for (const auto& [u, v] : g.edges) out.edges.emplace_back(perm[u], perm[v]);
    out.canonicalize_edges();
    if (g.features.rows == g.node_count && g.features.rows > 0) {
        out.features = DenseMatrix(g.node_count, g.features.cols);
        for (std::size_t i = 0; i < g.node_count; ++i)
            std::copy(g.features.row(i), g.features.row(i) + g.features.cols,
                      out.features.row(perm[i]));
    }
    return out;
}

} // namespace spin
