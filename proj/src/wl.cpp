#include "spin/wl.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

namespace spin {

namespace {

using Signature = std::vector<std::uint32_t>;

// Rank a batch of signatures jointly: sorted distinct signature list,
// color = index in that list. Order-independent by construction.
std::vector<std::uint32_t> rank_signatures(const std::vector<Signature>& sigs) {
    std::vector<Signature> distinct = sigs;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::uint32_t> out(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), sigs[i]);
        out[i] = static_cast<std::uint32_t>(it - distinct.begin());
    }
    return out;
}

std::vector<Signature> step_signatures(const Graph& g, const std::vector<std::uint32_t>& colors) {
    auto adj = g.adjacency_list();
    std::vector<Signature> sigs(g.node_count);
    for (std::size_t v = 0; v < g.node_count; ++v) {
        Signature s;
        s.reserve(adj[v].size() + 1);
        s.push_back(colors[v]);
        for (auto u : adj[v]) s.push_back(colors[u]);
        std::sort(s.begin() + 1, s.end());
        sigs[v] = std::move(s);
    }
    return sigs;
}

std::vector<std::uint32_t> init_colors_joint(const Graph& g1, const Graph& g2,
                                             bool use_features) {
    std::size_t n = g1.node_count + g2.node_count;
    if (!use_features) return std::vector<std::uint32_t>(n, 0);
    // rank exact feature rows over both graphs
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (std::size_t v = 0; v < g1.node_count; ++v)
        rows.emplace_back(g1.features.row(v), g1.features.row(v) + g1.features.cols);
    for (std::size_t v = 0; v < g2.node_count; ++v)
        rows.emplace_back(g2.features.row(v), g2.features.row(v) + g2.features.cols);
    auto distinct = rows;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    std::vector<std::uint32_t> colors(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), rows[i]);
        colors[i] = static_cast<std::uint32_t>(it - distinct.begin());
    }
    return colors;
}

std::vector<std::size_t> histogram(const std::vector<std::uint32_t>& colors,
                                   std::size_t num_colors) {
    std::vector<std::size_t> h(num_colors, 0);
    for (auto c : colors) ++h[c];
    return h;
}

std::size_t count_distinct(const std::vector<std::uint32_t>& colors) {
    if (colors.empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(colors.begin(), colors.end())) + 1;
}

} // namespace

std::size_t ColorAssignment::num_distinct() const { return count_distinct(colors); }

ColorAssignment wl_init(const Graph& g, bool use_features) {
    ColorAssignment c;
    c.iteration = 0;
    if (!use_features) {
        c.colors.assign(g.node_count, 0);
        return c;
    }
    Graph empty;
    c.colors = init_colors_joint(g, empty, true);
    return c;
}

ColorAssignment wl_step(const Graph& g, const ColorAssignment& c) {
    ColorAssignment out;
    out.iteration = c.iteration + 1;
    out.colors = rank_signatures(step_signatures(g, c.colors));
    return out;
}

WlVerdict wl_distinguish(const Graph& g1, const Graph& g2, std::size_t max_iters,
                         bool use_features) {
    auto joint = init_colors_joint(g1, g2, use_features);
    auto split = [&](const std::vector<std::uint32_t>& all) {
        std::vector<std::uint32_t> c1(all.begin(),
                                      all.begin() + static_cast<std::ptrdiff_t>(g1.node_count));
        std::vector<std::uint32_t> c2(all.begin() + static_cast<std::ptrdiff_t>(g1.node_count),
                                      all.end());
        return std::make_pair(std::move(c1), std::move(c2));
    };

    for (std::size_t t = 0;; ++t) {
        std::size_t num_colors = count_distinct(joint);
        auto [c1, c2] = split(joint);
        if (histogram(c1, num_colors) != histogram(c2, num_colors))
            return {true, t};
        if (t >= max_iters) return {false, t};

        auto sigs1 = step_signatures(g1, c1);
        auto sigs2 = step_signatures(g2, c2);
        std::vector<Signature> all = std::move(sigs1);
        all.insert(all.end(), std::make_move_iterator(sigs2.begin()),
                   std::make_move_iterator(sigs2.end()));
        auto next = rank_signatures(all);
        if (count_distinct(next) == num_colors)
            return {false, t}; // both partitions stable, histograms equal
        joint = std::move(next);
    }
}

WlVerdict wl_distinguish(const Graph& g1, const Graph& g2, bool use_features) {
    return wl_distinguish(g1, g2, std::max(g1.node_count, g2.node_count), use_features);
}

bool brute_force_isomorphic(const Graph& g1, const Graph& g2) {
    constexpr std::size_t kMaxNodes = 10;
    if (g1.node_count > kMaxNodes || g2.node_count > kMaxNodes)
        throw std::invalid_argument("brute_force_isomorphic: graphs above 10 nodes rejected");
    if (g1.node_count != g2.node_count) return false;
    if (g1.edges.size() != g2.edges.size()) return false;
    bool f1 = g1.features.rows > 0, f2 = g2.features.rows > 0;
    if (f1 != f2) return false;
    if (f1 && g1.features.cols != g2.features.cols) return false;

    std::size_t n = g1.node_count;
    std::array<std::array<bool, kMaxNodes>, kMaxNodes> adj2{};
    for (const auto& [u, v] : g2.edges) {
        adj2[u][v] = true;
        adj2[v][u] = true;
    }

    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (const auto& [u, v] : g1.edges)
            if (!adj2[perm[u]][perm[v]]) {
                ok = false;
                break;
            }
        if (ok && f1) {
            for (std::size_t v = 0; v < n && ok; ++v)
                for (std::size_t j = 0; j < g1.features.cols; ++j)
                    if (g1.features(v, j) != g2.features(perm[v], j)) {
                        ok = false;
                        break;
                    }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

} // namespace spin
