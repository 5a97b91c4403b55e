#include "spin/operator_bank.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace spin {

std::string to_string(OperatorKind k) {
    switch (k) {
        case OperatorKind::Adjacency: return "adjacency";
        case OperatorKind::NormalizedAdjacency: return "normalized";
        case OperatorKind::NormalizedPlusAdjacency: return "normalized-plus-adjacency";
    }
    return "?";
}

OperatorKind operator_kind_from_string(const std::string& s) {
    if (s == "adjacency" || s == "adj") return OperatorKind::Adjacency;
    if (s == "normalized" || s == "norm") return OperatorKind::NormalizedAdjacency;
    if (s == "normalized-plus-adjacency" || s == "norm+adj")
        return OperatorKind::NormalizedPlusAdjacency;
    throw std::invalid_argument("unknown operator kind: " + s);
}

CsrMatrix build_operator(const Graph& g, OperatorKind kind) {
    assert(g.valid());
    auto deg = g.degrees();
    std::vector<double> dinv_sqrt(g.node_count, 0.0);
    for (std::size_t v = 0; v < g.node_count; ++v)
        if (deg[v] > 0) dinv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(deg[v]));

    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> t;
    t.reserve(2 * g.edges.size());
    for (const auto& [u, v] : g.edges) {
        double w = 0.0;
        switch (kind) {
            case OperatorKind::Adjacency: w = 1.0; break;
            case OperatorKind::NormalizedAdjacency: w = dinv_sqrt[u] * dinv_sqrt[v]; break;
            case OperatorKind::NormalizedPlusAdjacency:
                w = dinv_sqrt[u] * dinv_sqrt[v] + 1.0;
                break;
        }
        t.emplace_back(u, v, w);
        t.emplace_back(v, u, w);
    }
    return csr_from_triplets(g.node_count, g.node_count, std::move(t));
}

FeatureBank operator_bank(const Graph& g, OperatorKind kind, std::size_t r_max) {
    assert(g.features.rows == g.node_count);
    FeatureBank bank;
    bank.matrices.reserve(r_max + 1);
    bank.matrices.push_back(g.features);
    if (r_max == 0) return bank;
    CsrMatrix op = build_operator(g, kind);
    for (std::size_t r = 1; r <= r_max; ++r)
        bank.matrices.push_back(spmm(op, bank.matrices.back()));
    return bank;
}

DenseMatrix degree_feature(const Graph& g, std::size_t max_degree) {
    assert(max_degree >= 1);
    DenseMatrix f(g.node_count, max_degree + 1);
    auto deg = g.degrees();
    for (std::size_t v = 0; v < g.node_count; ++v)
        f(v, std::min(deg[v], max_degree)) = 1.0;
    return f;
}

} // namespace spin
