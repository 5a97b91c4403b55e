#pragma once

#include "spin/csr.hpp"
#include "spin/graph.hpp"

#include <string>
#include <vector>

namespace spin {

enum class OperatorKind {
    Adjacency,               // A
    NormalizedAdjacency,     // D^{-1/2} A D^{-1/2}
    NormalizedPlusAdjacency, // D^{-1/2} A D^{-1/2} + A
};

std::string to_string(OperatorKind k);
OperatorKind operator_kind_from_string(const std::string& s);

// Multi-hop aggregation features: matrices[r] holds the operator applied r
// times to the input features. matrices[0] is the input matrix itself.
struct FeatureBank {
    std::vector<DenseMatrix> matrices; // R+1 entries, each node_count x d
    std::size_t depth() const { return matrices.empty() ? 0 : matrices.size() - 1; }
};

// Symmetric aggregation operator for g. Isolated nodes get all-zero rows
// (the degree-normalized forms skip the division for degree 0).
CsrMatrix build_operator(const Graph& g, OperatorKind kind);

// Repeated spmm: matrices[r] = op * matrices[r-1]. The operator power is
// never materialized.
FeatureBank operator_bank(const Graph& g, OperatorKind kind, std::size_t r_max);

// One-hot of min(deg(v), max_degree) over max_degree+1 bins.
DenseMatrix degree_feature(const Graph& g, std::size_t max_degree);

} // namespace spin
