#pragma once

#include "spin/graph.hpp"

#include <cstdint>
#include <vector>

namespace spin {

// Colors are dense in [0, num_distinct). Canonicalization orders distinct
// signatures, so the assignment is independent of node order.
struct ColorAssignment {
    std::vector<std::uint32_t> colors;
    std::size_t iteration = 0;
    std::size_t num_distinct() const;
};

struct WlVerdict {
    bool distinguished = false;
    std::size_t iteration = 0; // first iteration with differing histograms
};

// Initial coloring: partition nodes by exact feature row when use_features
// is set, otherwise a single color class.
ColorAssignment wl_init(const Graph& g, bool use_features);

// One refinement sweep: new color of v is the canonical index of
// (old color of v, sorted multiset of neighbor colors). Signatures are
// compared structurally; there is no lossy hashing.
ColorAssignment wl_step(const Graph& g, const ColorAssignment& c);

// Joint refinement of two graphs with a shared signature dictionary each
// iteration. Distinguished(t) at the first t where the color histograms
// differ; PossiblyIsomorphic once both partitions are stable.
WlVerdict wl_distinguish(const Graph& g1, const Graph& g2, std::size_t max_iters,
                         bool use_features = true);

// max_iters defaulted to max(node counts); refinement stabilizes by then.
WlVerdict wl_distinguish(const Graph& g1, const Graph& g2, bool use_features = true);

// Exhaustive permutation search; guard rejects graphs above 10 nodes.
// Feature rows must map exactly along the permutation.
bool brute_force_isomorphic(const Graph& g1, const Graph& g2);

} // namespace spin
