#pragma once

#include "spin/model.hpp"
#include "spin/wl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spin {

// Outcome of one readout/attention property check. The demos for the
// collision cases count a "violation" when the expected collision or
// separation does not materialize, so violations == 0 is the pass state
// for every report.
struct LemmaReport {
    int lemma = 0;
    std::size_t instances = 0;
    std::size_t violations = 0;
    std::vector<std::string> witnesses; // human-readable inputs/outputs/deltas
    std::vector<double> deltas;         // one per instance

    bool passed() const { return violations == 0; }
    std::string to_csv() const;
};

// Weighted ReLU sums over the two fixed multisets {2,1,4} (weights
// 1,-1,0.25) and {6,4} (weights 1,-1): equal for every linear map, which
// is the single-layer-perceptron collision. Each column of `maps` is one
// linear map applied to the scalars.
LemmaReport lemma1_demo(const std::vector<std::vector<double>>& maps, Activation nonlinearity,
                        double leaky_slope = 0.1);

// Random (w, z1, z2) draws inside a two-node pseudo-graph sharing one
// softmax normalizer; flags z1 != z2 with alpha1*z1 == alpha2*z2.
LemmaReport lemma2_probe(std::size_t trials, std::size_t dim, Rng& rng);

// Builds k-regular circulant graphs on n1 and n2 nodes with identical
// scalar features and compares an untrained forward pass under the chosen
// readout. For Mean/Max the embeddings must collide; for Sum they must
// separate with norm ratio n1/n2.
struct Lemma3Result {
    LemmaReport report;
    double max_abs_diff = 0.0;
    double norm_ratio = 0.0; // |e_G1| / |e_G2|
};

Lemma3Result lemma3_demo(std::size_t n1, std::size_t n2, std::size_t k, ReadoutKind readout,
                         std::uint64_t seed = 0);

struct PowerReport {
    std::size_t pairs_tested = 0;      // pairs drawn from the sampler
    std::size_t wl_distinguished = 0;  // pairs the joint refinement separated
    std::size_t model_distinguished = 0; // of those, pairs the embedding separated
    std::size_t wl_blind = 0;            // pairs the refinement did not separate
    std::size_t model_only = 0;          // of those, pairs the embedding separated anyway
    double tau = 0.0;

    double agreement_rate() const {
        return wl_distinguished == 0
                   ? 1.0
                   : static_cast<double>(model_distinguished) /
                         static_cast<double>(wl_distinguished);
    }
    std::string to_csv() const;
};

// Samples Erdos-Renyi pairs of equal size (p from {0.3, 0.5, 0.7}, all-one
// features) until `num_pairs` refinement-separated pairs have been checked
// against a fresh random-parameter model per pair (sum readout, adjacency
// operator, R = max_nodes - 1).
PowerReport theorem1_experiment(std::size_t num_pairs, std::size_t max_nodes, double tau,
                                std::uint64_t seed);

} // namespace spin
