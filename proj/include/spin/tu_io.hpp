#pragma once

#include "spin/graph.hpp"
#include "spin/model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spin {

enum class FeatureScheme { OneHotNodeLabel, DegreeOneHot, AttributesPlusOneHot };

std::string to_string(FeatureScheme s);
FeatureScheme feature_scheme_from_string(const std::string& s);

struct TuError : std::runtime_error {
    enum class Kind {
        MissingFile,
        MalformedLine,
        DanglingEdge,
        SchemeUnavailable,
        IoError,
        VersionMismatch,
        TooFewSamples,
    };
    Kind kind;
    TuError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct Dataset {
    std::string name;
    std::vector<Graph> graphs;
    std::size_t num_classes = 0;
    FeatureScheme scheme = FeatureScheme::DegreeOneHot;

    // raw per-node inputs, parallel to graphs; empty when the files are absent
    std::vector<std::vector<int>> node_labels;
    std::vector<DenseMatrix> node_attributes;

    bool has_node_labels() const { return !node_labels.empty(); }
    bool has_node_attributes() const { return !node_attributes.empty(); }
};

// Reads {name}_A.txt, {name}_graph_indicator.txt, {name}_graph_labels.txt
// and the optional node label/attribute files from dir. Edges are
// deduplicated, symmetrized, self-loops dropped; labels remapped to
// contiguous 0-based classes. Node ids in the files are 1-indexed.
Dataset load_tu_dataset(const std::string& dir, const std::string& name);

// Writes the dataset back in the same layout (remapped labels).
void save_tu_dataset(const Dataset& ds, const std::string& dir, const std::string& name);

// Fills graph feature matrices according to the scheme. The degree one-hot
// width is the dataset max degree, capped.
void build_features(Dataset& ds, FeatureScheme scheme, std::size_t degree_cap = 500);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

struct FoldPlan {
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
};

// Test folds partition the dataset with per-class counts within +-1 of
// proportional; validation is a stratified 10% of each fold's remainder.
FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

std::string fold_plan_to_json(const FoldPlan& plan);

// Per-graph banks; graphs are independent, so `threads` > 1 splits the
// dataset across workers (each writes its own slot, results identical).
std::vector<PrecomputedGraph> precompute_dataset(const Dataset& ds, OperatorKind kind,
                                                 std::size_t r_depth, std::size_t threads = 1);

// Bank cache file, little-endian: header {magic "SPINBANK", version u32,
// R u32, d u32, graph_count u32}, then per graph {node_count u32, label
// i32, (R+1)*node_count*d f64, row-major within a branch, branches in
// order}.
void save_bank_cache(const std::string& path, const std::vector<PrecomputedGraph>& graphs);
std::vector<PrecomputedGraph> load_bank_cache(const std::string& path);

} // namespace spin
