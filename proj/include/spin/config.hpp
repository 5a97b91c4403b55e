#pragma once

#include "spin/operator_bank.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace spin {

// Branch-level pooling. Mean and Max exist for the readout-failure demos;
// Sum is the default and the documented mode.
enum class ReadoutKind { Sum, Mean, Max };

std::string to_string(ReadoutKind k);
ReadoutKind readout_from_string(const std::string& s);

struct SpinConfig {
    std::size_t r_depth = 3; // R; the model has R+1 branches
    OperatorKind op = OperatorKind::NormalizedAdjacency;
    std::size_t input_dim = 1;  // d, set from the dataset
    std::size_t hidden_dim = 16; // d'
    std::size_t g_layers = 2;
    bool attention = true;
    double dropout_rate = 0.2;
    std::size_t classifier_layers = 2;
    std::size_t num_classes = 2;
    ReadoutKind readout = ReadoutKind::Sum;

    std::size_t branches() const { return r_depth + 1; }
    std::size_t embedding_dim() const { return branches() * hidden_dim; }
};

struct TrainConfig {
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t max_epochs = 200;
    std::size_t patience = 20;
    double l2 = 0.0;
    std::uint64_t seed = 0;
    std::size_t repeats_per_fold = 3;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat `key = value` text, one pair per line; '#' starts a comment.
KeyValues parse_key_values(std::istream& in);
KeyValues load_key_values(const std::string& path);

void apply_key_values(SpinConfig& cfg, const KeyValues& kv);
void apply_key_values(TrainConfig& cfg, const KeyValues& kv);

std::string to_key_values(const SpinConfig& cfg);
std::string to_key_values(const TrainConfig& cfg);

} // namespace spin
