#pragma once

#include "spin/train.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spin {

// Training epoch timing on synthetic graphs of fixed size at different
// edge densities. Aggregation is precomputed (and timed separately), so
// epoch time should not depend on density.
struct BenchRow {
    double density = 0.0;
    double precompute_seconds = 0.0;
    double epoch_seconds_median = 0.0;
    std::vector<double> epoch_seconds;
};

struct BenchReport {
    std::size_t nodes = 0;
    std::size_t feat_dim = 0;
    std::size_t r_depth = 0;
    std::size_t num_graphs = 0;
    std::vector<BenchRow> rows;

    // densest epoch median / sparsest epoch median
    double epoch_time_ratio() const;
    std::string to_csv() const;
};

BenchReport bench_edge_independence(std::size_t nodes, std::size_t feat_dim, std::size_t r_depth,
                                    const std::vector<double>& densities, std::size_t epochs,
                                    std::size_t num_graphs = 48, std::uint64_t seed = 0);

} // namespace spin
