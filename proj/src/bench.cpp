#include "spin/bench.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <sstream>

namespace spin {

namespace {

double median(std::vector<double> v) {
    assert(!v.empty());
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

double BenchReport::epoch_time_ratio() const {
    assert(rows.size() >= 2);
    const BenchRow* sparsest = &rows.front();
    const BenchRow* densest = &rows.front();
    for (const auto& r : rows) {
        if (r.density < sparsest->density) sparsest = &r;
        if (r.density > densest->density) densest = &r;
    }
    return densest->epoch_seconds_median / sparsest->epoch_seconds_median;
}

std::string BenchReport::to_csv() const {
    std::ostringstream o;
    o.precision(17);
    o << "density,precompute_seconds,epoch,epoch_seconds\n";
    for (const auto& r : rows)
        for (std::size_t e = 0; e < r.epoch_seconds.size(); ++e)
            o << r.density << ',' << r.precompute_seconds << ',' << (e + 1) << ','
              << r.epoch_seconds[e] << '\n';
    return o.str();
}

BenchReport bench_edge_independence(std::size_t nodes, std::size_t feat_dim, std::size_t r_depth,
                                    const std::vector<double>& densities, std::size_t epochs,
                                    std::size_t num_graphs, std::uint64_t seed) {
    BenchReport rep;
    rep.nodes = nodes;
    rep.feat_dim = feat_dim;
    rep.r_depth = r_depth;
    rep.num_graphs = num_graphs;

    SpinConfig cfg;
    cfg.r_depth = r_depth;
    // normalized operator keeps bank values O(1) at every depth and density,
    // so every branch costs the same and timings compare like for like
    cfg.op = OperatorKind::NormalizedAdjacency;
    cfg.input_dim = feat_dim;
    cfg.hidden_dim = 32; // wide enough that branch compute dominates the epoch
    cfg.g_layers = 2;
    cfg.attention = true;
    cfg.dropout_rate = 0.0;
    cfg.num_classes = 2;

    TrainConfig tc;
    tc.batch_size = 16;
    tc.learning_rate = 1e-3;
    tc.seed = seed;

    for (double density : densities) {
        BenchRow row;
        row.density = density;

        Rng gen = Rng::derive(seed, static_cast<std::uint64_t>(density * 1e6));
        std::vector<Graph> graphs;
        for (std::size_t i = 0; i < num_graphs; ++i) {
            Graph g = erdos_renyi(nodes, density, gen);
            g.features = DenseMatrix(nodes, feat_dim);
            for (double& x : g.features.data) x = gen.uniform(-1.0, 1.0);
            g.label = static_cast<int>(gen.next_below(2));
            graphs.push_back(std::move(g));
        }

        auto t0 = std::chrono::steady_clock::now();
        std::vector<PrecomputedGraph> pgs(num_graphs);
        for (std::size_t i = 0; i < num_graphs; ++i) {
            pgs[i].bank = operator_bank(graphs[i], cfg.op, r_depth);
            pgs[i].label = graphs[i].label.value();
        }
        row.precompute_seconds = seconds_since(t0);

        GraphRefs refs;
        for (const auto& pg : pgs) refs.push_back(&pg);

        Rng init_rng = Rng::derive(seed, 7);
        Rng shuffle_rng = Rng::derive(seed, 8);
        Rng dropout_rng = Rng::derive(seed, 9);
        SpinParams params = make_spin_params(cfg, init_rng);
        AdamState adam = make_adam_state(param_tensors(params));

        train_epoch(params, cfg, refs, tc, adam, shuffle_rng, dropout_rng); // warm-up
        for (std::size_t e = 0; e < epochs; ++e) {
            auto te = std::chrono::steady_clock::now();
            train_epoch(params, cfg, refs, tc, adam, shuffle_rng, dropout_rng);
            row.epoch_seconds.push_back(seconds_since(te));
        }
        row.epoch_seconds_median = median(row.epoch_seconds);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace spin
