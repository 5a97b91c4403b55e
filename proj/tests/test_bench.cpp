#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spin/bench.hpp"

#include <algorithm>
#include <chrono>

using namespace spin;

namespace {

double time_epoch(SpinParams& params, const SpinConfig& cfg, const GraphRefs& refs,
                  const TrainConfig& tc, AdamState& adam, Rng& sh, Rng& dr) {
    auto t0 = std::chrono::steady_clock::now();
    train_epoch(params, cfg, refs, tc, adam, sh, dr);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

TEST_CASE("epoch time is flat across densities; precompute is not") {
    BenchReport rep = bench_edge_independence(120, 16, 3, {0.05, 0.5}, 5, 32, 1);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.epoch_time_ratio() <= 1.25);
    // spmm cost scales with nnz, so the dense precompute must cost more
    CHECK(rep.rows[1].precompute_seconds > rep.rows[0].precompute_seconds);
    CHECK(rep.to_csv().find("density,precompute_seconds,epoch,epoch_seconds") == 0);
}

TEST_CASE("doubling the operator depth roughly doubles the epoch time") {
    // Paired measurement: the two depths alternate epoch by epoch so that
    // machine load hits both equally, and the ratio is taken per round.
    // Small batches keep the live cache set resident at both depths; once
    // it spills, both depths run at memory bandwidth and the compute
    // scaling under test is invisible.
    constexpr std::size_t kGraphs = 16;
    constexpr std::size_t kNodes = 100;
    constexpr std::size_t kRounds = 15;

    Rng gen(5);
    std::vector<Graph> graphs;
    for (std::size_t i = 0; i < kGraphs; ++i) {
        Graph g = erdos_renyi(kNodes, 0.2, gen);
        g.features = DenseMatrix(kNodes, 16);
        for (double& v : g.features.data) v = gen.uniform(-1, 1);
        g.label = static_cast<int>(gen.next_below(2));
        graphs.push_back(std::move(g));
    }

    struct Setup {
        SpinConfig cfg;
        std::vector<PrecomputedGraph> pgs;
        GraphRefs refs;
        SpinParams params;
        AdamState adam;
        Rng sh{0}, dr{0};
    };
    auto make_setup = [&](std::size_t r_depth) {
        Setup s;
        s.cfg.r_depth = r_depth;
        s.cfg.op = OperatorKind::NormalizedAdjacency; // keeps branch values O(1)
        s.cfg.input_dim = 16;
        s.cfg.hidden_dim = 48;
        s.cfg.attention = true;
        s.cfg.dropout_rate = 0.0;
        s.cfg.num_classes = 2;
        s.pgs.resize(kGraphs);
        for (std::size_t i = 0; i < kGraphs; ++i) {
            s.pgs[i].bank = operator_bank(graphs[i], s.cfg.op, r_depth);
            s.pgs[i].label = graphs[i].label.value();
        }
        for (const auto& pg : s.pgs) s.refs.push_back(&pg);
        Rng init(3);
        s.params = make_spin_params(s.cfg, init);
        s.adam = make_adam_state(param_tensors(s.params));
        s.sh = Rng(4);
        s.dr = Rng(5);
        return s;
    };

    Setup lo = make_setup(3);
    Setup hi = make_setup(6);
    TrainConfig tc;
    tc.batch_size = 4;
    tc.learning_rate = 1e-3;

    // warm-up
    time_epoch(lo.params, lo.cfg, lo.refs, tc, lo.adam, lo.sh, lo.dr);
    time_epoch(hi.params, hi.cfg, hi.refs, tc, hi.adam, hi.sh, hi.dr);

    std::vector<double> ratios;
    for (std::size_t round = 0; round < kRounds; ++round) {
        double t_lo = time_epoch(lo.params, lo.cfg, lo.refs, tc, lo.adam, lo.sh, lo.dr);
        double t_hi = time_epoch(hi.params, hi.cfg, hi.refs, tc, hi.adam, hi.sh, hi.dr);
        ratios.push_back(t_hi / t_lo);
    }
    std::sort(ratios.begin(), ratios.end());
    double median = ratios[ratios.size() / 2];
    CHECK(median >= 1.6);
    CHECK(median <= 2.6);
}
