#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spin/operator_bank.hpp"

#include <cmath>

using namespace spin;

TEST_CASE("edge canonicalization dedupes, orients, and drops self-loops") {
    Graph g = make_graph(4, {{1, 0}, {0, 1}, {2, 2}, {3, 1}, {1, 3}});
    CHECK(g.valid());
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0] == std::pair<std::uint32_t, std::uint32_t>{0, 1});
    CHECK(g.edges[1] == std::pair<std::uint32_t, std::uint32_t>{1, 3});
}

TEST_CASE("csr from triplets sums duplicates and keeps rows sorted") {
    auto m = csr_from_triplets(3, 3,
                               {{0, 2, 1.0}, {0, 1, 2.0}, {0, 2, 0.5}, {2, 0, 3.0}});
    CHECK(m.valid());
    CHECK(m.at(0, 1) == 2.0);
    CHECK(m.at(0, 2) == 1.5);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(m.at(2, 0) == 3.0);
}

TEST_CASE("adjacency operator on K3") {
    Graph k3 = make_complete(3);
    auto a = build_operator(k3, OperatorKind::Adjacency);
    CHECK(a.valid());
    CHECK(a.symmetric());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(a.at(i, j) == (i == j ? 0.0 : 1.0));
}

TEST_CASE("normalized operator on K3 has off-diagonal 1/2") {
    Graph k3 = make_complete(3);
    auto a = build_operator(k3, OperatorKind::NormalizedAdjacency);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(a.at(i, j) == doctest::Approx(i == j ? 0.0 : 0.5).epsilon(1e-15));
}

TEST_CASE("normalized-plus-adjacency on a single edge gives entries 2") {
    Graph p2 = make_path(2);
    auto a = build_operator(p2, OperatorKind::NormalizedPlusAdjacency);
    CHECK(a.at(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(a.at(1, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("isolated nodes give all-zero operator rows") {
    Graph g = make_graph(3, {{0, 1}}); // node 2 isolated
    for (auto kind : {OperatorKind::Adjacency, OperatorKind::NormalizedAdjacency,
                      OperatorKind::NormalizedPlusAdjacency}) {
        auto a = build_operator(g, kind);
        CHECK(a.valid());
        CHECK(a.row_ptr[2] == a.row_ptr[3]); // empty row
        CHECK(a.symmetric());
    }
}

TEST_CASE("bank on P3 with all-ones features gives degree column at r=1") {
    Graph p3 = make_path(3);
    p3.features = uniform_features(3);
    auto bank = operator_bank(p3, OperatorKind::Adjacency, 1);
    REQUIRE(bank.matrices.size() == 2);
    CHECK(bank.matrices[1](0, 0) == 1.0);
    CHECK(bank.matrices[1](1, 0) == 2.0);
    CHECK(bank.matrices[1](2, 0) == 1.0);
}

TEST_CASE("bank with R=0 is exactly the input features") {
    Graph g = make_cycle(5);
    g.features = DenseMatrix(5, 3);
    Rng rng(7);
    for (double& v : g.features.data) v = rng.uniform(-1, 1);
    auto bank = operator_bank(g, OperatorKind::NormalizedAdjacency, 0);
    REQUIRE(bank.matrices.size() == 1);
    CHECK(max_abs_diff(bank.matrices[0], g.features) == 0.0);
}

TEST_CASE("normalized operator fixes the all-ones vector on cycles") {
    // regular graph: the all-one vector is an eigenvector with eigenvalue 1
    Graph c6 = make_cycle(6);
    c6.features = uniform_features(6);
    auto bank = operator_bank(c6, OperatorKind::NormalizedAdjacency, 4);
    for (const auto& m : bank.matrices)
        for (double v : m.data) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bank equals repeated explicit spmm applications") {
    Rng rng(11);
    Graph g = erdos_renyi(12, 0.4, rng);
    g.features = DenseMatrix(12, 4);
    for (double& v : g.features.data) v = rng.uniform(-1, 1);
    auto op = build_operator(g, OperatorKind::NormalizedPlusAdjacency);
    auto bank = operator_bank(g, OperatorKind::NormalizedPlusAdjacency, 3);
    DenseMatrix cur = g.features;
    for (std::size_t r = 1; r <= 3; ++r) {
        cur = spmm(op, cur);
        CHECK(max_abs_diff(bank.matrices[r], cur) == 0.0);
    }
}

TEST_CASE("adjacency bank at r=1 recovers node degrees on random graphs") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g = erdos_renyi(4 + rng.next_below(10), 0.2 + 0.6 * rng.uniform(), rng);
        g.features = uniform_features(g.node_count);
        auto bank = operator_bank(g, OperatorKind::Adjacency, 1);
        auto deg = g.degrees();
        for (std::size_t v = 0; v < g.node_count; ++v)
            CHECK(bank.matrices[1](v, 0) == static_cast<double>(deg[v]));
    }
}

TEST_CASE("regular graphs with identical feature rows give identical bank rows") {
    for (auto kind : {OperatorKind::Adjacency, OperatorKind::NormalizedAdjacency,
                      OperatorKind::NormalizedPlusAdjacency}) {
        Graph g = make_circulant_regular(8, 4);
        g.features = DenseMatrix(8, 3);
        for (std::size_t v = 0; v < 8; ++v)
            for (std::size_t j = 0; j < 3; ++j) g.features(v, j) = 0.5 * (double)j - 1.0;
        auto bank = operator_bank(g, kind, 3);
        for (const auto& m : bank.matrices)
            for (std::size_t v = 1; v < m.rows; ++v)
                for (std::size_t j = 0; j < m.cols; ++j)
                    CHECK(m(v, j) == doctest::Approx(m(0, j)).epsilon(1e-12));
    }
}

TEST_CASE("operator construction satisfies csr invariants on random graphs") {
    Rng rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        Graph g = erdos_renyi(2 + rng.next_below(15), rng.uniform(), rng);
        for (auto kind : {OperatorKind::Adjacency, OperatorKind::NormalizedAdjacency,
                          OperatorKind::NormalizedPlusAdjacency}) {
            auto a = build_operator(g, kind);
            CHECK(a.valid());
            CHECK(a.symmetric(1e-15));
        }
    }
}

TEST_CASE("degree features one-hot with clamping") {
    Graph k3 = make_complete(3);
    auto f = degree_feature(k3, 5);
    REQUIRE(f.cols == 6);
    for (std::size_t v = 0; v < 3; ++v) {
        CHECK(f(v, 2) == 1.0);
        double sum = 0;
        for (std::size_t j = 0; j < 6; ++j) sum += f(v, j);
        CHECK(sum == 1.0);
    }

    Graph s3 = make_star(3);
    auto fs = degree_feature(s3, 5);
    CHECK(fs(0, 3) == 1.0); // hub
    CHECK(fs(1, 1) == 1.0);

    Graph s9 = make_star(9); // hub degree 9, clamped to bin 5
    auto f9 = degree_feature(s9, 5);
    CHECK(f9(0, 5) == 1.0);
}

TEST_CASE("circulant construction rejects impossible degree sequences") {
    CHECK_THROWS_AS(make_circulant_regular(5, 3), std::invalid_argument); // n*k odd
    CHECK_THROWS_AS(make_circulant_regular(4, 4), std::invalid_argument); // k >= n
    Graph g = make_circulant_regular(6, 3);
    for (auto d : g.degrees()) CHECK(d == 3);
}
