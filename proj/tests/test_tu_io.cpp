#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spin/tu_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace spin;
namespace fs = std::filesystem;

#ifndef TEST_DATA_DIR
#define TEST_DATA_DIR "tests/data"
#endif

namespace {

const std::string kDataDir = TEST_DATA_DIR;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

} // namespace

TEST_CASE("toy fixture loads with exact structure") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    REQUIRE(ds.graphs.size() == 2);
    CHECK(ds.num_classes == 2);

    const Graph& tri = ds.graphs[0];
    CHECK(tri.node_count == 3);
    REQUIRE(tri.edges.size() == 3); // deduplicated from the doubled file
    CHECK(tri.edges[0] == std::pair<std::uint32_t, std::uint32_t>{0, 1});
    CHECK(tri.edges[1] == std::pair<std::uint32_t, std::uint32_t>{0, 2});
    CHECK(tri.edges[2] == std::pair<std::uint32_t, std::uint32_t>{1, 2});
    CHECK(tri.label == 0); // -1 remapped

    const Graph& edge = ds.graphs[1];
    CHECK(edge.node_count == 2);
    REQUIRE(edge.edges.size() == 1);
    CHECK(edge.label == 1);

    REQUIRE(ds.has_node_labels());
    CHECK(ds.node_labels[0] == std::vector<int>{0, 1, 0});
    CHECK(ds.node_labels[1] == std::vector<int>{2, 1});
    REQUIRE(ds.has_node_attributes());
    CHECK(ds.node_attributes[1](0, 1) == 0.0);
    CHECK(ds.node_attributes[1](1, 0) == 1.5);
}

TEST_CASE("missing required file reports MissingFile") {
    try {
        load_tu_dataset(kDataDir + "/TOY5", "NOPE");
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::MissingFile);
    }
}

TEST_CASE("zero-indexed edge file is rejected with a line diagnostic") {
    TempDir dir("spin_tu_zero_based");
    write(dir.path / "Z_A.txt", "0, 1\n");
    write(dir.path / "Z_graph_indicator.txt", "1\n1\n");
    write(dir.path / "Z_graph_labels.txt", "0\n");
    try {
        load_tu_dataset(dir.path.string(), "Z");
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::MalformedLine);
        CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
}

TEST_CASE("edges across graph boundaries report DanglingEdge") {
    TempDir dir("spin_tu_dangling");
    write(dir.path / "D_A.txt", "1, 2\n2, 3\n");
    write(dir.path / "D_graph_indicator.txt", "1\n1\n2\n");
    write(dir.path / "D_graph_labels.txt", "0\n1\n");
    try {
        load_tu_dataset(dir.path.string(), "D");
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::DanglingEdge);
    }
}

TEST_CASE("non-integer tokens report MalformedLine with line number") {
    TempDir dir("spin_tu_malformed");
    write(dir.path / "M_A.txt", "1, 2\nx, 2\n");
    write(dir.path / "M_graph_indicator.txt", "1\n1\n");
    write(dir.path / "M_graph_labels.txt", "0\n");
    try {
        load_tu_dataset(dir.path.string(), "M");
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::MalformedLine);
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
}

TEST_CASE("windows line endings and blank trailing lines are tolerated") {
    TempDir dir("spin_tu_crlf");
    write(dir.path / "W_A.txt", "1, 2\r\n2, 1\r\n\r\n");
    write(dir.path / "W_graph_indicator.txt", "1\r\n1\r\n");
    write(dir.path / "W_graph_labels.txt", "3\r\n");
    Dataset ds = load_tu_dataset(dir.path.string(), "W");
    CHECK(ds.graphs.size() == 1);
    CHECK(ds.graphs[0].edges.size() == 1);
    CHECK(ds.graphs[0].label == 0);
}

TEST_CASE("one-hot node label features") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    build_features(ds, FeatureScheme::OneHotNodeLabel);
    CHECK(ds.graphs[0].features.cols == 3); // vocab {0,1,2}
    CHECK(ds.graphs[0].features(0, 0) == 1.0);
    CHECK(ds.graphs[0].features(1, 1) == 1.0);
    CHECK(ds.graphs[1].features(0, 2) == 1.0);
}

TEST_CASE("attributes plus one-hot concatenate to 18+vocab style widths") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    build_features(ds, FeatureScheme::AttributesPlusOneHot);
    CHECK(ds.graphs[0].features.cols == 2 + 3);
    CHECK(ds.graphs[0].features(0, 0) == 0.5); // attribute first
    CHECK(ds.graphs[0].features(0, 2) == 1.0); // then the one-hot
}

TEST_CASE("degree features work without label files") {
    TempDir dir("spin_tu_degree");
    write(dir.path / "G_A.txt", "1, 2\n2, 1\n1, 3\n3, 1\n");
    write(dir.path / "G_graph_indicator.txt", "1\n1\n1\n");
    write(dir.path / "G_graph_labels.txt", "0\n");
    Dataset ds = load_tu_dataset(dir.path.string(), "G");
    build_features(ds, FeatureScheme::DegreeOneHot);
    CHECK(ds.graphs[0].features.cols == 3); // max degree 2 -> bins {0,1,2}
    CHECK(ds.graphs[0].features(0, 2) == 1.0);
    CHECK(ds.graphs[0].features(1, 1) == 1.0);

    // label-based schemes are unavailable here
    try {
        build_features(ds, FeatureScheme::OneHotNodeLabel);
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::SchemeUnavailable);
    }
}

TEST_CASE("loader round trip preserves structure") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    TempDir dir("spin_tu_roundtrip");
    save_tu_dataset(ds, dir.path.string(), "TOY5");
    Dataset back = load_tu_dataset(dir.path.string(), "TOY5");
    REQUIRE(back.graphs.size() == ds.graphs.size());
    for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
        CHECK(back.graphs[g].node_count == ds.graphs[g].node_count);
        CHECK(back.graphs[g].edges == ds.graphs[g].edges);
        CHECK(back.graphs[g].label == ds.graphs[g].label);
    }
    CHECK(back.node_labels == ds.node_labels);
    REQUIRE(back.has_node_attributes());
    for (std::size_t g = 0; g < ds.graphs.size(); ++g)
        CHECK(max_abs_diff(back.node_attributes[g], ds.node_attributes[g]) == 0.0);
}

namespace {

Dataset synthetic_labeled(std::size_t per_class, std::size_t classes) {
    Dataset ds;
    ds.name = "SYN";
    ds.num_classes = classes;
    Rng rng(111);
    for (std::size_t c = 0; c < classes; ++c)
        for (std::size_t i = 0; i < per_class; ++i) {
            Graph g = erdos_renyi(4 + rng.next_below(4), 0.5, rng);
            g.label = static_cast<int>(c);
            ds.graphs.push_back(std::move(g));
        }
    // interleave so class blocks are not contiguous
    Rng shuffle_rng(7);
    shuffle_rng.shuffle(ds.graphs);
    return ds;
}

} // namespace

TEST_CASE("stratified folds: balanced classes split exactly") {
    Dataset ds = synthetic_labeled(50, 2); // 100 graphs
    FoldPlan plan = stratified_kfold(ds, 10, 5);
    REQUIRE(plan.folds.size() == 10);
    for (const auto& fold : plan.folds) {
        CHECK(fold.test.size() == 10);
        std::size_t c0 = 0;
        for (auto i : fold.test)
            if (ds.graphs[i].label == 0) ++c0;
        CHECK(c0 == 5);
    }
}

TEST_CASE("folds partition the dataset and roles never overlap") {
    Dataset ds = synthetic_labeled(21, 3); // 63 graphs, odd sizes
    FoldPlan plan = stratified_kfold(ds, 5, 9);
    std::vector<int> seen(ds.graphs.size(), 0);
    for (const auto& fold : plan.folds) {
        std::vector<int> role(ds.graphs.size(), 0);
        for (auto i : fold.test) {
            ++seen[i];
            ++role[i];
        }
        for (auto i : fold.train) ++role[i];
        for (auto i : fold.val) ++role[i];
        for (auto r : role) CHECK(r <= 1);
        CHECK(fold.train.size() + fold.val.size() + fold.test.size() == ds.graphs.size());
        CHECK(!fold.val.empty());
    }
    for (auto s : seen) CHECK(s == 1); // test sets partition
}

TEST_CASE("per-fold class histogram deviates from proportional by at most one") {
    Dataset ds = synthetic_labeled(23, 2);
    FoldPlan plan = stratified_kfold(ds, 4, 3);
    for (const auto& fold : plan.folds) {
        std::size_t c0 = 0;
        for (auto i : fold.test)
            if (ds.graphs[i].label == 0) ++c0;
        // 23 per class over 4 folds: 5 or 6 each
        CHECK(c0 >= 5);
        CHECK(c0 <= 6);
    }
}

TEST_CASE("same seed gives the same plan, different seed a different one") {
    Dataset ds = synthetic_labeled(20, 2);
    FoldPlan a = stratified_kfold(ds, 5, 42);
    FoldPlan b = stratified_kfold(ds, 5, 42);
    FoldPlan c = stratified_kfold(ds, 5, 43);
    bool same = true, all_same = true;
    for (std::size_t f = 0; f < a.folds.size(); ++f) {
        same = same && a.folds[f].test == b.folds[f].test &&
               a.folds[f].train == b.folds[f].train && a.folds[f].val == b.folds[f].val;
        all_same = all_same && a.folds[f].test == c.folds[f].test;
    }
    CHECK(same);
    CHECK_FALSE(all_same);
}

TEST_CASE("too-small classes are rejected") {
    Dataset ds = synthetic_labeled(3, 2);
    try {
        stratified_kfold(ds, 5, 1);
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::TooFewSamples);
    }
}

TEST_CASE("fold plan exports as json") {
    Dataset ds = synthetic_labeled(10, 2);
    FoldPlan plan = stratified_kfold(ds, 2, 0);
    auto json = fold_plan_to_json(plan);
    CHECK(json.find("{\"seed\":0,\"folds\":[{\"train\":[") == 0);
    CHECK(json.back() == '}');
}

TEST_CASE("bank cache round trip is bit identical") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    build_features(ds, FeatureScheme::OneHotNodeLabel);
    auto graphs = precompute_dataset(ds, OperatorKind::NormalizedAdjacency, 3);

    TempDir dir("spin_bank_cache");
    std::string path = (dir.path / "toy.spinbank").string();
    save_bank_cache(path, graphs);
    auto back = load_bank_cache(path);
    REQUIRE(back.size() == graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        CHECK(back[i].label == graphs[i].label);
        REQUIRE(back[i].bank.matrices.size() == graphs[i].bank.matrices.size());
        for (std::size_t r = 0; r < graphs[i].bank.matrices.size(); ++r) {
            const auto& a = graphs[i].bank.matrices[r];
            const auto& b = back[i].bank.matrices[r];
            REQUIRE(a.same_shape(b));
            for (std::size_t x = 0; x < a.data.size(); ++x) CHECK(a.data[x] == b.data[x]);
        }
    }
}

TEST_CASE("bank cache header starts with the magic and rejects corruption") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    build_features(ds, FeatureScheme::DegreeOneHot);
    auto graphs = precompute_dataset(ds, OperatorKind::Adjacency, 0);

    TempDir dir("spin_bank_magic");
    std::string path = (dir.path / "toy.spinbank").string();
    save_bank_cache(path, graphs);
    {
        std::ifstream in(path, std::ios::binary);
        char magic[8];
        in.read(magic, 8);
        CHECK(std::string(magic, 8) == "SPINBANK");
    }
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(8);
        std::uint32_t bad_version = 999;
        f.write(reinterpret_cast<const char*>(&bad_version), 4);
    }
    try {
        load_bank_cache(path);
        FAIL("expected TuError");
    } catch (const TuError& e) {
        CHECK(e.kind == TuError::Kind::VersionMismatch);
    }
}

TEST_CASE("r zero cache holds only the features") {
    Dataset ds = load_tu_dataset(kDataDir + "/TOY5", "TOY5");
    build_features(ds, FeatureScheme::DegreeOneHot);
    auto graphs = precompute_dataset(ds, OperatorKind::Adjacency, 0);
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        REQUIRE(graphs[i].bank.matrices.size() == 1);
        CHECK(max_abs_diff(graphs[i].bank.matrices[0], ds.graphs[i].features) == 0.0);
    }
}

TEST_CASE("threaded precompute matches the serial result") {
    Dataset ds = synthetic_labeled(12, 2);
    for (auto& g : ds.graphs) g.features = uniform_features(g.node_count, 2, 0.5);
    auto serial = precompute_dataset(ds, OperatorKind::NormalizedAdjacency, 2, 1);
    auto threaded = precompute_dataset(ds, OperatorKind::NormalizedAdjacency, 2, 4);
    REQUIRE(serial.size() == threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i)
        for (std::size_t r = 0; r < 3; ++r)
            CHECK(max_abs_diff(serial[i].bank.matrices[r], threaded[i].bank.matrices[r]) == 0.0);
}
