#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// End-to-end checks of the installed binary: exit codes, output files,
// byte-identical reruns under a fixed seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

#ifndef SPIN_BIN
#define SPIN_BIN "spin"
#endif
#ifndef TEST_DATA_DIR
#define TEST_DATA_DIR "tests/data"
#endif

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cmd(const std::string& args, std::string* out = nullptr) {
    std::string cmd = std::string(SPIN_BIN) + " " + args;
    if (out) {
        fs::path tmp = fs::temp_directory_path() / "spin_cli_out.txt";
        cmd += " > " + tmp.string() + " 2>&1";
        int rc = std::system(cmd.c_str());
        std::ifstream in(tmp);
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
        fs::remove(tmp);
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }
    cmd += " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

// cycles (label 0) vs stars (label 1) in TU text layout
void write_cstar(const fs::path& dir, std::size_t per_class) {
    std::ostringstream A, ind, labels;
    std::size_t next_id = 1;
    std::size_t graph_id = 0;
    auto emit_cycle = [&](std::size_t n) {
        ++graph_id;
        for (std::size_t v = 0; v < n; ++v) {
            ind << graph_id << '\n';
            std::size_t u = next_id + v, w = next_id + (v + 1) % n;
            A << u << ", " << w << '\n' << w << ", " << u << '\n';
        }
        labels << 0 << '\n';
        next_id += n;
    };
    auto emit_star = [&](std::size_t leaves) {
        ++graph_id;
        for (std::size_t v = 0; v <= leaves; ++v) ind << graph_id << '\n';
        for (std::size_t v = 1; v <= leaves; ++v)
            A << next_id << ", " << (next_id + v) << '\n'
              << (next_id + v) << ", " << next_id << '\n';
        labels << 1 << '\n';
        next_id += leaves + 1;
    };
    for (std::size_t i = 0; i < per_class; ++i) {
        emit_cycle(4 + i);
        emit_star(3 + i);
    }
    write(dir / "CSTAR_A.txt", A.str());
    write(dir / "CSTAR_graph_indicator.txt", ind.str());
    write(dir / "CSTAR_graph_labels.txt", labels.str());
}

} // namespace

TEST_CASE("help exits zero on every subcommand") {
    CHECK(run_cmd("--help") == 0);
    for (const char* sub :
         {"precompute", "train", "cv", "wl-test", "lemmas", "power", "bench"})
        CHECK(run_cmd(std::string(sub) + " --help") == 0);
}

TEST_CASE("unknown flags exit with the usage code") {
    CHECK(run_cmd("lemmas --which 1 --no-such-flag") == 1);
    CHECK(run_cmd("frobnicate") == 1);
}

TEST_CASE("wl-test reads edge lists and prints the verdict") {
    TempDir dir("spin_cli_wl");
    // C6 vs two triangles: blind spot
    write(dir.path / "c6.edges", "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    write(dir.path / "2c3.edges", "6 6\n0 1\n1 2\n2 0\n3 4\n4 5\n5 3\n");
    std::string out;
    int rc = run_cmd("wl-test --g1 " + (dir.path / "c6.edges").string() + " --g2 " +
                         (dir.path / "2c3.edges").string(),
                     &out);
    CHECK(rc == 0);
    CHECK(out.find("possibly isomorphic") != std::string::npos);

    write(dir.path / "s3.edges", "4 3\n0 1\n0 2\n0 3\n");
    write(dir.path / "p4.edges", "4 3\n0 1\n1 2\n2 3\n");
    rc = run_cmd("wl-test --g1 " + (dir.path / "s3.edges").string() + " --g2 " +
                     (dir.path / "p4.edges").string(),
                 &out);
    CHECK(rc == 0);
    CHECK(out.find("distinguished at iteration 1") != std::string::npos);
}

TEST_CASE("wl-test on a malformed edge list exits with the data code") {
    TempDir dir("spin_cli_badedges");
    write(dir.path / "bad.edges", "3 1\n0 7\n");
    std::string p = (dir.path / "bad.edges").string();
    CHECK(run_cmd("wl-test --g1 " + p + " --g2 " + p) == 2);
    CHECK(run_cmd("wl-test --g1 no_such_file --g2 " + p) == 2);
}

TEST_CASE("lemma demo prints the collision and separation report") {
    std::string out;
    int rc = run_cmd("lemmas --which 3 --n1 6 --n2 3 --k 2", &out);
    CHECK(rc == 0);
    CHECK(out.find("mean readout") != std::string::npos);
    CHECK(out.find("norm ratio = 2") != std::string::npos);
}

TEST_CASE("power subcommand writes a csv report, byte-identical per seed") {
    TempDir dir("spin_cli_power");
    fs::path csv = dir.path / "power.csv";
    fs::path csv2 = dir.path / "power2.csv";
    int rc = run_cmd("power --pairs 40 --max-nodes 6 --seed 9 --out " + csv.string());
    CHECK(rc == 0);
    std::string content = slurp(csv);
    CHECK(content.find("pairs_tested") == 0);
    CHECK(run_cmd("power --pairs 40 --max-nodes 6 --seed 9 --out " + csv2.string()) == 0);
    CHECK(slurp(csv2) == content);
}

TEST_CASE("precompute then cv from the cached bank, byte-identical reruns") {
    TempDir dir("spin_cli_cv");
    fs::path bank = dir.path / "toy.spinbank";
    write_cstar(dir.path, 10);

    int rc = run_cmd("precompute --dir " + dir.path.string() +
                     " --dataset CSTAR --scheme degree --operator adjacency --R 2 --out " +
                     bank.string());
    CHECK(rc == 0);

    fs::path cv1 = dir.path / "cv1.csv";
    fs::path cv2 = dir.path / "cv2.csv";
    std::string common = "cv --bank " + bank.string() +
                         " --operator adjacency --R 2 --dim 8 --attention off --dropout 0"
                         " --folds 4 --repeats 2 --batch 4 --lr 0.01 --epochs 30"
                         " --patience 10 --seed 17 --deterministic";
    std::string out1, out2;
    CHECK(run_cmd(common + " --out " + cv1.string(), &out1) == 0);
    CHECK(run_cmd(common + " --out " + cv2.string(), &out2) == 0);
    CHECK(slurp(cv1) == slurp(cv2)); // byte-identical rerun
    CHECK(out1 == out2);

    // the toy set is separable; the mean should be high even with the
    // tiny validation splits steering early stopping
    auto pos = out1.find("mean accuracy ");
    REQUIRE(pos != std::string::npos);
    double mean = std::stod(out1.substr(pos + 14));
    CHECK(mean >= 90.0);
}

TEST_CASE("missing dataset directory exits with the data code") {
    CHECK(run_cmd("cv --dir /nonexistent --dataset NOPE") == 2);
    CHECK(run_cmd("precompute --dir /nonexistent --dataset NOPE") == 2);
}

TEST_CASE("train writes a checkpoint and a curve csv") {
    TempDir dir("spin_cli_train");
    write_cstar(dir.path, 10);
    std::string out;
    int rc = run_cmd("train --dir " + dir.path.string() +
                         " --dataset CSTAR --scheme degree --operator adjacency"
                         " --R 2 --dim 8 --attention off --dropout 0 --batch 4 --lr 0.01"
                         " --epochs 20 --patience 20 --seed 3 --out " +
                         (dir.path / "toy").string(),
                     &out);
    INFO(out);
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "toy.ckpt"));
    CHECK(slurp(dir.path / "toy.curve.csv").find("epoch,train_loss,val_acc") == 0);

    // a dataset too small for the inner split exits with the data code
    rc = run_cmd(std::string("train --dir ") + TEST_DATA_DIR +
                 "/TOY5 --dataset TOY5 --scheme onehot --R 1 --dim 4 --attention off"
                 " --batch 2 --lr 0.01 --epochs 2 --seed 3 --out " +
                 (dir.path / "tiny").string());
    CHECK(rc == 2);
}

TEST_CASE("model and training settings load from a config file") {
    TempDir dir("spin_cli_config");
    write_cstar(dir.path, 10); // the inner split needs 10 per class
    write(dir.path / "run.conf",
          "# toy run\n"
          "R = 2\n"
          "hidden_dim = 8\n"
          "attention = off\n"
          "dropout = 0\n"
          "batch_size = 4\n"
          "learning_rate = 0.01\n"
          "max_epochs = 15\n"
          "patience = 15\n");
    std::string out;
    int rc = run_cmd("train --dir " + dir.path.string() +
                         " --dataset CSTAR --scheme degree --operator adjacency --R 2"
                         " --config " + (dir.path / "run.conf").string() + " --seed 5 --out " +
                         (dir.path / "cfg").string(),
                     &out);
    INFO(out);
    CHECK(rc == 0);
    CHECK(fs::exists(dir.path / "cfg.ckpt"));
}
