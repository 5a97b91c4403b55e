#include "spin/bench.hpp"
#include "spin/lab.hpp"
#include "spin/train.hpp"
#include "spin/wl.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace spin;

Graph read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TuError(TuError::Kind::MissingFile, "cannot open edge list: " + path);
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m))
        throw TuError(TuError::Kind::MalformedLine, path + ":1: expected 'N M'");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < m; ++i) {
        long u, v;
        if (!(in >> u >> v))
            throw TuError(TuError::Kind::MalformedLine,
                          path + ": edge " + std::to_string(i + 1) + " malformed");
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
            static_cast<std::size_t>(v) >= n)
            throw TuError(TuError::Kind::DanglingEdge,
                          path + ": edge " + std::to_string(i + 1) + " out of range");
        edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
    Graph g = make_graph(n, std::move(edges));
    g.features = uniform_features(n);
    return g;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw TuError(TuError::Kind::IoError, "cannot write: " + path);
    out << content;
}

struct DataOptions {
    std::string dir = ".";
    std::string dataset;
    std::string scheme = "degree";
    std::string bank_file; // load banks instead of raw TU files
    std::size_t degree_cap = 500;
};

struct LoadedData {
    std::vector<PrecomputedGraph> graphs;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
};

LoadedData load_data(const DataOptions& opts, OperatorKind op, std::size_t r_depth,
                     std::size_t threads) {
    LoadedData out;
    if (!opts.bank_file.empty()) {
        out.graphs = load_bank_cache(opts.bank_file);
        if (out.graphs.empty())
            throw TuError(TuError::Kind::IoError, "empty bank cache: " + opts.bank_file);
        if (out.graphs.front().bank.depth() < r_depth)
            throw TuError(TuError::Kind::VersionMismatch,
                          "bank cache depth is smaller than requested R");
        out.input_dim = out.graphs.front().bank.matrices[0].cols;
    } else {
        Dataset ds = load_tu_dataset(opts.dir, opts.dataset);
        build_features(ds, feature_scheme_from_string(opts.scheme), opts.degree_cap);
        out.graphs = precompute_dataset(ds, op, r_depth, threads);
        out.input_dim = ds.graphs.front().features.cols;
    }
    int max_label = 0;
    for (const auto& pg : out.graphs) max_label = std::max(max_label, pg.label);
    out.num_classes = static_cast<std::size_t>(max_label) + 1;
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoul(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"SPIN graph classification toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool deterministic = false;
    app.add_option("--seed", seed, "run seed; all randomness derives from it");
    app.add_option("--threads", threads, "worker thread cap");
    app.add_flag("--deterministic", deterministic, "single-threaded fixed-order reductions");

    DataOptions data;
    SpinConfig model;
    TrainConfig tc;
    std::string config_file;
    std::string op_name = "normalized";
    std::string readout_name = "sum";
    std::string attention = "on";

    auto add_data_flags = [&](CLI::App* sub) {
        sub->add_option("--dir", data.dir, "dataset directory");
        sub->add_option("--dataset", data.dataset, "dataset name (TU layout)");
        sub->add_option("--scheme", data.scheme, "feature scheme: degree|onehot|attributes+onehot");
        sub->add_option("--bank", data.bank_file, "load a precomputed SPINBANK cache");
        sub->add_option("--degree-cap", data.degree_cap, "degree one-hot clamp bound");
    };
    auto add_model_flags = [&](CLI::App* sub) {
        sub->add_option("--R", model.r_depth, "operator power depth (R+1 branches)");
        sub->add_option("--operator", op_name, "adjacency|normalized|normalized-plus-adjacency");
        sub->add_option("--dim", model.hidden_dim, "branch embedding width d'");
        sub->add_option("--g-layers", model.g_layers, "branch MLP depth");
        sub->add_option("--attention", attention, "on|off")
            ->check(CLI::IsMember({"on", "off"}));
        sub->add_option("--dropout", model.dropout_rate, "dropout rate");
        sub->add_option("--classifier-layers", model.classifier_layers, "classifier MLP depth");
        sub->add_option("--readout", readout_name, "sum|mean|max (mean/max for demos)");
        sub->add_option("--config", config_file, "key = value config file");
    };
    auto add_train_flags = [&](CLI::App* sub) {
        sub->add_option("--batch", tc.batch_size, "minibatch size");
        sub->add_option("--lr", tc.learning_rate, "Adam learning rate");
        sub->add_option("--epochs", tc.max_epochs, "epoch cap");
        sub->add_option("--patience", tc.patience, "early stopping patience");
        sub->add_option("--l2", tc.l2, "L2 regularization weight");
        sub->add_option("--repeats", tc.repeats_per_fold, "trainings per fold");
    };

    // precedence: defaults < flags < config file < explicit --seed;
    // data-derived dimensions are always taken from the dataset
    auto finalize_settings = [&]() {
        model.op = operator_kind_from_string(op_name);
        model.readout = readout_from_string(readout_name);
        model.attention = attention == "on";
        if (!config_file.empty()) {
            auto kv = load_key_values(config_file);
            apply_key_values(model, kv);
            apply_key_values(tc, kv);
        }
        if (app.count("--seed") || tc.seed == 0) tc.seed = seed;
        if (deterministic) threads = 1;
    };

    // --- precompute ---
    auto* pre = app.add_subcommand("precompute", "build and cache the operator-power features");
    std::string pre_out = "bank.spinbank";
    std::size_t pre_r = 3;
    std::string pre_op = "normalized";
    add_data_flags(pre);
    pre->add_option("--R", pre_r, "operator power depth");
    pre->add_option("--operator", pre_op, "operator kind");
    pre->add_option("--out", pre_out, "output cache file");
    pre->callback([&] {
        Dataset ds = load_tu_dataset(data.dir, data.dataset);
        build_features(ds, feature_scheme_from_string(data.scheme), data.degree_cap);
        auto graphs =
            precompute_dataset(ds, operator_kind_from_string(pre_op), pre_r, threads);
        save_bank_cache(pre_out, graphs);
        std::cout << "cached " << graphs.size() << " graphs (R=" << pre_r
                  << ", d=" << graphs.front().bank.matrices[0].cols << ") to " << pre_out
                  << "\n";
    });

    // --- train ---
    auto* tr = app.add_subcommand("train", "train one model on a 90/10 split");
    std::string tr_out = "spin";
    add_data_flags(tr);
    add_model_flags(tr);
    add_train_flags(tr);
    tr->add_option("--out", tr_out, "output prefix (.ckpt, .curve.csv)");
    tr->callback([&] {
        finalize_settings();
        LoadedData ld = load_data(data, model.op, model.r_depth, threads);
        model.input_dim = ld.input_dim;
        model.num_classes = ld.num_classes;

        // stratified 90/10 split via a 10-fold plan's first fold
        Dataset labels_only;
        labels_only.name = data.dataset;
        labels_only.num_classes = ld.num_classes;
        labels_only.graphs.resize(ld.graphs.size());
        for (std::size_t i = 0; i < ld.graphs.size(); ++i)
            labels_only.graphs[i].label = ld.graphs[i].label;
        FoldPlan plan = stratified_kfold(labels_only, 10, tc.seed);
        std::vector<std::size_t> train_idx = plan.folds[0].train;
        train_idx.insert(train_idx.end(), plan.folds[0].test.begin(), plan.folds[0].test.end());
        std::sort(train_idx.begin(), train_idx.end());

        TrainResult res = train_model(model, select(ld.graphs, train_idx),
                                      select(ld.graphs, plan.folds[0].val), tc);
        save_checkpoint(tr_out + ".ckpt", model, res.best_params);
        write_file(tr_out + ".curve.csv", res.curve.to_csv());
        std::cout << "best validation accuracy " << res.best_val_acc << " after "
                  << res.epochs_run << " epochs; checkpoint " << tr_out << ".ckpt\n";
    });

    // --- cv ---
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation");
    std::size_t folds = 10;
    bool grid = false;
    bool want_auroc = false;
    std::string grid_r = "2,3", grid_dim = "8,16,32", grid_batch = "16,32";
    std::string cv_out = "cv.csv";
    std::string folds_out;
    add_data_flags(cv);
    add_model_flags(cv);
    add_train_flags(cv);
    cv->add_option("--folds", folds, "number of folds");
    cv->add_flag("--grid", grid, "select per fold over a hyperparameter grid");
    cv->add_option("--grid-r", grid_r, "grid: comma list of R values");
    cv->add_option("--grid-dim", grid_dim, "grid: comma list of d' values");
    cv->add_option("--grid-batch", grid_batch, "grid: comma list of batch sizes");
    cv->add_flag("--auroc", want_auroc, "report AUROC (binary tasks)");
    cv->add_option("--out", cv_out, "per-fold CSV output");
    cv->add_option("--folds-out", folds_out, "write the fold plan as JSON");
    cv->callback([&] {
        finalize_settings();
        std::size_t max_r = model.r_depth;
        std::vector<std::size_t> r_list{model.r_depth}, dim_list{model.hidden_dim},
            batch_list{tc.batch_size};
        if (grid) {
            r_list = parse_size_list(grid_r);
            dim_list = parse_size_list(grid_dim);
            batch_list = parse_size_list(grid_batch);
            for (auto r : r_list) max_r = std::max(max_r, r);
        }
        LoadedData ld = load_data(data, model.op, max_r, threads);
        model.input_dim = ld.input_dim;
        model.num_classes = ld.num_classes;

        Dataset labels_only;
        labels_only.name = data.dataset;
        labels_only.num_classes = ld.num_classes;
        labels_only.graphs.resize(ld.graphs.size());
        for (std::size_t i = 0; i < ld.graphs.size(); ++i)
            labels_only.graphs[i].label = ld.graphs[i].label;
        FoldPlan plan = stratified_kfold(labels_only, folds, tc.seed);
        if (!folds_out.empty()) write_file(folds_out, fold_plan_to_json(plan));

        std::vector<GridCandidate> candidates;
        for (auto r : r_list)
            for (auto d : dim_list)
                for (auto b : batch_list) {
                    GridCandidate c{model, tc};
                    c.model.r_depth = r;
                    c.model.hidden_dim = d;
                    c.train.batch_size = b;
                    candidates.push_back(std::move(c));
                }

        CvResult res = cross_validate_grid(ld.graphs, plan, candidates, want_auroc, threads);
        write_file(cv_out, res.to_csv());
        std::cout << res.summary() << "\n";
    });

    // --- wl-test ---
    auto* wl = app.add_subcommand("wl-test", "joint 1-WL refinement of two edge-list graphs");
    std::string g1_path, g2_path;
    std::size_t max_iters = 0;
    bool uniform_init = false;
    wl->add_option("--g1", g1_path, "first graph (edge-list: 'N M' then 'u v' lines)")
        ->required();
    wl->add_option("--g2", g2_path, "second graph")->required();
    wl->add_option("--max-iters", max_iters, "iteration cap (default max node count)");
    wl->add_flag("--uniform-init", uniform_init, "ignore features, start from one color");
    wl->callback([&] {
        Graph g1 = read_edge_list(g1_path);
        Graph g2 = read_edge_list(g2_path);
        std::size_t iters = max_iters ? max_iters : std::max(g1.node_count, g2.node_count);
        WlVerdict v = wl_distinguish(g1, g2, iters, !uniform_init);
        if (v.distinguished)
            std::cout << "distinguished at iteration " << v.iteration << "\n";
        else
            std::cout << "possibly isomorphic (refinement stable)\n";
    });

    // --- lemmas ---
    auto* lm = app.add_subcommand("lemmas", "readout/attention property demos");
    int which = 0;
    std::size_t trials = 10000, dim = 8;
    std::size_t n1 = 6, n2 = 3, k_reg = 2;
    std::string lemma_out;
    lm->add_option("--which", which, "1, 2, or 3")->required();
    lm->add_option("--trials", trials, "probe trials (lemma 2)");
    lm->add_option("--dim", dim, "embedding dim (lemma 2)");
    lm->add_option("--n1", n1, "first regular graph size (lemma 3)");
    lm->add_option("--n2", n2, "second regular graph size (lemma 3)");
    lm->add_option("--k", k_reg, "regular degree (lemma 3)");
    lm->add_option("--out", lemma_out, "CSV output path");
    lm->callback([&] {
        std::ostringstream csv;
        if (which == 1) {
            std::vector<std::vector<double>> maps;
            Rng rng(seed);
            for (int i = 0; i < 100; ++i) maps.push_back({rng.uniform(-2.0, 2.0)});
            auto relu_rep = lemma1_demo(maps, Activation::ReLU);
            auto leaky_rep = lemma1_demo(maps, Activation::LeakyReLU);
            std::cout << "lemma 1: weighted ReLU sums over {2,1,4}/{6,4} with " << maps.size()
                      << " random maps: " << relu_rep.violations << " separations (ReLU), "
                      << leaky_rep.violations << " (LeakyReLU)\n";
            csv << relu_rep.to_csv();
        } else if (which == 2) {
            Rng rng(seed);
            auto rep = lemma2_probe(trials, dim, rng);
            std::cout << "lemma 2: " << rep.instances << " attention trials, "
                      << rep.violations << " injectivity violations\n";
            csv << rep.to_csv();
        } else if (which == 3) {
            for (auto readout : {ReadoutKind::Mean, ReadoutKind::Max, ReadoutKind::Sum}) {
                auto res = lemma3_demo(n1, n2, k_reg, readout, seed);
                std::cout << "lemma 3: " << to_string(readout) << " readout on " << k_reg
                          << "-regular graphs (" << n1 << ", " << n2
                          << " nodes): |delta|_inf = " << res.max_abs_diff
                          << ", norm ratio = " << res.norm_ratio << "\n";
                csv << res.report.to_csv();
            }
        } else {
            throw CLI::ValidationError("--which must be 1, 2, or 3");
        }
        if (!lemma_out.empty()) write_file(lemma_out, csv.str());
    });

    // --- power ---
    auto* pw = app.add_subcommand("power", "refinement-vs-embedding separation experiment");
    std::size_t pairs = 500, max_nodes = 8;
    double tau = 1e-6;
    std::string power_out;
    pw->add_option("--pairs", pairs, "refinement-separated pairs to test");
    pw->add_option("--max-nodes", max_nodes, "node cap for sampled graphs");
    pw->add_option("--tau", tau, "embedding separation threshold");
    pw->add_option("--out", power_out, "CSV output path");
    pw->callback([&] {
        PowerReport rep = theorem1_experiment(pairs, max_nodes, tau, seed);
        std::cout << "power: " << rep.model_distinguished << "/" << rep.wl_distinguished
                  << " refinement-separated pairs also separated by the model (agreement "
                  << rep.agreement_rate() << "); " << rep.model_only << "/" << rep.wl_blind
                  << " separated among refinement-blind pairs\n";
        if (!power_out.empty()) write_file(power_out, rep.to_csv());
    });

    // --- bench ---
    auto* bn = app.add_subcommand("bench", "epoch-time independence from edge density");
    std::size_t b_nodes = 200, b_dim = 16, b_r = 3, b_epochs = 5, b_graphs = 48;
    std::string densities = "0.05,0.5";
    std::string bench_out;
    bn->add_option("--nodes", b_nodes, "nodes per synthetic graph");
    bn->add_option("--feat-dim", b_dim, "synthetic feature width");
    bn->add_option("--R", b_r, "operator power depth");
    bn->add_option("--densities", densities, "comma list of edge densities");
    bn->add_option("--epochs", b_epochs, "timed epochs per density (after one warm-up)");
    bn->add_option("--graphs", b_graphs, "graphs per density");
    bn->add_option("--out", bench_out, "CSV output path");
    bn->callback([&] {
        BenchReport rep = bench_edge_independence(b_nodes, b_dim, b_r,
                                                  parse_double_list(densities), b_epochs,
                                                  b_graphs, seed);
        for (const auto& row : rep.rows)
            std::cout << "density " << row.density << ": precompute " << row.precompute_seconds
                      << " s, epoch median " << row.epoch_seconds_median << " s\n";
        std::cout << "epoch-time ratio densest/sparsest: " << rep.epoch_time_ratio() << "\n";
        if (!bench_out.empty()) write_file(bench_out, rep.to_csv());
    });

    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough(); // global flags (--seed etc.) may follow the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const spin::NonFiniteLossError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const spin::TuError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
