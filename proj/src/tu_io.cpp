#include "spin/tu_io.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

namespace spin {

std::string to_string(FeatureScheme s) {
    switch (s) {
        case FeatureScheme::OneHotNodeLabel: return "onehot";
        case FeatureScheme::DegreeOneHot: return "degree";
        case FeatureScheme::AttributesPlusOneHot: return "attributes+onehot";
    }
    return "?";
}

FeatureScheme feature_scheme_from_string(const std::string& s) {
    if (s == "onehot" || s == "label") return FeatureScheme::OneHotNodeLabel;
    if (s == "degree") return FeatureScheme::DegreeOneHot;
    if (s == "attributes+onehot" || s == "attributes") return FeatureScheme::AttributesPlusOneHot;
    throw std::invalid_argument("unknown feature scheme: " + s);
}

namespace {

using Kind = TuError::Kind;

std::vector<std::string> read_lines(const std::string& path, bool required) {
    std::ifstream in(path);
    if (!in) {
        if (required) throw TuError(Kind::MissingFile, "missing file: " + path);
        return {};
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        lines.push_back(line);
    }
    // tolerate trailing blank lines
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos)
        lines.pop_back();
    return lines;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = s.find(',', start);
        out.push_back(s.substr(start, comma == std::string::npos ? comma : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

long parse_int(const std::string& tok, const std::string& file, std::size_t line_no) {
    std::size_t a = tok.find_first_not_of(" \t");
    std::size_t b = tok.find_last_not_of(" \t");
    if (a == std::string::npos)
        throw TuError(Kind::MalformedLine,
                      file + ":" + std::to_string(line_no) + ": empty integer field");
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data() + a, tok.data() + b + 1, value);
    if (ec != std::errc() || ptr != tok.data() + b + 1)
        throw TuError(Kind::MalformedLine, file + ":" + std::to_string(line_no) +
                                               ": expected integer, got '" + tok + "'");
    return value;
}

double parse_double(const std::string& tok, const std::string& file, std::size_t line_no) {
    std::size_t a = tok.find_first_not_of(" \t");
    std::size_t b = tok.find_last_not_of(" \t");
    if (a == std::string::npos)
        throw TuError(Kind::MalformedLine,
                      file + ":" + std::to_string(line_no) + ": empty float field");
    try {
        std::size_t used = 0;
        std::string sub = tok.substr(a, b - a + 1);
        double v = std::stod(sub, &used);
        if (used != sub.size())
            throw TuError(Kind::MalformedLine, file + ":" + std::to_string(line_no) +
                                                   ": expected float, got '" + tok + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw TuError(Kind::MalformedLine, file + ":" + std::to_string(line_no) +
                                               ": expected float, got '" + tok + "'");
    }
}

} // namespace

Dataset load_tu_dataset(const std::string& dir, const std::string& name) {
    std::string base = dir;
    if (!base.empty() && base.back() != '/') base += '/';
    base += name;

    auto indicator_lines = read_lines(base + "_graph_indicator.txt", true);
    auto label_lines = read_lines(base + "_graph_labels.txt", true);
    auto edge_lines = read_lines(base + "_A.txt", true);
    auto node_label_lines = read_lines(base + "_node_labels.txt", false);
    auto node_attr_lines = read_lines(base + "_node_attributes.txt", false);

    std::size_t total_nodes = indicator_lines.size();
    std::size_t graph_count = label_lines.size();
    if (graph_count == 0)
        throw TuError(Kind::MalformedLine, base + "_graph_labels.txt: no graphs");

    // node -> (graph, local index), nodes appear grouped per graph
    std::vector<std::uint32_t> node_graph(total_nodes);
    std::vector<std::uint32_t> node_local(total_nodes);
    std::vector<std::size_t> graph_sizes(graph_count, 0);
    std::string ind_file = base + "_graph_indicator.txt";
    for (std::size_t i = 0; i < total_nodes; ++i) {
        long gid = parse_int(indicator_lines[i], ind_file, i + 1);
        if (gid < 1 || static_cast<std::size_t>(gid) > graph_count)
            throw TuError(Kind::MalformedLine, ind_file + ":" + std::to_string(i + 1) +
                                                   ": graph id out of range");
        node_graph[i] = static_cast<std::uint32_t>(gid - 1);
        node_local[i] = static_cast<std::uint32_t>(graph_sizes[gid - 1]++);
    }

    Dataset ds;
    ds.name = name;
    ds.graphs.resize(graph_count);
    for (std::size_t g = 0; g < graph_count; ++g) {
        if (graph_sizes[g] == 0)
            throw TuError(Kind::MalformedLine,
                          ind_file + ": graph " + std::to_string(g + 1) + " has no nodes");
        ds.graphs[g].node_count = graph_sizes[g];
    }

    // labels, remapped to contiguous 0-based classes
    std::string lbl_file = base + "_graph_labels.txt";
    std::vector<long> raw_labels(graph_count);
    for (std::size_t g = 0; g < graph_count; ++g)
        raw_labels[g] = parse_int(label_lines[g], lbl_file, g + 1);
    std::vector<long> classes = raw_labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    ds.num_classes = classes.size();
    for (std::size_t g = 0; g < graph_count; ++g) {
        auto it = std::lower_bound(classes.begin(), classes.end(), raw_labels[g]);
        ds.graphs[g].label = static_cast<int>(it - classes.begin());
    }

    // edges
    std::string edge_file = base + "_A.txt";
    for (std::size_t i = 0; i < edge_lines.size(); ++i) {
        if (edge_lines[i].find_first_not_of(" \t") == std::string::npos) continue;
        auto toks = split_commas(edge_lines[i]);
        if (toks.size() != 2)
            throw TuError(Kind::MalformedLine, edge_file + ":" + std::to_string(i + 1) +
                                                   ": expected 'u, v'");
        long u = parse_int(toks[0], edge_file, i + 1);
        long v = parse_int(toks[1], edge_file, i + 1);
        if (u < 1 || v < 1 || static_cast<std::size_t>(u) > total_nodes ||
            static_cast<std::size_t>(v) > total_nodes)
            throw TuError(Kind::MalformedLine, edge_file + ":" + std::to_string(i + 1) +
                                                   ": node id out of range (ids are 1-indexed)");
        std::size_t un = static_cast<std::size_t>(u - 1);
        std::size_t vn = static_cast<std::size_t>(v - 1);
        if (node_graph[un] != node_graph[vn])
            throw TuError(Kind::DanglingEdge, edge_file + ":" + std::to_string(i + 1) +
                                                  ": edge references node outside its graph");
        ds.graphs[node_graph[un]].edges.emplace_back(node_local[un], node_local[vn]);
    }
    for (auto& g : ds.graphs) g.canonicalize_edges();

    // optional node labels
    if (!node_label_lines.empty()) {
        std::string nl_file = base + "_node_labels.txt";
        if (node_label_lines.size() != total_nodes)
            throw TuError(Kind::MalformedLine, nl_file + ": line count does not match node count");
        ds.node_labels.resize(graph_count);
        for (std::size_t g = 0; g < graph_count; ++g)
            ds.node_labels[g].resize(graph_sizes[g]);
        for (std::size_t i = 0; i < total_nodes; ++i)
            ds.node_labels[node_graph[i]][node_local[i]] =
                static_cast<int>(parse_int(node_label_lines[i], nl_file, i + 1));
    }

    // optional node attributes
    if (!node_attr_lines.empty()) {
        std::string na_file = base + "_node_attributes.txt";
        if (node_attr_lines.size() != total_nodes)
            throw TuError(Kind::MalformedLine, na_file + ": line count does not match node count");
        std::size_t width = split_commas(node_attr_lines[0]).size();
        ds.node_attributes.resize(graph_count);
        for (std::size_t g = 0; g < graph_count; ++g)
            ds.node_attributes[g] = DenseMatrix(graph_sizes[g], width);
        for (std::size_t i = 0; i < total_nodes; ++i) {
            auto toks = split_commas(node_attr_lines[i]);
            if (toks.size() != width)
                throw TuError(Kind::MalformedLine, na_file + ":" + std::to_string(i + 1) +
                                                       ": inconsistent attribute width");
            for (std::size_t j = 0; j < width; ++j)
                ds.node_attributes[node_graph[i]](node_local[i], j) =
                    parse_double(toks[j], na_file, i + 1);
        }
    }

    return ds;
}

void save_tu_dataset(const Dataset& ds, const std::string& dir, const std::string& name) {
    std::string base = dir;
    if (!base.empty() && base.back() != '/') base += '/';
    base += name;

    auto open = [](const std::string& path) {
        std::ofstream out(path);
        if (!out) throw TuError(Kind::IoError, "cannot write: " + path);
        return out;
    };

    // global 1-based node ids in graph order
    std::vector<std::size_t> first_id(ds.graphs.size() + 1, 0);
    for (std::size_t g = 0; g < ds.graphs.size(); ++g)
        first_id[g + 1] = first_id[g] + ds.graphs[g].node_count;

    {
        auto out = open(base + "_graph_indicator.txt");
        for (std::size_t g = 0; g < ds.graphs.size(); ++g)
            for (std::size_t v = 0; v < ds.graphs[g].node_count; ++v) out << (g + 1) << '\n';
    }
    {
        auto out = open(base + "_graph_labels.txt");
        for (const auto& g : ds.graphs) out << g.label.value_or(0) << '\n';
    }
    {
        auto out = open(base + "_A.txt");
        for (std::size_t g = 0; g < ds.graphs.size(); ++g)
            for (const auto& [u, v] : ds.graphs[g].edges) {
                out << (first_id[g] + u + 1) << ", " << (first_id[g] + v + 1) << '\n';
                out << (first_id[g] + v + 1) << ", " << (first_id[g] + u + 1) << '\n';
            }
    }
    if (ds.has_node_labels()) {
        auto out = open(base + "_node_labels.txt");
        for (const auto& labels : ds.node_labels)
            for (int l : labels) out << l << '\n';
    }
    if (ds.has_node_attributes()) {
        auto out = open(base + "_node_attributes.txt");
        out.precision(17);
        for (const auto& attrs : ds.node_attributes)
            for (std::size_t v = 0; v < attrs.rows; ++v) {
                for (std::size_t j = 0; j < attrs.cols; ++j)
                    out << (j ? ", " : "") << attrs(v, j);
                out << '\n';
            }
    }
}

void build_features(Dataset& ds, FeatureScheme scheme, std::size_t degree_cap) {
    ds.scheme = scheme;

    std::vector<int> vocab;
    if (scheme != FeatureScheme::DegreeOneHot) {
        if (!ds.has_node_labels())
            throw TuError(Kind::SchemeUnavailable,
                          ds.name + ": node label file required for scheme " + to_string(scheme));
        for (const auto& labels : ds.node_labels)
            vocab.insert(vocab.end(), labels.begin(), labels.end());
        std::sort(vocab.begin(), vocab.end());
        vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    }
    if (scheme == FeatureScheme::AttributesPlusOneHot && !ds.has_node_attributes())
        throw TuError(Kind::SchemeUnavailable,
                      ds.name + ": node attribute file required for scheme " + to_string(scheme));

    switch (scheme) {
        case FeatureScheme::OneHotNodeLabel: {
            for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
                Graph& gr = ds.graphs[g];
                gr.features = DenseMatrix(gr.node_count, vocab.size());
                for (std::size_t v = 0; v < gr.node_count; ++v) {
                    auto it = std::lower_bound(vocab.begin(), vocab.end(), ds.node_labels[g][v]);
                    gr.features(v, static_cast<std::size_t>(it - vocab.begin())) = 1.0;
                }
            }
            break;
        }
        case FeatureScheme::DegreeOneHot: {
            std::size_t max_deg = 1;
            for (const auto& g : ds.graphs)
                for (auto d : g.degrees()) max_deg = std::max(max_deg, d);
            max_deg = std::min(max_deg, degree_cap);
            for (auto& g : ds.graphs) g.features = degree_feature(g, max_deg);
            break;
        }
        case FeatureScheme::AttributesPlusOneHot: {
            std::size_t attr_dim = ds.node_attributes.front().cols;
            for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
                Graph& gr = ds.graphs[g];
                gr.features = DenseMatrix(gr.node_count, attr_dim + vocab.size());
                for (std::size_t v = 0; v < gr.node_count; ++v) {
                    for (std::size_t j = 0; j < attr_dim; ++j)
                        gr.features(v, j) = ds.node_attributes[g](v, j);
                    auto it = std::lower_bound(vocab.begin(), vocab.end(), ds.node_labels[g][v]);
                    gr.features(v, attr_dim + static_cast<std::size_t>(it - vocab.begin())) = 1.0;
                }
            }
            break;
        }
    }
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
    assert(k >= 2);
    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(k);

    std::vector<std::vector<std::size_t>> by_class(ds.num_classes);
    for (std::size_t i = 0; i < ds.graphs.size(); ++i)
        by_class[static_cast<std::size_t>(ds.graphs[i].label.value())].push_back(i);

    for (std::size_t c = 0; c < by_class.size(); ++c)
        if (by_class[c].size() < k)
            throw TuError(Kind::TooFewSamples, ds.name + ": class " + std::to_string(c) +
                                                   " has fewer than k=" + std::to_string(k) +
                                                   " samples");

    // deal shuffled class members round-robin into test folds
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        auto idx = by_class[c];
        Rng rng = Rng::derive(seed, c);
        rng.shuffle(idx);
        for (std::size_t i = 0; i < idx.size(); ++i) plan.folds[i % k].test.push_back(idx[i]);
    }

    for (std::size_t f = 0; f < k; ++f) {
        std::vector<bool> in_test(ds.graphs.size(), false);
        for (auto i : plan.folds[f].test) in_test[i] = true;
        std::vector<std::vector<std::size_t>> pool(ds.num_classes);
        for (std::size_t i = 0; i < ds.graphs.size(); ++i)
            if (!in_test[i]) pool[static_cast<std::size_t>(ds.graphs[i].label.value())].push_back(i);

        for (std::size_t c = 0; c < pool.size(); ++c) {
            auto idx = pool[c];
            Rng rng = Rng::derive(seed, 1000 + f * ds.num_classes + c);
            rng.shuffle(idx);
            std::size_t n_val = idx.size() >= 2
                                    ? std::max<std::size_t>(
                                          1, static_cast<std::size_t>(std::lround(
                                                 0.1 * static_cast<double>(idx.size()))))
                                    : 0;
            for (std::size_t i = 0; i < idx.size(); ++i)
                (i < n_val ? plan.folds[f].val : plan.folds[f].train).push_back(idx[i]);
        }
        std::sort(plan.folds[f].train.begin(), plan.folds[f].train.end());
        std::sort(plan.folds[f].val.begin(), plan.folds[f].val.end());
        std::sort(plan.folds[f].test.begin(), plan.folds[f].test.end());
    }
    return plan;
}

std::string fold_plan_to_json(const FoldPlan& plan) {
    std::ostringstream o;
    auto list = [&o](const std::vector<std::size_t>& v) {
        o << '[';
        for (std::size_t i = 0; i < v.size(); ++i) o << (i ? "," : "") << v[i];
        o << ']';
    };
    o << "{\"seed\":" << plan.seed << ",\"folds\":[";
    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        if (f) o << ',';
        o << "{\"train\":";
        list(plan.folds[f].train);
        o << ",\"val\":";
        list(plan.folds[f].val);
        o << ",\"test\":";
        list(plan.folds[f].test);
        o << '}';
    }
    o << "]}";
    return o.str();
}

std::vector<PrecomputedGraph> precompute_dataset(const Dataset& ds, OperatorKind kind,
                                                 std::size_t r_depth, std::size_t threads) {
    std::vector<PrecomputedGraph> out(ds.graphs.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i].bank = operator_bank(ds.graphs[i], kind, r_depth);
            out[i].label = ds.graphs[i].label.value_or(0);
        }
    };
    if (threads <= 1 || ds.graphs.size() < 2 * threads) {
        work(0, ds.graphs.size());
        return out;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (ds.graphs.size() + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(begin + chunk, ds.graphs.size());
        if (begin >= end) break;
        pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
    return out;
}

namespace {

constexpr char kBankMagic[8] = {'S', 'P', 'I', 'N', 'B', 'A', 'N', 'K'};
constexpr std::uint32_t kBankVersion = 1;

void write_u32(std::ostream& o, std::uint32_t v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_i32(std::ostream& o, std::int32_t v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& i) {
    std::uint32_t v = 0;
    i.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

std::int32_t read_i32(std::istream& i) {
    std::int32_t v = 0;
    i.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_bank_cache(const std::string& path, const std::vector<PrecomputedGraph>& graphs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw TuError(Kind::IoError, "cannot write bank cache: " + path);
    std::uint32_t r_depth = graphs.empty() ? 0 : static_cast<std::uint32_t>(graphs[0].bank.depth());
    std::uint32_t d = graphs.empty() ? 0 : static_cast<std::uint32_t>(graphs[0].bank.matrices[0].cols);
    out.write(kBankMagic, sizeof kBankMagic);
    write_u32(out, kBankVersion);
    write_u32(out, r_depth);
    write_u32(out, d);
    write_u32(out, static_cast<std::uint32_t>(graphs.size()));
    for (const auto& pg : graphs) {
        assert(pg.bank.depth() == r_depth);
        write_u32(out, static_cast<std::uint32_t>(pg.bank.matrices[0].rows));
        write_i32(out, pg.label);
        for (const auto& m : pg.bank.matrices)
            out.write(reinterpret_cast<const char*>(m.data.data()),
                      static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    }
    if (!out) throw TuError(Kind::IoError, "short write on bank cache: " + path);
}

std::vector<PrecomputedGraph> load_bank_cache(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TuError(Kind::IoError, "cannot open bank cache: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kBankMagic, sizeof magic) != 0)
        throw TuError(Kind::VersionMismatch, "not a bank cache file: " + path);
    std::uint32_t version = read_u32(in);
    if (version != kBankVersion)
        throw TuError(Kind::VersionMismatch, "bank cache version mismatch: " + path);
    std::uint32_t r_depth = read_u32(in);
    std::uint32_t d = read_u32(in);
    std::uint32_t count = read_u32(in);
    std::vector<PrecomputedGraph> out(count);
    for (auto& pg : out) {
        std::uint32_t n = read_u32(in);
        pg.label = read_i32(in);
        pg.bank.matrices.resize(r_depth + 1);
        for (auto& m : pg.bank.matrices) {
            m = DenseMatrix(n, d);
            in.read(reinterpret_cast<char*>(m.data.data()),
                    static_cast<std::streamsize>(m.data.size() * sizeof(double)));
        }
    }
    if (!in) throw TuError(Kind::IoError, "truncated bank cache: " + path);
    return out;
}

} // namespace spin
