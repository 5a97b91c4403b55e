#include "spin/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace spin {

PrecomputedGraph slice_bank(const PrecomputedGraph& pg, std::size_t r_depth) {
    assert(pg.bank.matrices.size() >= r_depth + 1);
    PrecomputedGraph out;
    out.label = pg.label;
    out.bank.matrices.assign(pg.bank.matrices.begin(),
                             pg.bank.matrices.begin() + static_cast<std::ptrdiff_t>(r_depth + 1));
    return out;
}

namespace {

std::vector<std::size_t> mlp_dims(std::size_t d_in, std::size_t hidden, std::size_t d_out,
                                  std::size_t layers) {
    assert(layers >= 1);
    std::vector<std::size_t> dims{d_in};
    for (std::size_t l = 1; l < layers; ++l) dims.push_back(hidden);
    dims.push_back(d_out);
    return dims;
}

} // namespace

void validate(const SpinConfig& cfg) {
    if (cfg.input_dim < 1) throw std::invalid_argument("input_dim must be >= 1");
    if (cfg.hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
    if (cfg.num_classes < 2) throw std::invalid_argument("num_classes must be >= 2");
    if (cfg.g_layers < 1) throw std::invalid_argument("g_layers must be >= 1");
    if (cfg.classifier_layers < 1) throw std::invalid_argument("classifier_layers must be >= 1");
    if (cfg.dropout_rate < 0.0 || cfg.dropout_rate >= 1.0)
        throw std::invalid_argument("dropout must be in [0, 1)");
    if (cfg.attention && cfg.readout != ReadoutKind::Sum)
        throw std::invalid_argument("attention requires the sum readout");
}

SpinParams make_spin_params(const SpinConfig& cfg, Rng& rng) {
    validate(cfg);
    SpinParams p;
    for (std::size_t r = 0; r < cfg.branches(); ++r)
        p.branch_mlps.push_back(make_mlp(
            mlp_dims(cfg.input_dim, cfg.hidden_dim, cfg.hidden_dim, cfg.g_layers),
            Activation::ReLU, Activation::Identity, rng));
    if (cfg.attention) {
        double bound = std::sqrt(6.0 / static_cast<double>(cfg.hidden_dim + 1));
        for (std::size_t r = 0; r < cfg.branches(); ++r) {
            std::vector<double> w(cfg.hidden_dim);
            for (double& x : w) x = rng.uniform(-bound, bound);
            p.attention_vectors.push_back(std::move(w));
        }
    }
    p.classifier = make_mlp(
        mlp_dims(cfg.embedding_dim(), cfg.hidden_dim, cfg.num_classes, cfg.classifier_layers),
        Activation::ReLU, Activation::Identity, rng);
    return p;
}

std::vector<TensorRef> param_tensors(SpinParams& p) {
    std::vector<TensorRef> t;
    auto add_mlp = [&t](MlpParams& m) {
        for (auto& layer : m.layers) {
            t.push_back({layer.weight.data.data(), layer.weight.data.size()});
            t.push_back({layer.bias.data(), layer.bias.size()});
        }
    };
    for (auto& m : p.branch_mlps) add_mlp(m);
    for (auto& w : p.attention_vectors) t.push_back({w.data(), w.size()});
    add_mlp(p.classifier);
    return t;
}

std::vector<ConstTensorRef> param_tensors(const SpinParams& p) {
    std::vector<ConstTensorRef> t;
    auto add_mlp = [&t](const MlpParams& m) {
        for (const auto& layer : m.layers) {
            t.push_back({layer.weight.data.data(), layer.weight.data.size()});
            t.push_back({layer.bias.data(), layer.bias.size()});
        }
    };
    for (const auto& m : p.branch_mlps) add_mlp(m);
    for (const auto& w : p.attention_vectors) t.push_back({w.data(), w.size()});
    add_mlp(p.classifier);
    return t;
}

SpinGrad zero_grad_like(const SpinParams& p) {
    SpinGrad g;
    for (const auto& m : p.branch_mlps) g.branch.push_back(zero_grad_like(m));
    for (const auto& w : p.attention_vectors) g.attention.emplace_back(w.size(), 0.0);
    g.classifier = zero_grad_like(p.classifier);
    return g;
}

void accumulate(SpinGrad& into, const SpinGrad& g) {
    for (std::size_t r = 0; r < into.branch.size(); ++r) accumulate(into.branch[r], g.branch[r]);
    for (std::size_t r = 0; r < into.attention.size(); ++r)
        for (std::size_t j = 0; j < into.attention[r].size(); ++j)
            into.attention[r][j] += g.attention[r][j];
    accumulate(into.classifier, g.classifier);
}

void scale(SpinGrad& g, double c) {
    auto scale_mlp = [c](MlpGrad& m) {
        for (auto& w : m.d_weight) scale_inplace(w, c);
        for (auto& b : m.d_bias)
            for (double& x : b) x *= c;
    };
    for (auto& m : g.branch) scale_mlp(m);
    for (auto& w : g.attention)
        for (double& x : w) x *= c;
    scale_mlp(g.classifier);
}

std::vector<ConstTensorRef> grad_tensors(const SpinGrad& g) {
    std::vector<ConstTensorRef> t;
    auto add_mlp = [&t](const MlpGrad& m) {
        for (std::size_t l = 0; l < m.d_weight.size(); ++l) {
            t.push_back({m.d_weight[l].data.data(), m.d_weight[l].data.size()});
            t.push_back({m.d_bias[l].data(), m.d_bias[l].size()});
        }
    };
    for (const auto& m : g.branch) add_mlp(m);
    for (const auto& w : g.attention) t.push_back({w.data(), w.size()});
    add_mlp(g.classifier);
    return t;
}

double grad_max_abs(const SpinGrad& g) {
    double m = 0.0;
    for (const auto& t : grad_tensors(g))
        for (std::size_t i = 0; i < t.size; ++i) m = std::max(m, std::fabs(t.data[i]));
    return m;
}

DenseMatrix branch_transform(const SpinParams& p, std::size_t r, const DenseMatrix& b_r,
                             MlpCache* cache) {
    assert(r < p.branch_mlps.size());
    return mlp_forward(p.branch_mlps[r], b_r, cache);
}

std::vector<double> attention_weights(const std::vector<double>& w, const DenseMatrix& z,
                                      std::vector<double>* pre_out) {
    assert(z.rows > 0 && z.cols == w.size());
    std::size_t n = z.rows;
    std::vector<double> pre(n), beta(n);
    for (std::size_t v = 0; v < n; ++v) {
        double dot = 0.0;
        const double* zv = z.row(v);
        for (std::size_t j = 0; j < z.cols; ++j) dot += w[j] * zv[j];
        pre[v] = dot;
        beta[v] = dot > 0.0 ? dot : 0.0;
    }
    double mx = *std::max_element(beta.begin(), beta.end());
    std::vector<double> alpha(n);
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        alpha[v] = std::exp(beta[v] - mx);
        sum += alpha[v];
    }
    for (double& a : alpha) a /= sum;
    if (pre_out) *pre_out = std::move(pre);
    return alpha;
}

std::vector<double> branch_readout(const DenseMatrix& z, const std::vector<double>& alpha) {
    assert(alpha.size() == z.rows);
    std::vector<double> s(z.cols, 0.0);
    for (std::size_t v = 0; v < z.rows; ++v) {
        const double* zv = z.row(v);
        for (std::size_t j = 0; j < z.cols; ++j) s[j] += alpha[v] * zv[j];
    }
    return s;
}

std::vector<double> global_readout(const std::vector<std::vector<double>>& s) {
    std::vector<double> e;
    for (const auto& sr : s) e.insert(e.end(), sr.begin(), sr.end());
    return e;
}

DenseMatrix combine_node_embeddings(const std::vector<DenseMatrix>& zs,
                                    const MlpParams* transform) {
    assert(!zs.empty());
    std::size_t n = zs.front().rows;
    std::size_t d = zs.front().cols;
    DenseMatrix h(n, zs.size() * d);
    for (std::size_t b = 0; b < zs.size(); ++b) {
        assert(zs[b].rows == n && zs[b].cols == d);
        for (std::size_t v = 0; v < n; ++v)
            std::copy(zs[b].row(v), zs[b].row(v) + d, h.row(v) + b * d);
    }
    if (transform) return mlp_forward(*transform, h);
    return h;
}

namespace {

// Shared branch pipeline for embed/forward. Dropout only when rng != nullptr
// and training.
void run_branches(const SpinParams& p, const SpinConfig& cfg, const FeatureBank& bank,
                  std::vector<BranchCache>& branches, Rng* rng, bool training) {
    if (bank.matrices.size() != cfg.branches())
        throw std::invalid_argument("bank depth does not match the configured R");
    // attention weights are a weighted-sum readout; Mean/Max are the
    // non-attention demo modes
    if (cfg.attention && cfg.readout != ReadoutKind::Sum)
        throw std::invalid_argument("attention requires the sum readout");
    branches.assign(cfg.branches(), {});
    bool drop = training && rng != nullptr && cfg.dropout_rate > 0.0;
    for (std::size_t r = 0; r < cfg.branches(); ++r) {
        BranchCache& bc = branches[r];
        DenseMatrix z = mlp_forward(p.branch_mlps[r], bank.matrices[r], &bc.mlp);
        assert(z.rows > 0);
        if (drop) {
            auto dr = dropout(z, cfg.dropout_rate, *rng, true);
            bc.z = std::move(dr.output);
            bc.drop_mask = std::move(dr.mask);
        } else {
            bc.z = std::move(z);
        }
        std::size_t n = bc.z.rows;
        switch (cfg.readout) {
            case ReadoutKind::Sum:
                if (cfg.attention) {
                    bc.alpha = attention_weights(p.attention_vectors[r], bc.z, &bc.att_pre);
                } else {
                    bc.alpha.assign(n, 1.0);
                }
                bc.s = branch_readout(bc.z, bc.alpha);
                break;
            case ReadoutKind::Mean:
                bc.alpha.assign(n, 1.0 / static_cast<double>(n));
                bc.s = branch_readout(bc.z, bc.alpha);
                break;
            case ReadoutKind::Max: {
                bc.s.assign(bc.z.cols, -std::numeric_limits<double>::infinity());
                bc.arg_max.assign(bc.z.cols, 0);
                for (std::size_t v = 0; v < n; ++v) {
                    const double* zv = bc.z.row(v);
                    for (std::size_t j = 0; j < bc.z.cols; ++j)
                        if (zv[j] > bc.s[j]) {
                            bc.s[j] = zv[j];
                            bc.arg_max[j] = v;
                        }
                }
                break;
            }
        }
    }
}

} // namespace

GraphEmbedding embed(const SpinParams& p, const SpinConfig& cfg, const FeatureBank& bank) {
    std::vector<BranchCache> branches;
    run_branches(p, cfg, bank, branches, nullptr, false);
    GraphEmbedding ge;
    for (auto& bc : branches) ge.branch_embeddings.push_back(std::move(bc.s));
    ge.global = global_readout(ge.branch_embeddings);
    return ge;
}

DenseMatrix spin_forward(const SpinParams& p, const SpinConfig& cfg, const FeatureBank& bank,
                         SpinCache* cache, Rng* dropout_rng, bool training) {
    SpinCache local;
    SpinCache& c = cache ? *cache : local;
    run_branches(p, cfg, bank, c.branches, dropout_rng, training);
    std::vector<std::vector<double>> s;
    s.reserve(c.branches.size());
    for (const auto& bc : c.branches) s.push_back(bc.s);
    c.embedding = global_readout(s);

    DenseMatrix e(1, c.embedding.size());
    std::copy(c.embedding.begin(), c.embedding.end(), e.data.begin());
    if (training && dropout_rng != nullptr && cfg.dropout_rate > 0.0) {
        auto dr = dropout(e, cfg.dropout_rate, *dropout_rng, true);
        c.e_dropped = std::move(dr.output);
        c.e_mask = std::move(dr.mask);
    } else {
        c.e_dropped = std::move(e);
    }
    c.logits = mlp_forward(p.classifier, c.e_dropped, &c.classifier);
    return c.logits;
}

SpinGrad spin_backward(const SpinParams& p, const SpinConfig& cfg, const SpinCache& cache,
                       const DenseMatrix& grad_logits) {
    SpinGrad g = zero_grad_like(p);
    g.classifier = mlp_backward(p.classifier, cache.classifier, grad_logits);

    // back through the classifier-input dropout (mask empty when inactive)
    DenseMatrix de = g.classifier.d_input;
    if (cache.e_mask.rows > 0)
        for (std::size_t i = 0; i < de.data.size(); ++i) de.data[i] *= cache.e_mask.data[i];

    std::size_t dp = cfg.hidden_dim;
    for (std::size_t r = 0; r < cfg.branches(); ++r) {
        const BranchCache& bc = cache.branches[r];
        std::size_t n = bc.z.rows;
        const double* ds = de.data.data() + r * dp;

        DenseMatrix dz(n, dp);
        if (cfg.readout == ReadoutKind::Max) {
            for (std::size_t j = 0; j < dp; ++j) dz(bc.arg_max[j], j) += ds[j];
        } else {
            for (std::size_t v = 0; v < n; ++v) {
                double* dzv = dz.row(v);
                for (std::size_t j = 0; j < dp; ++j) dzv[j] += bc.alpha[v] * ds[j];
            }
            if (cfg.attention) {
                // s = sum_v alpha_v z_v with alpha = softmax(relu(<w, z>))
                std::vector<double> dalpha(n);
                for (std::size_t v = 0; v < n; ++v) {
                    const double* zv = bc.z.row(v);
                    double dot = 0.0;
                    for (std::size_t j = 0; j < dp; ++j) dot += ds[j] * zv[j];
                    dalpha[v] = dot;
                }
                double weighted = 0.0;
                for (std::size_t v = 0; v < n; ++v) weighted += bc.alpha[v] * dalpha[v];
                const auto& w = p.attention_vectors[r];
                for (std::size_t v = 0; v < n; ++v) {
                    double dbeta = bc.alpha[v] * (dalpha[v] - weighted);
                    double dpre = bc.att_pre[v] > 0.0 ? dbeta : 0.0;
                    if (dpre == 0.0) continue;
                    const double* zv = bc.z.row(v);
                    double* dzv = dz.row(v);
                    for (std::size_t j = 0; j < dp; ++j) {
                        g.attention[r][j] += dpre * zv[j];
                        dzv[j] += dpre * w[j];
                    }
                }
            }
        }

        // back through the branch dropout, then the transform
        if (bc.drop_mask.rows > 0)
            for (std::size_t i = 0; i < dz.data.size(); ++i) dz.data[i] *= bc.drop_mask.data[i];
        MlpGrad bg = mlp_backward(p.branch_mlps[r], bc.mlp, dz);
        accumulate(g.branch[r], bg);
    }
    return g;
}

// --- checkpoint ---

namespace {

constexpr char kCkptMagic[8] = {'S', 'P', 'I', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kCkptVersion = 1;

void write_u32(std::ostream& o, std::uint32_t v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& i) {
    std::uint32_t v = 0;
    i.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const SpinConfig& cfg, const SpinParams& p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kCkptMagic, sizeof kCkptMagic);
    write_u32(out, kCkptVersion);
    std::string echo = to_key_values(cfg);
    write_u32(out, static_cast<std::uint32_t>(echo.size()));
    out.write(echo.data(), static_cast<std::streamsize>(echo.size()));
    for (const auto& t : param_tensors(p))
        out.write(reinterpret_cast<const char*>(t.data),
                  static_cast<std::streamsize>(t.size * sizeof(double)));
    if (!out) throw std::runtime_error("short write on checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    std::uint32_t version = read_u32(in);
    if (version != kCkptVersion)
        throw std::runtime_error("checkpoint version mismatch in " + path);
    std::uint32_t len = read_u32(in);
    std::string echo(len, '\0');
    in.read(echo.data(), len);
    std::istringstream echo_in(echo);
    Checkpoint ck;
    apply_key_values(ck.config, parse_key_values(echo_in));
    Rng throwaway(0);
    ck.params = make_spin_params(ck.config, throwaway);
    for (const auto& t : param_tensors(ck.params))
        in.read(reinterpret_cast<char*>(t.data),
                static_cast<std::streamsize>(t.size * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return ck;
}

} // namespace spin
