#include "spin/nn.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace spin {

namespace {

double act_apply(Activation a, double x, double slope) {
    switch (a) {
        case Activation::Identity: return x;
        case Activation::ReLU: return x > 0.0 ? x : 0.0;
        case Activation::LeakyReLU: return x > 0.0 ? x : slope * x;
    }
    return x;
}

double act_deriv(Activation a, double pre, double slope) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
        case Activation::LeakyReLU: return pre > 0.0 ? 1.0 : slope;
    }
    return 1.0;
}

} // namespace

MlpParams make_mlp(const std::vector<std::size_t>& dims, Activation activation,
                   Activation final_activation, Rng& rng) {
    assert(dims.size() >= 2);
    MlpParams p;
    p.activation = activation;
    p.final_activation = final_activation;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        MlpLayer layer;
        layer.weight = DenseMatrix(dims[l], dims[l + 1]);
        double bound = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
        for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
        layer.bias.assign(dims[l + 1], 0.0);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

MlpGrad zero_grad_like(const MlpParams& p) {
    MlpGrad g;
    for (const auto& layer : p.layers) {
        g.d_weight.emplace_back(layer.weight.rows, layer.weight.cols);
        g.d_bias.emplace_back(layer.bias.size(), 0.0);
    }
    return g;
}

void accumulate(MlpGrad& into, const MlpGrad& g) {
    for (std::size_t l = 0; l < into.d_weight.size(); ++l) {
        add_inplace(into.d_weight[l], g.d_weight[l]);
        for (std::size_t j = 0; j < into.d_bias[l].size(); ++j)
            into.d_bias[l][j] += g.d_bias[l][j];
    }
}

DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x, MlpCache* cache) {
    assert(!p.layers.empty());
    assert(x.cols == p.input_dim());
    std::size_t layers = p.layers.size();
    if (cache) {
        cache->input = &x;
        cache->pre.clear();
        cache->pre.reserve(layers);
        cache->hidden.clear();
        cache->hidden.reserve(layers > 0 ? layers - 1 : 0);
    }
    DenseMatrix holder;
    const DenseMatrix* cur = &x;
    for (std::size_t l = 0; l < layers; ++l) {
        const auto& layer = p.layers[l];
        DenseMatrix pre = matmul(*cur, layer.weight);
        for (std::size_t i = 0; i < pre.rows; ++i) {
            double* r = pre.row(i);
            for (std::size_t j = 0; j < pre.cols; ++j) r[j] += layer.bias[j];
        }
        Activation a = (l + 1 == layers) ? p.final_activation : p.activation;
        DenseMatrix post(pre.rows, pre.cols);
        for (std::size_t i = 0; i < pre.data.size(); ++i)
            post.data[i] = act_apply(a, pre.data[i], p.leaky_slope);
        if (cache) cache->pre.push_back(std::move(pre));
        if (l + 1 == layers) return post;
        if (cache) {
            cache->hidden.push_back(std::move(post));
            cur = &cache->hidden.back();
        } else {
            holder = std::move(post);
            cur = &holder;
        }
    }
    return {}; // unreachable
}

MlpGrad mlp_backward(const MlpParams& p, const MlpCache& cache, const DenseMatrix& upstream) {
    assert(cache.pre.size() == p.layers.size());
    assert(cache.input != nullptr);
    MlpGrad g = zero_grad_like(p);
    DenseMatrix dy = upstream;
    for (std::size_t li = p.layers.size(); li-- > 0;) {
        const auto& layer = p.layers[li];
        Activation a = (li + 1 == p.layers.size()) ? p.final_activation : p.activation;
        const DenseMatrix& pre = cache.pre[li];
        assert(dy.same_shape(pre));
        DenseMatrix dpre(pre.rows, pre.cols);
        for (std::size_t i = 0; i < pre.data.size(); ++i)
            dpre.data[i] = dy.data[i] * act_deriv(a, pre.data[i], p.leaky_slope);
        g.d_weight[li] = matmul_at_b(cache.layer_input(li), dpre);
        for (std::size_t i = 0; i < dpre.rows; ++i) {
            const double* r = dpre.row(i);
            for (std::size_t j = 0; j < dpre.cols; ++j) g.d_bias[li][j] += r[j];
        }
        dy = matmul_a_bt(dpre, layer.weight);
    }
    g.d_input = std::move(dy);
    return g;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
    DenseMatrix p(logits.rows, logits.cols);
    for (std::size_t i = 0; i < logits.rows; ++i) {
        const double* l = logits.row(i);
        double m = l[0];
        for (std::size_t j = 1; j < logits.cols; ++j) m = std::max(m, l[j]);
        double sum = 0.0;
        double* pi = p.row(i);
        for (std::size_t j = 0; j < logits.cols; ++j) {
            pi[j] = std::exp(l[j] - m);
            sum += pi[j];
        }
        for (std::size_t j = 0; j < logits.cols; ++j) pi[j] /= sum;
    }
    return p;
}

LossResult softmax_cross_entropy(const DenseMatrix& logits, const DenseMatrix& one_hot) {
    assert(logits.same_shape(one_hot));
    assert(logits.rows > 0);
    std::size_t m = logits.rows;
    LossResult res;
    res.grad_logits = softmax_rows(logits);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* l = logits.row(i);
        double mx = l[0];
        for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, l[j]);
        double lse = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) lse += std::exp(l[j] - mx);
        lse = std::log(lse) + mx;
        for (std::size_t j = 0; j < logits.cols; ++j)
            if (one_hot(i, j) != 0.0) loss += one_hot(i, j) * (lse - l[j]);
    }
    res.loss = loss / static_cast<double>(m);
    for (std::size_t i = 0; i < res.grad_logits.data.size(); ++i)
        res.grad_logits.data[i] =
            (res.grad_logits.data[i] - one_hot.data[i]) / static_cast<double>(m);
    return res;
}

DropoutResult dropout(const DenseMatrix& x, double rate, Rng& rng, bool training) {
    assert(rate >= 0.0 && rate < 1.0);
    DropoutResult r;
    r.mask = DenseMatrix(x.rows, x.cols, 1.0);
    if (training && rate > 0.0) {
        double keep_scale = 1.0 / (1.0 - rate);
        for (double& v : r.mask.data) v = (rng.uniform() >= rate) ? keep_scale : 0.0;
    }
    r.output = DenseMatrix(x.rows, x.cols);
    for (std::size_t i = 0; i < x.data.size(); ++i)
        r.output.data[i] = x.data[i] * r.mask.data[i];
    return r;
}

} // namespace spin
