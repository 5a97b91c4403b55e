#pragma once

#include "spin/dense.hpp"
#include "spin/rng.hpp"

#include <cstddef>
#include <vector>

namespace spin {

enum class Activation { Identity, ReLU, LeakyReLU };

struct MlpLayer {
    DenseMatrix weight;       // d_in x d_out
    std::vector<double> bias; // d_out
};

// Plain MLP. Hidden layers use `activation`; the last layer uses
// `final_activation`. ReLU gradient at exactly 0 is 0; LeakyReLU slope
// below 0 is `leaky_slope`.
struct MlpParams {
    std::vector<MlpLayer> layers;
    Activation activation = Activation::ReLU;
    Activation final_activation = Activation::Identity;
    double leaky_slope = 0.01;

    std::size_t input_dim() const { return layers.front().weight.rows; }
    std::size_t output_dim() const { return layers.back().weight.cols; }
};

// Borrows the forward input; keep that matrix alive until backward ran.
struct MlpCache {
    const DenseMatrix* input = nullptr;
    std::vector<DenseMatrix> pre;    // pre-activation per layer
    std::vector<DenseMatrix> hidden; // post-activations feeding layers 1..L-1

    const DenseMatrix& layer_input(std::size_t l) const {
        return l == 0 ? *input : hidden[l - 1];
    }
};

struct MlpGrad {
    std::vector<DenseMatrix> d_weight;
    std::vector<std::vector<double>> d_bias;
    DenseMatrix d_input;
};

// dims = {d_in, h1, ..., d_out}; Glorot-uniform weights, zero biases.
MlpParams make_mlp(const std::vector<std::size_t>& dims, Activation activation,
                   Activation final_activation, Rng& rng);

MlpGrad zero_grad_like(const MlpParams& p);
void accumulate(MlpGrad& into, const MlpGrad& g); // ignores d_input

DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x, MlpCache* cache = nullptr);
MlpGrad mlp_backward(const MlpParams& p, const MlpCache& cache, const DenseMatrix& upstream);

struct LossResult {
    double loss = 0.0;
    DenseMatrix grad_logits;
};

// Mean cross-entropy over rows, stabilized by row-max subtraction.
// Gradient is (softmax - onehot) / M.
LossResult softmax_cross_entropy(const DenseMatrix& logits, const DenseMatrix& one_hot);

// Row-wise softmax (stabilized), exposed for metrics.
DenseMatrix softmax_rows(const DenseMatrix& logits);

struct DropoutResult {
    DenseMatrix output;
    DenseMatrix mask; // scale factors applied entrywise (1/(1-rate) or 0)
};

// Inverted dropout; identity (mask of ones) when not training or rate == 0.
DropoutResult dropout(const DenseMatrix& x, double rate, Rng& rng, bool training);

} // namespace spin
