#pragma once

#include "spin/adam.hpp"
#include "spin/config.hpp"
#include "spin/nn.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spin {

struct PrecomputedGraph {
    FeatureBank bank;
    int label = 0;
};

// Copy with the first r_depth+1 branch matrices (pg.bank must be at least
// that deep).
PrecomputedGraph slice_bank(const PrecomputedGraph& pg, std::size_t r_depth);

struct SpinParams {
    std::vector<MlpParams> branch_mlps; // R+1 transforms, d -> d'
    std::vector<std::vector<double>> attention_vectors; // R+1 x d' (attention mode only)
    MlpParams classifier; // (R+1)*d' -> num_classes
};

// Throws std::invalid_argument on out-of-range fields or attention paired
// with a non-sum readout.
void validate(const SpinConfig& cfg);

SpinParams make_spin_params(const SpinConfig& cfg, Rng& rng);

// Parameter tensors in declaration order (branch MLPs, attention vectors,
// classifier); the checkpoint format and Adam state follow this order.
std::vector<TensorRef> param_tensors(SpinParams& p);
std::vector<ConstTensorRef> param_tensors(const SpinParams& p);

struct SpinGrad {
    std::vector<MlpGrad> branch;
    std::vector<std::vector<double>> attention;
    MlpGrad classifier;
};

SpinGrad zero_grad_like(const SpinParams& p);
void accumulate(SpinGrad& into, const SpinGrad& g);
void scale(SpinGrad& g, double c);
std::vector<ConstTensorRef> grad_tensors(const SpinGrad& g);
double grad_max_abs(const SpinGrad& g);

struct GraphEmbedding {
    std::vector<std::vector<double>> branch_embeddings; // s^(0..R), each d'
    std::vector<double> global;                         // concatenation, (R+1)*d'
};

struct BranchCache {
    MlpCache mlp; // borrows the bank matrix; the bank must outlive backward
    DenseMatrix z;         // node embeddings after dropout, N x d'
    DenseMatrix drop_mask; // empty when dropout was inactive
    std::vector<double> att_pre; // <w_r, z_v> before the ReLU
    std::vector<double> alpha;   // readout weights actually applied
    std::vector<std::size_t> arg_max; // per-dim argmax rows (Max readout)
    std::vector<double> s;
};

// Holds forward intermediates; backward must run on the cache object in
// place (the classifier cache points into e_dropped).
struct SpinCache {
    std::vector<BranchCache> branches;
    std::vector<double> embedding; // pre-dropout global readout
    DenseMatrix e_dropped;         // 1 x (R+1)d'
    DenseMatrix e_mask;            // empty when dropout was inactive
    MlpCache classifier;
    DenseMatrix logits; // 1 x K
};

// --- the individual stages, exposed for direct testing ---

// Z_r = g^(r)(B_r), row-wise.
DenseMatrix branch_transform(const SpinParams& p, std::size_t r, const DenseMatrix& b_r,
                             MlpCache* cache = nullptr);

// alpha_v = softmax over nodes of ReLU(<w, z_v>); sums to 1.
std::vector<double> attention_weights(const std::vector<double>& w, const DenseMatrix& z,
                                      std::vector<double>* pre_out = nullptr);

// s = sum_v alpha_v z_v.
std::vector<double> branch_readout(const DenseMatrix& z, const std::vector<double>& alpha);

// Ordered concatenation of the branch embeddings.
std::vector<double> global_readout(const std::vector<std::vector<double>>& s);

// h_v rows: concatenation of per-branch node embeddings, optionally passed
// through a transform. Node-level surface; not on the classification path.
DenseMatrix combine_node_embeddings(const std::vector<DenseMatrix>& zs,
                                    const MlpParams* transform = nullptr);

// --- full passes ---

// Graph embedding only (no dropout, no classifier).
GraphEmbedding embed(const SpinParams& p, const SpinConfig& cfg, const FeatureBank& bank);

// Logits (1 x K). Dropout is active only when training with an rng.
DenseMatrix spin_forward(const SpinParams& p, const SpinConfig& cfg, const FeatureBank& bank,
                         SpinCache* cache = nullptr, Rng* dropout_rng = nullptr,
                         bool training = false);

SpinGrad spin_backward(const SpinParams& p, const SpinConfig& cfg, const SpinCache& cache,
                       const DenseMatrix& grad_logits);

// --- checkpoint file ---

void save_checkpoint(const std::string& path, const SpinConfig& cfg, const SpinParams& p);

struct Checkpoint {
    SpinConfig config;
    SpinParams params;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace spin
