#pragma once

#include "spin/model.hpp"
#include "spin/tu_io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace spin {

struct NonFiniteLossError : std::runtime_error {
    explicit NonFiniteLossError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingCurve {
    std::vector<double> train_loss; // per epoch
    std::vector<double> val_acc;    // per epoch
    std::string to_csv() const;
};

struct TrainResult {
    SpinParams best_params;
    TrainingCurve curve;
    double best_val_acc = 0.0;
    std::size_t epochs_run = 0;
};

using GraphRefs = std::vector<const PrecomputedGraph*>;

GraphRefs select(const std::vector<PrecomputedGraph>& all, const std::vector<std::size_t>& idx);

// One shuffled pass over the training set (minibatch loss, backward, Adam
// step per batch); returns the mean loss. Throws NonFiniteLossError when
// the loss leaves the reals.
double train_epoch(SpinParams& params, const SpinConfig& cfg, const GraphRefs& train_set,
                   const TrainConfig& tc, AdamState& adam, Rng& shuffle_rng, Rng& dropout_rng);

// Minibatch Adam training with validation-based early stopping: parameters
// with the best validation accuracy are kept; training stops after
// `patience` epochs without an improvement above 1e-4.
TrainResult train_model(const SpinConfig& cfg, const GraphRefs& train_set, const GraphRefs& val_set,
                        const TrainConfig& tc);

struct EvalResult {
    double accuracy = 0.0;
    std::optional<double> auroc;
};

// Accuracy of argmax predictions; AUROC (tie-averaged rank statistic) only
// for binary tasks — requesting it with more classes throws.
EvalResult evaluate(const SpinParams& p, const SpinConfig& cfg, const GraphRefs& set,
                    bool want_auroc = false);

// Exposed for direct testing of the rank statistic.
double auroc_from_scores(const std::vector<double>& scores, const std::vector<int>& labels);

struct CvResult {
    struct Row {
        std::size_t fold = 0;
        std::size_t repeat = 0;
        double accuracy = 0.0;
        std::optional<double> auroc;
    };
    std::vector<Row> rows;
    std::vector<double> fold_means;
    std::vector<std::size_t> chosen_candidate; // per fold (grid mode; else zeros)
    double mean = 0.0;
    double stddev = 0.0; // population std over fold means

    std::string to_csv() const;
    std::string summary() const;
};

// Per fold: `repeats_per_fold` trainings of one fixed configuration,
// test scores averaged; mean +- std over folds.
CvResult cross_validate(const std::vector<PrecomputedGraph>& graphs, const FoldPlan& plan,
                        const SpinConfig& cfg, const TrainConfig& tc, bool want_auroc = false);

struct GridCandidate {
    SpinConfig model;
    TrainConfig train;
};

// Per fold: train each candidate once, select by validation accuracy, then
// retrain the winner `repeats_per_fold` times and test. Banks must be at
// least as deep as the deepest candidate. Folds are independent (seeds
// derived per fold) and run across `threads` workers; results merge in
// fold order, so the output is identical at any thread count.
CvResult cross_validate_grid(const std::vector<PrecomputedGraph>& graphs, const FoldPlan& plan,
                             const std::vector<GridCandidate>& candidates,
                             bool want_auroc = false, std::size_t threads = 1);

} // namespace spin
