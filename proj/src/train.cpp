#include "spin/train.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace spin {

std::string TrainingCurve::to_csv() const {
    std::ostringstream o;
    o.precision(17);
    o << "epoch,train_loss,val_acc\n";
    for (std::size_t e = 0; e < train_loss.size(); ++e)
        o << (e + 1) << ',' << train_loss[e] << ',' << val_acc[e] << '\n';
    return o.str();
}

GraphRefs select(const std::vector<PrecomputedGraph>& all, const std::vector<std::size_t>& idx) {
    GraphRefs out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(&all[i]);
    return out;
}

namespace {

std::size_t argmax_row(const DenseMatrix& logits) {
    const double* r = logits.row(0);
    std::size_t best = 0;
    for (std::size_t j = 1; j < logits.cols; ++j)
        if (r[j] > r[best]) best = j;
    return best;
}

} // namespace

double train_epoch(SpinParams& params, const SpinConfig& cfg, const GraphRefs& train_set,
                   const TrainConfig& tc, AdamState& adam, Rng& shuffle_rng, Rng& dropout_rng) {
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
        std::size_t m = std::min(tc.batch_size, order.size() - start);
        std::vector<SpinCache> caches(m);
        DenseMatrix logits(m, cfg.num_classes);
        DenseMatrix one_hot(m, cfg.num_classes);
        for (std::size_t b = 0; b < m; ++b) {
            const PrecomputedGraph& pg = *train_set[order[start + b]];
            DenseMatrix l = spin_forward(params, cfg, pg.bank, &caches[b], &dropout_rng, true);
            std::copy(l.row(0), l.row(0) + cfg.num_classes, logits.row(b));
            one_hot(b, static_cast<std::size_t>(pg.label)) = 1.0;
        }
        LossResult loss = softmax_cross_entropy(logits, one_hot);
        if (!std::isfinite(loss.loss))
            throw NonFiniteLossError("non-finite training loss; try a smaller learning rate");

        SpinGrad batch_grad = zero_grad_like(params);
        for (std::size_t b = 0; b < m; ++b) {
            DenseMatrix gl(1, cfg.num_classes);
            std::copy(loss.grad_logits.row(b), loss.grad_logits.row(b) + cfg.num_classes,
                      gl.row(0));
            SpinGrad g = spin_backward(params, cfg, caches[b], gl);
            accumulate(batch_grad, g);
        }
        adam_step(param_tensors(params), grad_tensors(batch_grad), adam, tc.learning_rate, tc.l2);

        epoch_loss += loss.loss * static_cast<double>(m);
        seen += m;
    }
    return epoch_loss / static_cast<double>(seen);
}

TrainResult train_model(const SpinConfig& cfg, const GraphRefs& train_set, const GraphRefs& val_set,
                        const TrainConfig& tc) {
    assert(!train_set.empty());
    Rng init_rng = Rng::derive(tc.seed, 0);
    Rng shuffle_rng = Rng::derive(tc.seed, 1);
    Rng dropout_rng = Rng::derive(tc.seed, 2);

    SpinParams params = make_spin_params(cfg, init_rng);
    AdamState adam = make_adam_state(param_tensors(params));

    TrainResult result;
    result.best_params = params;
    double best_saved = -1.0;       // accuracy actually checkpointed
    double best_significant = -1.0; // baseline for the patience counter
    std::size_t wait = 0;

    for (std::size_t epoch = 1; epoch <= tc.max_epochs; ++epoch) {
        result.curve.train_loss.push_back(
            train_epoch(params, cfg, train_set, tc, adam, shuffle_rng, dropout_rng));
        double val_acc =
            val_set.empty() ? 1.0 - result.curve.train_loss.back() // no val set: proxy score
                            : evaluate(params, cfg, val_set).accuracy;
        result.curve.val_acc.push_back(val_acc);
        result.epochs_run = epoch;

        if (val_acc > best_saved) {
            best_saved = val_acc;
            result.best_params = params;
        }
        if (val_acc > best_significant + 1e-4) {
            best_significant = val_acc;
            wait = 0;
        } else if (++wait >= tc.patience) {
            break;
        }
    }
    result.best_val_acc = best_saved;
    return result;
}

double auroc_from_scores(const std::vector<double>& scores, const std::vector<int>& labels) {
    assert(scores.size() == labels.size());
    std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // tie-averaged ranks, 1-based
    std::vector<double> rank(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t t = i; t <= j; ++t) rank[order[t]] = avg;
        i = j + 1;
    }

    double pos = 0.0, neg = 0.0, rank_sum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (labels[t] == 1) {
            pos += 1.0;
            rank_sum += rank[t];
        } else {
            neg += 1.0;
        }
    }
    if (pos == 0.0 || neg == 0.0) return 0.5;
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

EvalResult evaluate(const SpinParams& p, const SpinConfig& cfg, const GraphRefs& set,
                    bool want_auroc) {
    if (want_auroc && cfg.num_classes != 2)
        throw std::invalid_argument("AUROC is defined for binary tasks only");
    EvalResult res;
    std::size_t correct = 0;
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto* pg : set) {
        DenseMatrix logits = spin_forward(p, cfg, pg->bank);
        if (argmax_row(logits) == static_cast<std::size_t>(pg->label)) ++correct;
        if (want_auroc) {
            DenseMatrix prob = softmax_rows(logits);
            scores.push_back(prob(0, 1));
            labels.push_back(pg->label);
        }
    }
    res.accuracy = set.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(set.size());
    if (want_auroc) res.auroc = auroc_from_scores(scores, labels);
    return res;
}

std::string CvResult::to_csv() const {
    std::ostringstream o;
    o.precision(17);
    bool with_auroc = !rows.empty() && rows.front().auroc.has_value();
    o << "fold,repeat,accuracy" << (with_auroc ? ",auroc" : "") << '\n';
    for (const auto& r : rows) {
        o << r.fold << ',' << r.repeat << ',' << r.accuracy;
        if (with_auroc) o << ',' << r.auroc.value();
        o << '\n';
    }
    return o.str();
}

std::string CvResult::summary() const {
    std::ostringstream o;
    o.precision(4);
    o << "mean accuracy " << 100.0 * mean << "% +- " << 100.0 * stddev << "% over "
      << fold_means.size() << " folds";
    return o.str();
}

namespace {

void finalize_cv(CvResult& cv) {
    double sum = std::accumulate(cv.fold_means.begin(), cv.fold_means.end(), 0.0);
    cv.mean = sum / static_cast<double>(cv.fold_means.size());
    double var = 0.0;
    for (double x : cv.fold_means) var += (x - cv.mean) * (x - cv.mean);
    cv.stddev = std::sqrt(var / static_cast<double>(cv.fold_means.size()));
}

} // namespace

CvResult cross_validate(const std::vector<PrecomputedGraph>& graphs, const FoldPlan& plan,
                        const SpinConfig& cfg, const TrainConfig& tc, bool want_auroc) {
    std::vector<GridCandidate> one{{cfg, tc}};
    return cross_validate_grid(graphs, plan, one, want_auroc);
}

namespace {

struct FoldOutcome {
    std::size_t winner = 0;
    std::vector<CvResult::Row> rows;
    double mean = 0.0;
};

} // namespace

CvResult cross_validate_grid(const std::vector<PrecomputedGraph>& graphs, const FoldPlan& plan,
                             const std::vector<GridCandidate>& candidates, bool want_auroc,
                             std::size_t threads) {
    assert(!candidates.empty());
    std::uint64_t base_seed = candidates.front().train.seed;

    // banks sliced once per distinct depth
    std::vector<std::size_t> depths;
    for (const auto& c : candidates) depths.push_back(c.model.r_depth);
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    std::size_t bank_depth = graphs.front().bank.depth();
    std::vector<std::vector<PrecomputedGraph>> sliced(depths.size());
    for (std::size_t di = 0; di < depths.size(); ++di) {
        assert(depths[di] <= bank_depth);
        if (depths[di] == bank_depth) continue; // use `graphs` directly
        sliced[di].reserve(graphs.size());
        for (const auto& pg : graphs) sliced[di].push_back(slice_bank(pg, depths[di]));
    }
    auto graphs_for = [&](std::size_t r_depth) -> const std::vector<PrecomputedGraph>& {
        auto it = std::lower_bound(depths.begin(), depths.end(), r_depth);
        std::size_t di = static_cast<std::size_t>(it - depths.begin());
        return sliced[di].empty() ? graphs : sliced[di];
    };

    auto run_fold = [&](std::size_t f) {
        const Fold& fold = plan.folds[f];
        FoldOutcome out;

        if (candidates.size() > 1) {
            double best = -1.0;
            for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
                const auto& cand = candidates[ci];
                const auto& pool = graphs_for(cand.model.r_depth);
                TrainConfig tcc = cand.train;
                tcc.seed = Rng::derive(base_seed, f * 100000 + 50000 + ci).next_u64();
                TrainResult tr = train_model(cand.model, select(pool, fold.train),
                                             select(pool, fold.val), tcc);
                if (tr.best_val_acc > best) {
                    best = tr.best_val_acc;
                    out.winner = ci;
                }
            }
        }

        const auto& cand = candidates[out.winner];
        const auto& pool = graphs_for(cand.model.r_depth);
        double fold_sum = 0.0;
        for (std::size_t rep = 0; rep < cand.train.repeats_per_fold; ++rep) {
            TrainConfig tcc = cand.train;
            tcc.seed = Rng::derive(base_seed, f * 100000 + rep).next_u64();
            TrainResult tr =
                train_model(cand.model, select(pool, fold.train), select(pool, fold.val), tcc);
            EvalResult ev = evaluate(tr.best_params, cand.model, select(pool, fold.test),
                                     want_auroc);
            out.rows.push_back({f, rep, ev.accuracy, ev.auroc});
            fold_sum += ev.accuracy;
        }
        out.mean = fold_sum / static_cast<double>(cand.train.repeats_per_fold);
        return out;
    };

    std::size_t k = plan.folds.size();
    std::vector<FoldOutcome> outcomes(k);
    if (threads <= 1 || k < 2) {
        for (std::size_t f = 0; f < k; ++f) outcomes[f] = run_fold(f);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t f = next.fetch_add(1); f < k; f = next.fetch_add(1))
                outcomes[f] = run_fold(f);
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, k); ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    CvResult cv;
    for (auto& out : outcomes) {
        cv.chosen_candidate.push_back(out.winner);
        cv.rows.insert(cv.rows.end(), out.rows.begin(), out.rows.end());
        cv.fold_means.push_back(out.mean);
    }
    finalize_cv(cv);
    return cv;
}

} // namespace spin
