#include "spin/lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spin {

namespace {

std::string join_csv(int lemma, std::size_t instances, std::size_t violations,
                     const std::vector<double>& deltas) {
    std::ostringstream o;
    o << "lemma,instance,delta,violations_total\n";
    o.precision(17);
    for (std::size_t i = 0; i < deltas.size(); ++i)
        o << lemma << ',' << i << ',' << deltas[i] << ',' << violations << '\n';
    if (deltas.empty()) o << lemma << ",," << ',' << violations << '\n';
    (void)instances;
    return o.str();
}

} // namespace

std::string LemmaReport::to_csv() const { return join_csv(lemma, instances, violations, deltas); }

LemmaReport lemma1_demo(const std::vector<std::vector<double>>& maps, Activation nonlinearity,
                        double leaky_slope) {
    const std::vector<double> xs1{2.0, 1.0, 4.0};
    const std::vector<double> ws1{1.0, -1.0, 0.25};
    const std::vector<double> xs2{6.0, 4.0};
    const std::vector<double> ws2{1.0, -1.0};

    auto act = [&](double x) {
        if (nonlinearity == Activation::ReLU) return x > 0.0 ? x : 0.0;
        return x > 0.0 ? x : leaky_slope * x;
    };

    LemmaReport rep;
    rep.lemma = 1;
    for (const auto& w : maps) {
        double worst = 0.0;
        // each output coordinate of the linear map is an independent scalar case
        for (double wj : w) {
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t i = 0; i < xs1.size(); ++i) s1 += ws1[i] * act(wj * xs1[i]);
            for (std::size_t i = 0; i < xs2.size(); ++i) s2 += ws2[i] * act(wj * xs2[i]);
            worst = std::max(worst, std::fabs(s1 - s2));
        }
        rep.deltas.push_back(worst);
        ++rep.instances;
        if (worst >= 1e-12) {
            ++rep.violations;
            std::ostringstream o;
            o << "separation under map [";
            for (double wj : w) o << ' ' << wj;
            o << " ]: |delta| = " << worst;
            rep.witnesses.push_back(o.str());
        }
    }
    return rep;
}

LemmaReport lemma2_probe(std::size_t trials, std::size_t dim, Rng& rng) {
    LemmaReport rep;
    rep.lemma = 2;
    constexpr double tol = 1e-9;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> w(dim), z1(dim), z2(dim);
        for (auto& x : w) x = rng.uniform(-1.0, 1.0);
        for (auto& x : z1) x = rng.uniform(-1.0, 1.0);
        for (auto& x : z2) x = rng.uniform(-1.0, 1.0);

        DenseMatrix z(2, dim);
        std::copy(z1.begin(), z1.end(), z.row(0));
        std::copy(z2.begin(), z2.end(), z.row(1));
        auto alpha = attention_weights(w, z);

        double dz = 0.0, dout = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            dz = std::max(dz, std::fabs(z1[j] - z2[j]));
            dout = std::max(dout, std::fabs(alpha[0] * z1[j] - alpha[1] * z2[j]));
        }
        rep.deltas.push_back(dout);
        ++rep.instances;
        if (dz > tol && dout <= tol) {
            ++rep.violations;
            std::ostringstream o;
            o.precision(17);
            o << "collision at trial " << t << ": |z1-z2|_inf = " << dz
              << ", |a1 z1 - a2 z2|_inf = " << dout;
            rep.witnesses.push_back(o.str());
        }
    }
    return rep;
}

Lemma3Result lemma3_demo(std::size_t n1, std::size_t n2, std::size_t k, ReadoutKind readout,
                         std::uint64_t seed) {
    Graph g1 = make_circulant_regular(n1, k);
    Graph g2 = make_circulant_regular(n2, k);
    g1.features = uniform_features(n1);
    g2.features = uniform_features(n2);

    SpinConfig cfg;
    cfg.r_depth = 2;
    cfg.op = OperatorKind::NormalizedAdjacency;
    cfg.input_dim = 1;
    cfg.hidden_dim = 8;
    cfg.g_layers = 2;
    cfg.attention = false;
    cfg.dropout_rate = 0.0;
    cfg.num_classes = 2;
    cfg.readout = readout;

    Rng rng(seed);
    SpinParams params = make_spin_params(cfg, rng);

    auto b1 = operator_bank(g1, cfg.op, cfg.r_depth);
    auto b2 = operator_bank(g2, cfg.op, cfg.r_depth);
    auto e1 = embed(params, cfg, b1).global;
    auto e2 = embed(params, cfg, b2).global;

    Lemma3Result res;
    res.report.lemma = 3;
    res.report.instances = 1;
    double norm1 = 0.0, norm2 = 0.0;
    for (std::size_t j = 0; j < e1.size(); ++j) {
        res.max_abs_diff = std::max(res.max_abs_diff, std::fabs(e1[j] - e2[j]));
        norm1 += e1[j] * e1[j];
        norm2 += e2[j] * e2[j];
    }
    res.norm_ratio = std::sqrt(norm1) / std::sqrt(norm2);
    res.report.deltas.push_back(res.max_abs_diff);

    bool collided = res.max_abs_diff < 1e-12;
    bool expect_collision = readout != ReadoutKind::Sum;
    if (collided != expect_collision) {
        res.report.violations = 1;
        std::ostringstream o;
        o.precision(17);
        o << to_string(readout) << " readout on (" << n1 << ',' << n2 << ',' << k
          << "): |delta|_inf = " << res.max_abs_diff << ", norm ratio = " << res.norm_ratio;
        res.report.witnesses.push_back(o.str());
    }
    return res;
}

std::string PowerReport::to_csv() const {
    std::ostringstream o;
    o.precision(17);
    o << "pairs_tested,wl_distinguished,model_distinguished,wl_blind,model_only,tau,"
         "agreement_rate\n";
    o << pairs_tested << ',' << wl_distinguished << ',' << model_distinguished << ','
      << wl_blind << ',' << model_only << ',' << tau << ',' << agreement_rate() << '\n';
    return o.str();
}

PowerReport theorem1_experiment(std::size_t num_pairs, std::size_t max_nodes, double tau,
                                std::uint64_t seed) {
    PowerReport rep;
    rep.tau = tau;
    const double probs[3] = {0.3, 0.5, 0.7};

    SpinConfig cfg;
    cfg.r_depth = max_nodes - 1;
    cfg.op = OperatorKind::Adjacency;
    cfg.input_dim = 1;
    cfg.hidden_dim = 8;
    cfg.g_layers = 2;
    cfg.attention = false;
    cfg.dropout_rate = 0.0;
    cfg.num_classes = 2;
    cfg.readout = ReadoutKind::Sum;

    std::size_t trial = 0;
    const std::size_t max_trials = 200 * std::max<std::size_t>(num_pairs, 1);
    while (rep.wl_distinguished < num_pairs && trial < max_trials) {
        Rng rng = Rng::derive(seed, trial++);
        std::size_t n = 4 + rng.next_below(max_nodes - 3);
        double p1 = probs[rng.next_below(3)];
        double p2 = probs[rng.next_below(3)];
        Graph g1 = erdos_renyi(n, p1, rng);
        Graph g2 = erdos_renyi(n, p2, rng);
        g1.features = uniform_features(n);
        g2.features = uniform_features(n);
        ++rep.pairs_tested;

        auto verdict = wl_distinguish(g1, g2, true);

        SpinParams params = make_spin_params(cfg, rng); // fresh per pair
        auto e1 = embed(params, cfg, operator_bank(g1, cfg.op, cfg.r_depth)).global;
        auto e2 = embed(params, cfg, operator_bank(g2, cfg.op, cfg.r_depth)).global;
        double diff = 0.0;
        for (std::size_t j = 0; j < e1.size(); ++j)
            diff = std::max(diff, std::fabs(e1[j] - e2[j]));
        bool separated = diff > tau;

        if (verdict.distinguished) {
            ++rep.wl_distinguished;
            if (separated) ++rep.model_distinguished;
        } else {
            ++rep.wl_blind;
            if (separated) ++rep.model_only;
        }
    }
    return rep;
}

} // namespace spin
