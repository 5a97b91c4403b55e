#include "spin/adam.hpp"

#include <cassert>
#include <cmath>

namespace spin {

AdamState make_adam_state(const std::vector<TensorRef>& params) {
    AdamState s;
    for (const auto& p : params) {
        s.m.emplace_back(p.size, 0.0);
        s.v.emplace_back(p.size, 0.0);
    }
    return s;
}

void adam_step(const std::vector<TensorRef>& params,
               const std::vector<ConstTensorRef>& grads, AdamState& state, double lr,
               double l2) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    assert(params.size() == grads.size() && params.size() == state.m.size());

    ++state.step;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < params.size(); ++t) {
        assert(params[t].size == grads[t].size);
        double* theta = params[t].data;
        const double* grad = grads[t].data;
        auto& m = state.m[t];
        auto& v = state.v[t];
        for (std::size_t i = 0; i < params[t].size; ++i) {
            double g = grad[i] + l2 * theta[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

} // namespace spin
