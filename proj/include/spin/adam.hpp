#pragma once

#include <cstddef>
#include <vector>

namespace spin {

// Flat view over one parameter tensor; models expose their tensors as an
// ordered list of these (the same order the checkpoint format uses).
struct TensorRef {
    double* data = nullptr;
    std::size_t size = 0;
};

struct ConstTensorRef {
    const double* data = nullptr;
    std::size_t size = 0;
};

struct AdamState {
    std::size_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

AdamState make_adam_state(const std::vector<TensorRef>& params);

// Standard Adam (beta1=0.9, beta2=0.999, eps=1e-8). The L2 term is added
// to the gradient as l2 * theta before the moment updates.
void adam_step(const std::vector<TensorRef>& params,
               const std::vector<ConstTensorRef>& grads, AdamState& state, double lr,
               double l2);

} // namespace spin
