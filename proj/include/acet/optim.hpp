#pragma once

#include <cstdint>
#include <vector>

#include "acet/matrix.hpp"
#include "acet/nn.hpp"

namespace acet {

struct AdamHyper {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
};

// First/second moment accumulators mirroring the model parameter shapes.
struct AdamState {
    std::vector<Matrix> m_weights, v_weights;
    std::vector<std::vector<double>> m_biases, v_biases;
    std::uint64_t step_count = 0;
    AdamHyper hyper;
    // running beta^step products; avoids pow() in the inner loop
    double beta1_pow = 1.0;
    double beta2_pow = 1.0;
};

AdamState adam_init(const Mlp& model, AdamHyper hyper);

// Bias-corrected Adam update in place; increments step_count.
void adam_step(Mlp& model, const Gradients& grads, AdamState& state);
// Same, with the learning rate for this step supplied by a schedule.
void adam_step(Mlp& model, const Gradients& grads, AdamState& state, double lr);

enum class LrMode { constant, inverse_decay };

struct LrSchedule {
    LrMode mode = LrMode::constant;
    double base_lr = 0.001;
    double decay = 0.0;  // inverse_decay: lr = base_lr / (1 + decay * step)
};

double lr_at(const LrSchedule& schedule, std::uint64_t step);

}  // namespace acet
