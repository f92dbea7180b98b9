#include "acet/optim.hpp"

#include <stdexcept>

#include "acet/kernels.hpp"

namespace acet {

AdamState adam_init(const Mlp& model, AdamHyper hyper) {
    if (!(hyper.lr > 0.0)) throw std::invalid_argument("adam_init: lr must be positive");
    AdamState state;
    state.hyper = hyper;
    state.m_weights.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        state.m_weights.emplace_back(layer.fan_in(), layer.fan_out());
        state.v_weights.emplace_back(layer.fan_in(), layer.fan_out());
        state.m_biases.emplace_back(layer.fan_out(), 0.0);
        state.v_biases.emplace_back(layer.fan_out(), 0.0);
    }
    return state;
}

void adam_step(Mlp& model, const Gradients& grads, AdamState& state) {
    adam_step(model, grads, state, state.hyper.lr);
}

void adam_step(Mlp& model, const Gradients& grads, AdamState& state, double lr) {
    const std::size_t n_layers = model.layers.size();
    if (grads.weights.size() != n_layers || grads.biases.size() != n_layers ||
        state.m_weights.size() != n_layers)
        throw std::invalid_argument("adam_step: gradient/state layer count mismatch");
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (grads.weights[l].rows() != model.layers[l].fan_in() ||
            grads.weights[l].cols() != model.layers[l].fan_out() ||
            grads.biases[l].size() != model.layers[l].fan_out())
            throw std::invalid_argument("adam_step: gradient shape mismatch");
    }

    ++state.step_count;
    state.beta1_pow *= state.hyper.beta1;
    state.beta2_pow *= state.hyper.beta2;
    const double bc1 = 1.0 - state.beta1_pow;
    const double bc2 = 1.0 - state.beta2_pow;

    for (std::size_t l = 0; l < n_layers; ++l) {
        auto& layer = model.layers[l];
        kern::adam_update(layer.weights.data(), grads.weights[l].data(),
                          state.m_weights[l].data(), state.v_weights[l].data(),
                          layer.weights.size(), lr, state.hyper.beta1, state.hyper.beta2,
                          state.hyper.eps_hat, bc1, bc2);
        kern::adam_update(layer.biases.data(), grads.biases[l].data(),
                          state.m_biases[l].data(), state.v_biases[l].data(),
                          layer.biases.size(), lr, state.hyper.beta1, state.hyper.beta2,
                          state.hyper.eps_hat, bc1, bc2);
    }
}

double lr_at(const LrSchedule& schedule, std::uint64_t step) {
    switch (schedule.mode) {
        case LrMode::constant: return schedule.base_lr;
        case LrMode::inverse_decay:
            return schedule.base_lr / (1.0 + schedule.decay * static_cast<double>(step));
    }
    return schedule.base_lr;
}

}  // namespace acet
