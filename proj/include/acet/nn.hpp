#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "acet/matrix.hpp"
#include "acet/rng.hpp"

namespace acet {

enum class Activation { relu, softmax, identity };

struct DenseLayer {
    Matrix weights;              // fan_in x fan_out
    std::vector<double> biases;  // fan_out
    Activation activation = Activation::identity;

    std::size_t fan_in() const { return weights.rows(); }
    std::size_t fan_out() const { return weights.cols(); }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Fully connected classifier. Layers are dimension-chained; the final layer
// is the softmax output over n_classes.
struct Mlp {
    std::vector<DenseLayer> layers;

    std::size_t input_width() const { return layers.front().fan_in(); }
    std::size_t n_classes() const { return layers.back().fan_out(); }
    std::size_t param_count() const;

    friend bool operator==(const Mlp&, const Mlp&) = default;
};

// Per-layer intermediates of one forward pass, retained for backward.
struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre_activations;
    std::vector<Matrix> activations;
};

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// He-initialized weights (normal, std sqrt(2/fan_in)), zero biases; hidden
// layers relu, final layer softmax.
Mlp init_mlp(std::span<const std::size_t> layer_widths, RngState& rng);
Mlp init_mlp(std::initializer_list<std::size_t> layer_widths, RngState& rng);

// Row-wise softmax with max subtraction; outputs in (0,1], rows sum to 1.
Matrix softmax_rows(const Matrix& logits);

std::pair<Matrix, ForwardCache> forward(const Mlp& model, const Matrix& X);

// Forward pass that does not retain intermediates.
Matrix predict(const Mlp& model, const Matrix& X);

// Floor applied inside the log of the loss.
inline constexpr double kLogClamp = 1e-12;

// Mean over rows of -sum_n targets_n * log(max(probs_n, kLogClamp)).
double cross_entropy(const Matrix& probs, const Matrix& targets);

Gradients backward(const Mlp& model, const ForwardCache& cache, const Matrix& targets);

// Max over parameters of |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// with central differences of step h. Restores the model before returning.
double grad_check_max_rel_err(Mlp& model, const Matrix& X, const Matrix& targets, double h);

// Index of the row maximum; the lowest index wins ties.
std::size_t argmax_row(const Matrix& m, std::size_t row);

// Fraction of rows whose argmax equals the label.
double accuracy(const Matrix& probs, std::span<const std::size_t> labels);

}  // namespace acet
