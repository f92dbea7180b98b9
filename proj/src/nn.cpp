#include "acet/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "acet/kernels.hpp"

namespace acet {
namespace {

// z = x * W + b, one dense layer, no activation.
Matrix affine(const Matrix& x, const DenseLayer& layer) {
    Matrix z(x.rows(), layer.fan_out());
    kern::matmul(x.data(), layer.weights.data(), z.data(), x.rows(), layer.fan_in(),
                 layer.fan_out());
    kern::add_row_vector(z.data(), layer.biases.data(), z.rows(), z.cols());
    return z;
}

Matrix activate(const Matrix& z, Activation act) {
    switch (act) {
        case Activation::relu: {
            Matrix a(z.rows(), z.cols());
            kern::relu_forward(z.data(), a.data(), z.size());
            return a;
        }
        case Activation::softmax: return softmax_rows(z);
        case Activation::identity: return z;
    }
    throw std::logic_error("unknown activation");
}

void check_input(const Mlp& model, const Matrix& x) {
    if (model.layers.empty()) throw std::invalid_argument("model has no layers");
    if (x.cols() != model.input_width())
        throw std::invalid_argument("input width does not match first layer fan_in");
}

}  // namespace

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.biases.size();
    return n;
}

Mlp init_mlp(std::span<const std::size_t> layer_widths, RngState& rng) {
    if (layer_widths.size() < 2)
        throw std::invalid_argument("init_mlp: need at least input and output widths");
    for (std::size_t w : layer_widths)
        if (w < 1) throw std::invalid_argument("init_mlp: zero-width layer");

    Mlp model;
    model.layers.reserve(layer_widths.size() - 1);
    for (std::size_t l = 0; l + 1 < layer_widths.size(); ++l) {
        const std::size_t fan_in = layer_widths[l];
        const std::size_t fan_out = layer_widths[l + 1];
        DenseLayer layer;
        layer.weights = Matrix(fan_in, fan_out);
        const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
        for (std::size_t r = 0; r < fan_in; ++r)
            for (std::size_t c = 0; c < fan_out; ++c) layer.weights(r, c) = std_dev * rng.normal();
        layer.biases.assign(fan_out, 0.0);
        layer.activation =
            (l + 2 == layer_widths.size()) ? Activation::softmax : Activation::relu;
        model.layers.push_back(std::move(layer));
    }
    return model;
}

Mlp init_mlp(std::initializer_list<std::size_t> layer_widths, RngState& rng) {
    return init_mlp(std::span<const std::size_t>(layer_widths.begin(), layer_widths.size()), rng);
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double maxv = logits(i, 0);
        for (std::size_t j = 1; j < logits.cols(); ++j) maxv = std::max(maxv, logits(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            const double e = std::exp(logits(i, j) - maxv);
            out(i, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) out(i, j) /= sum;
    }
    return out;
}

std::pair<Matrix, ForwardCache> forward(const Mlp& model, const Matrix& X) {
    check_input(model, X);
    ForwardCache cache;
    cache.input = X;
    cache.pre_activations.reserve(model.layers.size());
    cache.activations.reserve(model.layers.size());
    const Matrix* cur = &X;
    for (const auto& layer : model.layers) {
        cache.pre_activations.push_back(affine(*cur, layer));
        cache.activations.push_back(activate(cache.pre_activations.back(), layer.activation));
        cur = &cache.activations.back();
    }
    return {cache.activations.back(), std::move(cache)};
}

Matrix predict(const Mlp& model, const Matrix& X) {
    check_input(model, X);
    Matrix cur = X;
    for (const auto& layer : model.layers) cur = activate(affine(cur, layer), layer.activation);
    return cur;
}

double cross_entropy(const Matrix& probs, const Matrix& targets) {
    if (probs.rows() != targets.rows() || probs.cols() != targets.cols())
        throw std::invalid_argument("cross_entropy: shape mismatch");
    if (probs.rows() == 0) throw std::invalid_argument("cross_entropy: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double row_sum = 0.0;
        double row_loss = 0.0;
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double t = targets(i, j);
            row_sum += t;
            row_loss -= t * std::log(std::max(probs(i, j), kLogClamp));
        }
        if (std::abs(row_sum - 1.0) > 1e-9)
            throw std::invalid_argument("cross_entropy: target row does not sum to 1");
        total += row_loss;
    }
    return total / static_cast<double>(probs.rows());
}

Gradients backward(const Mlp& model, const ForwardCache& cache, const Matrix& targets) {
    const std::size_t n_layers = model.layers.size();
    if (cache.activations.size() != n_layers || cache.pre_activations.size() != n_layers)
        throw std::invalid_argument("backward: cache does not match model");
    for (std::size_t l = 0; l < n_layers; ++l) {
        const auto& layer = model.layers[l];
        if (cache.pre_activations[l].cols() != layer.fan_out() ||
            cache.activations[l].cols() != layer.fan_out())
            throw std::invalid_argument("backward: cache does not match model");
    }
    const Matrix& probs = cache.activations.back();
    if (targets.rows() != probs.rows() || targets.cols() != probs.cols())
        throw std::invalid_argument("backward: targets do not match cached output");
    if (cache.input.rows() != probs.rows())
        throw std::invalid_argument("backward: cache does not match model");

    const std::size_t batch = probs.rows();
    const double inv_batch = 1.0 / static_cast<double>(batch);

    Gradients grads;
    grads.weights.resize(n_layers);
    grads.biases.resize(n_layers);

    // Softmax + cross-entropy collapses to (p - y)/batch at the output logits.
    Matrix dz(batch, probs.cols());
    for (std::size_t i = 0; i < batch; ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            dz(i, j) = (probs(i, j) - targets(i, j)) * inv_batch;

    for (std::size_t l = n_layers; l-- > 0;) {
        const auto& layer = model.layers[l];
        const Matrix& a_prev = (l == 0) ? cache.input : cache.activations[l - 1];

        Matrix dw(layer.fan_in(), layer.fan_out());
        kern::matmul_at_b(a_prev.data(), dz.data(), dw.data(), batch, layer.fan_in(),
                          layer.fan_out());
        grads.weights[l] = std::move(dw);

        std::vector<double> db(layer.fan_out());
        kern::col_sums(dz.data(), db.data(), batch, layer.fan_out());
        grads.biases[l] = std::move(db);

        if (l > 0) {
            Matrix da(batch, layer.fan_in());
            kern::matmul_a_bt(dz.data(), layer.weights.data(), da.data(), batch, layer.fan_out(),
                              layer.fan_in());
            kern::relu_backward(cache.pre_activations[l - 1].data(), da.data(), da.size());
            dz = std::move(da);
        }
    }
    return grads;
}

double grad_check_max_rel_err(Mlp& model, const Matrix& X, const Matrix& targets, double h) {
    if (h <= 0.0) throw std::invalid_argument("grad_check: h must be positive");
    auto [probs, cache] = forward(model, X);
    const Gradients analytic = backward(model, cache, targets);

    const auto loss_at = [&]() { return cross_entropy(predict(model, X), targets); };
    const auto rel_err = [](double a, double n) {
        return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
    };

    double max_err = 0.0;
    const auto probe = [&](double& p, double analytic_g) {
        const double saved = p;
        p = saved + h;
        const double lp = loss_at();
        p = saved - h;
        const double lm = loss_at();
        p = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        max_err = std::max(max_err, rel_err(analytic_g, numeric));
    };

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto& layer = model.layers[l];
        for (std::size_t r = 0; r < layer.fan_in(); ++r)
            for (std::size_t c = 0; c < layer.fan_out(); ++c)
                probe(layer.weights(r, c), analytic.weights[l](r, c));
        for (std::size_t j = 0; j < layer.fan_out(); ++j)
            probe(layer.biases[j], analytic.biases[l][j]);
    }
    return max_err;
}

std::size_t argmax_row(const Matrix& m, std::size_t row) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < m.cols(); ++j)
        if (m(row, j) > m(row, best)) best = j;
    return best;
}

double accuracy(const Matrix& probs, std::span<const std::size_t> labels) {
    if (labels.size() != probs.rows()) throw std::invalid_argument("accuracy: label count mismatch");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        if (argmax_row(probs, i) == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(probs.rows());
}

}  // namespace acet
