#include "acet/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "acet/optim.hpp"
#include "acet/schedule.hpp"

namespace acet {
namespace {

using Clock = std::chrono::steady_clock;

void check_data(const Mlp& model, const Dataset& train, const Dataset& test) {
    if (train.size() == 0 || test.size() == 0)
        throw std::invalid_argument("train: empty dataset");
    if (train.X.cols() != model.input_width() || test.X.cols() != model.input_width())
        throw std::invalid_argument("train: feature width does not match model input");
    if (train.n_classes != model.n_classes() || test.n_classes != model.n_classes())
        throw std::invalid_argument("train: class count does not match model output");
    if (train.labels.size() != train.size() || test.labels.size() != test.size())
        throw std::invalid_argument("train: label count mismatch");
}

void check_common(const TrainConfig& config) {
    if (config.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (!(config.lr > 0.0)) throw std::invalid_argument("train: lr must be positive");
    if (config.lr_decay < 0.0) throw std::invalid_argument("train: lr_decay must be >= 0");
    if (config.label_smoothing_alpha &&
        !(*config.label_smoothing_alpha >= 0.0 && *config.label_smoothing_alpha < 1.0))
        throw std::invalid_argument("train: label_smoothing_alpha must be in [0, 1)");
}

struct Evaluation {
    double loss;
    double acc;
};

// Test metrics are always against one-hot targets, the generalization
// quantity the accuracy tables report; train metrics use the current targets.
Evaluation evaluate_one_hot(const Mlp& model, const Dataset& data) {
    const Matrix probs = predict(model, data.X);
    Matrix one_hot(data.size(), data.n_classes);
    for (std::size_t i = 0; i < data.size(); ++i) one_hot(i, data.labels[i]) = 1.0;
    return {cross_entropy(probs, one_hot), accuracy(probs, data.labels)};
}

struct EpochOutcome {
    double mean_loss = 0.0;
    double mean_acc = 0.0;
    std::size_t updates = 0;
    std::size_t skips = 0;
};

// One pass over the training set in shuffled mini-batches. When gate_epsilon
// is set, a batch whose loss is already below it is skipped: no backward pass
// and no optimizer step. Batch loss/accuracy are accumulated from the
// pre-update forward pass either way.
EpochOutcome run_epoch(Mlp& model, AdamState& opt, const Dataset& train,
                       const Matrix& class_targets, std::optional<double> gate_epsilon,
                       const TrainConfig& config, const LrSchedule& schedule, RngState& rng) {
    const std::size_t n = train.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_below(i + 1)]);

    EpochOutcome out;
    double loss_weighted = 0.0;
    double acc_weighted = 0.0;

    const std::size_t n_classes = train.n_classes;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
        const std::size_t count = std::min(config.batch_size, n - start);
        Matrix bx(count, train.X.cols());
        Matrix bt(count, n_classes);
        std::vector<std::size_t> blabels(count);
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t src = order[start + i];
            for (std::size_t j = 0; j < train.X.cols(); ++j) bx(i, j) = train.X(src, j);
            for (std::size_t j = 0; j < n_classes; ++j) bt(i, j) = class_targets(train.labels[src], j);
            blabels[i] = train.labels[src];
        }

        auto [probs, cache] = forward(model, bx);
        const double batch_loss = cross_entropy(probs, bt);
        const double batch_acc = accuracy(probs, blabels);
        loss_weighted += batch_loss * static_cast<double>(count);
        acc_weighted += batch_acc * static_cast<double>(count);

        if (gate_epsilon && batch_loss < *gate_epsilon) {
            ++out.skips;
            continue;
        }
        const Gradients grads = backward(model, cache, bt);
        adam_step(model, grads, opt, lr_at(schedule, opt.step_count));
        ++out.updates;
    }

    out.mean_loss = loss_weighted / static_cast<double>(n);
    out.mean_acc = acc_weighted / static_cast<double>(n);
    return out;
}

struct EarlyStopTracker {
    std::optional<std::size_t> patience;
    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t stale = 0;

    // Returns true once `patience` consecutive epochs pass without a new best.
    bool observe(double test_loss) {
        if (test_loss < best_loss) {
            best_loss = test_loss;
            stale = 0;
        } else {
            ++stale;
        }
        return patience && stale >= *patience;
    }
};

struct RunState {
    RunHistory history;
    EarlyStopTracker stopper;
    double t0_wall = 0.0;
};

// Shared epoch bookkeeping: timing, evaluation, history row.
void record_epoch(RunState& rs, const Mlp& model, const Dataset& test, double t_value,
                  const EpochOutcome& out, const TrainConfig& config, Clock::time_point begin) {
    EpochRecord rec;
    rec.epoch = rs.history.epochs.size();
    rec.t_value = t_value;
    rec.train_loss = out.mean_loss;
    rec.train_acc = out.mean_acc;
    const Evaluation ev = evaluate_one_hot(model, test);
    rec.test_loss = ev.loss;
    rec.test_acc = ev.acc;
    rec.updates_performed = out.updates;
    rec.updates_skipped = out.skips;
    if (config.record_wall_time) {
        rec.epoch_wall_seconds =
            std::chrono::duration<double>(Clock::now() - begin).count();
        rs.history.total_wall_seconds += rec.epoch_wall_seconds;
    }
    rs.history.best_test_acc = std::max(rs.history.best_test_acc, rec.test_acc);
    rs.history.epochs.push_back(rec);
}

Matrix one_hot_class_targets(std::size_t n_classes) {
    Matrix m(n_classes, n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) m(c, c) = 1.0;
    return m;
}

}  // namespace

const char* method_name(Method m) { return m == Method::standard ? "st" : "acet"; }

Method method_from_name(const std::string& name) {
    if (name == "st" || name == "standard") return Method::standard;
    if (name == "acet") return Method::acet;
    throw std::invalid_argument("unknown method: " + name);
}

RunHistory train_standard(Mlp& model, const Dataset& train, const Dataset& test,
                          const TrainConfig& config, RngState& rng) {
    if (config.method != Method::standard)
        throw std::invalid_argument("train_standard: config.method must be standard");
    check_common(config);
    check_data(model, train, test);

    const std::size_t n_classes = train.n_classes;
    const double alpha = config.label_smoothing_alpha.value_or(0.0);
    Matrix class_targets;
    double t_value = 1.0;
    if (alpha > 0.0) {
        // label smoothing is the fixed schedule position t = 1 - alpha
        const TargetSchedule schedule(n_classes, 1.0);
        t_value = 1.0 - alpha;
        class_targets = Matrix(n_classes, n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) {
            const auto y = target_vector(schedule, t_value, c);
            for (std::size_t j = 0; j < n_classes; ++j) class_targets(c, j) = y[j];
        }
    } else {
        class_targets = one_hot_class_targets(n_classes);
    }

    AdamState opt = adam_init(model, AdamHyper{.lr = config.lr});
    const LrSchedule schedule{config.lr_decay > 0.0 ? LrMode::inverse_decay : LrMode::constant,
                              config.lr, config.lr_decay};

    RunState rs;
    rs.stopper.patience = config.early_stopping_patience;
    for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
        const auto begin = Clock::now();
        const EpochOutcome out =
            run_epoch(model, opt, train, class_targets, std::nullopt, config, schedule, rng);
        record_epoch(rs, model, test, t_value, out, config, begin);
        if (rs.stopper.observe(rs.history.epochs.back().test_loss)) {
            rs.history.stopped_early = true;
            break;
        }
    }
    return rs.history;
}

RunHistory train_acet(Mlp& model, const Dataset& train, const Dataset& test,
                      const TrainConfig& config, RngState& rng) {
    if (config.method != Method::acet)
        throw std::invalid_argument("train_acet: config.method must be acet");
    if (config.epochs_per_increment < 1)
        throw std::invalid_argument("train_acet: epochs_per_increment must be >= 1");
    if (config.label_smoothing_alpha)
        throw std::invalid_argument("train_acet: label smoothing only applies to standard training");
    check_common(config);
    check_data(model, train, test);

    const TargetSchedule target_schedule(train.n_classes, config.dt);
    const EquilibriumGate gate(config.epsilon);
    const std::vector<double> times = increment_times(target_schedule);

    AdamState opt = adam_init(model, AdamHyper{.lr = config.lr});
    const LrSchedule lr_schedule{config.lr_decay > 0.0 ? LrMode::inverse_decay : LrMode::constant,
                                 config.lr, config.lr_decay};

    RunState rs;
    rs.stopper.patience = config.early_stopping_patience;

    const auto class_targets_at = [&](double t) {
        Matrix m(train.n_classes, train.n_classes);
        for (std::size_t c = 0; c < train.n_classes; ++c) {
            const auto y = target_vector(target_schedule, t, c);
            for (std::size_t j = 0; j < train.n_classes; ++j) m(c, j) = y[j];
        }
        return m;
    };

    // Fixed-parameter loss jump across each target increment, with its bound.
    const auto record_jump = [&](double t_from, double t_to) {
        const Matrix probs = predict(model, train.X);
        IncrementJump jump;
        jump.t_from = t_from;
        jump.t_to = t_to;
        jump.loss_before =
            cross_entropy(probs, target_rows(target_schedule, t_from, train.labels));
        jump.loss_after =
            cross_entropy(probs, target_rows(target_schedule, t_to, train.labels));
        jump.bound = loss_jump_bound(probs, target_schedule, config.dt);
        rs.history.increment_jumps.push_back(jump);
    };

    bool halted = false;
    double prev_t = 0.0;
    for (const double t : times) {
        if (rs.history.epochs.size() >= config.max_epochs || halted) break;
        record_jump(prev_t, t);
        prev_t = t;
        const Matrix class_targets = class_targets_at(t);
        for (std::size_t e = 0; e < config.epochs_per_increment; ++e) {
            if (rs.history.epochs.size() >= config.max_epochs) break;
            const auto begin = Clock::now();
            const EpochOutcome out = run_epoch(model, opt, train, class_targets, gate.epsilon,
                                               config, lr_schedule, rng);
            record_epoch(rs, model, test, t, out, config, begin);
            const bool patience_exhausted =
                rs.stopper.observe(rs.history.epochs.back().test_loss);
            // Early stopping may only halt once the schedule has reached t = 1.
            if (patience_exhausted && t >= 1.0) {
                rs.history.stopped_early = true;
                halted = true;
                break;
            }
            // The phase advances early once a whole epoch sits in equilibrium.
            if (in_equilibrium(gate, out.mean_loss)) break;
        }
    }

    // Post-ramp: one-hot targets on the remaining epoch budget, gate intact.
    if (!halted) {
        const Matrix class_targets = class_targets_at(1.0);
        while (rs.history.epochs.size() < config.max_epochs) {
            const auto begin = Clock::now();
            const EpochOutcome out = run_epoch(model, opt, train, class_targets, gate.epsilon,
                                               config, lr_schedule, rng);
            record_epoch(rs, model, test, 1.0, out, config, begin);
            if (rs.stopper.observe(rs.history.epochs.back().test_loss)) {
                rs.history.stopped_early = true;
                break;
            }
        }
    }
    return rs.history;
}

}  // namespace acet
