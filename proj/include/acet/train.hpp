#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "acet/datasets.hpp"
#include "acet/nn.hpp"
#include "acet/rng.hpp"

namespace acet {

enum class Method { standard, acet };

const char* method_name(Method m);          // "st" / "acet"
Method method_from_name(const std::string& name);  // accepts st|standard|acet

struct TrainConfig {
    Method method = Method::standard;
    double epsilon = 1e-5;                // equilibrium threshold
    double dt = 0.1;                      // target increment step
    std::size_t epochs_per_increment = 5;
    std::size_t max_epochs = 200;         // total epoch budget, ramp included
    std::size_t batch_size = 32;
    double lr = 0.001;
    double lr_decay = 0.0;                // 0 = constant rate
    std::uint64_t seed = 0;
    std::optional<std::size_t> early_stopping_patience;
    std::optional<double> label_smoothing_alpha;  // standard-only comparison mode
    bool record_wall_time = true;         // false writes wall_s as 0 (reproducible output)
};

struct EpochRecord {
    std::size_t epoch = 0;
    double t_value = 1.0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double test_loss = 0.0;
    double test_acc = 0.0;
    double epoch_wall_seconds = 0.0;
    std::size_t updates_performed = 0;
    std::size_t updates_skipped = 0;

    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// Loss change measured at fixed parameters when the target moves from t_from
// to t_to, together with the analytic bound it must respect.
struct IncrementJump {
    double t_from = 0.0;
    double t_to = 0.0;
    double loss_before = 0.0;
    double loss_after = 0.0;
    double bound = 0.0;

    friend bool operator==(const IncrementJump&, const IncrementJump&) = default;
};

struct RunHistory {
    std::vector<EpochRecord> epochs;
    std::vector<IncrementJump> increment_jumps;  // populated by train_acet
    double best_test_acc = 0.0;
    double total_wall_seconds = 0.0;
    bool stopped_early = false;

    friend bool operator==(const RunHistory&, const RunHistory&) = default;
};

// Mini-batch Adam against fixed one-hot targets (or label-smoothed targets
// when config.label_smoothing_alpha is set). Every batch updates.
RunHistory train_standard(Mlp& model, const Dataset& train, const Dataset& test,
                          const TrainConfig& config, RngState& rng);

// Progressive-target training: for each t in the increment schedule, run up to
// epochs_per_increment epochs against y(t); a batch already in equilibrium is
// skipped, and a phase ends early once a full epoch's mean loss is in
// equilibrium. After t reaches 1 training continues on one-hot targets (gate
// still active) until max_epochs or early stopping.
RunHistory train_acet(Mlp& model, const Dataset& train, const Dataset& test,
                      const TrainConfig& config, RngState& rng);

}  // namespace acet
