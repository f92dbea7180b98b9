#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "acet/datasets.hpp"
#include "acet/schedule.hpp"
#include "acet/train.hpp"

using namespace acet;

namespace {

struct Bench {
    Dataset train;
    Dataset test;
    Mlp model;
};

Bench small_spiral(std::uint64_t seed = 1) {
    GeneratorSpec spec;
    spec.kind = GeneratorSpec::Kind::spiral;
    spec.noise_std = 0.3;
    Bench b;
    std::tie(b.train, b.test) = train_test_gen(spec, 90, 90, seed);
    RngState rng(seed);
    b.model = init_mlp({2, 16, 16, 3}, rng);
    return b;
}

TrainConfig base_config(Method m) {
    TrainConfig cfg;
    cfg.method = m;
    cfg.epsilon = 1e-6;
    cfg.dt = 0.1;
    cfg.epochs_per_increment = 2;
    cfg.max_epochs = 30;
    cfg.batch_size = 16;
    cfg.lr = 0.005;
    cfg.record_wall_time = false;
    return cfg;
}

}  // namespace

TEST_CASE("train_standard: baseline contract") {
    Bench b = small_spiral();
    const TrainConfig cfg = base_config(Method::standard);
    RngState rng(3);
    const RunHistory h = train_standard(b.model, b.train, b.test, cfg, rng);

    CHECK(h.epochs.size() <= cfg.max_epochs);
    REQUIRE(!h.epochs.empty());
    for (const auto& e : h.epochs) {
        CHECK(e.t_value == 1.0);
        CHECK(e.updates_skipped == 0);
        // every batch performs an update
        const std::size_t batches = (b.train.size() + cfg.batch_size - 1) / cfg.batch_size;
        CHECK(e.updates_performed == batches);
        CHECK(std::isfinite(e.train_loss));
        CHECK(e.train_loss >= 0.0);
    }
    CHECK(h.increment_jumps.empty());

    double best = 0.0;
    for (const auto& e : h.epochs) best = std::max(best, e.test_acc);
    CHECK(h.best_test_acc == best);
}

TEST_CASE("train_standard: same seed twice is identical") {
    Bench b1 = small_spiral(5);
    Bench b2 = small_spiral(5);
    const TrainConfig cfg = base_config(Method::standard);
    RngState r1(7), r2(7);
    const RunHistory h1 = train_standard(b1.model, b1.train, b1.test, cfg, r1);
    const RunHistory h2 = train_standard(b2.model, b2.train, b2.test, cfg, r2);
    CHECK(h1 == h2);
    CHECK(b1.model == b2.model);
}

TEST_CASE("train_standard: method and smoothing validation") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::acet);
    RngState rng(1);
    CHECK_THROWS_AS(train_standard(b.model, b.train, b.test, cfg, rng), std::invalid_argument);

    cfg = base_config(Method::standard);
    cfg.label_smoothing_alpha = 1.5;
    CHECK_THROWS_AS(train_standard(b.model, b.train, b.test, cfg, rng), std::invalid_argument);
}

TEST_CASE("train_standard: label smoothing records t = 1 - alpha") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::standard);
    cfg.label_smoothing_alpha = 0.2;
    cfg.max_epochs = 3;
    RngState rng(2);
    const RunHistory h = train_standard(b.model, b.train, b.test, cfg, rng);
    for (const auto& e : h.epochs) CHECK(e.t_value == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("train_standard: data/model shape mismatch") {
    Bench b = small_spiral();
    RngState wrong_rng(1);
    Mlp wrong = init_mlp({3, 8, 3}, wrong_rng);
    const TrainConfig cfg = base_config(Method::standard);
    RngState rng(1);
    CHECK_THROWS_AS(train_standard(wrong, b.train, b.test, cfg, rng), std::invalid_argument);
}

TEST_CASE("train_acet: huge epsilon gates every update") {
    Bench b = small_spiral();
    const Mlp initial = b.model;
    TrainConfig cfg = base_config(Method::acet);
    cfg.epsilon = 10.0;
    cfg.max_epochs = 40;
    cfg.early_stopping_patience = 5;
    RngState rng(4);
    const RunHistory h = train_acet(b.model, b.train, b.test, cfg, rng);

    std::size_t updates = 0, skips = 0;
    for (const auto& e : h.epochs) {
        updates += e.updates_performed;
        skips += e.updates_skipped;
    }
    CHECK(updates == 0);
    CHECK(skips > 0);
    CHECK(b.model == initial);  // parameters bit-identical to the start
    // every ramp phase exits after one epoch under a huge epsilon
    const auto times = increment_times(TargetSchedule(3, cfg.dt));
    for (std::size_t i = 0; i < times.size() && i < h.epochs.size(); ++i)
        CHECK(h.epochs[i].t_value == doctest::Approx(times[i]).epsilon(1e-15));
}

TEST_CASE("train_acet: ramp structure with no early exits") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::acet);
    cfg.epsilon = 1e-12;  // nothing is ever in equilibrium
    cfg.epochs_per_increment = 5;
    cfg.max_epochs = 60;
    RngState rng(5);
    const RunHistory h = train_acet(b.model, b.train, b.test, cfg, rng);

    REQUIRE(h.epochs.size() == 60);
    // 10 phases x 5 epochs of ramp; the t = 1 phase begins at epoch 45
    CHECK(h.epochs[44].t_value == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(h.epochs[45].t_value == 1.0);
    CHECK(h.epochs[49].t_value == 1.0);
    CHECK(h.epochs[50].t_value == 1.0);  // post-ramp continues at t = 1
    double prev = 0.0;
    for (const auto& e : h.epochs) {  // t never decreases
        CHECK(e.t_value >= prev);
        prev = e.t_value;
    }
    // with a tiny epsilon every batch updates
    for (const auto& e : h.epochs) {
        CHECK(e.updates_skipped == 0);
        const std::size_t batches = (b.train.size() + cfg.batch_size - 1) / cfg.batch_size;
        CHECK(e.updates_performed + e.updates_skipped == batches);
    }
}

TEST_CASE("train_acet: increment jumps are recorded and bounded") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::acet);
    cfg.max_epochs = 25;
    RngState rng(6);
    const RunHistory h = train_acet(b.model, b.train, b.test, cfg, rng);

    REQUIRE(h.increment_jumps.size() == 10);  // one per schedule step, 0->0.1 ... 0.9->1.0
    CHECK(h.increment_jumps.front().t_from == 0.0);
    CHECK(h.increment_jumps.back().t_to == 1.0);
    for (const auto& j : h.increment_jumps) {
        CHECK(std::abs(j.loss_after - j.loss_before) <= j.bound);
        CHECK(j.t_to > j.t_from);
    }
}

TEST_CASE("train_acet: determinism and validation") {
    Bench b1 = small_spiral(8), b2 = small_spiral(8);
    TrainConfig cfg = base_config(Method::acet);
    RngState r1(9), r2(9);
    const RunHistory h1 = train_acet(b1.model, b1.train, b1.test, cfg, r1);
    const RunHistory h2 = train_acet(b2.model, b2.train, b2.test, cfg, r2);
    CHECK(h1 == h2);
    CHECK(b1.model == b2.model);

    TrainConfig bad = cfg;
    bad.dt = 0.3;  // 1/dt not integral
    RngState r3(9);
    CHECK_THROWS_AS(train_acet(b1.model, b1.train, b1.test, bad, r3), std::invalid_argument);

    TrainConfig wrong_method = base_config(Method::standard);
    CHECK_THROWS_AS(train_acet(b1.model, b1.train, b1.test, wrong_method, r3),
                    std::invalid_argument);

    TrainConfig smoothing = cfg;
    smoothing.label_smoothing_alpha = 0.1;
    CHECK_THROWS_AS(train_acet(b1.model, b1.train, b1.test, smoothing, r3),
                    std::invalid_argument);
}

TEST_CASE("early stopping: halts after patience epochs without improvement") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::standard);
    cfg.max_epochs = 400;
    cfg.early_stopping_patience = 8;
    RngState rng(10);
    const RunHistory h = train_standard(b.model, b.train, b.test, cfg, rng);

    REQUIRE(h.stopped_early);
    CHECK(h.epochs.size() < cfg.max_epochs);
    // the trailing `patience` epochs show no improvement over the best before them
    const std::size_t n = h.epochs.size();
    REQUIRE(n > 8);
    double best_before = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 8 < n; ++i)
        best_before = std::min(best_before, h.epochs[i].test_loss);
    for (std::size_t i = n - 8; i < n; ++i) CHECK(h.epochs[i].test_loss >= best_before);

    // best_test_acc reflects the best epoch, not the last
    double best = 0.0;
    for (const auto& e : h.epochs) best = std::max(best, e.test_acc);
    CHECK(h.best_test_acc == best);
}

TEST_CASE("train_acet: early stopping only halts at t = 1") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::acet);
    cfg.epsilon = 1e-12;
    cfg.epochs_per_increment = 3;
    cfg.max_epochs = 200;
    cfg.early_stopping_patience = 1;  // aggressively small
    RngState rng(11);
    const RunHistory h = train_acet(b.model, b.train, b.test, cfg, rng);
    // the run must have reached the full schedule before any halt
    CHECK(h.epochs.back().t_value == 1.0);
    REQUIRE(h.stopped_early);
}

TEST_CASE("wall time recording toggle") {
    Bench b = small_spiral();
    TrainConfig cfg = base_config(Method::standard);
    cfg.max_epochs = 3;
    cfg.record_wall_time = true;
    RngState rng(12);
    const RunHistory timed = train_standard(b.model, b.train, b.test, cfg, rng);
    double sum = 0.0;
    for (const auto& e : timed.epochs) {
        CHECK(e.epoch_wall_seconds >= 0.0);
        sum += e.epoch_wall_seconds;
    }
    CHECK(timed.total_wall_seconds == doctest::Approx(sum).epsilon(1e-12));

    Bench b2 = small_spiral();
    cfg.record_wall_time = false;
    RngState rng2(12);
    const RunHistory untimed = train_standard(b2.model, b2.train, b2.test, cfg, rng2);
    for (const auto& e : untimed.epochs) CHECK(e.epoch_wall_seconds == 0.0);
    CHECK(untimed.total_wall_seconds == 0.0);
}
