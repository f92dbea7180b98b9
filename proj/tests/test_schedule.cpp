#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "acet/nn.hpp"
#include "acet/rng.hpp"
#include "acet/schedule.hpp"

using namespace acet;

TEST_CASE("schedule validation") {
    CHECK_NOTHROW(TargetSchedule(3, 0.1));
    CHECK_NOTHROW(TargetSchedule(2, 1.0));
    CHECK_NOTHROW(TargetSchedule(2, 0.5));
    CHECK_THROWS_AS(TargetSchedule(1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(TargetSchedule(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TargetSchedule(3, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(TargetSchedule(3, 0.3), std::invalid_argument);  // 1/0.3 not integral
}

TEST_CASE("target_vector endpoints are exact") {
    const TargetSchedule s3(3, 0.1);
    const auto y0 = target_vector(s3, 0.0, 0);
    for (double v : y0) CHECK(v == 1.0 / 3.0);

    const auto y1 = target_vector(s3, 1.0, 1);
    CHECK(y1[0] == 0.0);
    CHECK(y1[1] == 1.0);
    CHECK(y1[2] == 0.0);

    const TargetSchedule s2(2, 0.5);
    const auto yh = target_vector(s2, 0.5, 0);
    CHECK(yh[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(yh[1] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("target_vector domain errors") {
    const TargetSchedule s(3, 0.1);
    CHECK_THROWS_AS(target_vector(s, -0.1, 0), std::domain_error);
    CHECK_THROWS_AS(target_vector(s, 1.1, 0), std::domain_error);
    CHECK_THROWS_AS(target_vector(s, 0.5, 3), std::out_of_range);
}

TEST_CASE("target_vector properties: sum, monotone emergence, linearity") {
    RngState rng(6);
    for (const std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{10}}) {
        const TargetSchedule s(n, 0.1);
        for (int trial = 0; trial < 300; ++trial) {
            const std::size_t c = rng.next_below(n);
            double t1 = rng.uniform(), t2 = rng.uniform();
            if (t1 > t2) std::swap(t1, t2);
            t2 = std::min(1.0, t2 + 1e-6);  // keep the pair separated

            const auto y1 = target_vector(s, t1, c);
            const auto y2 = target_vector(s, t2, c);

            double sum1 = 0.0;
            for (double v : y1) sum1 += v;
            CHECK(std::abs(sum1 - 1.0) <= 1e-12);

            // class entry strictly grows, all others strictly shrink
            CHECK(y2[c] > y1[c]);
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) CHECK(y2[j] < y1[j]);

            // difference identity: y(t2) - y(t1) = (t2 - t1) (onehot - 1/n)
            for (std::size_t j = 0; j < n; ++j) {
                const double expect =
                    (t2 - t1) * ((j == c ? 1.0 : 0.0) - 1.0 / static_cast<double>(n));
                CHECK(std::abs((y2[j] - y1[j]) - expect) <= 1e-12);
            }
        }
    }
}

TEST_CASE("increment_times lands exactly on 1.0") {
    const auto t10 = increment_times(TargetSchedule(3, 0.1));
    REQUIRE(t10.size() == 10);
    CHECK(t10.front() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(t10.back() == 1.0);
    for (std::size_t i = 1; i < t10.size(); ++i) CHECK(t10[i] > t10[i - 1]);

    const auto t2 = increment_times(TargetSchedule(2, 0.5));
    REQUIRE(t2.size() == 2);
    CHECK(t2[0] == 0.5);
    CHECK(t2[1] == 1.0);

    const auto t1 = increment_times(TargetSchedule(4, 1.0));
    REQUIRE(t1.size() == 1);
    CHECK(t1[0] == 1.0);
}

TEST_CASE("derivative_bound_inf values and exact max-norm equality") {
    CHECK(derivative_bound_inf(2) == 0.5);
    CHECK(derivative_bound_inf(3) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(derivative_bound_inf(10) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK_THROWS_AS(derivative_bound_inf(1), std::domain_error);

    // max-norm of (onehot - 1/n) equals the bound exactly
    for (const std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{10}}) {
        double max_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = (j == 0 ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
            max_norm = std::max(max_norm, std::abs(d));
        }
        CHECK(std::abs(max_norm - derivative_bound_inf(n)) <= 1e-12);
    }
}

TEST_CASE("in_equilibrium: strict inequality") {
    const EquilibriumGate g6(1e-6);
    CHECK(in_equilibrium(g6, 1e-7));
    CHECK_FALSE(in_equilibrium(g6, 1e-6));  // equality is out of equilibrium
    const EquilibriumGate g5(1e-5);
    CHECK_FALSE(in_equilibrium(g5, 0.2));
}

TEST_CASE("EquilibriumGate validation") {
    CHECK_THROWS_AS(EquilibriumGate(0.0), std::invalid_argument);
    CHECK_THROWS_AS(EquilibriumGate(-1.0), std::invalid_argument);
    CHECK_NOTHROW(EquilibriumGate(1e-12));
    CHECK_NOTHROW(EquilibriumGate(10.0));
}

TEST_CASE("loss_jump_bound hand values") {
    const TargetSchedule s(2, 0.1);
    const Matrix uniform = Matrix::from_rows({{0.5, 0.5}});
    // 0.1 * 2*(1 - 1/2) * ln 2
    CHECK(loss_jump_bound(uniform, s, 0.1) ==
          doctest::Approx(0.1 * std::log(2.0)).epsilon(1e-12));
    CHECK(loss_jump_bound(uniform, s, 0.1) == doctest::Approx(0.0693).epsilon(1e-3));
    CHECK(loss_jump_bound(uniform, s, 0.0) == 0.0);
}

TEST_CASE("loss_jump_bound dominates the measured loss change") {
    RngState rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.next_below(5);
        const TargetSchedule s(n, 0.1);
        const std::size_t batch = 1 + rng.next_below(6);

        // random probabilities from a softmax so they are row-stochastic
        Matrix logits(batch, n);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < n; ++j) logits(i, j) = 6.0 * rng.normal();
        const Matrix probs = softmax_rows(logits);

        std::vector<std::size_t> labels(batch);
        for (auto& l : labels) l = rng.next_below(n);

        const double k = 1.0 + rng.next_below(9);
        const double t1 = (k - 1.0) * 0.1;
        const double t2 = k * 0.1;

        const double before = cross_entropy(probs, target_rows(s, t1, labels));
        const double after = cross_entropy(probs, target_rows(s, t2, labels));
        CHECK(std::abs(after - before) <= loss_jump_bound(probs, s, 0.1));
    }
}

TEST_CASE("target_rows stacks per-label target vectors") {
    const TargetSchedule s(3, 0.5);
    const std::vector<std::size_t> labels = {2, 0};
    const Matrix rows = target_rows(s, 0.5, labels);
    REQUIRE(rows.rows() == 2);
    const auto y2 = target_vector(s, 0.5, 2);
    const auto y0 = target_vector(s, 0.5, 0);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(rows(0, j) == y2[j]);
        CHECK(rows(1, j) == y0[j]);
    }
    CHECK_THROWS_AS(target_rows(s, 0.5, std::vector<std::size_t>{5}), std::out_of_range);
}
