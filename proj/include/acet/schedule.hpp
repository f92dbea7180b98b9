#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "acet/matrix.hpp"

namespace acet {

// Progressive target schedule: y_c(t) = t * onehot(c) + (1 - t)/n_classes.
// dt is the increment step; 1/dt must be an integer so the schedule lands
// exactly on t = 1.
struct TargetSchedule {
    TargetSchedule(std::size_t n_classes, double dt);

    std::size_t n_classes;
    double dt;
};

// y_c(t) for one class; entries are (1-t)/n plus t on the class entry, so the
// endpoints are exact: uniform at t=0, one-hot at t=1.
std::vector<double> target_vector(const TargetSchedule& schedule, double t,
                                  std::size_t class_index);

// [dt, 2*dt, ..., 1.0]; the final value is forced to exactly 1.0.
std::vector<double> increment_times(const TargetSchedule& schedule);

// Max-norm of d y_c / dt = onehot(c) - 1/n, which equals 1 - 1/n exactly.
double derivative_bound_inf(std::size_t n_classes);

// Equilibrium test: a loss below epsilon means the network is balanced with
// its current targets and the update can be skipped.
struct EquilibriumGate {
    explicit EquilibriumGate(double epsilon);
    double epsilon;
};

// Strict inequality: loss < epsilon.
bool in_equilibrium(const EquilibriumGate& gate, double loss);

// Analytic bound on the loss change across one target increment at fixed
// parameters: dt * 2*(1 - 1/n) * max |log max(p, 1e-12)|, via Hoelder on
// delta-target (l1) against the clamped log-probabilities (max norm).
double loss_jump_bound(const Matrix& probs, const TargetSchedule& schedule, double dt);

// Row-stochastic target matrix for a batch of labels at schedule position t.
Matrix target_rows(const TargetSchedule& schedule, double t,
                   std::span<const std::size_t> labels);

}  // namespace acet
