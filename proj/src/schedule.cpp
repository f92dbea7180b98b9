#include "acet/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "acet/nn.hpp"

namespace acet {

TargetSchedule::TargetSchedule(std::size_t n_classes_, double dt_)
    : n_classes(n_classes_), dt(dt_) {
    if (n_classes < 2) throw std::invalid_argument("TargetSchedule: n_classes must be >= 2");
    if (!(dt > 0.0) || dt > 1.0)
        throw std::invalid_argument("TargetSchedule: dt must be in (0, 1]");
    const double steps = 1.0 / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument("TargetSchedule: 1/dt must be an integer");
}

std::vector<double> target_vector(const TargetSchedule& schedule, double t,
                                  std::size_t class_index) {
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("target_vector: t outside [0, 1]");
    if (class_index >= schedule.n_classes)
        throw std::out_of_range("target_vector: class_index out of range");
    const double off = (1.0 - t) / static_cast<double>(schedule.n_classes);
    std::vector<double> y(schedule.n_classes, off);
    y[class_index] = t + off;
    return y;
}

std::vector<double> increment_times(const TargetSchedule& schedule) {
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / schedule.dt));
    std::vector<double> times(steps);
    for (std::size_t i = 0; i + 1 < steps; ++i)
        times[i] = static_cast<double>(i + 1) * schedule.dt;
    times[steps - 1] = 1.0;
    return times;
}

double derivative_bound_inf(std::size_t n_classes) {
    if (n_classes < 2) throw std::domain_error("derivative_bound_inf: n_classes must be >= 2");
    return 1.0 - 1.0 / static_cast<double>(n_classes);
}

EquilibriumGate::EquilibriumGate(double epsilon_) : epsilon(epsilon_) {
    if (!(epsilon >= 1e-12) || !std::isfinite(epsilon))
        throw std::invalid_argument("EquilibriumGate: epsilon must be finite and >= 1e-12");
}

bool in_equilibrium(const EquilibriumGate& gate, double loss) { return loss < gate.epsilon; }

double loss_jump_bound(const Matrix& probs, const TargetSchedule& schedule, double dt) {
    double max_abs_log = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double l = std::abs(std::log(std::max(probs(i, j), kLogClamp)));
            if (l > max_abs_log) max_abs_log = l;
        }
    return dt * 2.0 * derivative_bound_inf(schedule.n_classes) * max_abs_log;
}

Matrix target_rows(const TargetSchedule& schedule, double t,
                   std::span<const std::size_t> labels) {
    // one target vector per class, copied into batch rows
    Matrix per_class(schedule.n_classes, schedule.n_classes);
    for (std::size_t c = 0; c < schedule.n_classes; ++c) {
        const auto y = target_vector(schedule, t, c);
        for (std::size_t j = 0; j < schedule.n_classes; ++j) per_class(c, j) = y[j];
    }
    Matrix out(labels.size(), schedule.n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= schedule.n_classes)
            throw std::out_of_range("target_rows: label out of range");
        for (std::size_t j = 0; j < schedule.n_classes; ++j) out(i, j) = per_class(labels[i], j);
    }
    return out;
}

}  // namespace acet
