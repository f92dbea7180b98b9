#pragma once

#include <cstddef>

namespace acet::kern {

struct KernelTable {
    void (*matmul)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
    void (*matmul_at_b)(const double*, const double*, double*, std::size_t, std::size_t, std::size_t);
    void (*add_row_vector)(double*, const double*, std::size_t, std::size_t);
    void (*relu_forward)(const double*, double*, std::size_t);
    void (*relu_backward)(const double*, double*, std::size_t);
    void (*col_sums)(const double*, double*, std::size_t, std::size_t);
    void (*adam_update)(double*, const double*, double*, double*, std::size_t,
                        double, double, double, double, double, double);
};

const KernelTable* scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled for x86
const KernelTable* neon_table();  // nullptr when not compiled for aarch64

}  // namespace acet::kern
