// Scalar reference kernels. These define the arithmetic order every SIMD
// backend must reproduce exactly: output-column loops are innermost and each
// reduction runs in increasing row/k index with separate mul and add.

#include <cmath>
#include <cstring>

#include "kernels_table.hpp"

namespace acet::kern {
namespace {

void matmul_scalar(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_at_b_scalar(const double* a, const double* b, double* c,
                        std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, k * n * sizeof(double));
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            double* crow = c + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_row_vector_scalar(double* c, const double* v, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        double* crow = c + i * cols;
        for (std::size_t j = 0; j < cols; ++j) crow[j] += v[j];
    }
}

void relu_forward_scalar(const double* z, double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward_scalar(const double* z, double* grad, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!(z[i] > 0.0)) grad[i] = 0.0;
}

void col_sums_scalar(const double* a, double* out, std::size_t rows, std::size_t cols) {
    std::memset(out, 0, cols * sizeof(double));
    for (std::size_t i = 0; i < rows; ++i) {
        const double* arow = a + i * cols;
        for (std::size_t j = 0; j < cols; ++j) out[j] += arow[j];
    }
}

void adam_update_scalar(double* param, const double* grad, double* m, double* v, std::size_t n,
                        double lr, double beta1, double beta2, double eps_hat,
                        double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= (lr * mhat) / (std::sqrt(vhat) + eps_hat);
    }
}

constexpr KernelTable kScalarTable = {
    matmul_scalar,      matmul_at_b_scalar, add_row_vector_scalar, relu_forward_scalar,
    relu_backward_scalar, col_sums_scalar,  adam_update_scalar,
};

}  // namespace

const KernelTable* scalar_table() { return &kScalarTable; }

}  // namespace acet::kern
