// NEON variants (aarch64, two doubles per lane). Structure mirrors the AVX2
// file: output-column vectorization, scalar reduction order, mul+add (vmul +
// vadd, never vfma) so results match the scalar backend bit for bit.

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>
#include <cstring>

#include "kernels_table.hpp"

namespace acet::kern {
namespace {

void matmul_neon(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const float64x2_t avv = vdupq_n_f64(av);
            const double* brow = b + p * n;
            std::size_t j = 0;
            for (; j < n2; j += 2) {
                float64x2_t cj = vld1q_f64(crow + j);
                cj = vaddq_f64(cj, vmulq_f64(avv, vld1q_f64(brow + j)));
                vst1q_f64(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_at_b_neon(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, k * n * sizeof(double));
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const float64x2_t avv = vdupq_n_f64(av);
            double* crow = c + p * n;
            std::size_t j = 0;
            for (; j < n2; j += 2) {
                float64x2_t cj = vld1q_f64(crow + j);
                cj = vaddq_f64(cj, vmulq_f64(avv, vld1q_f64(brow + j)));
                vst1q_f64(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_row_vector_neon(double* c, const double* v, std::size_t rows, std::size_t cols) {
    const std::size_t n2 = cols & ~std::size_t(1);
    for (std::size_t i = 0; i < rows; ++i) {
        double* crow = c + i * cols;
        std::size_t j = 0;
        for (; j < n2; j += 2)
            vst1q_f64(crow + j, vaddq_f64(vld1q_f64(crow + j), vld1q_f64(v + j)));
        for (; j < cols; ++j) crow[j] += v[j];
    }
}

void relu_forward_neon(const double* z, double* a, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const std::size_t n2 = n & ~std::size_t(1);
    std::size_t i = 0;
    for (; i < n2; i += 2) vst1q_f64(a + i, vmaxq_f64(vld1q_f64(z + i), zero));
    for (; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward_neon(const double* z, double* grad, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const std::size_t n2 = n & ~std::size_t(1);
    std::size_t i = 0;
    for (; i < n2; i += 2) {
        const uint64x2_t mask = vcgtq_f64(vld1q_f64(z + i), zero);
        const uint64x2_t kept = vandq_u64(vreinterpretq_u64_f64(vld1q_f64(grad + i)), mask);
        vst1q_f64(grad + i, vreinterpretq_f64_u64(kept));
    }
    for (; i < n; ++i)
        if (!(z[i] > 0.0)) grad[i] = 0.0;
}

void col_sums_neon(const double* a, double* out, std::size_t rows, std::size_t cols) {
    std::memset(out, 0, cols * sizeof(double));
    const std::size_t n2 = cols & ~std::size_t(1);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* arow = a + i * cols;
        std::size_t j = 0;
        for (; j < n2; j += 2)
            vst1q_f64(out + j, vaddq_f64(vld1q_f64(out + j), vld1q_f64(arow + j)));
        for (; j < cols; ++j) out[j] += arow[j];
    }
}

void adam_update_neon(double* param, const double* grad, double* m, double* v, std::size_t n,
                      double lr, double beta1, double beta2, double eps_hat,
                      double bc1, double bc2) {
    const float64x2_t vb1 = vdupq_n_f64(beta1);
    const float64x2_t vb2 = vdupq_n_f64(beta2);
    const float64x2_t vo1 = vdupq_n_f64(1.0 - beta1);
    const float64x2_t vo2 = vdupq_n_f64(1.0 - beta2);
    const float64x2_t vbc1 = vdupq_n_f64(bc1);
    const float64x2_t vbc2 = vdupq_n_f64(bc2);
    const float64x2_t vlr = vdupq_n_f64(lr);
    const float64x2_t veps = vdupq_n_f64(eps_hat);
    const std::size_t n2 = n & ~std::size_t(1);
    std::size_t i = 0;
    for (; i < n2; i += 2) {
        const float64x2_t g = vld1q_f64(grad + i);
        const float64x2_t mi = vaddq_f64(vmulq_f64(vb1, vld1q_f64(m + i)), vmulq_f64(vo1, g));
        const float64x2_t vi =
            vaddq_f64(vmulq_f64(vb2, vld1q_f64(v + i)), vmulq_f64(vo2, vmulq_f64(g, g)));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t mhat = vdivq_f64(mi, vbc1);
        const float64x2_t vhat = vdivq_f64(vi, vbc2);
        const float64x2_t step =
            vdivq_f64(vmulq_f64(vlr, mhat), vaddq_f64(vsqrtq_f64(vhat), veps));
        vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= (lr * mhat) / (std::sqrt(vhat) + eps_hat);
    }
}

constexpr KernelTable kNeonTable = {
    matmul_neon,        matmul_at_b_neon, add_row_vector_neon, relu_forward_neon,
    relu_backward_neon, col_sums_neon,    adam_update_neon,
};

}  // namespace

const KernelTable* neon_table() { return &kNeonTable; }

}  // namespace acet::kern

#else

#include "kernels_table.hpp"

namespace acet::kern {
const KernelTable* neon_table() { return nullptr; }
}  // namespace acet::kern

#endif
