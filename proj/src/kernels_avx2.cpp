// AVX2 variants. Each loop vectorizes across output columns in chunks of four
// doubles and keeps the scalar reference's reduction order; mul+add is used
// instead of FMA so results stay bit-identical to the scalar backend. This
// file is compiled with -mavx2 -ffp-contract=off on x86 and is empty elsewhere.

#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "kernels_table.hpp"

namespace acet::kern {
namespace {

void matmul_avx2(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, m * n * sizeof(double));
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const __m256d avv = _mm256_set1_pd(av);
            const double* brow = b + p * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(avv, _mm256_loadu_pd(brow + j)));
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_at_b_avx2(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t k, std::size_t n) {
    std::memset(c, 0, k * n * sizeof(double));
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const __m256d avv = _mm256_set1_pd(av);
            double* crow = c + p * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(avv, _mm256_loadu_pd(brow + j)));
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_row_vector_avx2(double* c, const double* v, std::size_t rows, std::size_t cols) {
    const std::size_t n4 = cols & ~std::size_t(3);
    for (std::size_t i = 0; i < rows; ++i) {
        double* crow = c + i * cols;
        std::size_t j = 0;
        for (; j < n4; j += 4)
            _mm256_storeu_pd(crow + j,
                             _mm256_add_pd(_mm256_loadu_pd(crow + j), _mm256_loadu_pd(v + j)));
        for (; j < cols; ++j) crow[j] += v[j];
    }
}

void relu_forward_avx2(const double* z, double* a, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    std::size_t i = 0;
    for (; i < n4; i += 4)
        _mm256_storeu_pd(a + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
    for (; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward_avx2(const double* z, double* grad, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), mask));
    }
    for (; i < n; ++i)
        if (!(z[i] > 0.0)) grad[i] = 0.0;
}

void col_sums_avx2(const double* a, double* out, std::size_t rows, std::size_t cols) {
    std::memset(out, 0, cols * sizeof(double));
    const std::size_t n4 = cols & ~std::size_t(3);
    for (std::size_t i = 0; i < rows; ++i) {
        const double* arow = a + i * cols;
        std::size_t j = 0;
        for (; j < n4; j += 4)
            _mm256_storeu_pd(out + j,
                             _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(arow + j)));
        for (; j < cols; ++j) out[j] += arow[j];
    }
}

void adam_update_avx2(double* param, const double* grad, double* m, double* v, std::size_t n,
                      double lr, double beta1, double beta2, double eps_hat,
                      double bc1, double bc2) {
    const __m256d vb1 = _mm256_set1_pd(beta1);
    const __m256d vb2 = _mm256_set1_pd(beta2);
    const __m256d vo1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d vo2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d vbc1 = _mm256_set1_pd(bc1);
    const __m256d vbc2 = _mm256_set1_pd(bc2);
    const __m256d vlr = _mm256_set1_pd(lr);
    const __m256d veps = _mm256_set1_pd(eps_hat);
    const std::size_t n4 = n & ~std::size_t(3);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        const __m256d mi =
            _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(vo1, g));
        const __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(vo2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_div_pd(mi, vbc1);
        const __m256d vhat = _mm256_div_pd(vi, vbc2);
        const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat),
                                           _mm256_add_pd(_mm256_sqrt_pd(vhat), veps));
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
    }
    for (; i < n; ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * (grad[i] * grad[i]);
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] -= (lr * mhat) / (std::sqrt(vhat) + eps_hat);
    }
}

constexpr KernelTable kAvx2Table = {
    matmul_avx2,        matmul_at_b_avx2, add_row_vector_avx2, relu_forward_avx2,
    relu_backward_avx2, col_sums_avx2,    adam_update_avx2,
};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2Table; }

}  // namespace acet::kern

#else

#include "kernels_table.hpp"

namespace acet::kern {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace acet::kern

#endif
