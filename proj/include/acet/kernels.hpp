#pragma once

#include <cstddef>

// Data-parallel inner loops behind the dense numerics. Every kernel has a
// scalar reference implementation plus SIMD variants (AVX2 on x86-64, NEON on
// aarch64) selected at runtime. The SIMD variants vectorize across output
// columns and keep the reduction order of the scalar reference, with plain
// mul+add instead of fused multiply-add, so every backend produces
// bit-identical results; the equivalence tests assert exact equality.
//
// Softmax, cross-entropy and the dataset generators stay scalar: they are a
// vanishing fraction of the arithmetic and lean on libm exp/log.
namespace acet::kern {

enum class Backend { scalar, avx2, neon };

bool supported(Backend b);
Backend detect_best();

// Active backend. First use initializes from the ACET_BACKEND environment
// variable (scalar|avx2|neon) when set and supported, else detect_best().
Backend active();
void set_backend(Backend b);  // throws std::runtime_error if unsupported
const char* backend_name(Backend b);

// c(m,n) = a(m,k) * b(k,n); row-major, accumulated in increasing k.
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);

// c(k,n) = a(m,k)^T * b(m,n); accumulated in increasing row index of a/b.
void matmul_at_b(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);

// c(m,n) = a(m,k) * b(n,k)^T.
void matmul_a_bt(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n);

// c(rows,cols) += v broadcast down the rows.
void add_row_vector(double* c, const double* v, std::size_t rows, std::size_t cols);

void relu_forward(const double* z, double* a, std::size_t n);

// grad[i] = z[i] > 0 ? grad[i] : 0
void relu_backward(const double* z, double* grad, std::size_t n);

// out[j] = sum_i a(i,j)
void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols);

// Bias-corrected Adam step on one flat parameter block.
// bc1 = 1 - beta1^step, bc2 = 1 - beta2^step for the step being applied.
void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps_hat,
                 double bc1, double bc2);

}  // namespace acet::kern
