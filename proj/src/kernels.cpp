#include "acet/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernels_table.hpp"

namespace acet::kern {
namespace {

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const KernelTable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return scalar_table();
        case Backend::avx2: return avx2_table();
        case Backend::neon: return neon_table();
    }
    return nullptr;
}

Backend initial_backend() {
    if (const char* env = std::getenv("ACET_BACKEND")) {
        const std::string s(env);
        Backend want = Backend::scalar;
        bool known = true;
        if (s == "scalar") want = Backend::scalar;
        else if (s == "avx2") want = Backend::avx2;
        else if (s == "neon") want = Backend::neon;
        else if (s == "auto") known = false;
        else known = false;
        if (known && supported(want)) return want;
    }
    return detect_best();
}

const KernelTable* table() {
    const KernelTable* t = g_table.load(std::memory_order_acquire);
    if (!t) {
        const Backend b = initial_backend();
        t = table_for(b);
        g_backend.store(b, std::memory_order_relaxed);
        g_table.store(t, std::memory_order_release);
    }
    return t;
}

}  // namespace

bool supported(Backend b) {
    if (table_for(b) == nullptr) return false;
    if (b == Backend::avx2) {
#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    }
    return true;  // scalar always; neon is baseline on aarch64 when compiled in
}

Backend detect_best() {
    if (supported(Backend::avx2)) return Backend::avx2;
    if (supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend active() {
    table();
    return g_backend.load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    if (!supported(b))
        throw std::runtime_error(std::string("kernel backend not supported on this machine: ") +
                                 backend_name(b));
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(table_for(b), std::memory_order_release);
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
    table()->matmul(a, b, c, m, k, n);
}

void matmul_at_b(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    table()->matmul_at_b(a, b, c, m, k, n);
}

void matmul_a_bt(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    // b is n x k; materialize b^T so the multiply keeps the shared
    // k-increasing reduction order. The transpose is pure data movement.
    std::vector<double> bt(k * n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t col = 0; col < k; ++col) bt[col * n + r] = b[r * k + col];
    table()->matmul(a, bt.data(), c, m, k, n);
}

void add_row_vector(double* c, const double* v, std::size_t rows, std::size_t cols) {
    table()->add_row_vector(c, v, rows, cols);
}

void relu_forward(const double* z, double* a, std::size_t n) { table()->relu_forward(z, a, n); }

void relu_backward(const double* z, double* grad, std::size_t n) {
    table()->relu_backward(z, grad, n);
}

void col_sums(const double* a, double* out, std::size_t rows, std::size_t cols) {
    table()->col_sums(a, out, rows, cols);
}

void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps_hat,
                 double bc1, double bc2) {
    table()->adam_update(param, grad, m, v, n, lr, beta1, beta2, eps_hat, bc1, bc2);
}

}  // namespace acet::kern
