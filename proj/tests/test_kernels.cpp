#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "acet/kernels.hpp"
#include "acet/rng.hpp"

using namespace acet;

namespace {

std::vector<double> random_vec(std::size_t n, RngState& rng) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

// independent oracle: plain (i,j)-major dot products, different loop order
// than the library's axpy-style kernels
std::vector<double> matmul_naive(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t m, std::size_t k, std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
            c[i * n + j] = acc;
        }
    return c;
}

template <typename F>
void for_each_backend(F&& run) {
    const kern::Backend saved = kern::active();
    for (const kern::Backend b :
         {kern::Backend::scalar, kern::Backend::avx2, kern::Backend::neon}) {
        if (!kern::supported(b)) continue;
        kern::set_backend(b);
        run(b);
    }
    kern::set_backend(saved);
}

}  // namespace

TEST_CASE("matmul matches a naive oracle on every backend") {
    RngState rng(11);
    for (const auto [m, k, n] : {std::array<std::size_t, 3>{4, 5, 6},
                                 std::array<std::size_t, 3>{7, 3, 9},
                                 std::array<std::size_t, 3>{1, 1, 1},
                                 std::array<std::size_t, 3>{16, 32, 12}}) {
        const auto a = random_vec(m * k, rng);
        const auto b = random_vec(k * n, rng);
        const auto want = matmul_naive(a, b, m, k, n);
        for_each_backend([&](kern::Backend) {
            std::vector<double> c(m * n);
            kern::matmul(a.data(), b.data(), c.data(), m, k, n);
            for (std::size_t i = 0; i < c.size(); ++i)
                CHECK(c[i] == doctest::Approx(want[i]).epsilon(1e-12));
        });
    }
}

TEST_CASE("every SIMD backend is bit-identical to the scalar reference") {
    if (kern::detect_best() == kern::Backend::scalar) {
        MESSAGE("no SIMD backend on this machine; skipping");
        return;
    }
    RngState rng(3);
    // sizes chosen to exercise vector bodies and scalar tails
    for (const auto [m, k, n] : {std::array<std::size_t, 3>{5, 7, 8},
                                 std::array<std::size_t, 3>{9, 13, 10},
                                 std::array<std::size_t, 3>{3, 4, 5},
                                 std::array<std::size_t, 3>{32, 100, 101},
                                 std::array<std::size_t, 3>{2, 2, 1}}) {
        const auto a = random_vec(m * k, rng);
        const auto b = random_vec(k * n, rng);
        const auto bt = random_vec(n * k, rng);
        const auto rows = random_vec(m * n, rng);
        const auto vec = random_vec(n, rng);

        kern::set_backend(kern::Backend::scalar);
        std::vector<double> c_ref(m * n), catb_ref(k * n), cabt_ref(m * n);
        kern::matmul(a.data(), b.data(), c_ref.data(), m, k, n);
        kern::matmul_at_b(a.data(), rows.data(), catb_ref.data(), m, k, n);
        kern::matmul_a_bt(a.data(), bt.data(), cabt_ref.data(), m, k, n);
        auto addrow_ref = rows;
        kern::add_row_vector(addrow_ref.data(), vec.data(), m, n);
        std::vector<double> colsum_ref(n);
        kern::col_sums(rows.data(), colsum_ref.data(), m, n);
        std::vector<double> relu_ref(m * n), relu_bwd_ref = rows;
        kern::relu_forward(a.data(), relu_ref.data(), std::min(a.size(), relu_ref.size()));
        kern::relu_backward(rows.data(), relu_bwd_ref.data(), m * n);

        for_each_backend([&](kern::Backend backend) {
            if (backend == kern::Backend::scalar) return;
            CAPTURE(kern::backend_name(backend));
            std::vector<double> c(m * n), catb(k * n), cabt(m * n);
            kern::matmul(a.data(), b.data(), c.data(), m, k, n);
            kern::matmul_at_b(a.data(), rows.data(), catb.data(), m, k, n);
            kern::matmul_a_bt(a.data(), bt.data(), cabt.data(), m, k, n);
            auto addrow = rows;
            kern::add_row_vector(addrow.data(), vec.data(), m, n);
            std::vector<double> colsum(n);
            kern::col_sums(rows.data(), colsum.data(), m, n);
            std::vector<double> relu(m * n), relu_bwd = rows;
            kern::relu_forward(a.data(), relu.data(), std::min(a.size(), relu.size()));
            kern::relu_backward(rows.data(), relu_bwd.data(), m * n);

            CHECK(std::memcmp(c.data(), c_ref.data(), c.size() * 8) == 0);
            CHECK(std::memcmp(catb.data(), catb_ref.data(), catb.size() * 8) == 0);
            CHECK(std::memcmp(cabt.data(), cabt_ref.data(), cabt.size() * 8) == 0);
            CHECK(std::memcmp(addrow.data(), addrow_ref.data(), addrow.size() * 8) == 0);
            CHECK(std::memcmp(colsum.data(), colsum_ref.data(), colsum.size() * 8) == 0);
            CHECK(std::memcmp(relu.data(), relu_ref.data(), relu.size() * 8) == 0);
            CHECK(std::memcmp(relu_bwd.data(), relu_bwd_ref.data(), relu_bwd.size() * 8) == 0);
        });
    }
}

TEST_CASE("adam kernel is bit-identical across backends and matches the formula") {
    RngState rng(19);
    const std::size_t n = 37;  // odd to exercise the tail
    const auto g = random_vec(n, rng);
    auto p0 = random_vec(n, rng);
    const double lr = 0.003, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - b1, bc2 = 1.0 - b2;  // first step

    kern::set_backend(kern::Backend::scalar);
    auto p_ref = p0;
    std::vector<double> m_ref(n, 0.0), v_ref(n, 0.0);
    kern::adam_update(p_ref.data(), g.data(), m_ref.data(), v_ref.data(), n, lr, b1, b2, eps,
                      bc1, bc2);

    // hand-evaluated formula
    for (std::size_t i = 0; i < n; ++i) {
        const double m = (1.0 - b1) * g[i];
        const double v = (1.0 - b2) * (g[i] * g[i]);
        const double want = p0[i] - (lr * (m / bc1)) / (std::sqrt(v / bc2) + eps);
        CHECK(p_ref[i] == doctest::Approx(want).epsilon(1e-15));
    }

    for_each_backend([&](kern::Backend backend) {
        if (backend == kern::Backend::scalar) return;
        auto p = p0;
        std::vector<double> m(n, 0.0), v(n, 0.0);
        kern::adam_update(p.data(), g.data(), m.data(), v.data(), n, lr, b1, b2, eps, bc1, bc2);
        CHECK(std::memcmp(p.data(), p_ref.data(), n * 8) == 0);
        CHECK(std::memcmp(m.data(), m_ref.data(), n * 8) == 0);
        CHECK(std::memcmp(v.data(), v_ref.data(), n * 8) == 0);
    });
}

TEST_CASE("relu kernels") {
    const std::vector<double> z = {-1.5, 0.0, 2.5, -0.0, 1e-300, -1e-300, 7.0};
    std::vector<double> a(z.size());
    kern::relu_forward(z.data(), a.data(), z.size());
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(a[i] == (z[i] > 0.0 ? z[i] : 0.0));

    std::vector<double> grad(z.size(), 3.0);
    kern::relu_backward(z.data(), grad.data(), z.size());
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(grad[i] == (z[i] > 0.0 ? 3.0 : 0.0));
}

TEST_CASE("backend selection") {
    CHECK(kern::supported(kern::Backend::scalar));
    CHECK(kern::supported(kern::detect_best()));
    const kern::Backend saved = kern::active();
    kern::set_backend(kern::Backend::scalar);
    CHECK(kern::active() == kern::Backend::scalar);
    kern::set_backend(saved);
#if !defined(__aarch64__)
    CHECK_THROWS_AS(kern::set_backend(kern::Backend::neon), std::runtime_error);
#endif
}
