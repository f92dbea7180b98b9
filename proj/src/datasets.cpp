#include "acet/datasets.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace acet {
namespace {

constexpr double kPi = std::numbers::pi;

// evenly spaced over [0, hi] inclusive; a single point sits at 0
double linspace_at(std::size_t i, std::size_t n, double hi) {
    return n > 1 ? hi * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
}

std::uint32_t read_u32_be(std::istream& in, const char* what) {
    std::array<unsigned char, 4> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), 4))
        throw std::runtime_error(std::string("idx: truncated file while reading ") + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset gen_spiral(std::size_t n_per_class, double noise_std, RngState& rng) {
    if (n_per_class < 1) throw std::invalid_argument("gen_spiral: n_per_class must be >= 1");
    constexpr std::size_t n_classes = 3;
    Dataset ds;
    ds.n_classes = n_classes;
    ds.name = "spiral";
    ds.X = Matrix(n_classes * n_per_class, 2);
    ds.labels.resize(n_classes * n_per_class);
    std::size_t row = 0;
    for (std::size_t k = 0; k < n_classes; ++k) {
        for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
            const double r = static_cast<double>(i) / static_cast<double>(n_per_class);
            const double theta =
                4.0 * static_cast<double>(k) + 4.0 * r + noise_std * rng.normal();
            ds.X(row, 0) = r * std::sin(theta);
            ds.X(row, 1) = r * std::cos(theta);
            ds.labels[row] = k;
        }
    }
    return ds;
}

Dataset gen_complex_moons(std::size_t n_samples, double noise_std, RngState& rng, double warp) {
    if (n_samples < 2) throw std::invalid_argument("gen_complex_moons: need at least 2 samples");
    const std::size_t n_upper = (n_samples + 1) / 2;
    const std::size_t n_lower = n_samples / 2;
    Dataset ds;
    ds.n_classes = 2;
    ds.name = "complex_moons";
    ds.X = Matrix(n_samples, 2);
    ds.labels.resize(n_samples);
    std::size_t row = 0;
    for (std::size_t i = 0; i < n_upper; ++i, ++row) {
        const double a = linspace_at(i, n_upper, kPi);
        const double x = std::cos(a);
        const double y = std::sin(a) + warp * std::sin(3.0 * a);
        ds.X(row, 0) = x + noise_std * rng.normal();
        ds.X(row, 1) = y + noise_std * rng.normal();
        ds.labels[row] = 0;
    }
    for (std::size_t i = 0; i < n_lower; ++i, ++row) {
        const double a = linspace_at(i, n_lower, kPi);
        const double x = 1.0 - std::cos(a);
        const double y = 0.5 - std::sin(a) + warp * std::sin(3.0 * a);
        ds.X(row, 0) = x + noise_std * rng.normal();
        ds.X(row, 1) = y + noise_std * rng.normal();
        ds.labels[row] = 1;
    }
    return ds;
}

Dataset gen_noisy_circles(std::size_t n_samples, double noise_std, double factor, RngState& rng) {
    if (!(factor > 0.0 && factor < 1.0))
        throw std::invalid_argument("gen_noisy_circles: factor must be in (0, 1)");
    if (n_samples < 2) throw std::invalid_argument("gen_noisy_circles: need at least 2 samples");
    const std::size_t n_outer = (n_samples + 1) / 2;
    const std::size_t n_inner = n_samples / 2;
    Dataset ds;
    ds.n_classes = 2;
    ds.name = "noisy_circles";
    ds.X = Matrix(n_samples, 2);
    ds.labels.resize(n_samples);
    std::size_t row = 0;
    const auto emit = [&](std::size_t count, double radius, std::size_t label) {
        for (std::size_t i = 0; i < count; ++i, ++row) {
            const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
            ds.X(row, 0) = radius * std::cos(a) + noise_std * rng.normal();
            ds.X(row, 1) = radius * std::sin(a) + noise_std * rng.normal();
            ds.labels[row] = label;
        }
    };
    emit(n_outer, 1.0, 0);
    emit(n_inner, factor, 1);
    return ds;
}

Dataset gen_interlocking_rings(std::size_t n_per_class, double noise_std, RngState& rng) {
    if (n_per_class < 1)
        throw std::invalid_argument("gen_interlocking_rings: n_per_class must be >= 1");
    // ring k: unit circle around center[k] spanning axes (u, v); consecutive
    // centers are offset by 1.0 along x then z, which threads each ring
    // through the previous one.
    struct Ring {
        std::array<double, 3> center;
        std::size_t u, v;  // coordinate axes of the ring plane
    };
    constexpr std::array<Ring, 3> rings = {{
        {{0.0, 0.0, 0.0}, 0, 1},  // xy-plane
        {{1.0, 0.0, 0.0}, 0, 2},  // xz-plane
        {{1.0, 0.0, 1.0}, 1, 2},  // yz-plane
    }};
    Dataset ds;
    ds.n_classes = 3;
    ds.name = "interlocking_rings";
    ds.X = Matrix(3 * n_per_class, 3);
    ds.labels.resize(3 * n_per_class);
    std::size_t row = 0;
    for (std::size_t k = 0; k < rings.size(); ++k) {
        const Ring& ring = rings[k];
        for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
            const double a = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_per_class);
            std::array<double, 3> p = ring.center;
            p[ring.u] += std::cos(a);
            p[ring.v] += std::sin(a);
            for (std::size_t d = 0; d < 3; ++d)
                ds.X(row, d) = p[d] + noise_std * rng.normal();
            ds.labels[row] = k;
        }
    }
    return ds;
}

Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images)
        throw std::runtime_error("idx: cannot open images file: " + images_path.string());
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels)
        throw std::runtime_error("idx: cannot open labels file: " + labels_path.string());

    const std::uint32_t image_magic = read_u32_be(images, "image magic");
    if (image_magic != 0x00000803)
        throw std::runtime_error("idx: bad image magic, expected 0x00000803");
    const std::uint32_t n_images = read_u32_be(images, "image count");
    const std::uint32_t n_rows = read_u32_be(images, "image rows");
    const std::uint32_t n_cols = read_u32_be(images, "image cols");

    const std::uint32_t label_magic = read_u32_be(labels, "label magic");
    if (label_magic != 0x00000801)
        throw std::runtime_error("idx: bad label magic, expected 0x00000801");
    const std::uint32_t n_labels = read_u32_be(labels, "label count");
    if (n_images != n_labels)
        throw std::runtime_error("idx: image/label count mismatch between files");

    const std::size_t n_features = std::size_t(n_rows) * n_cols;
    Dataset ds;
    ds.n_classes = 10;
    ds.name = "mnist";
    ds.X = Matrix(n_images, n_features);
    ds.labels.resize(n_images);

    std::vector<unsigned char> pixel_row(n_features);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        if (!images.read(reinterpret_cast<char*>(pixel_row.data()),
                         static_cast<std::streamsize>(n_features)))
            throw std::runtime_error("idx: truncated image data");
        for (std::size_t j = 0; j < n_features; ++j)
            ds.X(i, j) = static_cast<double>(pixel_row[j]) / 255.0;
        unsigned char label = 0;
        if (!labels.read(reinterpret_cast<char*>(&label), 1))
            throw std::runtime_error("idx: truncated label data");
        if (label > 9) throw std::runtime_error("idx: label outside 0-9");
        ds.labels[i] = label;
    }
    return ds;
}

Dataset GeneratorSpec::generate(std::size_t n_samples, RngState& rng) const {
    switch (kind) {
        case Kind::spiral:
            if (n_samples % 3 != 0)
                throw std::invalid_argument("spiral: n_samples must be a multiple of 3");
            return gen_spiral(n_samples / 3, noise_std, rng);
        case Kind::complex_moons: return gen_complex_moons(n_samples, noise_std, rng, warp);
        case Kind::noisy_circles: return gen_noisy_circles(n_samples, noise_std, factor, rng);
        case Kind::interlocking_rings:
            if (n_samples % 3 != 0)
                throw std::invalid_argument("interlocking_rings: n_samples must be a multiple of 3");
            return gen_interlocking_rings(n_samples / 3, noise_std, rng);
    }
    throw std::logic_error("unknown generator kind");
}

std::string GeneratorSpec::name() const {
    switch (kind) {
        case Kind::spiral: return "spiral";
        case Kind::complex_moons: return "complex_moons";
        case Kind::noisy_circles: return "noisy_circles";
        case Kind::interlocking_rings: return "interlocking_rings";
    }
    return "?";
}

std::size_t GeneratorSpec::n_classes() const {
    return (kind == Kind::spiral || kind == Kind::interlocking_rings) ? 3 : 2;
}

std::size_t GeneratorSpec::n_features() const {
    return kind == Kind::interlocking_rings ? 3 : 2;
}

GeneratorSpec::Kind generator_kind_from_name(const std::string& name) {
    if (name == "spiral") return GeneratorSpec::Kind::spiral;
    if (name == "complex_moons") return GeneratorSpec::Kind::complex_moons;
    if (name == "noisy_circles") return GeneratorSpec::Kind::noisy_circles;
    if (name == "interlocking_rings") return GeneratorSpec::Kind::interlocking_rings;
    throw std::invalid_argument("unknown dataset name: " + name);
}

std::pair<Dataset, Dataset> train_test_gen(const GeneratorSpec& spec, std::size_t n_train,
                                           std::size_t n_test, std::uint64_t seed) {
    RngState train_rng(seed);
    RngState test_rng(seed ^ 0x9E3779B97F4A7C15ull);
    Dataset train = spec.generate(n_train, train_rng);
    Dataset test = spec.generate(n_test, test_rng);
    return {std::move(train), std::move(test)};
}

}  // namespace acet
