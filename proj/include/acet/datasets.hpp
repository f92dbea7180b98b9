#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "acet/matrix.hpp"
#include "acet/rng.hpp"

namespace acet {

struct Dataset {
    Matrix X;                         // n_samples x n_features
    std::vector<std::size_t> labels;  // class index per row
    std::size_t n_classes = 0;
    std::string name;

    std::size_t size() const { return X.rows(); }

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Three intertwined spiral arms, 2 features. Class k, point i:
//   r = i / n_per_class, theta = 4k + 4r + noise, point = (r sin theta, r cos theta).
Dataset gen_spiral(std::size_t n_per_class, double noise_std, RngState& rng);

// Two interleaved half-circles with a sinusoidal warp on y, 2 features.
//   upper: (cos a, sin a), lower: (1 - cos a, 0.5 - sin a), a in [0, pi];
//   both get y += warp * sin(3a), then Gaussian noise on each coordinate.
Dataset gen_complex_moons(std::size_t n_samples, double noise_std, RngState& rng,
                          double warp = 0.3);

// Concentric circles: outer radius 1 (class 0) vs inner radius `factor`
// (class 1), Gaussian noise on each coordinate.
Dataset gen_noisy_circles(std::size_t n_samples, double noise_std, double factor, RngState& rng);

// Three unit circles in mutually orthogonal planes, 3 features; centers at
// (0,0,0), (1,0,0), (1,0,1) so consecutive rings interlock.
Dataset gen_interlocking_rings(std::size_t n_per_class, double noise_std, RngState& rng);

// IDX loader (big-endian): images magic 0x00000803 with dims [count, rows,
// cols]; labels magic 0x00000801 with dims [count]. Pixels scale to [0,1].
Dataset load_mnist_idx(const std::filesystem::path& images_path,
                       const std::filesystem::path& labels_path);

struct GeneratorSpec {
    enum class Kind { spiral, complex_moons, noisy_circles, interlocking_rings };
    Kind kind = Kind::spiral;
    double noise_std = 0.0;
    double factor = 0.5;  // noisy_circles
    double warp = 0.3;    // complex_moons

    // n_samples is the total sample count; three-class generators require a
    // multiple of 3 to keep the classes exactly balanced.
    Dataset generate(std::size_t n_samples, RngState& rng) const;
    std::string name() const;
    std::size_t n_classes() const;
    std::size_t n_features() const;
};

GeneratorSpec::Kind generator_kind_from_name(const std::string& name);

// Independent train/test draws with derived sub-seeds
// (seed, seed ^ 0x9E3779B97F4A7C15).
std::pair<Dataset, Dataset> train_test_gen(const GeneratorSpec& spec, std::size_t n_train,
                                           std::size_t n_test, std::uint64_t seed);

}  // namespace acet
