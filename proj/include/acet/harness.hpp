#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "acet/datasets.hpp"
#include "acet/nn.hpp"
#include "acet/train.hpp"

namespace acet {

// Dataset source of an experiment: a synthetic generator or MNIST IDX files.
struct DatasetSpec {
    std::string name;  // spiral | complex_moons | noisy_circles | interlocking_rings | mnist
    GeneratorSpec gen;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::filesystem::path mnist_images, mnist_labels;
    std::filesystem::path mnist_test_images, mnist_test_labels;  // optional

    bool is_mnist() const { return name == "mnist"; }
};

struct ExperimentSpec {
    DatasetSpec dataset;
    std::vector<std::size_t> widths;  // input width ... n_classes
    TrainConfig train;                // shared hyperparameters; method set per run
    std::vector<Method> methods;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out_dir;
    bool save_models = true;
};

struct MethodAggregate {
    double mean_acc = 0.0;
    double std_acc = 0.0;      // sample std; 0 for a single seed
    double mean_time_s = 0.0;
    std::size_t seeds = 0;
};

struct MethodRuns {
    Method method = Method::standard;
    std::vector<std::uint64_t> seeds;
    std::vector<RunHistory> histories;
};

struct ExperimentReport {
    std::string dataset_name;
    std::vector<MethodRuns> runs;            // one entry per method
    std::vector<MethodAggregate> aggregates;  // aligned with runs
    // acet minus standard, when both methods ran:
    double acc_delta = 0.0;
    double time_ratio = 1.0;  // acet / standard

    const MethodRuns* runs_for(Method m) const;
    const MethodAggregate* aggregate_for(Method m) const;
};

// Mean/sample-std of best test accuracy and mean total wall seconds.
MethodAggregate aggregate(const MethodRuns& runs);
// All methods must cover the same seed set.
std::vector<MethodAggregate> aggregate(std::span<const MethodRuns> per_method);

// Runs every (seed x method) cell: per seed, data is drawn and one model is
// initialized, then each method trains from an identical copy. Writes one
// history CSV (and optionally a model dump) per run plus summary.csv.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Dense evaluation of a 2-input classifier over [xlo,xhi] x [ylo,yhi].
// Row-major sweep with x fastest; endpoints land exactly on the bounds.
struct GridTable {
    std::size_t resolution = 0;
    std::vector<double> x, y;          // resolution^2 entries each
    std::vector<std::size_t> cls;      // argmax class, lowest index wins ties
    Matrix probs;                      // resolution^2 x n_classes
};
GridTable decision_grid(const Mlp& model, std::array<double, 2> x_bounds,
                        std::array<double, 2> y_bounds, std::size_t resolution);

// CSV schema: epoch,t,train_loss,train_acc,test_loss,test_acc,wall_s,updates,skipped
// Floats carry 9 significant digits; UNIX newlines.
void write_history_csv(const RunHistory& history, const std::filesystem::path& path);
RunHistory read_history_csv(const std::filesystem::path& path);

void write_grid_csv(const GridTable& grid, const std::filesystem::path& path);

// summary.csv schema: dataset,method,mean_acc,std_acc,mean_time_s,seeds
void write_summary_csv(const ExperimentReport& report, const std::filesystem::path& path);

// Simple binary model dump: layer shapes + parameters, little-endian doubles.
void save_model(const Mlp& model, const std::filesystem::path& path);
Mlp load_model(const std::filesystem::path& path);

// %.9g formatting used by every CSV writer.
std::string format_g9(double v);

// Unreadable or malformed experiment config; the CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON experiment config; see README for the schema.
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

int cli_main(int argc, const char* const* argv);

}  // namespace acet
