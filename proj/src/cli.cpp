#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acet/harness.hpp"
#include "acet/kernels.hpp"
#include "acet/optim.hpp"
#include "acet/schedule.hpp"

namespace acet {
namespace {

namespace fs = std::filesystem;

struct Overrides {
    std::optional<std::string> method;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> seeds;
    std::optional<double> eps, dt, lr;
    std::optional<std::size_t> epi, max_epochs, batch, patience;
    std::optional<std::string> out;
    std::optional<std::string> mnist_images, mnist_labels, mnist_test_images, mnist_test_labels;
    bool no_timing = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--method", ov.method, "st | acet | both");
    cmd->add_option("--seed", ov.seed, "run a single seed");
    cmd->add_option("--seeds", ov.seeds, "number of seeds (0..N-1)");
    cmd->add_option("--eps", ov.eps, "equilibrium threshold");
    cmd->add_option("--dt", ov.dt, "target increment step");
    cmd->add_option("--epi", ov.epi, "epochs per increment");
    cmd->add_option("--max-epochs", ov.max_epochs, "total epoch budget");
    cmd->add_option("--lr", ov.lr, "learning rate");
    cmd->add_option("--batch", ov.batch, "mini-batch size");
    cmd->add_option("--patience", ov.patience, "early-stopping patience (epochs)");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--mnist-images", ov.mnist_images, "IDX image file (train)");
    cmd->add_option("--mnist-labels", ov.mnist_labels, "IDX label file (train)");
    cmd->add_option("--mnist-test-images", ov.mnist_test_images, "IDX image file (test)");
    cmd->add_option("--mnist-test-labels", ov.mnist_test_labels, "IDX label file (test)");
    cmd->add_flag("--no-timing", ov.no_timing, "record wall_s as 0 for byte-stable outputs");
}

void apply_overrides(ExperimentSpec& spec, const Overrides& ov) {
    if (ov.method) {
        spec.methods.clear();
        if (*ov.method == "both") {
            spec.methods = {Method::standard, Method::acet};
        } else {
            spec.methods = {method_from_name(*ov.method)};
        }
    }
    if (ov.seed) spec.seeds = {*ov.seed};
    else if (ov.seeds) {
        spec.seeds.clear();
        for (std::uint64_t i = 0; i < *ov.seeds; ++i) spec.seeds.push_back(i);
    }
    if (ov.eps) spec.train.epsilon = *ov.eps;
    if (ov.dt) spec.train.dt = *ov.dt;
    if (ov.epi) spec.train.epochs_per_increment = *ov.epi;
    if (ov.max_epochs) spec.train.max_epochs = *ov.max_epochs;
    if (ov.lr) spec.train.lr = *ov.lr;
    if (ov.batch) spec.train.batch_size = *ov.batch;
    if (ov.patience) spec.train.early_stopping_patience = *ov.patience;
    if (ov.out) spec.out_dir = *ov.out;
    if (ov.mnist_images) spec.dataset.mnist_images = *ov.mnist_images;
    if (ov.mnist_labels) spec.dataset.mnist_labels = *ov.mnist_labels;
    if (ov.mnist_test_images) spec.dataset.mnist_test_images = *ov.mnist_test_images;
    if (ov.mnist_test_labels) spec.dataset.mnist_test_labels = *ov.mnist_test_labels;
    if (ov.no_timing) spec.train.record_wall_time = false;
}

// Built-in fallback spec used when `run --dataset NAME` is given without a
// config file; the checked-in configs remain the benchmark source of truth.
ExperimentSpec default_spec(const std::string& dataset) {
    ExperimentSpec spec;
    spec.dataset.name = dataset;
    if (dataset != "mnist") {
        spec.dataset.gen.kind = generator_kind_from_name(dataset);
        spec.dataset.n_train = 300;
        spec.dataset.n_test = 300;
        spec.dataset.gen.noise_std = 0.2;
    }
    const std::size_t n_out = dataset == "mnist" ? 10 : spec.dataset.gen.n_classes();
    const std::size_t n_in = dataset == "mnist" ? 784 : spec.dataset.gen.n_features();
    spec.widths = {n_in, 100, 100, n_out};
    spec.methods = {Method::standard, Method::acet};
    spec.seeds = {0};
    spec.train.lr = 0.005;
    spec.out_dir = "out/" + dataset;
    return spec;
}

void print_report(const ExperimentReport& report) {
    std::printf("%-20s %-6s %10s %10s %12s %6s\n", "dataset", "method", "mean_acc", "std_acc",
                "mean_time_s", "seeds");
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& agg = report.aggregates[i];
        std::printf("%-20s %-6s %10.4f %10.4f %12.3f %6zu\n", report.dataset_name.c_str(),
                    method_name(report.runs[i].method), agg.mean_acc, agg.std_acc,
                    agg.mean_time_s, agg.seeds);
    }
    if (report.runs_for(Method::standard) && report.runs_for(Method::acet))
        std::printf("  acet - st accuracy delta: %+.4f; time ratio (acet/st): %.3f\n",
                    report.acc_delta, report.time_ratio);
}

int cmd_run(const std::optional<std::string>& config_path,
            const std::optional<std::string>& dataset, const Overrides& ov) {
    ExperimentSpec spec;
    if (config_path) spec = load_experiment_config(*config_path);
    else if (dataset) spec = default_spec(*dataset);
    else throw CLI::ValidationError("run", "either --config or --dataset is required");
    apply_overrides(spec, ov);
    print_report(run_experiment(spec));
    return 0;
}

int cmd_bench(const std::string& configs_dir, bool with_mnist, const Overrides& ov) {
    const std::vector<std::string> names = {"spiral", "complex_moons", "noisy_circles",
                                            "interlocking_rings"};
    const fs::path out_root = ov.out ? fs::path(*ov.out) : fs::path("out");

    if (with_mnist) {
        if (!ov.mnist_images || !ov.mnist_labels)
            throw std::runtime_error("--mnist requires --mnist-images and --mnist-labels");
        for (const auto& p : {*ov.mnist_images, *ov.mnist_labels})
            if (!fs::exists(p)) throw std::runtime_error("MNIST file not found: " + p);
    }

    std::vector<ExperimentReport> reports;
    for (const auto& name : names) {
        const fs::path cfg = fs::path(configs_dir) / (name + ".json");
        if (!fs::exists(cfg)) throw std::runtime_error("benchmark config not found: " + cfg.string());
        ExperimentSpec spec = load_experiment_config(cfg);
        Overrides local = ov;
        local.out = (out_root / name).string();
        apply_overrides(spec, local);
        std::printf("== %s ==\n", name.c_str());
        reports.push_back(run_experiment(spec));
        print_report(reports.back());
    }

    if (with_mnist) {
        const fs::path cfg = fs::path(configs_dir) / "mnist.json";
        if (!fs::exists(cfg)) throw std::runtime_error("benchmark config not found: " + cfg.string());
        ExperimentSpec spec = load_experiment_config(cfg);
        Overrides local = ov;
        local.out = (out_root / "mnist").string();
        apply_overrides(spec, local);
        std::printf("== mnist ==\n");
        reports.push_back(run_experiment(spec));
        print_report(reports.back());
    }

    // combined aggregate file across benchmarks
    fs::create_directories(out_root);
    std::ofstream out(out_root / "summary.csv", std::ios::binary);
    out << "dataset,method,mean_acc,std_acc,mean_time_s,seeds\n";
    for (const auto& r : reports)
        for (std::size_t i = 0; i < r.runs.size(); ++i)
            out << r.dataset_name << ',' << method_name(r.runs[i].method) << ','
                << format_g9(r.aggregates[i].mean_acc) << ',' << format_g9(r.aggregates[i].std_acc)
                << ',' << format_g9(r.aggregates[i].mean_time_s) << ',' << r.aggregates[i].seeds
                << '\n';
    std::printf("combined summary: %s\n", (out_root / "summary.csv").string().c_str());
    return 0;
}

int cmd_grid(const std::string& model_path, const std::string& out_path, std::size_t resolution,
             double xmin, double xmax, double ymin, double ymax) {
    const Mlp model = load_model(model_path);
    const GridTable grid = decision_grid(model, {xmin, xmax}, {ymin, ymax}, resolution);
    write_grid_csv(grid, out_path);
    std::printf("wrote %zu grid rows to %s\n", grid.x.size(), out_path.c_str());
    return 0;
}

int cmd_verify() {
    std::printf("kernel backend: %s\n", kern::backend_name(kern::active()));
    int failures = 0;
    const auto check = [&](bool ok, const char* what) {
        std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what);
        if (!ok) ++failures;
    };

    // backend equivalence (bitwise) against the scalar reference
    if (kern::active() != kern::Backend::scalar) {
        RngState rng(7);
        const std::size_t m = 13, k = 31, n = 27;
        std::vector<double> a(m * k), b(k * n), c_simd(m * n), c_scalar(m * n);
        for (auto& v : a) v = rng.normal();
        for (auto& v : b) v = rng.normal();
        kern::matmul(a.data(), b.data(), c_simd.data(), m, k, n);
        const kern::Backend prev = kern::active();
        kern::set_backend(kern::Backend::scalar);
        kern::matmul(a.data(), b.data(), c_scalar.data(), m, k, n);
        kern::set_backend(prev);
        check(c_simd == c_scalar, "simd matmul bit-identical to scalar reference");
    }

    // schedule endpoints and norm bound
    bool sched_ok = true;
    for (const std::size_t n : {std::size_t{2}, std::size_t{3}, std::size_t{10}}) {
        const TargetSchedule s(n, 0.1);
        const auto y0 = target_vector(s, 0.0, 0);
        const auto y1 = target_vector(s, 1.0, n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            sched_ok &= y0[j] == 1.0 / static_cast<double>(n);
            sched_ok &= y1[j] == (j == n - 1 ? 1.0 : 0.0);
        }
        sched_ok &= derivative_bound_inf(n) == 1.0 - 1.0 / static_cast<double>(n);
    }
    check(sched_ok, "target schedule endpoints and derivative bound");

    // softmax shift invariance
    {
        const Matrix z = Matrix::from_rows({{0.3, -1.2, 2.0}});
        Matrix zc = z;
        for (std::size_t j = 0; j < 3; ++j) zc(0, j) += 5.0;
        const Matrix p1 = softmax_rows(z);
        const Matrix p2 = softmax_rows(zc);
        bool ok = true;
        for (std::size_t j = 0; j < 3; ++j) ok &= std::abs(p1(0, j) - p2(0, j)) < 1e-12;
        check(ok, "softmax shift invariance");
    }

    // gradient checks
    double worst = 0.0;
    for (const auto& widths : {std::vector<std::size_t>{2, 5, 3},
                               std::vector<std::size_t>{3, 16, 16, 3}}) {
        RngState rng(42);
        Mlp model = init_mlp(std::span<const std::size_t>(widths), rng);
        Matrix X(8, widths.front());
        std::vector<std::size_t> labels(8);
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t j = 0; j < widths.front(); ++j) X(i, j) = rng.normal();
            labels[i] = rng.next_below(widths.back());
        }
        const TargetSchedule s(widths.back(), 1.0);
        const Matrix targets = target_rows(s, 1.0, labels);
        worst = std::max(worst, grad_check_max_rel_err(model, X, targets, 1e-5));
    }
    std::printf("  max gradient-check relative error: %.3e\n", worst);
    check(worst < 1e-4, "gradient check below 1e-4");

    // adam zero-gradient fixed point
    {
        RngState rng(3);
        Mlp model = init_mlp({2, 4, 2}, rng);
        const Mlp before = model;
        AdamState st = adam_init(model, AdamHyper{.lr = 0.01});
        Gradients zero;
        for (const auto& layer : model.layers) {
            zero.weights.emplace_back(layer.fan_in(), layer.fan_out());
            zero.biases.emplace_back(layer.fan_out(), 0.0);
        }
        for (int i = 0; i < 3; ++i) adam_step(model, zero, st);
        check(model == before, "adam zero-gradient fixed point");
    }

    std::printf(failures == 0 ? "verify: all checks passed\n" : "verify: %d check(s) failed\n",
                failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"progressive-target training lab"};
    app.require_subcommand(1);
    std::string backend = "auto";
    app.add_option("--backend", backend, "kernel backend: auto|scalar|avx2|neon")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));

    Overrides ov;
    std::optional<std::string> config_path, dataset;
    auto* run = app.add_subcommand("run", "run one experiment");
    run->add_option("--config", config_path, "experiment config (JSON)");
    run->add_option("--dataset", dataset, "built-in dataset name instead of a config");
    add_override_flags(run, ov);

    std::string configs_dir = "configs";
    bool with_mnist = false;
    auto* bench = app.add_subcommand("bench", "run the synthetic benchmark suite");
    bench->add_option("--configs", configs_dir, "directory of benchmark configs");
    bench->add_flag("--mnist", with_mnist, "also run the MNIST benchmark");
    add_override_flags(bench, ov);

    std::string model_path, grid_out = "grid.csv";
    std::size_t resolution = 200;
    double xmin = -1.5, xmax = 1.5, ymin = -1.5, ymax = 1.5;
    auto* grid = app.add_subcommand("grid", "decision-boundary grid from a saved model");
    grid->add_option("--model", model_path, "model file")->required();
    grid->add_option("--out", grid_out, "output CSV");
    grid->add_option("--res", resolution, "grid resolution per axis");
    grid->add_option("--xmin", xmin);
    grid->add_option("--xmax", xmax);
    grid->add_option("--ymin", ymin);
    grid->add_option("--ymax", ymax);

    auto* verify = app.add_subcommand("verify", "run the invariant and gradient-check suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (backend != "auto") {
            if (backend == "scalar") kern::set_backend(kern::Backend::scalar);
            if (backend == "avx2") kern::set_backend(kern::Backend::avx2);
            if (backend == "neon") kern::set_backend(kern::Backend::neon);
        }
        if (run->parsed()) return cmd_run(config_path, dataset, ov);
        if (bench->parsed()) return cmd_bench(configs_dir, with_mnist, ov);
        if (grid->parsed())
            return cmd_grid(model_path, grid_out, resolution, xmin, xmax, ymin, ymax);
        if (verify->parsed()) return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace acet
