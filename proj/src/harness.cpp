#include "acet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "acet/schedule.hpp"

namespace acet {
namespace {

using nlohmann::json;

double round_g9(double v) { return std::strtod(format_g9(v).c_str(), nullptr); }

// Total wall seconds as a reader of the emitted CSV would recompute them.
double csv_total_wall(const RunHistory& h) {
    double total = 0.0;
    for (const auto& e : h.epochs) total += round_g9(e.epoch_wall_seconds);
    return total;
}

std::string run_file_stem(const std::string& dataset, Method method, std::uint64_t seed) {
    return dataset + "_" + method_name(method) + "_seed" + std::to_string(seed);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw std::runtime_error("model file truncated");
    return v;
}

}  // namespace

std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

const MethodRuns* ExperimentReport::runs_for(Method m) const {
    for (const auto& r : runs)
        if (r.method == m) return &r;
    return nullptr;
}

const MethodAggregate* ExperimentReport::aggregate_for(Method m) const {
    for (std::size_t i = 0; i < runs.size(); ++i)
        if (runs[i].method == m) return &aggregates[i];
    return nullptr;
}

MethodAggregate aggregate(const MethodRuns& runs) {
    if (runs.histories.empty()) throw std::invalid_argument("aggregate: no runs");
    MethodAggregate agg;
    agg.seeds = runs.histories.size();
    double acc_sum = 0.0, time_sum = 0.0;
    for (const auto& h : runs.histories) {
        acc_sum += h.best_test_acc;
        time_sum += h.total_wall_seconds;
    }
    const double n = static_cast<double>(agg.seeds);
    agg.mean_acc = acc_sum / n;
    agg.mean_time_s = time_sum / n;
    if (agg.seeds > 1) {
        double ss = 0.0;
        for (const auto& h : runs.histories) {
            const double d = h.best_test_acc - agg.mean_acc;
            ss += d * d;
        }
        agg.std_acc = std::sqrt(ss / (n - 1.0));
    }
    return agg;
}

std::vector<MethodAggregate> aggregate(std::span<const MethodRuns> per_method) {
    if (per_method.empty()) throw std::invalid_argument("aggregate: no methods");
    for (const auto& m : per_method)
        if (m.seeds != per_method.front().seeds)
            throw std::invalid_argument("aggregate: methods cover different seed sets");
    std::vector<MethodAggregate> out;
    out.reserve(per_method.size());
    for (const auto& m : per_method) out.push_back(aggregate(m));
    return out;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
    if (spec.widths.size() < 2) throw std::invalid_argument("run_experiment: bad architecture");
    if (spec.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
    if (spec.seeds.empty()) throw std::invalid_argument("run_experiment: no seeds");

    std::filesystem::create_directories(spec.out_dir);

    // MNIST data is file-backed and identical across seeds.
    Dataset mnist_train, mnist_test;
    if (spec.dataset.is_mnist()) {
        Dataset full = load_mnist_idx(spec.dataset.mnist_images, spec.dataset.mnist_labels);
        if (!spec.dataset.mnist_test_images.empty()) {
            mnist_test =
                load_mnist_idx(spec.dataset.mnist_test_images, spec.dataset.mnist_test_labels);
            mnist_train = std::move(full);
        } else {
            // hold out the last 10k samples when no test pair is given
            const std::size_t held = std::min<std::size_t>(10000, full.size() / 6);
            const std::size_t n_train = full.size() - held;
            mnist_train.n_classes = mnist_test.n_classes = full.n_classes;
            mnist_train.name = mnist_test.name = full.name;
            mnist_train.X = Matrix(n_train, full.X.cols());
            mnist_test.X = Matrix(held, full.X.cols());
            mnist_train.labels.assign(full.labels.begin(), full.labels.begin() + n_train);
            mnist_test.labels.assign(full.labels.begin() + n_train, full.labels.end());
            for (std::size_t i = 0; i < n_train; ++i)
                for (std::size_t j = 0; j < full.X.cols(); ++j) mnist_train.X(i, j) = full.X(i, j);
            for (std::size_t i = 0; i < held; ++i)
                for (std::size_t j = 0; j < full.X.cols(); ++j)
                    mnist_test.X(i, j) = full.X(n_train + i, j);
        }
    }

    ExperimentReport report;
    report.dataset_name = spec.dataset.name;
    for (const Method m : spec.methods)
        report.runs.push_back(MethodRuns{m, spec.seeds, {}});

    for (const std::uint64_t seed : spec.seeds) {
        Dataset train, test;
        if (spec.dataset.is_mnist()) {
            train = mnist_train;
            test = mnist_test;
        } else {
            std::tie(train, test) =
                train_test_gen(spec.dataset.gen, spec.dataset.n_train, spec.dataset.n_test, seed);
        }
        if (train.X.cols() != spec.widths.front() || train.n_classes != spec.widths.back())
            throw std::invalid_argument("run_experiment: architecture does not fit dataset");

        // Both methods start from bit-identical weights.
        RngState init_rng(mix_seed(seed, 0x696e6974));  // "init"
        const Mlp initial = init_mlp(std::span<const std::size_t>(spec.widths), init_rng);

        for (auto& method_runs : report.runs) {
            Mlp model = initial;
            TrainConfig cfg = spec.train;
            cfg.method = method_runs.method;
            cfg.seed = seed;
            RngState train_rng(mix_seed(seed, 0x747261696e));  // "train"
            RunHistory history = cfg.method == Method::standard
                                     ? train_standard(model, train, test, cfg, train_rng)
                                     : train_acet(model, train, test, cfg, train_rng);
            const std::string stem = run_file_stem(spec.dataset.name, cfg.method, seed);
            write_history_csv(history, spec.out_dir / ("history_" + stem + ".csv"));
            if (spec.save_models) save_model(model, spec.out_dir / ("model_" + stem + ".bin"));
            method_runs.histories.push_back(std::move(history));
        }
    }

    // Aggregate from %.9g-round-tripped values so summary.csv matches a
    // recomputation from the emitted per-seed CSVs.
    std::vector<MethodRuns> rounded = report.runs;
    for (auto& m : rounded)
        for (auto& h : m.histories) {
            h.best_test_acc = round_g9(h.best_test_acc);
            h.total_wall_seconds = csv_total_wall(h);
        }
    report.aggregates = aggregate(std::span<const MethodRuns>(rounded));

    const MethodAggregate* st = report.aggregate_for(Method::standard);
    const MethodAggregate* ac = report.aggregate_for(Method::acet);
    if (st && ac) {
        report.acc_delta = ac->mean_acc - st->mean_acc;
        report.time_ratio = st->mean_time_s > 0.0 ? ac->mean_time_s / st->mean_time_s : 1.0;
    }

    write_summary_csv(report, spec.out_dir / "summary.csv");
    return report;
}

GridTable decision_grid(const Mlp& model, std::array<double, 2> x_bounds,
                        std::array<double, 2> y_bounds, std::size_t resolution) {
    if (model.input_width() != 2)
        throw std::invalid_argument("decision_grid: model input width must be 2");
    if (resolution < 2) throw std::invalid_argument("decision_grid: resolution must be >= 2");

    const auto coord = [resolution](std::array<double, 2> b, std::size_t i) {
        if (i == resolution - 1) return b[1];  // exact upper endpoint
        return b[0] + (b[1] - b[0]) * static_cast<double>(i) / static_cast<double>(resolution - 1);
    };

    const std::size_t total = resolution * resolution;
    Matrix points(total, 2);
    GridTable grid;
    grid.resolution = resolution;
    grid.x.resize(total);
    grid.y.resize(total);
    grid.cls.resize(total);
    std::size_t row = 0;
    for (std::size_t yi = 0; yi < resolution; ++yi)
        for (std::size_t xi = 0; xi < resolution; ++xi, ++row) {
            grid.x[row] = coord(x_bounds, xi);
            grid.y[row] = coord(y_bounds, yi);
            points(row, 0) = grid.x[row];
            points(row, 1) = grid.y[row];
        }
    grid.probs = predict(model, points);
    for (std::size_t i = 0; i < total; ++i) grid.cls[i] = argmax_row(grid.probs, i);
    return grid;
}

void write_history_csv(const RunHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "epoch,t,train_loss,train_acc,test_loss,test_acc,wall_s,updates,skipped\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << format_g9(e.t_value) << ',' << format_g9(e.train_loss) << ','
            << format_g9(e.train_acc) << ',' << format_g9(e.test_loss) << ','
            << format_g9(e.test_acc) << ',' << format_g9(e.epoch_wall_seconds) << ','
            << e.updates_performed << ',' << e.updates_skipped << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

RunHistory read_history_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line != "epoch,t,train_loss,train_acc,test_loss,test_acc,wall_s,updates,skipped")
        throw std::runtime_error("bad history header in " + path.string());
    RunHistory h;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 9) throw std::runtime_error("bad history row in " + path.string());
        EpochRecord e;
        e.epoch = std::stoull(fields[0]);
        e.t_value = std::strtod(fields[1].c_str(), nullptr);
        e.train_loss = std::strtod(fields[2].c_str(), nullptr);
        e.train_acc = std::strtod(fields[3].c_str(), nullptr);
        e.test_loss = std::strtod(fields[4].c_str(), nullptr);
        e.test_acc = std::strtod(fields[5].c_str(), nullptr);
        e.epoch_wall_seconds = std::strtod(fields[6].c_str(), nullptr);
        e.updates_performed = std::stoull(fields[7]);
        e.updates_skipped = std::stoull(fields[8]);
        h.epochs.push_back(e);
    }
    for (const auto& e : h.epochs) {
        h.best_test_acc = std::max(h.best_test_acc, e.test_acc);
        h.total_wall_seconds += e.epoch_wall_seconds;
    }
    return h;
}

void write_grid_csv(const GridTable& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,y,class";
    for (std::size_t c = 0; c < grid.probs.cols(); ++c) out << ",p" << c;
    out << '\n';
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
        out << format_g9(grid.x[i]) << ',' << format_g9(grid.y[i]) << ',' << grid.cls[i];
        for (std::size_t c = 0; c < grid.probs.cols(); ++c)
            out << ',' << format_g9(grid.probs(i, c));
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_summary_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "dataset,method,mean_acc,std_acc,mean_time_s,seeds\n";
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& agg = report.aggregates[i];
        out << report.dataset_name << ',' << method_name(report.runs[i].method) << ','
            << format_g9(agg.mean_acc) << ',' << format_g9(agg.std_acc) << ','
            << format_g9(agg.mean_time_s) << ',' << agg.seeds << '\n';
    }
}

void save_model(const Mlp& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write("ACETMLP1", 8);
    write_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const auto& layer : model.layers) {
        write_u32(out, static_cast<std::uint32_t>(layer.fan_in()));
        write_u32(out, static_cast<std::uint32_t>(layer.fan_out()));
        const std::uint8_t act = static_cast<std::uint8_t>(layer.activation);
        out.write(reinterpret_cast<const char*>(&act), 1);
        out.write(reinterpret_cast<const char*>(layer.weights.data()),
                  static_cast<std::streamsize>(layer.weights.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(layer.biases.data()),
                  static_cast<std::streamsize>(layer.biases.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

Mlp load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, "ACETMLP1", 8) != 0)
        throw std::runtime_error("bad model magic in " + path.string());
    const std::uint32_t n_layers = read_u32(in);
    Mlp model;
    model.layers.reserve(n_layers);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        const std::uint32_t fan_in = read_u32(in);
        const std::uint32_t fan_out = read_u32(in);
        std::uint8_t act = 0;
        if (!in.read(reinterpret_cast<char*>(&act), 1))
            throw std::runtime_error("model file truncated");
        if (act > 2) throw std::runtime_error("bad activation tag in " + path.string());
        DenseLayer layer;
        layer.weights = Matrix(fan_in, fan_out);
        layer.biases.assign(fan_out, 0.0);
        layer.activation = static_cast<Activation>(act);
        if (!in.read(reinterpret_cast<char*>(layer.weights.data()),
                     static_cast<std::streamsize>(layer.weights.size() * sizeof(double))) ||
            !in.read(reinterpret_cast<char*>(layer.biases.data()),
                     static_cast<std::streamsize>(layer.biases.size() * sizeof(double))))
            throw std::runtime_error("model file truncated");
        model.layers.push_back(std::move(layer));
    }
    return model;
}

ExperimentSpec load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path.string() + ": " + e.what());
    }

    ExperimentSpec spec;
    try {
        const auto& d = j.at("dataset");
        spec.dataset.name = d.at("name").get<std::string>();
        if (spec.dataset.is_mnist()) {
            if (d.contains("images")) spec.dataset.mnist_images = d.at("images").get<std::string>();
            if (d.contains("labels")) spec.dataset.mnist_labels = d.at("labels").get<std::string>();
            if (d.contains("test_images"))
                spec.dataset.mnist_test_images = d.at("test_images").get<std::string>();
            if (d.contains("test_labels"))
                spec.dataset.mnist_test_labels = d.at("test_labels").get<std::string>();
        } else {
            spec.dataset.gen.kind = generator_kind_from_name(spec.dataset.name);
            spec.dataset.n_train = d.at("n_train").get<std::size_t>();
            spec.dataset.n_test = d.at("n_test").get<std::size_t>();
            spec.dataset.gen.noise_std = d.value("noise_std", 0.0);
            spec.dataset.gen.factor = d.value("factor", 0.5);
            spec.dataset.gen.warp = d.value("warp", 0.3);
        }

        spec.widths = j.at("widths").get<std::vector<std::size_t>>();

        const auto& t = j.at("train");
        spec.train.epsilon = t.value("eps", 1e-5);
        spec.train.dt = t.value("dt", 0.1);
        spec.train.epochs_per_increment = t.value("epochs_per_increment", std::size_t{5});
        spec.train.max_epochs = t.value("max_epochs", std::size_t{200});
        spec.train.batch_size = t.value("batch_size", std::size_t{32});
        spec.train.lr = t.value("lr", 0.001);
        spec.train.lr_decay = t.value("lr_decay", 0.0);
        spec.train.record_wall_time = t.value("record_wall_time", true);
        if (t.contains("patience") && !t.at("patience").is_null())
            spec.train.early_stopping_patience = t.at("patience").get<std::size_t>();
        if (t.contains("label_smoothing_alpha") && !t.at("label_smoothing_alpha").is_null())
            spec.train.label_smoothing_alpha = t.at("label_smoothing_alpha").get<double>();

        for (const auto& m : j.at("methods"))
            spec.methods.push_back(method_from_name(m.get<std::string>()));

        const auto& s = j.at("seeds");
        if (s.is_number()) {
            const auto n = s.get<std::uint64_t>();
            for (std::uint64_t i = 0; i < n; ++i) spec.seeds.push_back(i);
        } else {
            spec.seeds = s.get<std::vector<std::uint64_t>>();
        }

        spec.out_dir = j.value("out", std::string("out/") + spec.dataset.name);
        spec.save_models = j.value("save_models", true);
    } catch (const json::exception& e) {
        throw std::runtime_error("config field error in " + path.string() + ": " + e.what());
    }
    return spec;
}

}  // namespace acet
