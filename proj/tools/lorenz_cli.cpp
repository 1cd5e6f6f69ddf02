// Command-line harness: dataset generation, training, evaluation, and full
// table reproduction for the Lorenz stable/unstable classification pipeline.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lorenz/dataset.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/experiment.hpp"
#include "lorenz/metrics.hpp"
#include "lorenz/network.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lorenz;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

// Defaults; every value can be overridden by config file or flag
// (flag wins over file, file wins over default).
struct RunConfig {
    double interval_lo = 0.0;
    double interval_hi = 1.0;
    std::size_t systems = 25;
    std::size_t points = 4000;
    double dt = 0.01;
    std::size_t window = 5;
    std::string role = "train";
    std::uint64_t seed = 1;
    bool normalize = false;
    double lr = 0.001;
    std::size_t epochs = 20;
    std::size_t batch = 128;
    std::string out = "out";
    std::string data;
    std::string model;
    int table = 1;
    std::size_t val_systems = 5;
    std::size_t feature = 0;
};

void to_json(json& j, const RunConfig& c) {
    j = json{{"interval", {c.interval_lo, c.interval_hi}},
             {"systems", c.systems},
             {"points", c.points},
             {"dt", c.dt},
             {"window", c.window},
             {"role", c.role},
             {"seed", c.seed},
             {"normalize", c.normalize},
             {"lr", c.lr},
             {"epochs", c.epochs},
             {"batch", c.batch},
             {"out", c.out},
             {"data", c.data},
             {"model", c.model},
             {"table", c.table},
             {"val_systems", c.val_systems},
             {"feature", c.feature}};
}

void from_json(const json& j, RunConfig& c) {
    if (j.contains("interval")) {
        c.interval_lo = j["interval"].at(0).get<double>();
        c.interval_hi = j["interval"].at(1).get<double>();
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("systems", c.systems);
    get("points", c.points);
    get("dt", c.dt);
    get("window", c.window);
    get("role", c.role);
    get("seed", c.seed);
    get("normalize", c.normalize);
    get("lr", c.lr);
    get("epochs", c.epochs);
    get("batch", c.batch);
    get("out", c.out);
    get("data", c.data);
    get("model", c.model);
    get("table", c.table);
    get("val_systems", c.val_systems);
    get("feature", c.feature);
}

TrainConfig make_train_config(const RunConfig& c) {
    TrainConfig tc;
    tc.learning_rate = c.lr;
    tc.epochs = c.epochs;
    tc.batch_size = c.batch;
    tc.seed = c.seed;
    return tc;
}

void echo_config(const RunConfig& c, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream out(dir / "run_config.json");
    out << json(c).dump(2) << '\n';
}

int cmd_generate(const RunConfig& c) {
    const IntervalSpec interval(c.interval_lo, c.interval_hi);
    const DatasetRole role =
        (c.role == "val" || c.role == "validation") ? DatasetRole::Validation
                                                    : DatasetRole::Train;
    Dataset ds = build_dataset(interval, c.systems, c.points, c.dt, c.seed, role,
                               WindowSpec{c.window});
    if (c.normalize) ds = apply_normalization(ds, fit_normalization(ds));
    write_dataset(ds, c.out);
    echo_config(c, c.out);
    std::printf("wrote %zu systems, %zu samples (%zu per system), unstable fraction %.4f\n",
                ds.n_systems, ds.samples.size(), ds.samples_per_system(),
                ds.unstable_fraction());
    return kExitOk;
}

int cmd_train(const RunConfig& c) {
    if (c.data.empty()) throw InvalidConfig("train: --data <dataset dir> is required");
    Dataset ds = read_dataset(c.data);
    if (c.normalize && !ds.normalized) {
        ds = apply_normalization(ds, fit_normalization(ds));
    }

    const TrainConfig tc = make_train_config(c);
    const TrainResult result = train(ds, tc);

    fs::create_directories(c.out);
    save_model(result.params, tc, c.normalize || ds.normalized,
               fs::path(c.out) / "model.json");
    echo_config(c, c.out);
    std::printf("trained %zu epochs on %zu samples; loss %.6f -> %.6f\n", tc.epochs,
                ds.samples.size(), result.loss_history.front(),
                result.loss_history.back());
    return kExitOk;
}

int cmd_evaluate(const RunConfig& c, bool normalize_flag_given) {
    if (c.model.empty()) throw InvalidConfig("evaluate: --model <model.json> is required");
    if (c.data.empty()) throw InvalidConfig("evaluate: --data <dataset dir> is required");

    const LoadedModel model = load_model(c.model);
    if (normalize_flag_given && c.normalize != model.normalized) {
        throw PreprocessingMismatch(
            "evaluate: model normalization flag does not match the request");
    }

    Dataset val = read_dataset(c.data);
    if (model.normalized && !val.normalized) {
        val = apply_normalization(val, fit_normalization(val));
    }
    if (!model.normalized && val.normalized) {
        throw PreprocessingMismatch("evaluate: normalized data, unnormalized model");
    }

    const auto evals = evaluate_per_system(model.params, val);
    std::vector<Metrics> per_metrics;
    for (const auto& e : evals) per_metrics.push_back(e.metrics);
    const AggregateMetrics agg = aggregate(per_metrics);

    ExperimentSpec spec;
    spec.train_interval = IntervalSpec(c.interval_lo, c.interval_hi);
    spec.val_interval = val.interval;
    spec.normalize = model.normalized;
    spec.data_seed = val.seed;
    spec.n_val_systems = val.n_systems;
    spec.n_points = val.n_points;
    spec.dt = val.dt;
    spec.window = val.window;
    spec.train_config = model.config;

    ExperimentResult result;
    result.per_system = evals;
    result.aggregate = agg;
    result.val_samples = val.samples.size();
    result.val_unstable_fraction = val.unstable_fraction();

    fs::create_directories(c.out);
    write_report(spec, result, fs::path(c.out) / "report.json");
    echo_config(c, c.out);
    std::printf("%zu systems: mean precision %.4f, mean recall %.4f\n",
                evals.size(), agg.mean_precision, agg.mean_recall);
    return kExitOk;
}

struct TableRow {
    double train_lo, train_hi;
    double val_lo, val_hi;
    bool normalized;
    double reference_precision, reference_recall;
};

const std::vector<TableRow> kTable1 = {
    {0, 1, 0, 1, false, 0.82, 0.617},
    {-1, 0, -1, 0, false, 0.632, 0.455},
    {0, 1, -1, 0, false, 0.034, 0.026},
    {-1, 0, 0, 1, false, 0.028, 0.032},
    {-1, 1, -1, 0, false, 0.704, 0.128},
};

const std::vector<TableRow> kTable2 = {
    {-1, 1, 0, 1, true, 0.96, 0.964},
    {-1, 1, -1, 0, true, 0.963, 0.969},
    {-1, 1, -1, 1, true, 0.982, 0.978},
    {-1, 1, 2, 4, true, 0.988, 0.934},
    {-1, 1, 0, 10, true, 0.975, 0.955},
    {-1, 1, -10, 10, true, 0.952, 0.9464},
};

int cmd_reproduce(const RunConfig& c) {
    const auto& rows = (c.table == 2) ? kTable2 : kTable1;
    fs::create_directories(c.out);
    echo_config(c, c.out);

    std::ofstream csv(fs::path(c.out) /
                      ("table" + std::to_string(c.table) + ".csv"));
    if (!csv) throw std::runtime_error("reproduce: cannot open output CSV");
    csv << "train_lo,train_hi,val_lo,val_hi,normalized,"
           "mean_precision,mean_recall,std_precision,std_recall,"
           "reference_precision,reference_recall\n";

    // Table 2 trains one model ([-1,1], normalized) and reuses it for all
    // six validation intervals, matching how the sweep is defined.
    std::optional<TrainResult> shared;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const TableRow& row = rows[i];
        ExperimentSpec spec;
        spec.train_interval = IntervalSpec(row.train_lo, row.train_hi);
        spec.val_interval = IntervalSpec(row.val_lo, row.val_hi);
        spec.normalize = row.normalized;
        spec.data_seed = c.seed;
        spec.n_train_systems = c.systems;
        spec.n_val_systems = c.val_systems;
        spec.n_points = c.points;
        spec.dt = c.dt;
        spec.window = WindowSpec{c.window};
        spec.train_config = make_train_config(c);

        ExperimentResult result;
        const fs::path row_dir = fs::path(c.out) / ("row_" + std::to_string(i + 1));
        if (c.table == 2) {
            if (!shared) {
                Dataset train_ds =
                    build_dataset(spec.train_interval, spec.n_train_systems,
                                  spec.n_points, spec.dt, spec.data_seed,
                                  DatasetRole::Train, spec.window);
                train_ds = apply_normalization(train_ds, fit_normalization(train_ds));
                shared = train(train_ds, spec.train_config);
            }
            result = evaluate_against(spec, shared->params, shared->loss_history);
            fs::create_directories(row_dir);
            write_report(spec, result, row_dir / "report.json");
        } else {
            result = run_experiment(spec, row_dir);
        }

        csv << row.train_lo << ',' << row.train_hi << ',' << row.val_lo << ','
            << row.val_hi << ',' << (row.normalized ? 1 : 0) << ','
            << result.aggregate.mean_precision << ',' << result.aggregate.mean_recall
            << ',' << result.aggregate.std_precision << ','
            << result.aggregate.std_recall << ',' << row.reference_precision << ','
            << row.reference_recall << '\n';
        std::printf("row %zu: precision %.4f (reference %.3f), recall %.4f (reference %.3f)\n",
                    i + 1, result.aggregate.mean_precision, row.reference_precision,
                    result.aggregate.mean_recall, row.reference_recall);
    }
    return kExitOk;
}

int cmd_distributions(const RunConfig& c, double val_lo, double val_hi) {
    ExperimentSpec spec;
    Dataset train_ds = build_dataset(IntervalSpec(c.interval_lo, c.interval_hi),
                                     c.systems, c.points, c.dt, c.seed,
                                     DatasetRole::Train, WindowSpec{c.window});
    Dataset val_ds = build_dataset(IntervalSpec(val_lo, val_hi), c.val_systems,
                                   c.points, c.dt, c.seed, DatasetRole::Validation,
                                   WindowSpec{c.window});
    if (c.normalize) {
        train_ds = apply_normalization(train_ds, fit_normalization(train_ds));
        val_ds = apply_normalization(val_ds, fit_normalization(val_ds));
    }
    const DistributionData d = export_distribution_data(train_ds, val_ds, c.feature);
    fs::create_directories(c.out);
    write_distribution_csv(d, fs::path(c.out) / "distribution.csv");
    echo_config(c, c.out);
    std::printf("feature %zu histogram overlap: %.4f\n", c.feature, histogram_overlap(d));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lorenz63 stable/unstable state classification pipeline"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<double> interval_flag, val_interval_flag;

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out, "output directory");
    };

    CLI::App* gen = app.add_subcommand("generate", "generate a labeled dataset");
    add_shared(gen);
    gen->add_option("--interval", interval_flag, "IC interval lo,hi")->expected(2)->delimiter(',');
    gen->add_option("--systems", cfg.systems, "number of Lorenz systems");
    gen->add_option("--points", cfg.points, "points per trajectory");
    gen->add_option("--dt", cfg.dt, "integration time step");
    gen->add_option("--window", cfg.window, "stability window half-width");
    gen->add_option("--role", cfg.role, "train|val (selects the seed stream)");
    gen->add_flag("--normalize,!--no-normalize", cfg.normalize, "per-system standardization");

    CLI::App* tr = app.add_subcommand("train", "train the classifier on a dataset");
    add_shared(tr);
    tr->add_option("--data", cfg.data, "dataset directory")->required();
    tr->add_flag("--normalize,!--no-normalize", cfg.normalize, "standardize before training");
    tr->add_option("--epochs", cfg.epochs, "training epochs");
    tr->add_option("--batch", cfg.batch, "mini-batch size");
    tr->add_option("--lr", cfg.lr, "Adam learning rate");

    CLI::App* ev = app.add_subcommand("evaluate", "evaluate a model on a dataset");
    add_shared(ev);
    ev->add_option("--model", cfg.model, "model.json path")->required();
    ev->add_option("--data", cfg.data, "validation dataset directory")->required();
    auto* ev_norm = ev->add_flag("--normalize,!--no-normalize", cfg.normalize,
                                 "expected preprocessing (must match the model)");

    CLI::App* rep = app.add_subcommand("reproduce", "run a full experiment table");
    add_shared(rep);
    rep->add_option("--table", cfg.table, "1 or 2")->check(CLI::IsMember({1, 2}));
    rep->add_option("--systems", cfg.systems, "training systems per row");
    rep->add_option("--val-systems", cfg.val_systems, "validation systems per row");
    rep->add_option("--points", cfg.points, "points per trajectory");
    rep->add_option("--dt", cfg.dt, "integration time step");
    rep->add_option("--window", cfg.window, "stability window half-width");
    rep->add_option("--epochs", cfg.epochs, "training epochs");
    rep->add_option("--batch", cfg.batch, "mini-batch size");
    rep->add_option("--lr", cfg.lr, "Adam learning rate");

    CLI::App* dist = app.add_subcommand(
        "distributions", "export train/val histogram and KDE data for one feature");
    add_shared(dist);
    dist->add_option("--interval", interval_flag, "training IC interval lo,hi")
        ->expected(2)->delimiter(',');
    dist->add_option("--val-interval", val_interval_flag, "validation IC interval lo,hi")
        ->expected(2)->delimiter(',');
    dist->add_option("--feature", cfg.feature, "feature index 0..5");
    dist->add_option("--systems", cfg.systems, "training systems");
    dist->add_option("--val-systems", cfg.val_systems, "validation systems");
    dist->add_option("--points", cfg.points, "points per trajectory");
    dist->add_flag("--normalize,!--no-normalize", cfg.normalize, "standardize both sides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();

    try {
        // precedence: flag > config file > default. Load the file over the
        // defaults, then re-parse argv so explicitly passed flags win.
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw InvalidConfig("cannot open config file: " + config_path);
            cfg = json::parse(in).get<RunConfig>();
            interval_flag.clear();
            val_interval_flag.clear();
            app.clear();
            app.parse(argc, argv);
        }
        if (interval_flag.size() == 2) {
            cfg.interval_lo = interval_flag[0];
            cfg.interval_hi = interval_flag[1];
        }

        if (sub == gen) return cmd_generate(cfg);
        if (sub == tr) return cmd_train(cfg);
        if (sub == ev) return cmd_evaluate(cfg, ev_norm->count() > 0);
        if (sub == rep) return cmd_reproduce(cfg);
        if (sub == dist) {
            double vlo = -1.0, vhi = 0.0;
            if (val_interval_flag.size() == 2) {
                vlo = val_interval_flag[0];
                vhi = val_interval_flag[1];
            }
            return cmd_distributions(cfg, vlo, vhi);
        }
        return kExitConfig;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const PreprocessingMismatch& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NonFiniteState& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalDivergence& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}
