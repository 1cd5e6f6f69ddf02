#include "lorenz/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lorenz/errors.hpp"

namespace lorenz {

using nlohmann::json;

std::vector<SystemEvaluation> evaluate_per_system(const NetworkParams& params,
                                                  const Dataset& val) {
    std::vector<SystemEvaluation> evals;
    for (std::size_t sys = 0; sys < val.n_systems; ++sys) {
        std::vector<StabilityLabel> preds, truths;
        for (const auto& s : val.samples) {
            if (s.system_id != sys) continue;
            preds.push_back(forward(params, s.features).predicted);
            truths.push_back(s.stability);
        }
        if (truths.empty()) continue;
        SystemEvaluation e;
        e.system_id = sys;
        e.counts = confusion(preds, truths);
        e.metrics = precision_recall(e.counts);
        evals.push_back(e);
    }
    return evals;
}

namespace {

ExperimentResult assemble_result(const ExperimentSpec& spec, const Dataset& val,
                                 const NetworkParams& params,
                                 const std::vector<double>& loss_history,
                                 std::size_t train_samples, double train_unstable) {
    ExperimentResult r;
    r.per_system = evaluate_per_system(params, val);
    std::vector<Metrics> per_metrics;
    for (const auto& e : r.per_system) per_metrics.push_back(e.metrics);
    r.aggregate = aggregate(per_metrics);
    r.loss_history = loss_history;
    r.train_samples = train_samples;
    r.val_samples = val.samples.size();
    r.train_unstable_fraction = train_unstable;
    r.val_unstable_fraction = val.unstable_fraction();
    return r;
}

Dataset build_validation(const ExperimentSpec& spec) {
    Dataset val = build_dataset(spec.val_interval, spec.n_val_systems, spec.n_points,
                                spec.dt, spec.data_seed, DatasetRole::Validation,
                                spec.window);
    if (spec.normalize) val = apply_normalization(val, fit_normalization(val));
    return val;
}

void write_predictions_csv(const NetworkParams& params, const Dataset& val,
                           const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "system_id,t,truth,predicted,p_stable,p_unstable\n";
    for (const auto& s : val.samples) {
        const Prediction p = forward(params, s.features);
        out << s.system_id << ',' << s.time_index << ','
            << (s.stability == StabilityLabel::Unstable ? 1 : 0) << ','
            << (p.predicted == StabilityLabel::Unstable ? 1 : 0) << ',' << p.probs[0]
            << ',' << p.probs[1] << '\n';
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out_dir) {
    Dataset train_ds = build_dataset(spec.train_interval, spec.n_train_systems,
                                     spec.n_points, spec.dt, spec.data_seed,
                                     DatasetRole::Train, spec.window);
    const double train_unstable = train_ds.unstable_fraction();
    if (spec.normalize) {
        train_ds = apply_normalization(train_ds, fit_normalization(train_ds));
    }

    const TrainResult trained = train(train_ds, spec.train_config);
    const Dataset val = build_validation(spec);

    ExperimentResult result = assemble_result(spec, val, trained.params,
                                              trained.loss_history,
                                              train_ds.samples.size(), train_unstable);
    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        save_model(trained.params, spec.train_config, spec.normalize,
                   *out_dir / "model.json");
        write_predictions_csv(trained.params, val, *out_dir / "predictions.csv");
        write_report(spec, result, *out_dir / "report.json");
    }
    return result;
}

ExperimentResult evaluate_against(const ExperimentSpec& spec, const NetworkParams& params,
                                  const std::vector<double>& loss_history) {
    const Dataset val = build_validation(spec);
    return assemble_result(spec, val, params, loss_history, 0, 0.0);
}

void write_report(const ExperimentSpec& spec, const ExperimentResult& result,
                  const std::filesystem::path& path) {
    json j;
    j["spec"] = {{"train_interval", {spec.train_interval.lo, spec.train_interval.hi}},
                 {"val_interval", {spec.val_interval.lo, spec.val_interval.hi}},
                 {"normalize", spec.normalize},
                 {"data_seed", spec.data_seed},
                 {"n_train_systems", spec.n_train_systems},
                 {"n_val_systems", spec.n_val_systems},
                 {"n_points", spec.n_points},
                 {"dt", spec.dt},
                 {"window_half_width", spec.window.half_width},
                 {"train_config",
                  {{"learning_rate", spec.train_config.learning_rate},
                   {"epochs", spec.train_config.epochs},
                   {"batch_size", spec.train_config.batch_size},
                   {"seed", spec.train_config.seed}}}};

    json per_system = json::array();
    std::size_t excluded = 0;
    for (const auto& e : result.per_system) {
        json m = {{"system_id", e.system_id},
                  {"tp", e.counts.tp},
                  {"fp", e.counts.fp},
                  {"fn", e.counts.fn},
                  {"tn", e.counts.tn}};
        m["precision"] = e.metrics.precision ? json(*e.metrics.precision) : json(nullptr);
        m["recall"] = e.metrics.recall ? json(*e.metrics.recall) : json(nullptr);
        if (!e.metrics.precision || !e.metrics.recall) ++excluded;
        per_system.push_back(m);
    }
    j["per_system"] = per_system;
    j["aggregate"] = {{"mean_precision", result.aggregate.mean_precision},
                      {"mean_recall", result.aggregate.mean_recall},
                      {"std_precision", result.aggregate.std_precision},
                      {"std_recall", result.aggregate.std_recall},
                      {"n_systems", result.aggregate.n_systems},
                      {"n_precision_defined", result.aggregate.n_precision_defined},
                      {"n_recall_defined", result.aggregate.n_recall_defined},
                      {"std_form", "population"}};
    j["effective_sample_counts"] = {{"train", result.train_samples},
                                    {"val", result.val_samples}};
    j["unstable_fraction"] = {{"train", result.train_unstable_fraction},
                              {"val", result.val_unstable_fraction}};
    j["systems_with_undefined_metrics"] = excluded;
    j["loss_history"] = result.loss_history;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_report: cannot open " + path.string());
    out << j.dump(2) << '\n';
}

namespace {

constexpr std::size_t kBins = 64;
constexpr std::size_t kGrid = 256;

std::vector<double> feature_column(const Dataset& ds, std::size_t f) {
    std::vector<double> xs;
    xs.reserve(ds.samples.size());
    for (const auto& s : ds.samples) xs.push_back(s.features[f]);
    return xs;
}

std::vector<double> normalized_histogram(const std::vector<double>& xs, double lo,
                                         double hi) {
    std::vector<double> h(kBins, 0.0);
    const double width = hi - lo;
    for (double x : xs) {
        auto bin = static_cast<std::size_t>((x - lo) / width * kBins);
        if (bin >= kBins) bin = kBins - 1;  // right edge
        h[bin] += 1.0;
    }
    for (double& v : h) v /= static_cast<double>(xs.size());
    return h;
}

double silverman_bandwidth(std::vector<double> xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mu = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    const double sd = std::sqrt(ss / n);

    std::sort(xs.begin(), xs.end());
    const double q1 = xs[xs.size() / 4];
    const double q3 = xs[(3 * xs.size()) / 4];
    const double iqr = q3 - q1;

    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    if (spread <= 0.0) spread = (sd > 0.0) ? sd : 1.0;
    return 0.9 * spread * std::pow(n, -0.2);
}

std::vector<double> gaussian_kde(const std::vector<double>& xs,
                                 const std::vector<double>& grid) {
    const double h = silverman_bandwidth(xs);
    const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * M_PI));
    std::vector<double> out(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double acc = 0.0;
        for (double x : xs) {
            const double u = (grid[i] - x) / h;
            acc += std::exp(-0.5 * u * u);
        }
        out[i] = acc * norm;
    }
    return out;
}

}  // namespace

DistributionData export_distribution_data(const Dataset& train, const Dataset& val,
                                          std::size_t feature_index) {
    if (feature_index >= 6) throw InvalidConfig("export_distribution_data: bad feature index");
    if (train.samples.empty() || val.samples.empty()) {
        throw InvalidConfig("export_distribution_data: empty dataset");
    }

    const auto txs = feature_column(train, feature_index);
    const auto vxs = feature_column(val, feature_index);

    DistributionData d;
    d.lo = std::min(*std::min_element(txs.begin(), txs.end()),
                    *std::min_element(vxs.begin(), vxs.end()));
    d.hi = std::max(*std::max_element(txs.begin(), txs.end()),
                    *std::max_element(vxs.begin(), vxs.end()));
    if (d.hi <= d.lo) d.hi = d.lo + 1.0;  // all values identical

    d.bin_edges.resize(kBins + 1);
    for (std::size_t i = 0; i <= kBins; ++i) {
        d.bin_edges[i] = d.lo + (d.hi - d.lo) * static_cast<double>(i) / kBins;
    }
    d.train_hist = normalized_histogram(txs, d.lo, d.hi);
    d.val_hist = normalized_histogram(vxs, d.lo, d.hi);

    d.grid.resize(kGrid);
    for (std::size_t i = 0; i < kGrid; ++i) {
        d.grid[i] = d.lo + (d.hi - d.lo) * static_cast<double>(i) / (kGrid - 1);
    }
    d.train_kde = gaussian_kde(txs, d.grid);
    d.val_kde = gaussian_kde(vxs, d.grid);
    return d;
}

void write_distribution_csv(const DistributionData& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "kind,coord,train,val\n";
    for (std::size_t i = 0; i < d.train_hist.size(); ++i) {
        const double center = 0.5 * (d.bin_edges[i] + d.bin_edges[i + 1]);
        out << "hist," << center << ',' << d.train_hist[i] << ',' << d.val_hist[i] << '\n';
    }
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        out << "kde," << d.grid[i] << ',' << d.train_kde[i] << ',' << d.val_kde[i] << '\n';
    }
}

double histogram_overlap(const DistributionData& d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d.train_hist.size(); ++i) {
        acc += std::min(d.train_hist[i], d.val_hist[i]);
    }
    return acc;
}

}  // namespace lorenz
