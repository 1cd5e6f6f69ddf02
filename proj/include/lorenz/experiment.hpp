#ifndef LORENZ_EXPERIMENT_HPP
#define LORENZ_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/dataset.hpp"
#include "lorenz/metrics.hpp"
#include "lorenz/network.hpp"

namespace lorenz {

struct ExperimentSpec {
    IntervalSpec train_interval{0.0, 1.0};
    IntervalSpec val_interval{0.0, 1.0};
    bool normalize = false;
    std::uint64_t data_seed = 1;
    std::size_t n_train_systems = 25;
    std::size_t n_val_systems = 5;
    std::size_t n_points = 4000;
    double dt = 0.01;
    WindowSpec window;
    TrainConfig train_config;
};

struct SystemEvaluation {
    std::size_t system_id = 0;
    ConfusionCounts counts;
    Metrics metrics;
};

struct ExperimentResult {
    std::vector<SystemEvaluation> per_system;
    AggregateMetrics aggregate;
    std::vector<double> loss_history;
    std::size_t train_samples = 0;
    std::size_t val_samples = 0;
    double train_unstable_fraction = 0.0;
    double val_unstable_fraction = 0.0;
};

// Evaluates a trained model on every system of a validation dataset
// separately. The dataset must already carry the preprocessing the model
// was trained with.
std::vector<SystemEvaluation> evaluate_per_system(const NetworkParams& params,
                                                  const Dataset& val);

// Full pipeline for one table row: build train/val ensembles, optionally
// standardize each system with its own stats, train, evaluate per validation
// system, aggregate. Artifacts (model, predictions, report) are written when
// out_dir is given.
ExperimentResult run_experiment(
    const ExperimentSpec& spec,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

// Same pipeline but reusing an already-trained model, so several validation
// intervals can share one training run.
ExperimentResult evaluate_against(const ExperimentSpec& spec, const NetworkParams& params,
                                  const std::vector<double>& loss_history);

void write_report(const ExperimentSpec& spec, const ExperimentResult& result,
                  const std::filesystem::path& path);

// Histogram + KDE export for train/validation distribution comparison.
struct DistributionData {
    double lo = 0.0, hi = 0.0;          // joint feature range
    std::vector<double> bin_edges;      // 65 edges, 64 uniform bins
    std::vector<double> train_hist;     // normalized: sums to 1
    std::vector<double> val_hist;
    std::vector<double> grid;           // 256 evaluation points
    std::vector<double> train_kde;      // Gaussian kernel, Silverman bandwidth
    std::vector<double> val_kde;
};

DistributionData export_distribution_data(const Dataset& train, const Dataset& val,
                                          std::size_t feature_index);
void write_distribution_csv(const DistributionData& d, const std::filesystem::path& path);

// Overlap coefficient of the two normalized histograms: sum of per-bin minima.
double histogram_overlap(const DistributionData& d);

}  // namespace lorenz

#endif
