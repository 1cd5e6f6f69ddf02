#ifndef LORENZ_METRICS_HPP
#define LORENZ_METRICS_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "lorenz/labeling.hpp"

namespace lorenz {

struct ConfusionCounts {
    std::size_t tp = 0;  // Unstable predicted Unstable
    std::size_t fp = 0;  // Stable predicted Unstable
    std::size_t fn = 0;  // Unstable predicted Stable
    std::size_t tn = 0;  // Stable predicted Stable

    std::size_t total() const { return tp + fp + fn + tn; }
};

// nullopt exactly when the corresponding denominator is zero.
struct Metrics {
    std::optional<double> precision;  // tp / (tp + fp)
    std::optional<double> recall;     // tp / (tp + fn)
};

struct AggregateMetrics {
    double mean_precision = 0.0;
    double mean_recall = 0.0;
    double std_precision = 0.0;  // population form
    double std_recall = 0.0;
    std::size_t n_systems = 0;           // systems contributing at all
    std::size_t n_precision_defined = 0;
    std::size_t n_recall_defined = 0;
};

// Throws LengthMismatch on unequal sizes or empty input.
ConfusionCounts confusion(const std::vector<StabilityLabel>& predictions,
                          const std::vector<StabilityLabel>& truths);

Metrics precision_recall(const ConfusionCounts& c);

// Mean and population std over the defined entries of each metric.
// Throws AllUndefined if a metric is undefined for every system.
AggregateMetrics aggregate(const std::vector<Metrics>& per_system);

}  // namespace lorenz

#endif
