#include "lorenz/metrics.hpp"

#include <cmath>

#include "lorenz/errors.hpp"

namespace lorenz {

ConfusionCounts confusion(const std::vector<StabilityLabel>& predictions,
                          const std::vector<StabilityLabel>& truths) {
    if (predictions.size() != truths.size() || predictions.empty()) {
        throw LengthMismatch("confusion: need equal non-zero lengths");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const bool pred_pos = predictions[i] == StabilityLabel::Unstable;
        const bool true_pos = truths[i] == StabilityLabel::Unstable;
        if (pred_pos && true_pos) ++c.tp;
        else if (pred_pos && !true_pos) ++c.fp;
        else if (!pred_pos && true_pos) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Metrics precision_recall(const ConfusionCounts& c) {
    Metrics m;
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    return m;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(xs.size()));
    return r;
}

}  // namespace

AggregateMetrics aggregate(const std::vector<Metrics>& per_system) {
    std::vector<double> precisions, recalls;
    for (const auto& m : per_system) {
        if (m.precision) precisions.push_back(*m.precision);
        if (m.recall) recalls.push_back(*m.recall);
    }
    if (precisions.empty() && recalls.empty()) {
        throw AllUndefined("aggregate: no defined metrics");
    }
    if (precisions.empty()) throw AllUndefined("aggregate: precision undefined everywhere");
    if (recalls.empty()) throw AllUndefined("aggregate: recall undefined everywhere");

    const MeanStd p = mean_std(precisions);
    const MeanStd r = mean_std(recalls);
    AggregateMetrics agg;
    agg.mean_precision = p.mean;
    agg.std_precision = p.std;
    agg.mean_recall = r.mean;
    agg.std_recall = r.std;
    agg.n_systems = per_system.size();
    agg.n_precision_defined = p.n;
    agg.n_recall_defined = r.n;
    return agg;
}

}  // namespace lorenz
