#include "lorenz/labeling.hpp"

#include <stdexcept>

#include "lorenz/errors.hpp"

namespace lorenz {

std::vector<RegimeLabel> regime_labels(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("regime_labels: empty series");
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());

    std::vector<RegimeLabel> labels;
    labels.reserve(xs.size());
    for (double x : xs) {
        labels.push_back(x > mean ? RegimeLabel::Right : RegimeLabel::Left);
    }
    return labels;
}

std::vector<RegimeLabel> regime_labels(const Trajectory& traj) {
    std::vector<double> xs;
    xs.reserve(traj.size());
    for (const State& s : traj.states) xs.push_back(s.x);
    return regime_labels(xs);
}

std::vector<IndexedStability> stability_labels(
    const std::vector<RegimeLabel>& regimes, const WindowSpec& w) {
    if (w.half_width < 1) {
        throw std::invalid_argument("stability_labels: half_width must be >= 1");
    }
    const std::size_t n = regimes.size();
    const std::size_t hw = w.half_width;
    if (n <= 2 * hw) {
        throw SequenceTooShort("stability_labels: need more than 2*half_width points");
    }

    std::vector<IndexedStability> out;
    out.reserve(n - 2 * hw);
    for (std::size_t t = hw; t + hw < n; ++t) {
        // All neighbours must match the first one; the point itself is skipped.
        const RegimeLabel ref = regimes[t - hw];
        bool stable = true;
        for (std::size_t k = t - hw; k <= t + hw && stable; ++k) {
            if (k == t) continue;
            stable = (regimes[k] == ref);
        }
        out.push_back({t, stable ? StabilityLabel::Stable : StabilityLabel::Unstable});
    }
    return out;
}

}  // namespace lorenz
