#ifndef LORENZ_LABELING_HPP
#define LORENZ_LABELING_HPP

#include <cstddef>
#include <vector>

#include "lorenz/dynamics.hpp"

namespace lorenz {

enum class RegimeLabel { Left, Right };

// Unstable is the positive class everywhere.
enum class StabilityLabel { Stable, Unstable };

struct WindowSpec {
    std::size_t half_width = 5;
};

struct IndexedStability {
    std::size_t index = 0;  // index into the source trajectory
    StabilityLabel label = StabilityLabel::Stable;
};

// Regime boundary is the mean x of this trajectory: Right iff x > mean(x),
// ties go Left.
std::vector<RegimeLabel> regime_labels(const Trajectory& traj);
std::vector<RegimeLabel> regime_labels(const std::vector<double>& xs);

// A point is Stable iff all 2*half_width neighbours at offsets
// {-w..-1, +1..+w} share one common regime; the point's own regime is not
// consulted. Boundary indices are excluded, so the output covers exactly
// the interior indices [half_width, N-1-half_width].
// Throws SequenceTooShort if N <= 2*half_width.
std::vector<IndexedStability> stability_labels(
    const std::vector<RegimeLabel>& regimes, const WindowSpec& w);

}  // namespace lorenz

#endif
