#ifndef LORENZ_DATASET_HPP
#define LORENZ_DATASET_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "lorenz/dynamics.hpp"
#include "lorenz/labeling.hpp"
#include "lorenz/rng.hpp"

namespace lorenz {

struct IntervalSpec {
    double lo;
    double hi;

    // Throws InvalidConfig unless lo < hi and both are finite.
    IntervalSpec(double lo, double hi);
};

struct FeatureVector {
    std::array<double, 6> v{};  // x, y, z, dx/dt, dy/dt, dz/dt

    double operator[](std::size_t i) const { return v[i]; }
    double& operator[](std::size_t i) { return v[i]; }
};

struct LabeledSample {
    FeatureVector features;
    RegimeLabel regime = RegimeLabel::Left;
    StabilityLabel stability = StabilityLabel::Stable;
    std::size_t system_id = 0;
    std::size_t time_index = 0;
};

struct NormalizationStats {
    std::array<double, 6> mean{};
    std::array<double, 6> stddev{};  // population form, every component > 0
    std::size_t system_id = 0;
};

enum class DatasetRole { Train, Validation };

struct Dataset {
    std::vector<LabeledSample> samples;  // grouped contiguously by system_id
    DatasetRole role = DatasetRole::Train;
    std::size_t n_systems = 0;
    IntervalSpec interval{0.0, 1.0};
    std::uint64_t seed = 0;
    double dt = 0.01;
    std::size_t n_points = 0;
    WindowSpec window;
    bool normalized = false;
    std::vector<NormalizationStats> stats;  // one per system when normalized

    std::size_t samples_per_system() const { return n_points - 2 * window.half_width; }
    double unstable_fraction() const;
};

// One uniform draw per coordinate from [lo, hi).
State sample_initial_condition(const IntervalSpec& interval, SplitMix64& rng);

// Integrates n_systems trajectories from independently sampled initial
// conditions and emits one sample per interior point. Train and Validation
// roles draw from disjoint seed streams.
Dataset build_dataset(const IntervalSpec& interval, std::size_t n_systems,
                      std::size_t n_points, double dt, std::uint64_t seed,
                      DatasetRole role, const WindowSpec& window = {});

// Per-system, per-feature mean and population standard deviation.
// Throws DegenerateFeature if any feature is constant within a system.
std::vector<NormalizationStats> fit_normalization(const Dataset& ds);

// (v - mean) / stddev with each system's own stats. Labels are untouched.
// Throws MissingStats if any system_id lacks stats.
Dataset apply_normalization(const Dataset& ds,
                            const std::vector<NormalizationStats>& stats);

// Serialization: one CSV per system (header
// t,x,y,z,dxdt,dydt,dzdt,regime,stability) plus manifest.json.
void write_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace lorenz

#endif
