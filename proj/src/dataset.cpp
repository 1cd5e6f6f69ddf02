#include "lorenz/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lorenz/errors.hpp"

namespace lorenz {

using nlohmann::json;

IntervalSpec::IntervalSpec(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
        throw InvalidConfig("IntervalSpec: require finite lo < hi");
    }
}

double Dataset::unstable_fraction() const {
    if (samples.empty()) return 0.0;
    std::size_t unstable = 0;
    for (const auto& s : samples) {
        if (s.stability == StabilityLabel::Unstable) ++unstable;
    }
    return static_cast<double>(unstable) / static_cast<double>(samples.size());
}

State sample_initial_condition(const IntervalSpec& interval, SplitMix64& rng) {
    return {rng.uniform(interval.lo, interval.hi),
            rng.uniform(interval.lo, interval.hi),
            rng.uniform(interval.lo, interval.hi)};
}

Dataset build_dataset(const IntervalSpec& interval, std::size_t n_systems,
                      std::size_t n_points, double dt, std::uint64_t seed,
                      DatasetRole role, const WindowSpec& window) {
    if (n_systems < 1) throw InvalidConfig("build_dataset: n_systems must be >= 1");
    if (n_points <= 2 * window.half_width) {
        throw InvalidConfig("build_dataset: n_points must exceed 2*half_width");
    }

    Dataset ds;
    ds.role = role;
    ds.n_systems = n_systems;
    ds.interval = interval;
    ds.seed = seed;
    ds.dt = dt;
    ds.n_points = n_points;
    ds.window = window;
    ds.samples.reserve(n_systems * (n_points - 2 * window.half_width));

    const std::uint64_t role_tag = (role == DatasetRole::Train) ? 1 : 2;
    for (std::size_t sys = 0; sys < n_systems; ++sys) {
        SplitMix64 rng(derive_seed(seed, role_tag, sys));
        const State ic = sample_initial_condition(interval, rng);
        const Trajectory traj = integrate(ic, SystemParams{}, dt, n_points);
        const auto regimes = regime_labels(traj);
        const auto stability = stability_labels(regimes, window);

        for (const auto& [idx, label] : stability) {
            LabeledSample s;
            const State& st = traj.states[idx];
            const Derivative& d = traj.derivatives[idx];
            s.features.v = {st.x, st.y, st.z, d.dx, d.dy, d.dz};
            s.regime = regimes[idx];
            s.stability = label;
            s.system_id = sys;
            s.time_index = idx;
            ds.samples.push_back(s);
        }
    }
    return ds;
}

std::vector<NormalizationStats> fit_normalization(const Dataset& ds) {
    if (ds.samples.empty()) throw InvalidConfig("fit_normalization: empty dataset");

    std::vector<NormalizationStats> all;
    all.reserve(ds.n_systems);
    for (std::size_t sys = 0; sys < ds.n_systems; ++sys) {
        std::vector<const LabeledSample*> group;
        for (const auto& s : ds.samples) {
            if (s.system_id == sys) group.push_back(&s);
        }
        if (group.size() < 2) {
            throw InvalidConfig("fit_normalization: each system needs >= 2 samples");
        }

        NormalizationStats st;
        st.system_id = sys;
        const double n = static_cast<double>(group.size());
        for (std::size_t f = 0; f < 6; ++f) {
            double sum = 0.0;
            for (const auto* s : group) sum += s->features[f];
            const double mu = sum / n;
            double ss = 0.0;
            bool constant = true;
            for (const auto* s : group) {
                const double d = s->features[f] - mu;
                ss += d * d;
                constant = constant && (s->features[f] == group.front()->features[f]);
            }
            const double sd = std::sqrt(ss / n);
            if (constant || sd == 0.0) {
                throw DegenerateFeature("fit_normalization: constant feature " +
                                        std::to_string(f) + " in system " +
                                        std::to_string(sys));
            }
            st.mean[f] = mu;
            st.stddev[f] = sd;
        }
        all.push_back(st);
    }
    return all;
}

Dataset apply_normalization(const Dataset& ds,
                            const std::vector<NormalizationStats>& stats) {
    std::map<std::size_t, const NormalizationStats*> by_system;
    for (const auto& st : stats) by_system[st.system_id] = &st;

    Dataset out = ds;
    for (auto& s : out.samples) {
        auto it = by_system.find(s.system_id);
        if (it == by_system.end()) {
            throw MissingStats("apply_normalization: no stats for system " +
                               std::to_string(s.system_id));
        }
        const NormalizationStats& st = *it->second;
        for (std::size_t f = 0; f < 6; ++f) {
            s.features[f] = (s.features[f] - st.mean[f]) / st.stddev[f];
        }
    }
    out.normalized = true;
    out.stats = stats;
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string system_filename(std::size_t sys) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "system_%03zu.csv", sys);
    return buf;
}

json stats_to_json(const NormalizationStats& st) {
    return json{{"system_id", st.system_id},
                {"mean", st.mean},
                {"stddev", st.stddev}};
}

NormalizationStats stats_from_json(const json& j) {
    NormalizationStats st;
    st.system_id = j.at("system_id").get<std::size_t>();
    st.mean = j.at("mean").get<std::array<double, 6>>();
    st.stddev = j.at("stddev").get<std::array<double, 6>>();
    return st;
}

}  // namespace

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::size_t unstable = 0;
    for (std::size_t sys = 0; sys < ds.n_systems; ++sys) {
        std::ofstream out(dir / system_filename(sys));
        if (!out) throw std::runtime_error("write_dataset: cannot open output file");
        out << "t,x,y,z,dxdt,dydt,dzdt,regime,stability\n";
        for (const auto& s : ds.samples) {
            if (s.system_id != sys) continue;
            if (s.stability == StabilityLabel::Unstable) ++unstable;
            out << s.time_index;
            for (std::size_t f = 0; f < 6; ++f) out << ',' << format_double(s.features[f]);
            out << ',' << (s.regime == RegimeLabel::Left ? 'L' : 'R') << ','
                << (s.stability == StabilityLabel::Unstable ? 1 : 0) << '\n';
        }
    }

    json manifest;
    manifest["role"] = (ds.role == DatasetRole::Train) ? "train" : "val";
    manifest["interval"] = {ds.interval.lo, ds.interval.hi};
    manifest["seed"] = ds.seed;
    manifest["dt"] = ds.dt;
    manifest["n_points"] = ds.n_points;
    manifest["n_systems"] = ds.n_systems;
    manifest["window_half_width"] = ds.window.half_width;
    manifest["n_samples"] = ds.samples.size();
    manifest["samples_per_system"] = ds.samples_per_system();
    manifest["unstable_fraction"] = ds.unstable_fraction();
    manifest["normalized"] = ds.normalized;
    if (ds.normalized) {
        json js = json::array();
        for (const auto& st : ds.stats) js.push_back(stats_to_json(st));
        manifest["stats"] = js;
    }
    std::ofstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("write_dataset: cannot open manifest");
    mf << manifest.dump(2) << '\n';
}

Dataset read_dataset(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("read_dataset: missing manifest.json");
    json manifest = json::parse(mf);

    const auto iv = manifest.at("interval").get<std::array<double, 2>>();
    Dataset ds;
    ds.role = manifest.at("role").get<std::string>() == "train" ? DatasetRole::Train
                                                                : DatasetRole::Validation;
    ds.interval = IntervalSpec(iv[0], iv[1]);
    ds.seed = manifest.at("seed").get<std::uint64_t>();
    ds.dt = manifest.at("dt").get<double>();
    ds.n_points = manifest.at("n_points").get<std::size_t>();
    ds.n_systems = manifest.at("n_systems").get<std::size_t>();
    ds.window.half_width = manifest.at("window_half_width").get<std::size_t>();
    ds.normalized = manifest.at("normalized").get<bool>();
    if (ds.normalized) {
        for (const auto& j : manifest.at("stats")) ds.stats.push_back(stats_from_json(j));
    }

    for (std::size_t sys = 0; sys < ds.n_systems; ++sys) {
        std::ifstream in(dir / system_filename(sys));
        if (!in) throw std::runtime_error("read_dataset: missing " + system_filename(sys));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            LabeledSample s;
            s.system_id = sys;
            char regime = 0;
            int stability = 0;
            unsigned long long t = 0;
            if (std::sscanf(line.c_str(), "%llu,%lf,%lf,%lf,%lf,%lf,%lf,%c,%d", &t,
                            &s.features[0], &s.features[1], &s.features[2],
                            &s.features[3], &s.features[4], &s.features[5], &regime,
                            &stability) != 9) {
                throw std::runtime_error("read_dataset: malformed row: " + line);
            }
            s.time_index = static_cast<std::size_t>(t);
            s.regime = (regime == 'R') ? RegimeLabel::Right : RegimeLabel::Left;
            s.stability = stability ? StabilityLabel::Unstable : StabilityLabel::Stable;
            ds.samples.push_back(s);
        }
    }
    return ds;
}

}  // namespace lorenz
