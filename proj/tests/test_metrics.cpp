#include <cmath>
#include <vector>

#include "doctest.h"
#include "lorenz/dataset.hpp"
#include "lorenz/errors.hpp"
#include "lorenz/experiment.hpp"
#include "lorenz/metrics.hpp"
#include "lorenz/rng.hpp"

using namespace lorenz;

namespace {

std::vector<StabilityLabel> random_labels(std::size_t n, SplitMix64& rng) {
    std::vector<StabilityLabel> v;
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back((rng.next_u64() & 1) ? StabilityLabel::Unstable
                                         : StabilityLabel::Stable);
    }
    return v;
}

}  // namespace

TEST_CASE("perfect predictions have no false counts") {
    SplitMix64 rng(1);
    const auto truths = random_labels(100, rng);
    const ConfusionCounts c = confusion(truths, truths);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    CHECK(c.total() == 100);
}

TEST_CASE("all-Stable predictor yields only fn and tn") {
    SplitMix64 rng(2);
    const auto truths = random_labels(200, rng);
    const std::vector<StabilityLabel> preds(200, StabilityLabel::Stable);
    const ConfusionCounts c = confusion(preds, truths);
    CHECK(c.tp == 0);
    CHECK(c.fp == 0);
    std::size_t unstable = 0;
    for (auto t : truths) unstable += (t == StabilityLabel::Unstable);
    CHECK(c.fn == unstable);
}

TEST_CASE("confusion matches a brute-force tally on random pairs") {
    SplitMix64 rng(3);
    const auto preds = random_labels(1000, rng);
    const auto truths = random_labels(1000, rng);
    const ConfusionCounts c = confusion(preds, truths);

    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const bool p = preds[i] == StabilityLabel::Unstable;
        const bool t = truths[i] == StabilityLabel::Unstable;
        tp += (p && t); fp += (p && !t); fn += (!p && t); tn += (!p && !t);
    }
    CHECK(c.tp == tp);
    CHECK(c.fp == fp);
    CHECK(c.fn == fn);
    CHECK(c.tn == tn);
    CHECK(c.total() == 1000);
}

TEST_CASE("confusion counts are permutation-invariant") {
    SplitMix64 rng(14);
    auto preds = random_labels(300, rng);
    auto truths = random_labels(300, rng);
    const ConfusionCounts before = confusion(preds, truths);
    for (std::size_t i = 299; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        std::swap(preds[i], preds[j]);
        std::swap(truths[i], truths[j]);
    }
    const ConfusionCounts after = confusion(preds, truths);
    CHECK(before.tp == after.tp);
    CHECK(before.fp == after.fp);
    CHECK(before.fn == after.fn);
    CHECK(before.tn == after.tn);
}

TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(confusion({StabilityLabel::Stable}, {}), LengthMismatch);
    CHECK_THROWS_AS(confusion({}, {}), LengthMismatch);
}

TEST_CASE("precision and recall arithmetic") {
    const Metrics m = precision_recall({9, 1, 3, 100});
    CHECK(*m.precision == doctest::Approx(0.9));
    CHECK(*m.recall == doctest::Approx(0.75));
}

TEST_CASE("zero denominators give explicit undefined, never 0") {
    const Metrics no_positive_preds = precision_recall({0, 0, 5, 10});
    CHECK_FALSE(no_positive_preds.precision.has_value());
    CHECK(no_positive_preds.recall.has_value());

    const Metrics no_positives = precision_recall({0, 3, 0, 10});
    CHECK(no_positives.precision.has_value());
    CHECK_FALSE(no_positives.recall.has_value());
}

TEST_CASE("precision_recall matches hand computation on random tuples") {
    SplitMix64 rng(50);
    for (int i = 0; i < 50; ++i) {
        const ConfusionCounts c{rng.next_below(100), rng.next_below(100),
                                rng.next_below(100), rng.next_below(100)};
        const Metrics m = precision_recall(c);
        if (c.tp + c.fp == 0) {
            CHECK_FALSE(m.precision.has_value());
        } else {
            CHECK(*m.precision == static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp));
            CHECK(*m.precision >= 0.0);
            CHECK(*m.precision <= 1.0);
        }
        if (c.tp + c.fn == 0) {
            CHECK_FALSE(m.recall.has_value());
        } else {
            CHECK(*m.recall == static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn));
        }
    }
}

TEST_CASE("shape of the matched-run example") {
    // counts with the same shape as a typical matched run: rare positives,
    // high precision, moderate recall
    const ConfusionCounts c{744, 83, 256, 5000};
    const Metrics m = precision_recall(c);
    CHECK(*m.precision == doctest::Approx(0.9).epsilon(0.01));
    CHECK(*m.recall == doctest::Approx(0.744).epsilon(0.001));
}

TEST_CASE("aggregate of two values") {
    const AggregateMetrics a = aggregate({Metrics{0.8, 0.8}, Metrics{1.0, 1.0}});
    CHECK(a.mean_precision == doctest::Approx(0.9));
    CHECK(a.std_precision == doctest::Approx(0.1));
    CHECK(a.n_precision_defined == 2);
}

TEST_CASE("aggregate of a single system has zero spread") {
    const AggregateMetrics a = aggregate({Metrics{0.7, 0.4}});
    CHECK(a.mean_precision == doctest::Approx(0.7));
    CHECK(a.std_precision == 0.0);
    CHECK(a.std_recall == 0.0);
}

TEST_CASE("aggregate skips undefined entries and matches recomputation") {
    SplitMix64 rng(60);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Metrics> ms;
        std::vector<double> ps, rs;
        for (int i = 0; i < 5; ++i) {
            Metrics m;
            if (rng.next_double() < 0.8) {
                m.precision = rng.next_double();
                ps.push_back(*m.precision);
            }
            m.recall = rng.next_double();
            rs.push_back(*m.recall);
            ms.push_back(m);
        }
        if (ps.empty()) continue;
        const AggregateMetrics a = aggregate(ms);

        auto mean_std = [](const std::vector<double>& xs) {
            double mu = 0;
            for (double x : xs) mu += x;
            mu /= static_cast<double>(xs.size());
            double ss = 0;
            for (double x : xs) ss += (x - mu) * (x - mu);
            return std::pair{mu, std::sqrt(ss / static_cast<double>(xs.size()))};
        };
        const auto [pm, psd] = mean_std(ps);
        const auto [rm, rsd] = mean_std(rs);
        CHECK(std::abs(a.mean_precision - pm) < 1e-12);
        CHECK(std::abs(a.std_precision - psd) < 1e-12);
        CHECK(std::abs(a.mean_recall - rm) < 1e-12);
        CHECK(std::abs(a.std_recall - rsd) < 1e-12);
    }
}

TEST_CASE("all-undefined aggregation is an error") {
    CHECK_THROWS_AS(aggregate({Metrics{}, Metrics{}}), AllUndefined);
    CHECK_THROWS_AS(aggregate({Metrics{std::nullopt, 0.5}}), AllUndefined);
}

TEST_CASE("identical datasets give identical histograms") {
    const Dataset ds = build_dataset(IntervalSpec(0, 1), 2, 300, 0.01, 5,
                                     DatasetRole::Train);
    const DistributionData d = export_distribution_data(ds, ds, 0);
    CHECK(d.train_hist == d.val_hist);
    CHECK(d.train_kde == d.val_kde);
    CHECK(histogram_overlap(d) == doctest::Approx(1.0));
}

TEST_CASE("KDE of a standard normal sample is near the true density at 0") {
    // Box-Muller sample, evaluated against 1/sqrt(2*pi)
    Dataset ds;
    ds.n_systems = 1;
    SplitMix64 rng(1234);
    for (int i = 0; i < 4000; ++i) {
        const double u1 = rng.next_double() + 1e-12;
        const double u2 = rng.next_double();
        const double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        LabeledSample s;
        for (std::size_t f = 0; f < 6; ++f) s.features[f] = g;
        ds.samples.push_back(s);
    }
    const DistributionData d = export_distribution_data(ds, ds, 0);
    // grid point closest to zero
    std::size_t best = 0;
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        if (std::abs(d.grid[i]) < std::abs(d.grid[best])) best = i;
    }
    CHECK(std::abs(d.train_kde[best] - 1.0 / std::sqrt(2.0 * M_PI)) < 0.05);
}

TEST_CASE("normalization increases histogram overlap for a mismatched pair") {
    const Dataset train_ds = build_dataset(IntervalSpec(-1, 1), 4, 1500, 0.01, 19,
                                           DatasetRole::Train);
    const Dataset val_ds = build_dataset(IntervalSpec(-1, 0), 2, 1500, 0.01, 19,
                                         DatasetRole::Validation);
    const Dataset train_n = apply_normalization(train_ds, fit_normalization(train_ds));
    const Dataset val_n = apply_normalization(val_ds, fit_normalization(val_ds));

    // derivative features show the mismatch most clearly; check dx/dt
    const double before = histogram_overlap(export_distribution_data(train_ds, val_ds, 3));
    const double after = histogram_overlap(export_distribution_data(train_n, val_n, 3));
    CHECK(after > before);
}
