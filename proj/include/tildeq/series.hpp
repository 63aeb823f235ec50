#pragma once

// Core sequence types shared by every module: raw series, forecast pairs,
// windowed datasets, chronological splits, z-score normalization and the
// one-column CSV format used for ingestion and export.

#include <cstddef>
#include <string>
#include <vector>

namespace tildeq {

struct Series {
    std::vector<double> values;

    Series() = default;
    explicit Series(std::vector<double> v) : values(std::move(v)) {}

    std::size_t length() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

// Throws std::invalid_argument on empty input or non-finite samples.
void validate_series(const Series& s);

// Aligned ground truth and prediction over the same horizon.
struct ForecastPair {
    Series truth;
    Series pred;
};

// Throws std::invalid_argument unless both sides are valid series of equal length.
void validate_pair(const ForecastPair& p);

// Chronological train/val/test proportions. No shuffling across boundaries.
struct SplitSpec {
    double train_fraction = 0.6;
    double val_fraction = 0.2;
    double test_fraction = 0.2;
};

// Fractions must lie in [0,1] and sum to 1 within 1e-9.
void validate_split(const SplitSpec& spec);

struct WindowedDataset {
    struct Item {
        Series input;  // length n
        Series target; // length L
    };
    std::vector<Item> items;
    // z-score statistics; meaningful once normalized == true
    double mean = 0.0;
    double stddev = 1.0;
    bool normalized = false;

    std::size_t size() const { return items.size(); }
    std::size_t input_length() const { return items.empty() ? 0 : items.front().input.length(); }
    std::size_t target_length() const { return items.empty() ? 0 : items.front().target.length(); }
};

// Every window [t, t+n) -> [t+n, t+n+L) advancing by `stride`.
// Count: floor((length - n - L)/stride) + 1. Throws "insufficient length"
// when the series cannot host a single window.
WindowedDataset window(const Series& series, std::size_t n, std::size_t L, std::size_t stride);

// Mean/std over every sample of a dataset (population std).
struct NormStats {
    double mean = 0.0;
    double stddev = 1.0;
};
NormStats compute_stats(const WindowedDataset& ds);

// Z-scores the dataset with its own statistics and stores them. Reapplying
// to an already normalized dataset is a no-op (idempotent). Throws
// "constant series" when the spread is zero.
WindowedDataset zscore_normalize(const WindowedDataset& ds);

// Z-scores with externally supplied statistics (train-split stats applied
// to val/test). Same idempotence and zero-spread rules.
WindowedDataset apply_normalization(const WindowedDataset& ds, const NormStats& stats);

// Inverse transform using the stored statistics; identity on raw datasets.
WindowedDataset denormalize(const WindowedDataset& ds);

// Contiguous chronological pieces of one raw series. Lengths are
// floor(length*train), floor(length*val), remainder.
struct SeriesSplits {
    Series train;
    Series val;
    Series test;
};
SeriesSplits split_series(const Series& s, const SplitSpec& spec);

// One value per row, '.' decimal separator, optional single header row
// (auto-detected by a non-numeric first row). Errors carry the 1-based
// line number. Non-finite values are rejected.
Series read_series_csv(const std::string& path);

// Writes values one per row under a "value" header with round-trip-exact
// formatting (17 significant digits).
void write_series_csv(const std::string& path, const Series& s);

} // namespace tildeq
