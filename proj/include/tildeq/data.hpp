#pragma once

// Dataset construction: the two-peak synthetic generator, a sinusoid family
// for invariance-behavior studies, CSV ingestion presets, and dataset-level
// CSV export/reload.

#include "tildeq/rng.hpp"
#include "tildeq/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace tildeq {

// Two triangular peaks on a zero baseline in the input; the target is a step
// whose onset and height follow the second peak.
struct SyntheticSpec {
    std::size_t count_train = 500;
    std::size_t count_val = 500;
    std::size_t count_test = 500;
    std::size_t input_len = 20;
    std::size_t horizon = 40;
    double amp_min = 0.5; // peak amplitude range
    double amp_max = 2.0;
    // first-peak position range; the second peak lands in
    // [max(p2_min, p1 + 7), p2_max] so the triangular supports stay disjoint
    std::size_t p1_min = 3;
    std::size_t p1_max = 8;
    std::size_t p2_min = 11;
    std::size_t p2_max = 16;
    std::uint64_t seed = 0;
};
void validate(const SyntheticSpec& spec);

// Items ordered train, then val, then test (count_train + count_val +
// count_test total). Deterministic under the seed.
WindowedDataset generate_synthetic(const SyntheticSpec& spec);
// Same, drawing from an externally managed generator.
WindowedDataset generate_synthetic(const SyntheticSpec& spec, Rng& rng);

// Zero-mean sinusoids continued from input into target: amplitude in
// [amp_min, amp_max], period in [period_min, period_max], random phase.
struct SinusoidSpec {
    std::size_t count_train = 500;
    std::size_t count_val = 500;
    std::size_t count_test = 500;
    std::size_t input_len = 20;
    std::size_t horizon = 40;
    double amp_min = 0.3;
    double amp_max = 1.0;
    double period_min = 10.0;
    double period_max = 20.0;
    std::uint64_t seed = 0;
};
WindowedDataset generate_sinusoids(const SinusoidSpec& spec);
WindowedDataset generate_sinusoids(const SinusoidSpec& spec, Rng& rng);

// Dataset ingestion preset. Segmented presets treat the file as consecutive
// fixed-length records of n+L samples (one item each, split by item count);
// continuous presets split the raw series chronologically and window each
// piece with stride 1.
struct DatasetPreset {
    std::string name = "custom";
    std::size_t n = 0;
    std::size_t L = 0;
    SplitSpec split;
    bool segmented = false;
};

// Known names: ecg5000 (84/56, segmented, 10/10/80), traffic (168/24,
// continuous, 60/20/20). Throws on anything else.
DatasetPreset preset(const std::string& name);

struct SplitDataset {
    WindowedDataset train;
    WindowedDataset val;
    WindowedDataset test;
    std::size_t total_items() const { return train.size() + val.size() + test.size(); }
};

// First n_train items to train, next n_val to val, rest to test.
SplitDataset split_by_counts(const WindowedDataset& all, std::size_t n_train, std::size_t n_val);

// Z-scores all three splits with statistics computed on the train split.
SplitDataset normalize_splits(const SplitDataset& splits);

// One-column CSV per series-core rules, segmented or windowed per the preset.
SplitDataset load_csv_dataset(const std::string& path, const DatasetPreset& preset);

// Flat export: items concatenated, n+L samples each, one value per row.
// Reload with matching (n, L) reproduces the values exactly.
void write_dataset_csv(const std::string& path, const WindowedDataset& ds);
WindowedDataset read_dataset_csv(const std::string& path, std::size_t n, std::size_t L);

} // namespace tildeq
