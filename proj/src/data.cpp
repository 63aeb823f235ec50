#include "tildeq/data.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tildeq {

void validate(const SyntheticSpec& spec) {
    if (spec.input_len < 1 || spec.horizon < 1)
        throw std::invalid_argument("synthetic lengths must be >= 1");
    if (!(spec.amp_min > 0.0) || !(spec.amp_max >= spec.amp_min))
        throw std::invalid_argument("peak amplitudes must be positive with amp_min <= amp_max");
    if (spec.p1_min < 3 || spec.p1_max < spec.p1_min)
        throw std::invalid_argument("first-peak range must start at index >= 3");
    if (spec.p2_max < spec.p2_min || spec.p2_max < spec.p1_max + 7)
        throw std::invalid_argument("second-peak range must clear the first peak by 7 samples");
    if (spec.p2_max + 3 >= spec.input_len)
        throw std::invalid_argument("second peak must fit inside the input window");
    if (spec.p2_max + 4 >= spec.horizon)
        throw std::invalid_argument("step onset p2+4 must fall inside the horizon");
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) { // inclusive bounds
    return lo + rng.index(hi - lo + 1);
}

WindowedDataset::Item synth_item(const SyntheticSpec& spec, Rng& rng) {
    const double a1 = rng.uniform(spec.amp_min, spec.amp_max);
    const double a2 = rng.uniform(spec.amp_min, spec.amp_max);
    const std::size_t p1 = uniform_index(rng, spec.p1_min, spec.p1_max);
    const std::size_t p2 = uniform_index(rng, std::max(spec.p2_min, p1 + 7), spec.p2_max);

    WindowedDataset::Item item;
    item.input.values.assign(spec.input_len, 0.0);
    const auto peak = [&](std::size_t pos, double amp) {
        // triangular bump, 3-sample half-width, zero at |t - pos| >= 3
        for (std::size_t t = pos - 2; t <= pos + 2; ++t) {
            const double dist = std::fabs(static_cast<double>(t) - static_cast<double>(pos));
            item.input.values[t] = amp * (1.0 - dist / 3.0);
        }
    };
    peak(p1, a1);
    peak(p2, a2);

    // step target: onset and height follow the second peak
    const std::size_t onset = p2 + 4;
    item.target.values.assign(spec.horizon, 0.0);
    for (std::size_t t = onset; t < spec.horizon; ++t) item.target.values[t] = a2;
    return item;
}

} // namespace

WindowedDataset generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
    validate(spec);
    WindowedDataset ds;
    const std::size_t total = spec.count_train + spec.count_val + spec.count_test;
    ds.items.reserve(total);
    for (std::size_t i = 0; i < total; ++i) ds.items.push_back(synth_item(spec, rng));
    return ds;
}

WindowedDataset generate_synthetic(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    return generate_synthetic(spec, rng);
}

WindowedDataset generate_sinusoids(const SinusoidSpec& spec, Rng& rng) {
    if (spec.input_len < 1 || spec.horizon < 1)
        throw std::invalid_argument("sinusoid lengths must be >= 1");
    if (!(spec.amp_min > 0.0) || !(spec.amp_max >= spec.amp_min))
        throw std::invalid_argument("sinusoid amplitudes must be positive with amp_min <= amp_max");
    if (!(spec.period_min > 1.0) || !(spec.period_max >= spec.period_min))
        throw std::invalid_argument("sinusoid periods must exceed one sample");
    WindowedDataset ds;
    const std::size_t total = spec.count_train + spec.count_val + spec.count_test;
    ds.items.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double amp = rng.uniform(spec.amp_min, spec.amp_max);
        const double period = rng.uniform(spec.period_min, spec.period_max);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        WindowedDataset::Item item;
        item.input.values.resize(spec.input_len);
        item.target.values.resize(spec.horizon);
        const auto sample = [&](std::size_t t) {
            return amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
        };
        for (std::size_t t = 0; t < spec.input_len; ++t) item.input.values[t] = sample(t);
        for (std::size_t t = 0; t < spec.horizon; ++t)
            item.target.values[t] = sample(spec.input_len + t);
        ds.items.push_back(std::move(item));
    }
    return ds;
}

WindowedDataset generate_sinusoids(const SinusoidSpec& spec) {
    Rng rng(spec.seed);
    return generate_sinusoids(spec, rng);
}

DatasetPreset preset(const std::string& name) {
    DatasetPreset p;
    p.name = name;
    if (name == "ecg5000") {
        p.n = 84;
        p.L = 56;
        p.split = {0.1, 0.1, 0.8};
        p.segmented = true;
    } else if (name == "traffic") {
        p.n = 168;
        p.L = 24;
        p.split = {0.6, 0.2, 0.2};
        p.segmented = false;
    } else {
        throw std::invalid_argument("unknown dataset preset '" + name +
                                    "' (expected ecg5000 or traffic)");
    }
    return p;
}

SplitDataset split_by_counts(const WindowedDataset& all, std::size_t n_train, std::size_t n_val) {
    if (n_train + n_val > all.size())
        throw std::invalid_argument("split counts exceed the dataset size");
    SplitDataset out;
    out.train.items.assign(all.items.begin(), all.items.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val.items.assign(all.items.begin() + static_cast<std::ptrdiff_t>(n_train),
                         all.items.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.items.assign(all.items.begin() + static_cast<std::ptrdiff_t>(n_train + n_val),
                          all.items.end());
    out.train.normalized = out.val.normalized = out.test.normalized = all.normalized;
    out.train.mean = out.val.mean = out.test.mean = all.mean;
    out.train.stddev = out.val.stddev = out.test.stddev = all.stddev;
    return out;
}

SplitDataset normalize_splits(const SplitDataset& splits) {
    const NormStats stats = compute_stats(splits.train);
    SplitDataset out;
    out.train = apply_normalization(splits.train, stats);
    out.val = apply_normalization(splits.val, stats);
    out.test = apply_normalization(splits.test, stats);
    return out;
}

SplitDataset load_csv_dataset(const std::string& path, const DatasetPreset& p) {
    if (p.n < 1 || p.L < 1)
        throw std::invalid_argument("dataset preset needs n >= 1 and L >= 1");
    validate_split(p.split);
    const Series raw = read_series_csv(path);
    if (p.segmented) {
        const std::size_t record = p.n + p.L;
        if (raw.length() < record)
            throw std::invalid_argument("insufficient length: " + path + " holds " +
                                        std::to_string(raw.length()) +
                                        " samples, one record needs " + std::to_string(record));
        if (raw.length() % record != 0)
            throw std::invalid_argument(path + ": sample count " + std::to_string(raw.length()) +
                                        " is not a multiple of the record length " +
                                        std::to_string(record));
        WindowedDataset all;
        const std::size_t count = raw.length() / record;
        all.items.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            WindowedDataset::Item item;
            const auto base = raw.values.begin() + static_cast<std::ptrdiff_t>(i * record);
            item.input.values.assign(base, base + static_cast<std::ptrdiff_t>(p.n));
            item.target.values.assign(base + static_cast<std::ptrdiff_t>(p.n),
                                      base + static_cast<std::ptrdiff_t>(record));
            all.items.push_back(std::move(item));
        }
        const auto n_train =
            static_cast<std::size_t>(std::floor(static_cast<double>(count) * p.split.train_fraction));
        const auto n_val =
            static_cast<std::size_t>(std::floor(static_cast<double>(count) * p.split.val_fraction));
        return split_by_counts(all, n_train, n_val);
    }
    const SeriesSplits pieces = split_series(raw, p.split);
    SplitDataset out;
    out.train = window(pieces.train, p.n, p.L, 1);
    out.val = window(pieces.val, p.n, p.L, 1);
    out.test = window(pieces.test, p.n, p.L, 1);
    return out;
}

void write_dataset_csv(const std::string& path, const WindowedDataset& ds) {
    if (ds.items.empty()) throw std::invalid_argument("cannot export an empty dataset");
    Series flat;
    flat.values.reserve(ds.size() * (ds.input_length() + ds.target_length()));
    for (const auto& item : ds.items) {
        flat.values.insert(flat.values.end(), item.input.values.begin(), item.input.values.end());
        flat.values.insert(flat.values.end(), item.target.values.begin(), item.target.values.end());
    }
    write_series_csv(path, flat);
}

WindowedDataset read_dataset_csv(const std::string& path, std::size_t n, std::size_t L) {
    if (n < 1 || L < 1) throw std::invalid_argument("dataset reload needs n >= 1 and L >= 1");
    const Series flat = read_series_csv(path);
    const std::size_t record = n + L;
    if (flat.length() % record != 0)
        throw std::invalid_argument(path + ": sample count " + std::to_string(flat.length()) +
                                    " is not a multiple of the record length " +
                                    std::to_string(record));
    WindowedDataset ds;
    const std::size_t count = flat.length() / record;
    ds.items.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        WindowedDataset::Item item;
        const auto base = flat.values.begin() + static_cast<std::ptrdiff_t>(i * record);
        item.input.values.assign(base, base + static_cast<std::ptrdiff_t>(n));
        item.target.values.assign(base + static_cast<std::ptrdiff_t>(n),
                                  base + static_cast<std::ptrdiff_t>(record));
        ds.items.push_back(std::move(item));
    }
    return ds;
}

} // namespace tildeq
