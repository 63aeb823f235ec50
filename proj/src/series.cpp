#include "tildeq/series.hpp"

#include "tildeq/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace tildeq {

void validate_series(const Series& s) {
    if (s.values.empty()) throw std::invalid_argument("series must contain at least one sample");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i]))
            throw std::invalid_argument("series sample " + std::to_string(i) + " is not finite");
    }
}

void validate_pair(const ForecastPair& p) {
    validate_series(p.truth);
    validate_series(p.pred);
    if (p.truth.length() != p.pred.length())
        throw std::invalid_argument("forecast pair lengths differ: truth " +
                                    std::to_string(p.truth.length()) + " vs pred " +
                                    std::to_string(p.pred.length()));
}

void validate_split(const SplitSpec& spec) {
    const double fr[3] = {spec.train_fraction, spec.val_fraction, spec.test_fraction};
    for (double f : fr) {
        if (!(f >= 0.0 && f <= 1.0))
            throw std::invalid_argument("split fractions must lie in [0,1]");
    }
    const double total = fr[0] + fr[1] + fr[2];
    if (std::fabs(total - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must sum to 1, got " + std::to_string(total));
}

WindowedDataset window(const Series& series, std::size_t n, std::size_t L, std::size_t stride) {
    if (n < 1 || L < 1 || stride < 1)
        throw std::invalid_argument("window requires n >= 1, L >= 1, stride >= 1");
    validate_series(series);
    const std::size_t len = series.length();
    if (len < n + L)
        throw std::invalid_argument("insufficient length: series of " + std::to_string(len) +
                                    " cannot host one window of n+L = " + std::to_string(n + L));
    WindowedDataset ds;
    ds.items.reserve((len - n - L) / stride + 1);
    for (std::size_t t = 0; t + n + L <= len; t += stride) {
        WindowedDataset::Item item;
        item.input.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(t),
                                 series.values.begin() + static_cast<std::ptrdiff_t>(t + n));
        item.target.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(t + n),
                                  series.values.begin() + static_cast<std::ptrdiff_t>(t + n + L));
        ds.items.push_back(std::move(item));
    }
    return ds;
}

NormStats compute_stats(const WindowedDataset& ds) {
    if (ds.items.empty()) throw std::invalid_argument("cannot compute statistics of an empty dataset");
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& item : ds.items) {
        total += kernels::sum(item.input.values.data(), item.input.length());
        total += kernels::sum(item.target.values.data(), item.target.length());
        count += item.input.length() + item.target.length();
    }
    const double mean = total / static_cast<double>(count);
    double sq = 0.0;
    for (const auto& item : ds.items) {
        for (double v : item.input.values) sq += (v - mean) * (v - mean);
        for (double v : item.target.values) sq += (v - mean) * (v - mean);
    }
    NormStats stats;
    stats.mean = mean;
    stats.stddev = std::sqrt(sq / static_cast<double>(count)); // population std
    return stats;
}

namespace {

WindowedDataset shift_scale(const WindowedDataset& ds, double shift, double scale) {
    WindowedDataset out = ds;
    for (auto& item : out.items) {
        for (double& v : item.input.values) v = (v - shift) / scale;
        for (double& v : item.target.values) v = (v - shift) / scale;
    }
    return out;
}

} // namespace

WindowedDataset apply_normalization(const WindowedDataset& ds, const NormStats& stats) {
    if (ds.normalized) return ds; // idempotent with stored stats
    const double floor = 1e-12 * std::max(1.0, std::fabs(stats.mean));
    if (!(stats.stddev > floor)) throw std::runtime_error("constant series: zero spread, cannot z-score");
    WindowedDataset out = shift_scale(ds, stats.mean, stats.stddev);
    out.mean = stats.mean;
    out.stddev = stats.stddev;
    out.normalized = true;
    return out;
}

WindowedDataset zscore_normalize(const WindowedDataset& ds) {
    if (ds.normalized) return ds;
    return apply_normalization(ds, compute_stats(ds));
}

WindowedDataset denormalize(const WindowedDataset& ds) {
    if (!ds.normalized) return ds;
    WindowedDataset out = ds;
    for (auto& item : out.items) {
        for (double& v : item.input.values) v = v * ds.stddev + ds.mean;
        for (double& v : item.target.values) v = v * ds.stddev + ds.mean;
    }
    out.mean = 0.0;
    out.stddev = 1.0;
    out.normalized = false;
    return out;
}

SeriesSplits split_series(const Series& s, const SplitSpec& spec) {
    validate_series(s);
    validate_split(spec);
    const auto len = static_cast<double>(s.length());
    const auto n_train = static_cast<std::size_t>(std::floor(len * spec.train_fraction));
    const auto n_val = static_cast<std::size_t>(std::floor(len * spec.val_fraction));
    SeriesSplits out;
    const auto begin = s.values.begin();
    out.train.values.assign(begin, begin + static_cast<std::ptrdiff_t>(n_train));
    out.val.values.assign(begin + static_cast<std::ptrdiff_t>(n_train),
                          begin + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.values.assign(begin + static_cast<std::ptrdiff_t>(n_train + n_val), s.values.end());
    return out;
}

namespace {

// Strict single-value parse: the whole trimmed token must be one finite number.
bool parse_value(const std::string& token, double& out) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || end != begin + token.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

std::string trim(const std::string& line) {
    std::size_t a = 0, b = line.size();
    while (a < b && (std::isspace(static_cast<unsigned char>(line[a])) != 0)) ++a;
    while (b > a && (std::isspace(static_cast<unsigned char>(line[b - 1])) != 0)) --b;
    return line.substr(a, b - a);
}

} // namespace

Series read_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    Series s;
    std::string line;
    std::size_t lineno = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string token = trim(line);
        if (token.empty()) continue;
        double v = 0.0;
        if (!parse_value(token, v)) {
            if (!saw_content) { saw_content = true; continue; } // header row
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed row '" + token + "'");
        }
        saw_content = true;
        s.values.push_back(v);
    }
    if (s.values.empty())
        throw std::runtime_error(path + ": no numeric rows found");
    return s;
}

void write_series_csv(const std::string& path, const Series& s) {
    validate_series(s);
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "value\n";
    char buf[64];
    for (double v : s.values) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf << '\n';
    }
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace tildeq
