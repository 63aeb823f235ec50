#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tildeq/series.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

using namespace tildeq;

namespace {

Series ramp(std::size_t len, double start = 0.0, double step = 1.0) {
    Series s;
    s.values.resize(len);
    for (std::size_t i = 0; i < len; ++i) s.values[i] = start + step * static_cast<double>(i);
    return s;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("series validation rejects empty and non-finite input") {
    CHECK_THROWS_AS(validate_series(Series{}), std::invalid_argument);
    Series bad({1.0, std::numeric_limits<double>::quiet_NaN()});
    CHECK_THROWS_AS(validate_series(bad), std::invalid_argument);
    bad.values[1] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(validate_series(bad), std::invalid_argument);
    CHECK_NOTHROW(validate_series(ramp(3)));
}

TEST_CASE("pair validation requires equal lengths") {
    ForecastPair p{ramp(4), ramp(4, 1.0)};
    CHECK_NOTHROW(validate_pair(p));
    p.pred = ramp(3);
    CHECK_THROWS_AS(validate_pair(p), std::invalid_argument);
}

TEST_CASE("window counts and contents") {
    // length 10, n 4, L 2, stride 4 -> floor((10-6)/4)+1 = 2 windows
    const Series s = ramp(10);
    const WindowedDataset ds = window(s, 4, 2, 4);
    REQUIRE(ds.size() == 2);
    CHECK(ds.input_length() == 4);
    CHECK(ds.target_length() == 2);
    CHECK(ds.items[0].input.values == std::vector<double>{0, 1, 2, 3});
    CHECK(ds.items[0].target.values == std::vector<double>{4, 5});
    CHECK(ds.items[1].input.values == std::vector<double>{4, 5, 6, 7});
    CHECK(ds.items[1].target.values == std::vector<double>{8, 9});
}

TEST_CASE("window count matches hourly two-year layout") {
    // 17544 hourly samples, n 168, L 24, stride 1 -> 17353 windows
    const WindowedDataset ds = window(ramp(17544), 168, 24, 1);
    CHECK(ds.size() == 17353);
}

TEST_CASE("window throws on insufficient length") {
    CHECK_THROWS_WITH_AS(window(ramp(5), 4, 2, 1), doctest::Contains("insufficient length"),
                         std::invalid_argument);
    CHECK_THROWS_AS(window(ramp(10), 0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(window(ramp(10), 4, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(window(ramp(10), 4, 2, 0), std::invalid_argument);
    // exactly one window when length == n + L
    CHECK(window(ramp(6), 4, 2, 1).size() == 1);
}

TEST_CASE("zscore normalization of {1,2,3} windows") {
    Series s({1.0, 2.0, 3.0});
    // n 2, L 1, stride 1 over length 3 -> exactly one window {1,2} -> {3}
    WindowedDataset ds = window(s, 2, 1, 1);
    REQUIRE(ds.size() == 1);
    const WindowedDataset norm = zscore_normalize(ds);
    CHECK(norm.normalized);
    CHECK(norm.mean == doctest::Approx(2.0).epsilon(1e-15));
    // population std of {1,2,3} = sqrt(2/3)
    CHECK(norm.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(norm.items[0].input[0] == doctest::Approx(-1.2247448713915890).epsilon(1e-12));
    CHECK(norm.items[0].input[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(norm.items[0].target[0] == doctest::Approx(1.2247448713915890).epsilon(1e-12));
}

TEST_CASE("normalization is idempotent and denormalize round-trips") {
    const WindowedDataset ds = window(ramp(40, -3.0, 0.7), 6, 3, 2);
    const WindowedDataset once = zscore_normalize(ds);
    const WindowedDataset twice = zscore_normalize(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t k = 0; k < once.size(); ++k)
        for (std::size_t t = 0; t < once.input_length(); ++t)
            CHECK(once.items[k].input[t] == twice.items[k].input[t]);

    const WindowedDataset back = denormalize(once);
    CHECK_FALSE(back.normalized);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        for (std::size_t t = 0; t < ds.input_length(); ++t)
            CHECK(back.items[k].input[t] == doctest::Approx(ds.items[k].input[t]).epsilon(1e-12));
        for (std::size_t t = 0; t < ds.target_length(); ++t)
            CHECK(back.items[k].target[t] == doctest::Approx(ds.items[k].target[t]).epsilon(1e-12));
    }
    // denormalize on a raw dataset is the identity
    const WindowedDataset same = denormalize(ds);
    CHECK(same.items[0].input[0] == ds.items[0].input[0]);
}

TEST_CASE("external stats flow train statistics into other splits") {
    const WindowedDataset train = window(ramp(30), 4, 2, 1);
    const WindowedDataset val = window(ramp(20, 100.0), 4, 2, 1);
    const NormStats stats = compute_stats(train);
    const WindowedDataset nval = apply_normalization(val, stats);
    CHECK(nval.normalized);
    CHECK(nval.mean == stats.mean);
    CHECK(nval.items[0].input[0] ==
          doctest::Approx((100.0 - stats.mean) / stats.stddev).epsilon(1e-12));
    // idempotent under the same stats
    const WindowedDataset again = apply_normalization(nval, stats);
    CHECK(again.items[0].input[0] == nval.items[0].input[0]);
}

TEST_CASE("constant series cannot be z-scored") {
    Series flat;
    flat.values.assign(12, 4.2);
    const WindowedDataset ds = window(flat, 4, 2, 1);
    CHECK_THROWS_WITH_AS(zscore_normalize(ds), doctest::Contains("constant series"),
                         std::runtime_error);
}

TEST_CASE("split boundaries are chronological and exhaustive") {
    const Series s = ramp(103);
    SplitSpec spec; // 0.6 / 0.2 / 0.2
    const SeriesSplits parts = split_series(s, spec);
    CHECK(parts.train.length() == 61); // floor(103*0.6)
    CHECK(parts.val.length() == 20);   // floor(103*0.2)
    CHECK(parts.test.length() == 22);  // remainder
    CHECK(parts.train[0] == 0.0);
    CHECK(parts.val[0] == 61.0);
    CHECK(parts.test[0] == 81.0);
    CHECK(parts.test[21] == 102.0);

    SplitSpec bad{0.5, 0.2, 0.2};
    CHECK_THROWS_AS(split_series(s, bad), std::invalid_argument);
}

TEST_CASE("csv write/read round-trips exactly") {
    const auto path = temp_file("tildeq_series_roundtrip.csv");
    Series s({1.0, -2.5, 0.1 + 0.2, 1e-300, 12345.678901234567});
    write_series_csv(path.string(), s);
    const Series back = read_series_csv(path.string());
    REQUIRE(back.length() == s.length());
    for (std::size_t i = 0; i < s.length(); ++i) CHECK(back[i] == s[i]);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader auto-detects a header row") {
    const auto path = temp_file("tildeq_series_header.csv");
    {
        std::ofstream out(path);
        out << "value\n1.5\n2.5\n";
    }
    const Series s = read_series_csv(path.string());
    REQUIRE(s.length() == 2);
    CHECK(s[0] == 1.5);
    CHECK(s[1] == 2.5);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader reports the offending line") {
    const auto path = temp_file("tildeq_series_bad.csv");
    {
        std::ofstream out(path);
        out << "value\n1.0\nnot-a-number\n3.0\n";
    }
    CHECK_THROWS_WITH_AS(read_series_csv(path.string()), doctest::Contains(":3:"),
                         std::runtime_error);
    {
        std::ofstream out(path);
        out << "1.0\ninf\n";
    }
    CHECK_THROWS_AS(read_series_csv(path.string()), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("csv reader rejects empty and missing files") {
    const auto path = temp_file("tildeq_series_empty.csv");
    { std::ofstream out(path); }
    CHECK_THROWS_WITH_AS(read_series_csv(path.string()), doctest::Contains("no numeric rows"),
                         std::runtime_error);
    {
        std::ofstream out(path);
        out << "value\n";
    }
    CHECK_THROWS_AS(read_series_csv(path.string()), std::runtime_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_series_csv((path.string() + ".does-not-exist")), std::runtime_error);
}
