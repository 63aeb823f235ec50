#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tildeq/losses.hpp"
#include "tildeq/metrics.hpp"
#include "tildeq/rng.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace tildeq;

namespace {

constexpr double kPi = std::numbers::pi;

Series random_series(std::size_t len, Rng& rng, double lo = -2.0, double hi = 2.0) {
    Series s;
    s.values.resize(len);
    for (double& v : s.values) v = rng.uniform(lo, hi);
    return s;
}

Series sine(std::size_t len, double period, double amplitude = 1.0, double phase = 0.0) {
    Series s;
    s.values.resize(len);
    for (std::size_t t = 0; t < len; ++t)
        s.values[t] = amplitude * std::sin(2.0 * kPi * static_cast<double>(t) / period + phase);
    return s;
}

// central finite differences of loss value with respect to the prediction
Series fd_gradient(const LossFn& loss, const ForecastPair& pair, double h = 1e-5) {
    Series g;
    g.values.resize(pair.pred.length());
    ForecastPair probe = pair;
    for (std::size_t t = 0; t < pair.pred.length(); ++t) {
        const double keep = probe.pred[t];
        probe.pred[t] = keep + h;
        const double up = loss(probe).value;
        probe.pred[t] = keep - h;
        const double down = loss(probe).value;
        probe.pred[t] = keep;
        g.values[t] = (up - down) / (2.0 * h);
    }
    return g;
}

double vector_rel_err(const Series& a, const Series& b) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t t = 0; t < a.length(); ++t) {
        diff += (a[t] - b[t]) * (a[t] - b[t]);
        ref += b[t] * b[t];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-8);
}

// checks analytic gradients against finite differences on random pairs
void check_gradients(const std::string& name, const LossFn& loss, unsigned seed,
                     int points = 100) {
    Rng rng(seed);
    double worst = 0.0;
    for (int p = 0; p < points; ++p) {
        const std::size_t n = (p % 2 == 0) ? 8 : 24;
        const ForecastPair pair{random_series(n, rng), random_series(n, rng)};
        const LossValueGrad out = loss(pair);
        REQUIRE(out.grad.length() == n);
        worst = std::max(worst, vector_rel_err(out.grad, fd_gradient(loss, pair)));
    }
    INFO("loss ", name, " worst rel err ", worst);
    CHECK(worst < 1e-4);
}

// soft-min over the explicit list of all alignment-path costs
double softmin_over_paths(const std::vector<double>& costs, double gamma) {
    double lowest = costs[0];
    for (double c : costs) lowest = std::min(lowest, c);
    double acc = 0.0;
    for (double c : costs) acc += std::exp(-(c - lowest) / gamma);
    return lowest - gamma * std::log(acc);
}

// every monotone path cost under a caller-supplied local cost
std::vector<double> all_path_costs(std::size_t n,
                                   const std::function<double(std::size_t, std::size_t)>& cell) {
    std::vector<double> costs;
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                     double acc) {
        acc += cell(i, j);
        if (i == n - 1 && j == n - 1) {
            costs.push_back(acc);
            return;
        }
        if (i + 1 < n && j + 1 < n) walk(i + 1, j + 1, acc);
        if (i + 1 < n) walk(i + 1, j, acc);
        if (j + 1 < n) walk(i, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return costs;
}

// central Delannoy number: monotone path count on an n x n grid
double path_count(std::size_t n) {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d[i][j] = (i == 0 || j == 0)
                          ? 1.0
                          : d[i - 1][j] + d[i][j - 1] + d[i - 1][j - 1];
    return d[n - 1][n - 1];
}

} // namespace

TEST_CASE("mse value and gradient match the closed form") {
    const ForecastPair pair{Series({0.0, 0.0}), Series({1.0, 1.0})};
    const LossValueGrad out = mse(pair);
    CHECK(out.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.grad[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out.grad[1] == doctest::Approx(1.0).epsilon(1e-15));

    Rng rng(10);
    const Series y = random_series(6, rng);
    const LossValueGrad zero = mse({y, y});
    CHECK(zero.value == 0.0);
    for (double g : zero.grad.values) CHECK(g == 0.0);
}

TEST_CASE("signed gap is prediction minus truth") {
    const SignedGap g = signed_gap({Series({1.0, 2.0}), Series({4.0, 1.0})});
    CHECK(g.d.values == std::vector<double>{3.0, -1.0});
}

TEST_CASE("shift loss closed form at d = {0, ln 3}") {
    const ForecastPair pair{Series({0.0, 0.0}), Series({0.0, std::log(3.0)})};
    CHECK(ashift_loss(pair).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shift loss vanishes exactly for any constant gap") {
    // dyadic values keep y + k exact, so the gap vector is bitwise constant
    Rng rng(21);
    for (double k : {-5.0, -0.25, 0.0, 0.75, 123.0}) {
        Series y;
        y.values.resize(16);
        for (double& v : y.values) v = std::round(rng.uniform(-2.0, 2.0) * 1024.0) / 1024.0;
        Series pred = y;
        for (double& v : pred.values) v += k;
        const LossValueGrad out = ashift_loss({y, pred});
        CHECK(out.value == 0.0);
    }
}

TEST_CASE("frequency loss is zero on band-limited identity and shifted sinusoids") {
    TildeQConfig cfg;
    const Series y = sine(24, 12.0); // band-limited to bins {2, 22}
    CHECK(phase_loss({y, y}, cfg).value < 1e-9);

    // one-period shift invariance in magnitude mode
    const Series shifted = sine(24, 12.0, 1.0, 1.1);
    CHECK(phase_loss({y, shifted}, cfg).value < 1e-9);

    // complex-difference mode is NOT shift invariant
    TildeQConfig complex_cfg = cfg;
    complex_cfg.phase_magnitude_mode = false;
    CHECK(phase_loss({y, shifted}, complex_cfg).value > 0.1);
}

TEST_CASE("a spike in one non-dominant bin raises the p=1 frequency loss by its magnitude") {
    TildeQConfig cfg; // norm_p = 1, dominant_count auto = 1 for T' = 24
    const std::size_t n = 24;
    const Series y = sine(n, 12.0, 2.0); // dominant pair {2, 22}
    const double before = phase_loss({y, y}, cfg).value;

    const double m = 0.37; // spike magnitude in the self-conjugate bin n/2
    Series pred = y;
    for (std::size_t t = 0; t < n; ++t)
        pred.values[t] += (m / static_cast<double>(n)) * std::cos(kPi * static_cast<double>(t));
    const double after = phase_loss({y, pred}, cfg).value;
    CHECK(after - before == doctest::Approx(m).epsilon(1e-9));
}

TEST_CASE("correlation loss ignores positive rescaling but not sign flips") {
    TildeQConfig cfg;
    Rng rng(5);
    const Series y = random_series(20, rng);
    for (double c : {0.1, 1.0, 7.5}) {
        Series pred = y;
        for (double& v : pred.values) v *= c;
        CHECK(amp_loss({y, pred}, cfg).value < 1e-9);
    }
    Series flipped = y;
    for (double& v : flipped.values) v *= -1.0;
    CHECK(amp_loss({y, flipped}, cfg).value > 0.1);
}

TEST_CASE("correlation loss tolerates whole-period circular shifts") {
    TildeQConfig cfg;
    const std::size_t n = 24;
    const Series y = sine(n, 6.0); // period T'/4
    Series rolled;
    rolled.values.resize(n);
    for (std::size_t t = 0; t < n; ++t) rolled.values[t] = y.values[(t + 6) % n];
    CHECK(amp_loss({y, rolled}, cfg).value < 1e-9);
}

TEST_CASE("correlation loss rejects zero-energy input") {
    TildeQConfig cfg;
    Series zero;
    zero.values.assign(8, 0.0);
    Rng rng(3);
    const Series y = random_series(8, rng);
    CHECK_THROWS_WITH_AS(amp_loss({zero, y}, cfg), doctest::Contains("zero norm"),
                         std::runtime_error);
    CHECK_THROWS_AS(amp_loss({y, zero}, cfg), std::runtime_error);
}

TEST_CASE("blended loss reduces to the shift term under degenerate weights") {
    TildeQConfig cfg;
    cfg.alpha = 1.0;
    cfg.gamma = 0.0;
    Rng rng(17);
    // zero-energy predictions would trip the correlation term; degenerate
    // weights must skip it entirely rather than evaluate-and-scale
    Series zero;
    zero.values.assign(12, 0.0);
    const Series y = random_series(12, rng);
    const LossValueGrad blended = tilde_q({y, zero}, cfg);
    const LossValueGrad direct = ashift_loss({y, zero});
    CHECK(blended.value == direct.value);
    for (std::size_t t = 0; t < 12; ++t) CHECK(blended.grad[t] == direct.grad[t]);
}

TEST_CASE("blended loss equals the weighted component sum at default weights") {
    TildeQConfig cfg; // alpha 0.99, gamma 0.5
    Rng rng(23);
    const ForecastPair pair{random_series(24, rng), random_series(24, rng)};
    const LossValueGrad whole = tilde_q(pair, cfg);
    const double expected = 0.99 * ashift_loss(pair).value +
                            0.01 * phase_loss(pair, cfg).value +
                            0.5 * amp_loss(pair, cfg).value;
    CHECK(whole.value == doctest::Approx(expected).epsilon(1e-12));
    CHECK(whole.value >= 0.0);
}

TEST_CASE("soft alignment of a single sample is the squared difference") {
    DilateConfig cfg;
    for (double g : {1.0, 0.01}) {
        cfg.smoothing = g;
        const LossValueGrad out = soft_dtw({Series({2.0}), Series({3.5})}, cfg);
        CHECK(out.value == doctest::Approx(2.25).epsilon(1e-12));
        CHECK(out.grad[0] == doctest::Approx(2.0 * 1.5).epsilon(1e-9));
    }
}

TEST_CASE("soft alignment lower-bounds hard alignment") {
    DilateConfig cfg;
    Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.index(7);
        const ForecastPair pair{random_series(n, rng), random_series(n, rng)};
        const double hard = dtw(pair).value;
        for (double g : {1.0, 0.1, 0.01}) {
            cfg.smoothing = g;
            CHECK(soft_dtw(pair, cfg).value <= hard + 1e-12);
        }
    }
}

TEST_CASE("soft alignment approaches hard alignment within the path-count bound") {
    DilateConfig cfg;
    Rng rng(37);
    for (std::size_t n : {2u, 4u, 8u}) {
        const ForecastPair pair{random_series(n, rng), random_series(n, rng)};
        const double hard = dtw(pair).value;
        const double bound_scale = std::log(path_count(n));
        for (double g : {1.0, 0.1, 0.01}) {
            cfg.smoothing = g;
            const double soft = soft_dtw(pair, cfg).value;
            CHECK(std::abs(soft - hard) <= g * bound_scale + 1e-12);
        }
    }
}

TEST_CASE("soft alignment equals the explicit soft-min over every path") {
    DilateConfig cfg;
    cfg.smoothing = 0.3;
    Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        const ForecastPair pair{random_series(n, rng), random_series(n, rng)};
        const auto costs = all_path_costs(n, [&](std::size_t i, std::size_t j) {
            const double d = pair.truth[i] - pair.pred[j];
            return d * d;
        });
        CHECK(soft_dtw(pair, cfg).value ==
              doctest::Approx(softmin_over_paths(costs, cfg.smoothing)).epsilon(1e-10));
    }
}

TEST_CASE("blended alignment matches enumeration and its degenerate blends") {
    DilateConfig cfg;
    cfg.alpha = 0.5;
    cfg.smoothing = 0.2;
    Rng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        const ForecastPair pair{random_series(n, rng), random_series(n, rng)};
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        const auto costs = all_path_costs(n, [&](std::size_t i, std::size_t j) {
            const double d = pair.truth[i] - pair.pred[j];
            const double off = static_cast<double>(i) - static_cast<double>(j);
            return cfg.alpha * d * d + (1.0 - cfg.alpha) * off * off / n2;
        });
        CHECK(dilate(pair, cfg).value ==
              doctest::Approx(softmin_over_paths(costs, cfg.smoothing)).epsilon(1e-10));
    }

    // alpha = 1 collapses to the unblended loss
    cfg.alpha = 1.0;
    const ForecastPair pair{random_series(6, rng), random_series(6, rng)};
    CHECK(dilate(pair, cfg).value == doctest::Approx(soft_dtw(pair, cfg).value).epsilon(1e-12));

    // alpha = 0 leaves no prediction dependence at all
    cfg.alpha = 0.0;
    const LossValueGrad flat = dilate(pair, cfg);
    for (double g : flat.grad.values) CHECK(g == 0.0);
}

TEST_CASE("every loss gradient matches central finite differences") {
    TildeQConfig tq;
    DilateConfig dl;
    check_gradients("mse", make_loss("mse", tq, dl), 1001);
    check_gradients("ashift_only", make_loss("ashift_only", tq, dl), 1002);
    check_gradients("phase_only", make_loss("phase_only", tq, dl), 1003);
    check_gradients("amp_only", make_loss("amp_only", tq, dl), 1004);
    check_gradients("tilde_q", make_loss("tilde_q", tq, dl), 1005);
    check_gradients("soft_dtw", make_loss("soft_dtw", tq, dl), 1006);
    check_gradients("dilate", make_loss("dilate", tq, dl), 1007);

    // p = 2 and mean-centered variants keep their gradients honest too
    TildeQConfig p2 = tq;
    p2.norm_p = 2;
    p2.ncc_mean_center = true;
    check_gradients("tilde_q_p2", make_loss("tilde_q", p2, dl), 1008, 40);
    TildeQConfig cplx = tq;
    cplx.phase_magnitude_mode = false;
    check_gradients("phase_complex", make_loss("phase_only", cplx, dl), 1009, 40);
}

TEST_CASE("configuration validation rejects out-of-range values") {
    TildeQConfig tq;
    tq.alpha = -0.1;
    CHECK_THROWS_AS(validate(tq), std::invalid_argument);
    tq.alpha = 0.5;
    tq.gamma = -1.0;
    CHECK_THROWS_AS(validate(tq), std::invalid_argument);
    tq.gamma = 0.5;
    tq.norm_p = 3;
    CHECK_THROWS_AS(validate(tq), std::invalid_argument);
    tq.norm_p = 2;
    CHECK_NOTHROW(validate(tq));

    DilateConfig dl;
    dl.smoothing = 0.0;
    CHECK_THROWS_AS(validate(dl), std::invalid_argument);
    dl.smoothing = 0.01;
    dl.alpha = 1.5;
    CHECK_THROWS_AS(validate(dl), std::invalid_argument);
    dl.alpha = 0.5;
    CHECK_NOTHROW(validate(dl));
}

TEST_CASE("dominant-count resolution follows the horizon rule") {
    TildeQConfig cfg; // dominant_count = 0 means auto
    CHECK(resolve_dominant_count(cfg, 8) == 1);
    CHECK(resolve_dominant_count(cfg, 24) == 1);
    CHECK(resolve_dominant_count(cfg, 25) == 2);
    CHECK(resolve_dominant_count(cfg, 96) == 4);
    cfg.dominant_count = 5;
    CHECK(resolve_dominant_count(cfg, 96) == 5);
}

TEST_CASE("the loss factory rejects unknown names") {
    TildeQConfig tq;
    DilateConfig dl;
    CHECK_THROWS_AS(make_loss("warp_factor", tq, dl), std::invalid_argument);
    for (const char* name :
         {"mse", "tilde_q", "dilate", "soft_dtw", "ashift_only", "phase_only", "amp_only"})
        CHECK_NOTHROW(make_loss(name, tq, dl));
}
