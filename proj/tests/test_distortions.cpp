#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tildeq/distortions.hpp"
#include "tildeq/losses.hpp"
#include "tildeq/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

using namespace tildeq;

namespace {

constexpr double kPi = std::numbers::pi;

Series sine(std::size_t len, double period, double amplitude = 1.0, double phase = 0.0) {
    Series s;
    s.values.resize(len);
    for (std::size_t t = 0; t < len; ++t)
        s.values[t] = amplitude * std::sin(2.0 * kPi * static_cast<double>(t) / period + phase);
    return s;
}

Series random_series(std::size_t len, Rng& rng) {
    Series s;
    s.values.resize(len);
    for (double& v : s.values) v = rng.uniform(-1.5, 1.5);
    return s;
}

} // namespace

TEST_CASE("kind names round-trip through strings") {
    for (DistortionKind kind :
         {DistortionKind::AmplitudeShift, DistortionKind::PhaseShift,
          DistortionKind::UniformAmplification, DistortionKind::UniformTimeScale,
          DistortionKind::DynamicAmplification, DistortionKind::DynamicTimeScale})
        CHECK(distortion_kind_from_string(to_string(kind)) == kind);
    CHECK(std::string(to_string(DistortionKind::AmplitudeShift)) == "amplitude_shift");
    CHECK_THROWS_AS(distortion_kind_from_string("wobble"), std::invalid_argument);
}

TEST_CASE("identity parameters reproduce the input") {
    Rng rng(42);
    const Series s = random_series(16, rng);

    DistortionSpec spec;
    spec.kind = DistortionKind::AmplitudeShift;
    spec.k = 0.0;
    CHECK(apply(s, spec).values == s.values);

    spec.kind = DistortionKind::PhaseShift;
    CHECK(apply(s, spec).values == s.values);

    spec.kind = DistortionKind::UniformAmplification;
    spec.k = 1.0;
    CHECK(apply(s, spec).values == s.values);

    spec.kind = DistortionKind::UniformTimeScale;
    CHECK(apply(s, spec).values == s.values);

    spec.kind = DistortionKind::DynamicAmplification;
    spec.h = [](double) { return 1.0; };
    CHECK(apply(s, spec).values == s.values);

    spec.kind = DistortionKind::DynamicTimeScale;
    spec.h = [](double t) { return t; };
    CHECK(apply(s, spec).values == s.values);
}

TEST_CASE("amplitude shifts compose additively") {
    Rng rng(1);
    const Series s = random_series(12, rng);
    DistortionSpec a;
    a.kind = DistortionKind::AmplitudeShift;
    a.k = 0.7;
    DistortionSpec b = a;
    b.k = -1.3;
    DistortionSpec both = a;
    both.k = 0.7 - 1.3;
    const Series chained = apply(apply(s, a), b);
    const Series direct = apply(s, both);
    // floating-point addition is not associative, so allow ulp-level slack
    for (std::size_t t = 0; t < s.length(); ++t)
        CHECK(chained[t] == doctest::Approx(direct[t]).epsilon(1e-12));
}

TEST_CASE("phase shift by a quarter period turns sine into cosine") {
    // mother series long enough that t + period/4 stays in range
    const double period = 20.0;
    const Series mother = sine(80, period);
    DistortionSpec spec;
    spec.kind = DistortionKind::PhaseShift;
    spec.k = period / 4.0; // 5 samples
    spec.length = 40;
    const Series shifted = apply(mother, spec);
    REQUIRE(shifted.length() == 40);
    for (std::size_t t = 0; t < 40; ++t) {
        const double expected = std::cos(2.0 * kPi * static_cast<double>(t) / period);
        CHECK(shifted[t] == doctest::Approx(expected).epsilon(0).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("uniform time scale uses the ceiling index convention") {
    const Series s({10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0});
    DistortionSpec spec;
    spec.kind = DistortionKind::UniformTimeScale;
    spec.k = 1.5;
    spec.length = 5;
    const Series out = apply(s, spec);
    // indices ceil(1.5 * i) = 0, 2, 3, 5, 6
    CHECK(out.values == std::vector<double>{10.0, 12.0, 13.0, 15.0, 16.0});
}

TEST_CASE("dynamic kinds evaluate h at the sample index") {
    const Series s({1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    DistortionSpec amp;
    amp.kind = DistortionKind::DynamicAmplification;
    amp.h = [](double t) { return 2.0 + t; };
    const Series scaled = apply(s, amp);
    for (std::size_t t = 0; t < s.length(); ++t)
        CHECK(scaled[t] == doctest::Approx((2.0 + static_cast<double>(t)) * s[t]));

    DistortionSpec warp;
    warp.kind = DistortionKind::DynamicTimeScale;
    warp.h = [](double t) { return 0.5 + 1.7 * t; }; // ceil: 1, 3, 4, 6 -> needs len 4 support
    warp.length = 3;
    const Series warped = apply(s, warp);
    CHECK(warped.values == std::vector<double>{2.0, 4.0, 5.0});
}

TEST_CASE("out-of-support indices raise range errors") {
    const Series s({1.0, 2.0, 3.0, 4.0});
    DistortionSpec spec;
    spec.kind = DistortionKind::PhaseShift;
    spec.k = 2.0;
    CHECK_THROWS_WITH_AS(apply(s, spec), doctest::Contains("insufficient support"),
                         std::out_of_range);
    spec.k = -1.0;
    CHECK_THROWS_AS(apply(s, spec), std::out_of_range);

    spec.kind = DistortionKind::UniformTimeScale;
    spec.k = 2.0;
    CHECK_THROWS_AS(apply(s, spec), std::out_of_range); // ceil(2*3) = 6 out of 4

    spec.kind = DistortionKind::AmplitudeShift;
    spec.k = 0.0;
    spec.length = 9;
    CHECK_THROWS_AS(apply(s, spec), std::out_of_range);
}

TEST_CASE("parameter violations raise invalid_argument") {
    const Series s({1.0, 2.0, 3.0, 4.0});
    DistortionSpec spec;
    spec.kind = DistortionKind::UniformAmplification;
    spec.k = 0.0;
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);

    spec.kind = DistortionKind::UniformTimeScale;
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);

    spec.kind = DistortionKind::DynamicAmplification;
    spec.h = nullptr;
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);
    spec.h = [](double t) { return t - 1.0; }; // zero at t = 1
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);

    spec.kind = DistortionKind::DynamicTimeScale;
    spec.h = [](double) { return 1.0; }; // not strictly increasing
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);
    spec.h = [](double t) { return t - 5.0; }; // negative start
    CHECK_THROWS_AS(apply(s, spec), std::invalid_argument);

    CHECK_THROWS_AS(apply(Series{}, DistortionSpec{}), std::invalid_argument);
}

TEST_CASE("amplitude-shift invariance separates the softmax loss from squared error") {
    Rng rng(2024);
    std::vector<Series> corpus;
    for (int i = 0; i < 25; ++i) corpus.push_back(random_series(24, rng));

    DistortionSpec shift;
    shift.kind = DistortionKind::AmplitudeShift;
    shift.k = 0.5;

    TildeQConfig cfg;
    const LossFn softmax_loss = make_loss("ashift_only", cfg, DilateConfig{});
    const LossFn squared = make_loss("mse", cfg, DilateConfig{});

    CHECK(invariance_holds(softmax_loss, shift, corpus, 1e-6));
    CHECK_FALSE(invariance_holds(squared, shift, corpus, 1e-6));
    // squared error moves by exactly k^2 under a constant gap, far above delta
    CHECK_FALSE(invariance_holds(squared, shift, corpus, 0.2));

    // the softmax term shrugs off any shift size
    for (double k : {-3.0, 0.01, 12.5}) {
        shift.k = k;
        CHECK(invariance_holds(softmax_loss, shift, corpus, 1e-6));
    }
}

TEST_CASE("phase invariance holds for the magnitude-mode frequency term on sinusoids") {
    // periodic corpus: full periods so a shift only rotates each series
    std::vector<Series> corpus;
    for (double period : {8.0, 12.0, 24.0}) corpus.push_back(sine(48, period, 1.0, 0.3));

    DistortionSpec shift;
    shift.kind = DistortionKind::PhaseShift;
    shift.k = 4.0;
    shift.length = 24; // distorted length keeps t + k inside every mother series

    TildeQConfig cfg;
    const LossFn phase = make_loss("phase_only", cfg, DilateConfig{});
    CHECK(invariance_holds(phase, shift, corpus, 1e-6));
    const LossFn squared = make_loss("mse", cfg, DilateConfig{});
    CHECK_FALSE(invariance_holds(squared, shift, corpus, 1e-6));
}

TEST_CASE("uniform amplification invariance holds for the correlation term") {
    Rng rng(77);
    std::vector<Series> corpus;
    for (int i = 0; i < 25; ++i) corpus.push_back(random_series(24, rng));

    DistortionSpec amp;
    amp.kind = DistortionKind::UniformAmplification;
    amp.k = 3.0;

    TildeQConfig cfg;
    const LossFn corr = make_loss("amp_only", cfg, DilateConfig{});
    CHECK(invariance_holds(corr, amp, corpus, 1e-6));
    const LossFn squared = make_loss("mse", cfg, DilateConfig{});
    CHECK_FALSE(invariance_holds(squared, amp, corpus, 1e-6));
}
