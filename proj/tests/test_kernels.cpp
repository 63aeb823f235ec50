#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tildeq/kernels.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

namespace k = tildeq::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

// Long-double accumulation as the ground truth for reductions.
long double dot_ref(const std::vector<double>& a, const std::vector<double>& b) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += static_cast<long double>(a[i]) * static_cast<long double>(b[i]);
    return acc;
}

bool close_rel(double got, double want, double tol = 1e-12) {
    const double scale = std::max({1.0, std::fabs(got), std::fabs(want)});
    return std::fabs(got - want) <= tol * scale;
}

} // namespace

TEST_CASE("dispatch reports a known isa and a usable table") {
    const char* isa = k::active_isa();
    const bool known = std::string(isa) == "avx2" || std::string(isa) == "scalar";
    CHECK(known);
    std::printf("active isa: %s\n", isa);
    // the dispatched table must be callable regardless of which one it is
    const double a[3] = {1.0, 2.0, 3.0};
    const double b[3] = {4.0, 5.0, 6.0};
    CHECK(k::ops().dot(a, b, 3) == doctest::Approx(32.0));
}

TEST_CASE("reductions match a long-double oracle across remainder lengths") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 17u, 64u, 1000u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        const double want_dot = static_cast<double>(dot_ref(a, b));
        CHECK(close_rel(k::scalar_ops().dot(a.data(), b.data(), n), want_dot, 1e-11));
        CHECK(close_rel(k::ops().dot(a.data(), b.data(), n), want_dot, 1e-11));
        long double s = 0.0L, s2 = 0.0L;
        for (double x : a) { s += x; s2 += static_cast<long double>(x) * x; }
        CHECK(close_rel(k::ops().sum(a.data(), n), static_cast<double>(s), 1e-11));
        CHECK(close_rel(k::ops().sumsq(a.data(), n), static_cast<double>(s2), 1e-11));
    }
}

TEST_CASE("simd table agrees with scalar table when the host carries avx2") {
    const k::Ops* simd = k::avx2_ops();
    if (simd == nullptr) {
        MESSAGE("no avx2 on this host, dispatch equivalence is vacuous here");
        return;
    }
    const k::Ops& ref = k::scalar_ops();
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 6u, 7u, 8u, 13u, 31u, 32u, 33u, 257u}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);
        CHECK(close_rel(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), 1e-12));
        CHECK(close_rel(simd->sum(a.data(), n), ref.sum(a.data(), n), 1e-12));
        CHECK(close_rel(simd->sumsq(a.data(), n), ref.sumsq(a.data(), n), 1e-12));

        std::vector<double> o1(n), o2(n);
        simd->add(a.data(), b.data(), o1.data(), n);
        ref.add(a.data(), b.data(), o2.data(), n);
        CHECK(o1 == o2); // elementwise paths are bit-identical
        simd->sub(a.data(), b.data(), o1.data(), n);
        ref.sub(a.data(), b.data(), o2.data(), n);
        CHECK(o1 == o2);
        simd->mul(a.data(), b.data(), o1.data(), n);
        ref.mul(a.data(), b.data(), o2.data(), n);
        CHECK(o1 == o2);
        simd->scale(1.7, a.data(), o1.data(), n);
        ref.scale(1.7, a.data(), o2.data(), n);
        CHECK(o1 == o2);

        auto y1 = b, y2 = b;
        simd->axpy(-0.3, a.data(), y1.data(), n);
        ref.axpy(-0.3, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(y1[i], y2[i], 1e-14));
    }
}

TEST_CASE("matvec family agrees between tables on ragged shapes") {
    const k::Ops* simd = k::avx2_ops();
    const k::Ops& lhs = (simd != nullptr) ? *simd : k::ops();
    const k::Ops& ref = k::scalar_ops();
    std::mt19937_64 rng(23);
    for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{
             {1, 1}, {3, 5}, {5, 3}, {8, 8}, {7, 13}, {128, 129}, {61, 64}}) {
        auto m = random_vec(rng, r * c);
        auto x = random_vec(rng, c);
        auto xr = random_vec(rng, r);
        std::vector<double> y1(r), y2(r), z1(c), z2(c);
        lhs.matvec(m.data(), x.data(), y1.data(), r, c);
        ref.matvec(m.data(), x.data(), y2.data(), r, c);
        for (std::size_t i = 0; i < r; ++i) CHECK(close_rel(y1[i], y2[i], 1e-12));
        lhs.matvec_t(m.data(), xr.data(), z1.data(), r, c);
        ref.matvec_t(m.data(), xr.data(), z2.data(), r, c);
        for (std::size_t i = 0; i < c; ++i) CHECK(close_rel(z1[i], z2[i], 1e-12));

        auto m1 = m, m2 = m;
        lhs.outer_acc(m1.data(), xr.data(), x.data(), r, c);
        ref.outer_acc(m2.data(), xr.data(), x.data(), r, c);
        for (std::size_t i = 0; i < r * c; ++i) CHECK(close_rel(m1[i], m2[i], 1e-12));
    }
}

TEST_CASE("adam_step variants walk identical trajectories") {
    const k::Ops* simd = k::avx2_ops();
    const k::Ops& lhs = (simd != nullptr) ? *simd : k::ops();
    const k::Ops& ref = k::scalar_ops();
    std::mt19937_64 rng(31);
    const std::size_t n = 37; // odd on purpose, exercises the tail
    auto p1 = random_vec(rng, n), g0 = random_vec(rng, n);
    auto p2 = p1;
    std::vector<double> m1(n, 0.0), v1(n, 0.0), m2(n, 0.0), v2(n, 0.0);
    double b1t = 1.0, b2t = 1.0;
    for (int step = 1; step <= 5; ++step) {
        b1t *= 0.9;
        b2t *= 0.999;
        std::vector<double> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = g0[i] * static_cast<double>(step);
        lhs.adam_step(p1.data(), m1.data(), v1.data(), g.data(), n,
                      1e-3, 0.9, 0.999, 1e-8, 1.0 - b1t, 1.0 - b2t);
        ref.adam_step(p2.data(), m2.data(), v2.data(), g.data(), n,
                      1e-3, 0.9, 0.999, 1e-8, 1.0 - b1t, 1.0 - b2t);
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(p1[i], p2[i], 1e-13));
    }
}

TEST_CASE("aliased elementwise output is supported") {
    std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b = {10.0, 20.0, 30.0, 40.0, 50.0};
    k::ops().add(a.data(), b.data(), a.data(), a.size());
    CHECK(a == std::vector<double>{11.0, 22.0, 33.0, 44.0, 55.0});
}
