#include "tildeq/spectral.hpp"

#include "tildeq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace tildeq {

namespace {

using cd = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// e^(-2*pi*i*j/n) for j in [0, n), shared across calls. The direct transform
// indexes this table with (k*t) mod n, so no trig runs in the O(n^2) loop.
std::shared_ptr<const std::vector<cd>> twiddles(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::shared_ptr<const std::vector<cd>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto table = std::make_shared<std::vector<cd>>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        (*table)[j] = cd(std::cos(angle), std::sin(angle));
    }
    cache.emplace(n, table);
    return table;
}

// Iterative radix-2 Cooley-Tukey, forward convention, in place.
void fft_pow2(std::vector<cd>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; (j & bit) != 0; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const auto table = twiddles(n);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd w = (*table)[j * step];
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

std::vector<cd> dft_direct(const std::vector<cd>& x) {
    const std::size_t n = x.size();
    const auto table = twiddles(n);
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        std::size_t idx = 0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += x[t] * (*table)[idx];
            idx += k;
            if (idx >= n) idx -= n;
        }
        out[k] = acc;
    }
    return out;
}

} // namespace

std::vector<double> Spectrum::magnitudes() const {
    std::vector<double> m(coefficients.size());
    for (std::size_t i = 0; i < coefficients.size(); ++i) m[i] = std::abs(coefficients[i]);
    return m;
}

bool DominantSet::contains(std::size_t k) const {
    return std::binary_search(indices.begin(), indices.end(), k);
}

std::vector<cd> fourier(const std::vector<cd>& x, bool inverse) {
    if (x.empty()) throw std::invalid_argument("fourier transform of an empty sequence");
    std::vector<cd> a = x;
    if (inverse) {
        for (auto& v : a) v = std::conj(v);
    }
    if (is_power_of_two(a.size())) {
        fft_pow2(a);
    } else {
        a = dft_direct(a);
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(a.size());
        for (auto& v : a) v = std::conj(v) * inv_n;
    }
    return a;
}

Spectrum dft(const Series& series) {
    validate_series(series);
    std::vector<cd> x(series.length());
    for (std::size_t t = 0; t < series.length(); ++t) x[t] = cd(series[t], 0.0);
    Spectrum sp;
    sp.coefficients = fourier(x, false);
    return sp;
}

DominantSet dominant_frequencies(const Spectrum& spectrum, std::size_t count) {
    const std::size_t n = spectrum.size();
    if (n == 0) throw std::invalid_argument("dominant_frequencies of an empty spectrum");
    if (count < 1 || count > n)
        throw std::invalid_argument("dominant count must lie in [1, spectrum size]");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const auto mags = spectrum.magnitudes();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mags[a] != mags[b]) return mags[a] > mags[b];
        return a < b;
    });
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = order[i];
        picked.push_back(k);
        if (k != 0) picked.push_back(n - k); // conjugate partner (self for the Nyquist bin)
    }
    std::sort(picked.begin(), picked.end());
    picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    DominantSet out;
    out.indices = std::move(picked);
    return out;
}

Series normalized_cross_correlation(const Series& a, const Series& b, bool mean_center) {
    validate_series(a);
    validate_series(b);
    const std::size_t n = a.length();
    if (b.length() != n)
        throw std::invalid_argument("cross-correlation requires equal lengths");
    if (n < 2) throw std::invalid_argument("cross-correlation requires length >= 2");

    std::vector<double> av = a.values;
    std::vector<double> bv = b.values;
    if (mean_center) {
        const double ma = kernels::sum(av.data(), n) / static_cast<double>(n);
        const double mb = kernels::sum(bv.data(), n) / static_cast<double>(n);
        for (double& v : av) v -= ma;
        for (double& v : bv) v -= mb;
    }
    const double na = std::sqrt(kernels::sumsq(av.data(), n));
    const double nb = std::sqrt(kernels::sumsq(bv.data(), n));
    if (!(na > 0.0) || !(nb > 0.0))
        throw std::runtime_error("zero norm: cross-correlation undefined for a zero-energy input");

    std::vector<cd> xa(n), xb(n);
    for (std::size_t t = 0; t < n; ++t) {
        xa[t] = cd(av[t], 0.0);
        xb[t] = cd(bv[t], 0.0);
    }
    const auto fa = fourier(xa, false);
    const auto fb = fourier(xb, false);
    std::vector<cd> prod(n);
    for (std::size_t k = 0; k < n; ++k) prod[k] = std::conj(fa[k]) * fb[k];
    const auto corr = fourier(prod, true);

    Series r;
    r.values.resize(n);
    const double scale = 1.0 / (na * nb);
    for (std::size_t tau = 0; tau < n; ++tau) r.values[tau] = corr[tau].real() * scale;
    return r;
}

} // namespace tildeq
