#pragma once

// Fourier and correlation kernels behind the frequency and amplitude loss
// terms: exact DFT (radix-2 FFT fast path, twiddle-memoized direct transform
// otherwise), dominant-bin selection, circular normalized cross-correlation.

#include "tildeq/series.hpp"

#include <complex>
#include <cstddef>
#include <vector>

namespace tildeq {

struct Spectrum {
    // one coefficient per frequency bin 0..T-1, forward convention
    // C_k = sum_t x_t * exp(-2*pi*i*k*t/T), unnormalized
    std::vector<std::complex<double>> coefficients;

    std::size_t size() const { return coefficients.size(); }
    std::vector<double> magnitudes() const;
};

// Frequency bins selected as dominant; conjugate partners always travel
// together. Indices are sorted ascending and unique.
struct DominantSet {
    std::vector<std::size_t> indices;

    bool contains(std::size_t k) const;
};

// Exact DFT of a real series. Power-of-two lengths go through an iterative
// radix-2 FFT; all other lengths use the direct sum with a memoized twiddle
// table, so results stay exact to rounding for every length.
Spectrum dft(const Series& series);

// General complex transform used by dft and the correlation path.
// inverse=true applies the 1/T normalization.
std::vector<std::complex<double>> fourier(const std::vector<std::complex<double>>& x, bool inverse);

// The `count` largest-magnitude bins of the spectrum (ties broken toward the
// lower index) plus their conjugate partners. Requires 1 <= count <= size.
DominantSet dominant_frequencies(const Spectrum& spectrum, std::size_t count);

// Circular normalized cross-correlation over all lags:
//   R[tau] = sum_t a[t]*b[(t+tau) mod T] / (||a||_2 * ||b||_2)
// computed as IDFT(conj(DFT(a)) * DFT(b)). mean_center subtracts each
// input's mean first. Throws "zero norm" when either side has no energy.
Series normalized_cross_correlation(const Series& a, const Series& b, bool mean_center = false);

} // namespace tildeq
