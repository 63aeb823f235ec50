#pragma once

// Generators for the six series distortions used to probe loss invariance:
// amplitude shift, phase shift, uniform/dynamic amplification, uniform/
// dynamic time scaling. Time-remapping kinds sample a longer mother series
// by index, so requested indices must exist.

#include "tildeq/losses.hpp"
#include "tildeq/series.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tildeq {

enum class DistortionKind {
    AmplitudeShift,       // G(t) = F(t) + k
    PhaseShift,           // G(t) = F(t + k), k rounded to the sample grid
    UniformAmplification, // G(t) = k * F(t), k != 0
    UniformTimeScale,     // G(t_i) = F(t_ceil(k*i)), k > 0
    DynamicAmplification, // G(t) = h(t) * F(t), h nonzero everywhere
    DynamicTimeScale,     // G(t_i) = F(t_ceil(h(i))), h nonnegative, strictly increasing
};

const char* to_string(DistortionKind kind);
DistortionKind distortion_kind_from_string(const std::string& name);

struct DistortionSpec {
    DistortionKind kind = DistortionKind::AmplitudeShift;
    double k = 0.0;
    std::function<double(double)> h; // required by the two dynamic kinds
    std::size_t length = 0;          // requested output length; 0 = source length
};

// Applies the distortion, reading source samples by the index conventions
// above. Throws std::invalid_argument on parameter violations and
// std::out_of_range("insufficient support...") when a mapped index falls
// outside the source series.
Series apply(const Series& series, const DistortionSpec& spec);

// True iff loss(Y_prefix, apply(Y, spec)) < delta for every Y in the corpus,
// where Y_prefix is Y truncated to the distorted length.
bool invariance_holds(const LossFn& loss, const DistortionSpec& spec,
                      const std::vector<Series>& corpus, double delta);

} // namespace tildeq
