#include "tildeq/distortions.hpp"

#include <cmath>
#include <stdexcept>

namespace tildeq {

const char* to_string(DistortionKind kind) {
    switch (kind) {
        case DistortionKind::AmplitudeShift: return "amplitude_shift";
        case DistortionKind::PhaseShift: return "phase_shift";
        case DistortionKind::UniformAmplification: return "uniform_amplification";
        case DistortionKind::UniformTimeScale: return "uniform_time_scale";
        case DistortionKind::DynamicAmplification: return "dynamic_amplification";
        case DistortionKind::DynamicTimeScale: return "dynamic_time_scale";
    }
    throw std::invalid_argument("unknown distortion kind");
}

DistortionKind distortion_kind_from_string(const std::string& name) {
    if (name == "amplitude_shift") return DistortionKind::AmplitudeShift;
    if (name == "phase_shift") return DistortionKind::PhaseShift;
    if (name == "uniform_amplification") return DistortionKind::UniformAmplification;
    if (name == "uniform_time_scale") return DistortionKind::UniformTimeScale;
    if (name == "dynamic_amplification") return DistortionKind::DynamicAmplification;
    if (name == "dynamic_time_scale") return DistortionKind::DynamicTimeScale;
    throw std::invalid_argument("unknown distortion kind '" + name + "'");
}

namespace {

// Bounds-checked fetch of the mapped source index.
double fetch(const Series& s, double index, std::size_t out_pos) {
    if (index < 0.0 || index >= static_cast<double>(s.length()))
        throw std::out_of_range("insufficient support: output position " +
                                std::to_string(out_pos) + " maps to source index " +
                                std::to_string(index) + " outside [0, " +
                                std::to_string(s.length()) + ")");
    return s[static_cast<std::size_t>(index)];
}

} // namespace

Series apply(const Series& series, const DistortionSpec& spec) {
    validate_series(series);
    const std::size_t out_len = (spec.length == 0) ? series.length() : spec.length;
    if (out_len > series.length() &&
        (spec.kind == DistortionKind::AmplitudeShift ||
         spec.kind == DistortionKind::UniformAmplification ||
         spec.kind == DistortionKind::DynamicAmplification))
        throw std::out_of_range("insufficient support: requested length " +
                                std::to_string(out_len) + " exceeds source length " +
                                std::to_string(series.length()));
    const bool needs_h = spec.kind == DistortionKind::DynamicAmplification ||
                         spec.kind == DistortionKind::DynamicTimeScale;
    if (needs_h && !spec.h)
        throw std::invalid_argument("dynamic distortions require a function handle h");

    Series out;
    out.values.resize(out_len);
    switch (spec.kind) {
        case DistortionKind::AmplitudeShift:
            for (std::size_t i = 0; i < out_len; ++i) out[i] = series[i] + spec.k;
            break;
        case DistortionKind::PhaseShift: {
            const auto shift = static_cast<double>(std::llround(spec.k));
            for (std::size_t i = 0; i < out_len; ++i)
                out[i] = fetch(series, static_cast<double>(i) + shift, i);
            break;
        }
        case DistortionKind::UniformAmplification:
            if (spec.k == 0.0)
                throw std::invalid_argument("uniform amplification requires k != 0");
            for (std::size_t i = 0; i < out_len; ++i) out[i] = spec.k * series[i];
            break;
        case DistortionKind::UniformTimeScale:
            if (!(spec.k > 0.0))
                throw std::invalid_argument("uniform time scale requires k > 0");
            for (std::size_t i = 0; i < out_len; ++i)
                out[i] = fetch(series, std::ceil(spec.k * static_cast<double>(i)), i);
            break;
        case DistortionKind::DynamicAmplification:
            for (std::size_t i = 0; i < out_len; ++i) {
                const double hi = spec.h(static_cast<double>(i));
                if (hi == 0.0)
                    throw std::invalid_argument("dynamic amplification requires h(t) != 0, violated at t = " +
                                                std::to_string(i));
                out[i] = hi * series[i];
            }
            break;
        case DistortionKind::DynamicTimeScale: {
            double prev = -1.0;
            for (std::size_t i = 0; i < out_len; ++i) {
                const double hi = spec.h(static_cast<double>(i));
                if (hi < 0.0)
                    throw std::invalid_argument("dynamic time scale requires a nonnegative time map");
                if (i > 0 && !(hi > prev))
                    throw std::invalid_argument("dynamic time scale requires a strictly increasing time map, violated at t = " +
                                                std::to_string(i));
                prev = hi;
                out[i] = fetch(series, std::ceil(hi), i);
            }
            break;
        }
    }
    return out;
}

bool invariance_holds(const LossFn& loss, const DistortionSpec& spec,
                      const std::vector<Series>& corpus, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("invariance tolerance must be positive");
    if (corpus.empty()) throw std::invalid_argument("invariance corpus must be non-empty");
    for (const Series& y : corpus) {
        const Series g = apply(y, spec);
        ForecastPair pair;
        pair.truth.values.assign(y.values.begin(),
                                 y.values.begin() + static_cast<std::ptrdiff_t>(g.length()));
        pair.pred = g;
        if (!(loss(pair).value < delta)) return false;
    }
    return true;
}

} // namespace tildeq
