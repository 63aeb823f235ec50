#pragma once

// Differentiable training objectives. Every loss returns its scalar value
// together with the analytic gradient with respect to the prediction.

#include "tildeq/series.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace tildeq {

struct LossValueGrad {
    double value = 0.0;
    Series grad; // d(value)/d(pred), same length as the prediction
};

using LossFn = std::function<LossValueGrad(const ForecastPair&)>;

// Per-step signed distances d_i = pred_i - truth_i feeding the softmax term.
struct SignedGap {
    Series d;
};
SignedGap signed_gap(const ForecastPair& pair);

struct TildeQConfig {
    double alpha = 0.99; // weight of the shift term; (1-alpha) weighs the frequency term
    double gamma = 0.5;  // weight of the correlation term
    std::size_t dominant_count = 0; // 0 = auto: max(1, ceil(T'/24)) bins
    int norm_p = 1;                 // p in {1,2} for the frequency/correlation norms
    bool phase_magnitude_mode = true; // compare |F| (default) vs complex difference
    bool ncc_mean_center = false;     // subtract means before cross-correlation
};
void validate(const TildeQConfig& cfg);

struct DilateConfig {
    double alpha = 0.5;      // blend between value cost and temporal penalty
    double smoothing = 0.01; // soft-min temperature, > 0
};
void validate(const DilateConfig& cfg);

// Effective dominant-bin count for a horizon of length t.
std::size_t resolve_dominant_count(const TildeQConfig& cfg, std::size_t t);

// value = (1/T')*sum (pred_i - truth_i)^2
LossValueGrad mse(const ForecastPair& pair);

// value = T'*sum_i |1/T' - softmax(d)_i|, d_i = pred_i - truth_i.
// Zero for pred = truth + k, any constant k.
LossValueGrad ashift_loss(const ForecastPair& pair);

// Dominant-set frequency loss. The dominant set comes from the ground-truth
// spectrum; the remaining prediction bins are penalized toward zero.
LossValueGrad phase_loss(const ForecastPair& pair, const TildeQConfig& cfg);

// p-norm of R(Y,Y) - R(Y,pred) over all circular lags. Zero for pred = c*Y,
// c > 0. Throws "zero norm" when either side carries no energy.
LossValueGrad amp_loss(const ForecastPair& pair, const TildeQConfig& cfg);

// alpha*ashift + (1-alpha)*phase + gamma*amp. Zero-weight components are
// skipped entirely, so degenerate weights reduce to the active terms exactly.
LossValueGrad tilde_q(const ForecastPair& pair, const TildeQConfig& cfg);

// Soft-min relaxation of DTW with squared local cost, smoothing cfg.smoothing.
LossValueGrad soft_dtw(const ForecastPair& pair, const DilateConfig& cfg);

// Soft-min DP over the blended cost alpha*(y_i - pred_j)^2 + (1-alpha)*(i-j)^2/T'^2.
LossValueGrad dilate(const ForecastPair& pair, const DilateConfig& cfg);

// Factory over the loss names accepted in experiment configs:
// mse | tilde_q | dilate | soft_dtw | ashift_only | phase_only | amp_only.
LossFn make_loss(const std::string& name, const TildeQConfig& tq, const DilateConfig& dl);

} // namespace tildeq
