#pragma once

// Evaluation-only measures: hard DTW with an explicit optimal path, the
// temporal distortion index of that path, and the LCSS match ratio.

#include "tildeq/series.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace tildeq {

// Monotone warping path from (0,0) to (T'-1, T'-1); consecutive steps move
// by (1,0), (0,1) or (1,1).
struct AlignmentPath {
    std::vector<std::pair<std::size_t, std::size_t>> steps;
};

// Throws std::invalid_argument when the path violates the shape above.
void validate_path(const AlignmentPath& path);

struct DtwResult {
    double value = 0.0;
    AlignmentPath path;
};

// Classic O(T'^2) DP with squared-difference local cost. The returned path
// is the optimal one under deterministic tie-breaking: diagonal first, then
// the step advancing the truth index.
DtwResult dtw(const ForecastPair& pair);

// Sum over path steps of (i-j)^2 / T'^2: zero on the diagonal, growing with
// temporal misalignment.
double tdi(const AlignmentPath& path);

struct LcssConfig {
    double epsilon = 0.0;  // value tolerance, > 0
    std::size_t delta = 0; // index window; matches need |i-j| <= delta
};

// Defaults declared in result metadata: epsilon = 0.1*std(truth) for this
// pair, delta = T' (effectively unwindowed).
LcssConfig default_lcss_config(const ForecastPair& pair);

// Longest-common-subsequence ratio in [0,1]: samples match when
// |truth_i - pred_j| < epsilon and |i-j| <= delta; result is match count / T'.
double lcss(const ForecastPair& pair, const LcssConfig& cfg);

} // namespace tildeq
