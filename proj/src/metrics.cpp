#include "tildeq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tildeq {

void validate_path(const AlignmentPath& path) {
    if (path.steps.empty()) throw std::invalid_argument("alignment path must be non-empty");
    if (path.steps.front() != std::pair<std::size_t, std::size_t>{0, 0})
        throw std::invalid_argument("alignment path must start at (0,0)");
    for (std::size_t s = 1; s < path.steps.size(); ++s) {
        const auto [pi, pj] = path.steps[s - 1];
        const auto [i, j] = path.steps[s];
        const std::size_t di = i - pi, dj = j - pj;
        const bool legal = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1);
        if (i < pi || j < pj || !legal)
            throw std::invalid_argument("alignment path step " + std::to_string(s) +
                                        " is not a unit move");
    }
    const auto [li, lj] = path.steps.back();
    if (li != lj)
        throw std::invalid_argument("alignment path must end on the diagonal corner");
}

DtwResult dtw(const ForecastPair& pair) {
    validate_pair(pair);
    const std::size_t n = pair.truth.length();
    const auto cost = [&](std::size_t i, std::size_t j) {
        const double d = pair.truth[i] - pair.pred[j];
        return d * d;
    };
    // accumulated-cost matrix, row-major
    std::vector<double> acc(n * n);
    const auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * n + j]; };
    at(0, 0) = cost(0, 0);
    for (std::size_t j = 1; j < n; ++j) at(0, j) = at(0, j - 1) + cost(0, j);
    for (std::size_t i = 1; i < n; ++i) at(i, 0) = at(i - 1, 0) + cost(i, 0);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            at(i, j) = cost(i, j) + std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});

    // backtrack; ties prefer the diagonal, then advancing i
    DtwResult out;
    out.value = at(n - 1, n - 1);
    std::size_t i = n - 1, j = n - 1;
    out.path.steps.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1), up = at(i - 1, j), left = at(i, j - 1);
            const double best = std::min({diag, up, left});
            if (diag == best) {
                --i;
                --j;
            } else if (up == best) {
                --i;
            } else {
                --j;
            }
        }
        out.path.steps.emplace_back(i, j);
    }
    std::reverse(out.path.steps.begin(), out.path.steps.end());
    return out;
}

double tdi(const AlignmentPath& path) {
    validate_path(path);
    const double horizon = static_cast<double>(path.steps.back().first) + 1.0;
    double total = 0.0;
    for (const auto& [i, j] : path.steps) {
        const double gap = static_cast<double>(i) - static_cast<double>(j);
        total += gap * gap;
    }
    return total / (horizon * horizon);
}

LcssConfig default_lcss_config(const ForecastPair& pair) {
    validate_pair(pair);
    const std::size_t n = pair.truth.length();
    double mean = 0.0;
    for (double v : pair.truth.values) mean += v;
    mean /= static_cast<double>(n);
    double sq = 0.0;
    for (double v : pair.truth.values) sq += (v - mean) * (v - mean);
    const double stddev = std::sqrt(sq / static_cast<double>(n));
    LcssConfig cfg;
    // degenerate constant truth still needs a positive tolerance
    cfg.epsilon = (stddev > 0.0) ? 0.1 * stddev : 1e-9;
    cfg.delta = n;
    return cfg;
}

double lcss(const ForecastPair& pair, const LcssConfig& cfg) {
    validate_pair(pair);
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("lcss epsilon must be positive");
    const std::size_t n = pair.truth.length();
    // dp[i][j] = LCSS length of truth[0..i) vs pred[0..j)
    std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t gap = (i > j) ? i - j : j - i;
            const bool match = std::fabs(pair.truth[i - 1] - pair.pred[j - 1]) < cfg.epsilon &&
                               gap <= cfg.delta;
            if (match)
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return static_cast<double>(prev[n]) / static_cast<double>(n);
}

} // namespace tildeq
