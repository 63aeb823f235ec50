#include "tildeq/losses.hpp"

#include "tildeq/kernels.hpp"
#include "tildeq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace tildeq {

namespace {

using cd = std::complex<double>;

double sign_or_zero(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0; // subgradient at the kink
}

// p in {1,2} gate shared by the frequency and correlation terms.
void require_p(int p) {
    if (p != 1 && p != 2) throw std::invalid_argument("norm_p must be 1 or 2");
}

// Value of ||v||_p together with the per-entry derivative weights
// w_i = d||v||_p / d v_i (subgradient 0 where undefined).
struct PNorm {
    double value = 0.0;
    std::vector<double> weights;
};

PNorm pnorm(const std::vector<double>& v, int p) {
    PNorm out;
    out.weights.resize(v.size(), 0.0);
    if (p == 1) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.value += std::fabs(v[i]);
            out.weights[i] = sign_or_zero(v[i]);
        }
    } else {
        double sq = 0.0;
        for (double x : v) sq += x * x;
        out.value = std::sqrt(sq);
        if (out.value > 0.0)
            for (std::size_t i = 0; i < v.size(); ++i) out.weights[i] = v[i] / out.value;
    }
    return out;
}

} // namespace

SignedGap signed_gap(const ForecastPair& pair) {
    validate_pair(pair);
    SignedGap out;
    out.d.values.resize(pair.pred.length());
    kernels::sub(pair.pred.values.data(), pair.truth.values.data(), out.d.values.data(),
                 pair.pred.length());
    return out;
}

void validate(const TildeQConfig& cfg) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in [0,1]");
    if (!(cfg.gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
    require_p(cfg.norm_p);
}

void validate(const DilateConfig& cfg) {
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in [0,1]");
    if (!(cfg.smoothing > 0.0)) throw std::invalid_argument("smoothing must be positive");
}

std::size_t resolve_dominant_count(const TildeQConfig& cfg, std::size_t t) {
    if (cfg.dominant_count != 0) return std::min(cfg.dominant_count, t);
    return std::max<std::size_t>(1, (t + 23) / 24);
}

LossValueGrad mse(const ForecastPair& pair) {
    validate_pair(pair);
    const std::size_t n = pair.truth.length();
    LossValueGrad out;
    out.grad.values.resize(n);
    kernels::sub(pair.pred.values.data(), pair.truth.values.data(), out.grad.values.data(), n);
    out.value = kernels::sumsq(out.grad.values.data(), n) / static_cast<double>(n);
    kernels::scale(2.0 / static_cast<double>(n), out.grad.values.data(), out.grad.values.data(), n);
    return out;
}

LossValueGrad ashift_loss(const ForecastPair& pair) {
    validate_pair(pair);
    const std::size_t n = pair.truth.length();
    if (n < 2) throw std::invalid_argument("shift loss requires horizon >= 2");
    const SignedGap gap = signed_gap(pair);

    // stable softmax over the gaps
    const double m = *std::max_element(gap.d.values.begin(), gap.d.values.end());
    std::vector<double> s(n);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = std::exp(gap.d[i] - m);
        z += s[i];
    }
    for (double& v : s) v /= z;

    const double uniform = 1.0 / static_cast<double>(n);
    LossValueGrad out;
    out.grad.values.resize(n);
    double value = 0.0;
    double dot_gs = 0.0; // sum_i g_i * s_i for the softmax Jacobian
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        value += std::fabs(uniform - s[i]);
        g[i] = sign_or_zero(s[i] - uniform);
        dot_gs += g[i] * s[i];
    }
    out.value = static_cast<double>(n) * value;
    for (std::size_t j = 0; j < n; ++j)
        out.grad[j] = static_cast<double>(n) * s[j] * (g[j] - dot_gs);
    return out;
}

LossValueGrad phase_loss(const ForecastPair& pair, const TildeQConfig& cfg) {
    validate_pair(pair);
    validate(cfg);
    const std::size_t n = pair.truth.length();
    if (n < 2) throw std::invalid_argument("frequency loss requires horizon >= 2");
    const std::size_t count = resolve_dominant_count(cfg, n);

    const Spectrum sa = dft(pair.truth);
    const Spectrum sb = dft(pair.pred);
    const DominantSet dom = dominant_frequencies(sa, count);
    const auto ma = sa.magnitudes();
    const auto mb = sb.magnitudes();

    // per-bin scalar whose p-norm weight we need, split into the dominant
    // comparison and the residual penalty
    std::vector<double> dom_terms, res_terms;
    std::vector<std::size_t> dom_bins, res_bins;
    for (std::size_t k = 0; k < n; ++k) {
        if (dom.contains(k)) {
            dom_bins.push_back(k);
            dom_terms.push_back(cfg.phase_magnitude_mode ? mb[k] - ma[k]
                                                         : std::abs(sb.coefficients[k] - sa.coefficients[k]));
        } else {
            res_bins.push_back(k);
            res_terms.push_back(mb[k]);
        }
    }
    const PNorm dom_norm = pnorm(dom_terms, cfg.norm_p);
    const PNorm res_norm = pnorm(res_terms, cfg.norm_p);

    LossValueGrad out;
    out.value = dom_norm.value + res_norm.value;
    out.grad.values.assign(n, 0.0);

    // Backpropagate through the transform: each bin contributes
    // w_k * d|term_k|/d(pred). With B = F(pred) linear in pred, the adjoint
    // is a forward transform of the per-bin complex sensitivities z_k.
    std::vector<cd> z(n, cd(0.0, 0.0));
    for (std::size_t idx = 0; idx < dom_bins.size(); ++idx) {
        const std::size_t k = dom_bins[idx];
        const double w = dom_norm.weights[idx];
        if (w == 0.0) continue;
        if (cfg.phase_magnitude_mode) {
            if (mb[k] > 0.0) z[k] += w * std::conj(sb.coefficients[k]) / mb[k];
        } else {
            const cd diff = sb.coefficients[k] - sa.coefficients[k];
            const double mag = std::abs(diff);
            if (mag > 0.0) z[k] += w * std::conj(diff) / mag;
        }
    }
    for (std::size_t idx = 0; idx < res_bins.size(); ++idx) {
        const std::size_t k = res_bins[idx];
        const double w = res_norm.weights[idx];
        if (w == 0.0 || mb[k] == 0.0) continue;
        z[k] += w * std::conj(sb.coefficients[k]) / mb[k];
    }
    const auto adj = fourier(z, false);
    for (std::size_t t = 0; t < n; ++t) out.grad[t] = adj[t].real();
    return out;
}

LossValueGrad amp_loss(const ForecastPair& pair, const TildeQConfig& cfg) {
    validate_pair(pair);
    validate(cfg);
    const std::size_t n = pair.truth.length();
    if (n < 2) throw std::invalid_argument("correlation loss requires horizon >= 2");

    std::vector<double> a = pair.truth.values;
    std::vector<double> b = pair.pred.values;
    if (cfg.ncc_mean_center) {
        const double ma = kernels::sum(a.data(), n) / static_cast<double>(n);
        const double mb = kernels::sum(b.data(), n) / static_cast<double>(n);
        for (double& v : a) v -= ma;
        for (double& v : b) v -= mb;
    }
    const double ra = std::sqrt(kernels::sumsq(a.data(), n));
    const double rb = std::sqrt(kernels::sumsq(b.data(), n));
    if (!(ra > 0.0) || !(rb > 0.0))
        throw std::runtime_error("zero norm: correlation loss undefined for a zero-energy side");

    const Series sa(a);
    const Series sb(b);
    const Series raa = normalized_cross_correlation(sa, sa, false);
    const Series rab = normalized_cross_correlation(sa, sb, false);

    std::vector<double> diff(n);
    kernels::sub(raa.values.data(), rab.values.data(), diff.data(), n);
    const PNorm norm = pnorm(diff, cfg.norm_p);

    LossValueGrad out;
    out.value = norm.value;

    // grad_s = -(1/(ra*rb)) * (w (x) a)[s] + (b_s/rb^2) * <w, R(a,b)>
    // where (w (x) a)[s] = sum_tau w_tau * a[(s - tau) mod n] is a circular
    // convolution, done in the frequency domain.
    std::vector<cd> xw(n), xa(n);
    for (std::size_t i = 0; i < n; ++i) {
        xw[i] = cd(norm.weights[i], 0.0);
        xa[i] = cd(a[i], 0.0);
    }
    const auto fw = fourier(xw, false);
    const auto fa = fourier(xa, false);
    std::vector<cd> prod(n);
    for (std::size_t k = 0; k < n; ++k) prod[k] = fw[k] * fa[k];
    const auto conv = fourier(prod, true);
    const double wr = kernels::dot(norm.weights.data(), rab.values.data(), n);

    std::vector<double> grad(n);
    const double inv = 1.0 / (ra * rb);
    for (std::size_t s = 0; s < n; ++s)
        grad[s] = -inv * conv[s].real() + b[s] / (rb * rb) * wr;
    if (cfg.ncc_mean_center) {
        // chain through the centering: project out the mean component
        const double mg = kernels::sum(grad.data(), n) / static_cast<double>(n);
        for (double& v : grad) v -= mg;
    }
    out.grad.values = std::move(grad);
    return out;
}

LossValueGrad tilde_q(const ForecastPair& pair, const TildeQConfig& cfg) {
    validate_pair(pair);
    validate(cfg);
    const std::size_t n = pair.truth.length();
    LossValueGrad out;
    out.grad.values.assign(n, 0.0);
    const auto accumulate = [&](double weight, const LossValueGrad& term) {
        out.value += weight * term.value;
        kernels::axpy(weight, term.grad.values.data(), out.grad.values.data(), n);
    };
    if (cfg.alpha > 0.0) accumulate(cfg.alpha, ashift_loss(pair));
    if (cfg.alpha < 1.0) accumulate(1.0 - cfg.alpha, phase_loss(pair, cfg));
    if (cfg.gamma > 0.0) accumulate(cfg.gamma, amp_loss(pair, cfg));
    return out;
}

namespace {

// Shared soft-min DP. Cost c(i,j) = alpha*(y_i - p_j)^2 + (1-alpha)*(i-j)^2/n^2;
// pure squared cost is alpha = 1. Returns the loss value and the gradient via
// the expected-alignment backward recursion.
LossValueGrad soft_alignment(const ForecastPair& pair, double alpha, double gamma) {
    const std::size_t n = pair.truth.length();
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    const auto cost = [&](std::size_t i, std::size_t j) {
        const double d = pair.truth[i] - pair.pred[j];
        const double gap = static_cast<double>(i) - static_cast<double>(j);
        return alpha * d * d + (1.0 - alpha) * gap * gap / nn;
    };
    const auto softmin3 = [gamma](double a, double b, double c) {
        const double m = std::min({a, b, c});
        const double s = std::exp(-(a - m) / gamma) + std::exp(-(b - m) / gamma) +
                         std::exp(-(c - m) / gamma);
        return m - gamma * std::log(s);
    };

    std::vector<double> r(n * n);
    const auto R = [&](std::size_t i, std::size_t j) -> double& { return r[i * n + j]; };
    R(0, 0) = cost(0, 0);
    for (std::size_t j = 1; j < n; ++j) R(0, j) = R(0, j - 1) + cost(0, j);
    for (std::size_t i = 1; i < n; ++i) R(i, 0) = R(i - 1, 0) + cost(i, 0);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            R(i, j) = cost(i, j) + softmin3(R(i - 1, j - 1), R(i - 1, j), R(i, j - 1));

    // Backward pass: E(i,j) is the expected-alignment weight of cell (i,j).
    // Every exponent below is <= 0 because a soft-min never exceeds any of
    // its arguments, so the recursion cannot overflow.
    std::vector<double> e(n * n, 0.0);
    const auto E = [&](std::size_t i, std::size_t j) -> double& { return e[i * n + j]; };
    E(n - 1, n - 1) = 1.0;
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t jj = n; jj-- > 0;) {
            if (ii == n - 1 && jj == n - 1) continue;
            double acc = 0.0;
            if (ii + 1 < n)
                acc += E(ii + 1, jj) *
                       std::exp((R(ii + 1, jj) - R(ii, jj) - cost(ii + 1, jj)) / gamma);
            if (jj + 1 < n)
                acc += E(ii, jj + 1) *
                       std::exp((R(ii, jj + 1) - R(ii, jj) - cost(ii, jj + 1)) / gamma);
            if (ii + 1 < n && jj + 1 < n)
                acc += E(ii + 1, jj + 1) *
                       std::exp((R(ii + 1, jj + 1) - R(ii, jj) - cost(ii + 1, jj + 1)) / gamma);
            E(ii, jj) = acc;
        }
    }

    LossValueGrad out;
    out.value = R(n - 1, n - 1);
    out.grad.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.grad[j] += E(i, j) * alpha * 2.0 * (pair.pred[j] - pair.truth[i]);
    return out;
}

} // namespace

LossValueGrad soft_dtw(const ForecastPair& pair, const DilateConfig& cfg) {
    validate_pair(pair);
    validate(cfg);
    return soft_alignment(pair, 1.0, cfg.smoothing);
}

LossValueGrad dilate(const ForecastPair& pair, const DilateConfig& cfg) {
    validate_pair(pair);
    validate(cfg);
    return soft_alignment(pair, cfg.alpha, cfg.smoothing);
}

LossFn make_loss(const std::string& name, const TildeQConfig& tq, const DilateConfig& dl) {
    validate(tq);
    validate(dl);
    if (name == "mse") return [](const ForecastPair& p) { return mse(p); };
    if (name == "tilde_q") return [tq](const ForecastPair& p) { return tilde_q(p, tq); };
    if (name == "dilate") return [dl](const ForecastPair& p) { return dilate(p, dl); };
    if (name == "soft_dtw") return [dl](const ForecastPair& p) { return soft_dtw(p, dl); };
    if (name == "ashift_only") return [](const ForecastPair& p) { return ashift_loss(p); };
    if (name == "phase_only") return [tq](const ForecastPair& p) { return phase_loss(p, tq); };
    if (name == "amp_only") return [tq](const ForecastPair& p) { return amp_loss(p, tq); };
    throw std::invalid_argument("unknown loss '" + name +
                                "' (expected mse, tilde_q, dilate, soft_dtw, ashift_only, "
                                "phase_only or amp_only)");
}

} // namespace tildeq
