// Experiment command line: train/evaluate runs, alpha ablations, forecast
// plots, distorted-corpus generation, and training-free metric scoring.

#include "tildeq/distortions.hpp"
#include "tildeq/experiment.hpp"
#include "tildeq/metrics.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace tildeq;

// defaults <- config file <- TILDEQ_* env <- --set flags <- dedicated flags
ExperimentConfig assemble_config(const std::string& config_path,
                                 const std::vector<std::string>& sets, long long seed,
                                 long long repeats, const std::string& out) {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    apply_env_overrides(cfg);
    for (const std::string& kv : sets) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(seed);
    if (repeats > 0) cfg.repeats = static_cast<std::size_t>(repeats);
    if (!out.empty()) cfg.out_dir = out;
    return cfg;
}

int cmd_run(const ExperimentConfig& cfg) {
    const ResultRecord record = run(cfg);
    std::printf("wrote %s/results.json (%zu ok, %zu failed)\n", cfg.out_dir.c_str(),
                record.succeeded, record.failed);
    std::printf("mse %.6g +- %.6g | dtw %.6g +- %.6g | tdi %.6g +- %.6g | lcss %.6g +- %.6g\n",
                record.mse.mean, record.mse.stddev, record.dtw.mean, record.dtw.stddev,
                record.tdi.mean, record.tdi.stddev, record.lcss.mean, record.lcss.stddev);
    if (record.succeeded == 0) {
        std::fprintf(stderr, "error: every repeat failed\n");
        return 1;
    }
    return 0;
}

std::vector<double> parse_alphas(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"shape-aware forecasting experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1, repeats = -1;
    std::vector<std::string> sets;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value config file");
        sub->add_option("--seed", seed, "base seed override");
        sub->add_option("--repeats", repeats, "repeat-count override");
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--set", sets, "extra key=value overrides")->take_all();
    };

    CLI::App* c_run = app.add_subcommand("run", "train and evaluate one configuration");
    add_common(c_run);

    CLI::App* c_ablate = app.add_subcommand("ablate", "alpha sweep plus single-term variants");
    add_common(c_ablate);
    std::string alphas_csv = "0.99,0.9,0.5,0.2";
    c_ablate->add_option("--alphas", alphas_csv, "comma-separated alpha values");

    CLI::App* c_plot = app.add_subcommand("plot", "emit forecast CSV/SVG plots from a finished run");
    std::string record_path;
    long long samples = 3;
    c_plot->add_option("--record", record_path, "results.json of a finished run")->required();
    c_plot->add_option("--samples", samples, "number of test items to plot");

    CLI::App* c_distort = app.add_subcommand("distort", "apply a distortion to a CSV series");
    std::string d_kind = "amplitude_shift", d_in, d_out;
    double d_k = 0.0, d_ha = 1.0, d_hb = 0.0;
    long long d_len = 0;
    c_distort->add_option("--kind", d_kind,
                          "amplitude_shift | phase_shift | uniform_amplification | "
                          "uniform_time_scale | dynamic_amplification | dynamic_time_scale");
    c_distort->add_option("--k", d_k, "shift / factor / scale parameter");
    c_distort->add_option("--h-a", d_ha, "dynamic kinds: h(t) = a + b*t, intercept");
    c_distort->add_option("--h-b", d_hb, "dynamic kinds: h(t) = a + b*t, slope");
    c_distort->add_option("--length", d_len, "output length (0 = input length)");
    c_distort->add_option("--input", d_in, "input series CSV")->required();
    c_distort->add_option("--output", d_out, "output series CSV")->required();

    CLI::App* c_metrics = app.add_subcommand("metrics", "score a truth/prediction CSV pair");
    std::string m_truth, m_pred;
    double m_eps = 0.0;
    long long m_delta = 0;
    c_metrics->add_option("--truth", m_truth, "ground-truth series CSV")->required();
    c_metrics->add_option("--pred", m_pred, "prediction series CSV")->required();
    c_metrics->add_option("--lcss-epsilon", m_eps, "LCSS value tolerance (0 = 0.1*std(truth))");
    c_metrics->add_option("--lcss-delta", m_delta, "LCSS index window (0 = horizon)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_run->parsed()) {
            return cmd_run(assemble_config(config_path, sets, seed, repeats, out_dir));
        }
        if (c_ablate->parsed()) {
            const ExperimentConfig cfg = assemble_config(config_path, sets, seed, repeats, out_dir);
            const auto records = ablate_alpha(cfg, parse_alphas(alphas_csv));
            std::printf("wrote %s/ablation.csv (%zu variants)\n", cfg.out_dir.c_str(),
                        records.size());
            return 0;
        }
        if (c_plot->parsed()) {
            if (samples < 0) throw std::invalid_argument("--samples must be >= 0");
            emit_plots(load_record(record_path), static_cast<std::size_t>(samples));
            std::printf("wrote %lld plot pairs\n", samples);
            return 0;
        }
        if (c_distort->parsed()) {
            DistortionSpec spec;
            spec.kind = distortion_kind_from_string(d_kind);
            spec.k = d_k;
            if (d_len < 0) throw std::invalid_argument("--length must be >= 0");
            spec.length = static_cast<std::size_t>(d_len);
            if (spec.kind == DistortionKind::DynamicAmplification ||
                spec.kind == DistortionKind::DynamicTimeScale)
                spec.h = [d_ha, d_hb](double t) { return d_ha + d_hb * t; };
            write_series_csv(d_out, apply(read_series_csv(d_in), spec));
            std::printf("wrote %s\n", d_out.c_str());
            return 0;
        }
        if (c_metrics->parsed()) {
            ForecastPair pair;
            pair.truth = read_series_csv(m_truth);
            pair.pred = read_series_csv(m_pred);
            validate_pair(pair);
            LcssConfig lc = default_lcss_config(pair);
            if (m_eps > 0.0) lc.epsilon = m_eps;
            if (m_delta > 0) lc.delta = static_cast<std::size_t>(m_delta);
            const DtwResult d = dtw(pair);
            std::printf("mse,dtw,tdi,lcss\n%.17g,%.17g,%.17g,%.17g\n", mse(pair).value, d.value,
                        tdi(d.path), lcss(pair, lc));
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
