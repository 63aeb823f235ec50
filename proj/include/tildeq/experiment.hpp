#pragma once

// Experiment orchestration: key=value configuration with env/flag overrides,
// seeded multi-repeat training runs, alpha ablations, result persistence
// (JSON + CSV) and qualitative forecast plots (CSV + SVG).

#include "tildeq/data.hpp"
#include "tildeq/gru.hpp"
#include "tildeq/losses.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tildeq {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ExperimentConfig {
    std::string dataset = "synthetic"; // synthetic | ecg5000 | traffic | custom
    std::string data_path;             // source CSV for file-backed datasets
    std::string synthetic_family = "peaks"; // peaks | sinusoids
    std::size_t n = 0;                 // input length (0 = dataset default)
    std::size_t L = 0;                 // horizon (0 = dataset default)
    SplitSpec split;                   // custom dataset fractions
    bool normalize = true;
    std::size_t train_count = 500; // synthetic families
    std::size_t val_count = 500;
    std::size_t test_count = 500;
    std::string loss = "tilde_q";
    TildeQConfig tq;
    DilateConfig dl;
    std::size_t hidden_size = 128;
    TrainerConfig trainer; // seed field is derived per repeat, not configured
    std::size_t repeats = 10;
    std::uint64_t base_seed = 1;
    std::string out_dir = "out";
    double lcss_epsilon = 0.0;  // 0 = per-pair 0.1*std(truth)
    std::size_t lcss_delta = 0; // 0 = horizon
};

// The documented key set, shared by config files, TILDEQ_* env overrides and
// CLI --set flags.
std::vector<std::string> config_keys();
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// '#' comments and blank lines ignored; every other line must be key=value.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig load_config_file(const std::string& path);
// TILDEQ_<KEY upper-cased> environment variables.
void apply_env_overrides(ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

// Deterministic per-repeat dataset construction (seed only affects the
// synthetic families; file-backed data is fixed).
SplitDataset build_dataset(const ExperimentConfig& cfg, Rng& rng);

struct EvalMetrics {
    double mse = 0.0;
    double dtw = 0.0;
    double tdi = 0.0;
    double lcss = 0.0;
};
// Mean metric values over all test items at the model's working scale.
EvalMetrics evaluate_model(const GruForecaster& model, const WindowedDataset& test,
                           double lcss_epsilon, std::size_t lcss_delta);

struct RepeatResult {
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error; // populated on failure
    EvalMetrics metrics;
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0;
    double best_val = 0.0;
    std::size_t clip_events = 0;
    std::string checkpoint; // file name inside out_dir
};

struct MetricSummary {
    double mean = 0.0;
    double stddev = 0.0; // population std over succeeded repeats
};

struct ResultRecord {
    std::string version = kToolkitVersion;
    std::string created;          // wall clock, ISO-8601 UTC
    double duration_seconds = 0.0; // wall clock
    ExperimentConfig config;
    std::vector<RepeatResult> repeats;
    MetricSummary mse, dtw, tdi, lcss;
    std::size_t succeeded = 0;
    std::size_t failed = 0;
};

// Trains and evaluates `config.repeats` seeded repeats (seed = base_seed +
// index), writes results.json, metrics.csv and per-repeat checkpoints into
// config.out_dir. A diverging repeat is recorded as failed and the run
// continues.
ResultRecord run(const ExperimentConfig& config);

// One run per alpha (loss forced to tilde_q) plus the three single-term
// variants, all sharing the base seeds; writes <out_dir>/ablation.csv.
// Throws a usage error when alphas is empty or leaves [0,1].
std::vector<ResultRecord> ablate_alpha(const ExperimentConfig& base,
                                       const std::vector<double>& alphas);

// Per sampled test item, writes plots/item<k>.csv (t,truth,prediction) and
// plots/item<k>.svg (one path per series) next to the record's outputs,
// using the first succeeded repeat's checkpoint. samples = 0 is a no-op.
void emit_plots(const ResultRecord& record, std::size_t samples);

std::string to_json_text(const ResultRecord& record);
ResultRecord record_from_json_text(const std::string& text);
ResultRecord load_record(const std::string& path);

} // namespace tildeq
