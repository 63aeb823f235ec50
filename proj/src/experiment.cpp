#include "tildeq/experiment.hpp"

#include "tildeq/kernels.hpp"
#include "tildeq/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tildeq {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::size_t to_size(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<std::size_t>(x);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "' needs a nonnegative integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "' needs a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config key '" + key + "' needs true or false, got '" + v + "'");
}

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])) != 0) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])) != 0) --b;
    return s.substr(a, b - a);
}

} // namespace

std::vector<std::string> config_keys() {
    return {"dataset",      "data_path",    "synthetic_family", "n",
            "L",            "split",        "normalize",        "train_count",
            "val_count",    "test_count",   "loss",             "alpha",
            "gamma",        "dominant_count", "norm_p",         "phase_mode",
            "ncc_mean_center", "dilate_alpha", "dilate_smoothing", "hidden_size",
            "learning_rate", "max_epochs",  "patience",         "batch_size",
            "clip_norm",    "repeats",      "base_seed",        "out_dir",
            "lcss_epsilon", "lcss_delta"};
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const std::string v = trimmed(value);
    if (key == "dataset") cfg.dataset = v;
    else if (key == "data_path") cfg.data_path = v;
    else if (key == "synthetic_family") cfg.synthetic_family = v;
    else if (key == "n") cfg.n = to_size(key, v);
    else if (key == "L") cfg.L = to_size(key, v);
    else if (key == "split") {
        double parts[3];
        std::size_t at = 0;
        std::stringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (at >= 3) throw std::invalid_argument("config key 'split' needs three comma-separated fractions");
            parts[at++] = to_double(key, trimmed(tok));
        }
        if (at != 3) throw std::invalid_argument("config key 'split' needs three comma-separated fractions");
        cfg.split = {parts[0], parts[1], parts[2]};
    }
    else if (key == "normalize") cfg.normalize = to_bool(key, v);
    else if (key == "train_count") cfg.train_count = to_size(key, v);
    else if (key == "val_count") cfg.val_count = to_size(key, v);
    else if (key == "test_count") cfg.test_count = to_size(key, v);
    else if (key == "loss") cfg.loss = v;
    else if (key == "alpha") cfg.tq.alpha = to_double(key, v);
    else if (key == "gamma") cfg.tq.gamma = to_double(key, v);
    else if (key == "dominant_count") cfg.tq.dominant_count = to_size(key, v);
    else if (key == "norm_p") cfg.tq.norm_p = static_cast<int>(to_size(key, v));
    else if (key == "phase_mode") {
        if (v == "magnitude") cfg.tq.phase_magnitude_mode = true;
        else if (v == "complex") cfg.tq.phase_magnitude_mode = false;
        else throw std::invalid_argument("config key 'phase_mode' needs magnitude or complex");
    }
    else if (key == "ncc_mean_center") cfg.tq.ncc_mean_center = to_bool(key, v);
    else if (key == "dilate_alpha") cfg.dl.alpha = to_double(key, v);
    else if (key == "dilate_smoothing") cfg.dl.smoothing = to_double(key, v);
    else if (key == "hidden_size") cfg.hidden_size = to_size(key, v);
    else if (key == "learning_rate") cfg.trainer.learning_rate = to_double(key, v);
    else if (key == "max_epochs") cfg.trainer.max_epochs = to_size(key, v);
    else if (key == "patience") cfg.trainer.patience = to_size(key, v);
    else if (key == "batch_size") cfg.trainer.batch_size = to_size(key, v);
    else if (key == "clip_norm") cfg.trainer.clip_norm = to_double(key, v);
    else if (key == "repeats") cfg.repeats = to_size(key, v);
    else if (key == "base_seed") cfg.base_seed = static_cast<std::uint64_t>(to_size(key, v));
    else if (key == "out_dir") cfg.out_dir = v;
    else if (key == "lcss_epsilon") cfg.lcss_epsilon = to_double(key, v);
    else if (key == "lcss_delta") cfg.lcss_delta = to_size(key, v);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                        ": expected key=value, got '" + t + "'");
        const std::string key = trimmed(t.substr(0, eq));
        try {
            apply_override(cfg, key, t.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_env_overrides(ExperimentConfig& cfg) {
    for (const std::string& key : config_keys()) {
        std::string env = "TILDEQ_";
        for (char c : key) env.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (const char* v = std::getenv(env.c_str())) apply_override(cfg, key, v);
    }
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.dataset != "synthetic" && cfg.dataset != "ecg5000" && cfg.dataset != "traffic" &&
        cfg.dataset != "custom")
        throw std::invalid_argument("dataset must be synthetic, ecg5000, traffic or custom");
    if (cfg.dataset == "synthetic") {
        if (cfg.synthetic_family != "peaks" && cfg.synthetic_family != "sinusoids")
            throw std::invalid_argument("synthetic_family must be peaks or sinusoids");
        if (cfg.train_count < 1 || cfg.val_count < 1 || cfg.test_count < 1)
            throw std::invalid_argument("synthetic counts must be >= 1");
    } else {
        if (cfg.data_path.empty())
            throw std::invalid_argument("dataset '" + cfg.dataset + "' needs data_path");
        if (cfg.dataset == "custom") {
            if (cfg.n < 1 || cfg.L < 1)
                throw std::invalid_argument("custom dataset needs n >= 1 and L >= 1");
            validate_split(cfg.split);
        }
    }
    make_loss(cfg.loss, cfg.tq, cfg.dl); // throws on bad loss name or configs
    if (cfg.hidden_size < 1) throw std::invalid_argument("hidden_size must be >= 1");
    validate(cfg.trainer);
    if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    if (cfg.lcss_epsilon < 0.0) throw std::invalid_argument("lcss_epsilon must be >= 0");
    if (cfg.out_dir.empty()) throw std::invalid_argument("out_dir must be nonempty");
}

SplitDataset build_dataset(const ExperimentConfig& cfg, Rng& rng) {
    if (cfg.dataset == "synthetic") {
        const std::size_t n = (cfg.n != 0) ? cfg.n : 20;
        const std::size_t L = (cfg.L != 0) ? cfg.L : 40;
        WindowedDataset all;
        if (cfg.synthetic_family == "peaks") {
            SyntheticSpec spec;
            spec.count_train = cfg.train_count;
            spec.count_val = cfg.val_count;
            spec.count_test = cfg.test_count;
            spec.input_len = n;
            spec.horizon = L;
            all = generate_synthetic(spec, rng);
        } else {
            SinusoidSpec spec;
            spec.count_train = cfg.train_count;
            spec.count_val = cfg.val_count;
            spec.count_test = cfg.test_count;
            spec.input_len = n;
            spec.horizon = L;
            all = generate_sinusoids(spec, rng);
        }
        SplitDataset splits = split_by_counts(all, cfg.train_count, cfg.val_count);
        return cfg.normalize ? normalize_splits(splits) : splits;
    }
    DatasetPreset p;
    if (cfg.dataset == "custom") {
        p.name = "custom";
        p.n = cfg.n;
        p.L = cfg.L;
        p.split = cfg.split;
        p.segmented = false;
    } else {
        p = preset(cfg.dataset);
        if (cfg.n != 0) p.n = cfg.n;
        if (cfg.L != 0) p.L = cfg.L;
    }
    SplitDataset splits = load_csv_dataset(cfg.data_path, p);
    return cfg.normalize ? normalize_splits(splits) : splits;
}

EvalMetrics evaluate_model(const GruForecaster& model, const WindowedDataset& test,
                           double lcss_epsilon, std::size_t lcss_delta) {
    if (test.items.empty()) throw std::invalid_argument("evaluation needs a nonempty test split");
    EvalMetrics total;
    for (const auto& item : test.items) {
        ForecastPair pair;
        pair.truth = item.target;
        pair.pred = forward(model, item.input, item.target.length());
        total.mse += mse(pair).value;
        const DtwResult d = dtw(pair);
        total.dtw += d.value;
        total.tdi += tdi(d.path);
        LcssConfig lc = default_lcss_config(pair);
        if (lcss_epsilon > 0.0) lc.epsilon = lcss_epsilon;
        if (lcss_delta > 0) lc.delta = lcss_delta;
        total.lcss += lcss(pair, lc);
    }
    const double count = static_cast<double>(test.items.size());
    total.mse /= count;
    total.dtw /= count;
    total.tdi /= count;
    total.lcss /= count;
    return total;
}

namespace {

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

MetricSummary summarize(const std::vector<double>& xs) {
    MetricSummary s;
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
    return s;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["dataset"] = c.dataset;
    j["data_path"] = c.data_path;
    j["synthetic_family"] = c.synthetic_family;
    j["n"] = c.n;
    j["L"] = c.L;
    j["split"] = {c.split.train_fraction, c.split.val_fraction, c.split.test_fraction};
    j["normalize"] = c.normalize;
    j["train_count"] = c.train_count;
    j["val_count"] = c.val_count;
    j["test_count"] = c.test_count;
    j["loss"] = c.loss;
    j["alpha"] = c.tq.alpha;
    j["gamma"] = c.tq.gamma;
    j["dominant_count"] = c.tq.dominant_count;
    j["norm_p"] = c.tq.norm_p;
    j["phase_mode"] = c.tq.phase_magnitude_mode ? "magnitude" : "complex";
    j["ncc_mean_center"] = c.tq.ncc_mean_center;
    j["dilate_alpha"] = c.dl.alpha;
    j["dilate_smoothing"] = c.dl.smoothing;
    j["hidden_size"] = c.hidden_size;
    j["learning_rate"] = c.trainer.learning_rate;
    j["max_epochs"] = c.trainer.max_epochs;
    j["patience"] = c.trainer.patience;
    j["batch_size"] = c.trainer.batch_size;
    j["clip_norm"] = c.trainer.clip_norm;
    j["repeats"] = c.repeats;
    j["base_seed"] = c.base_seed;
    j["out_dir"] = c.out_dir;
    j["lcss_epsilon"] = c.lcss_epsilon;
    j["lcss_delta"] = c.lcss_delta;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.dataset = j.at("dataset").get<std::string>();
    c.data_path = j.at("data_path").get<std::string>();
    c.synthetic_family = j.at("synthetic_family").get<std::string>();
    c.n = j.at("n").get<std::size_t>();
    c.L = j.at("L").get<std::size_t>();
    const auto& sp = j.at("split");
    c.split = {sp.at(0).get<double>(), sp.at(1).get<double>(), sp.at(2).get<double>()};
    c.normalize = j.at("normalize").get<bool>();
    c.train_count = j.at("train_count").get<std::size_t>();
    c.val_count = j.at("val_count").get<std::size_t>();
    c.test_count = j.at("test_count").get<std::size_t>();
    c.loss = j.at("loss").get<std::string>();
    c.tq.alpha = j.at("alpha").get<double>();
    c.tq.gamma = j.at("gamma").get<double>();
    c.tq.dominant_count = j.at("dominant_count").get<std::size_t>();
    c.tq.norm_p = j.at("norm_p").get<int>();
    c.tq.phase_magnitude_mode = j.at("phase_mode").get<std::string>() == "magnitude";
    c.tq.ncc_mean_center = j.at("ncc_mean_center").get<bool>();
    c.dl.alpha = j.at("dilate_alpha").get<double>();
    c.dl.smoothing = j.at("dilate_smoothing").get<double>();
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.trainer.learning_rate = j.at("learning_rate").get<double>();
    c.trainer.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.trainer.patience = j.at("patience").get<std::size_t>();
    c.trainer.batch_size = j.at("batch_size").get<std::size_t>();
    c.trainer.clip_norm = j.at("clip_norm").get<double>();
    c.repeats = j.at("repeats").get<std::size_t>();
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    c.out_dir = j.at("out_dir").get<std::string>();
    c.lcss_epsilon = j.at("lcss_epsilon").get<double>();
    c.lcss_delta = j.at("lcss_delta").get<std::size_t>();
    return c;
}

json record_to_json(const ResultRecord& r) {
    json j;
    j["version"] = r.version;
    j["created"] = r.created;
    j["duration_seconds"] = r.duration_seconds;
    j["config"] = config_to_json(r.config);
    json seeds = json::array();
    json reps = json::array();
    for (const auto& rep : r.repeats) {
        seeds.push_back(rep.seed);
        json e;
        e["repeat"] = rep.repeat;
        e["seed"] = rep.seed;
        e["status"] = rep.ok ? "ok" : "failed";
        e["error"] = rep.error;
        e["mse"] = rep.metrics.mse;
        e["dtw"] = rep.metrics.dtw;
        e["tdi"] = rep.metrics.tdi;
        e["lcss"] = rep.metrics.lcss;
        e["epochs_run"] = rep.epochs_run;
        e["best_epoch"] = rep.best_epoch;
        e["best_val"] = rep.best_val;
        e["clip_events"] = rep.clip_events;
        e["checkpoint"] = rep.checkpoint;
        reps.push_back(std::move(e));
    }
    j["seeds"] = std::move(seeds);
    j["repeats"] = std::move(reps);
    json summary;
    const auto metric = [](const MetricSummary& m) {
        json s;
        s["mean"] = m.mean;
        s["std"] = m.stddev;
        return s;
    };
    summary["mse"] = metric(r.mse);
    summary["dtw"] = metric(r.dtw);
    summary["tdi"] = metric(r.tdi);
    summary["lcss"] = metric(r.lcss);
    summary["succeeded"] = r.succeeded;
    summary["failed"] = r.failed;
    j["summary"] = std::move(summary);
    json meta;
    meta["metrics_scale"] = "model working scale (z-scored when normalize=true)";
    meta["lcss_rule"] = "epsilon=0.1*std(truth) per pair unless lcss_epsilon>0; delta=horizon unless lcss_delta>0";
    meta["std_rule"] = "population std over succeeded repeats";
    meta["simd"] = kernels::active_isa();
    j["metadata"] = std::move(meta);
    return j;
}

ResultRecord record_from_json(const json& j) {
    ResultRecord r;
    r.version = j.at("version").get<std::string>();
    r.created = j.at("created").get<std::string>();
    r.duration_seconds = j.at("duration_seconds").get<double>();
    r.config = config_from_json(j.at("config"));
    for (const auto& e : j.at("repeats")) {
        RepeatResult rep;
        rep.repeat = e.at("repeat").get<std::size_t>();
        rep.seed = e.at("seed").get<std::uint64_t>();
        rep.ok = e.at("status").get<std::string>() == "ok";
        rep.error = e.at("error").get<std::string>();
        rep.metrics.mse = e.at("mse").get<double>();
        rep.metrics.dtw = e.at("dtw").get<double>();
        rep.metrics.tdi = e.at("tdi").get<double>();
        rep.metrics.lcss = e.at("lcss").get<double>();
        rep.epochs_run = e.at("epochs_run").get<std::size_t>();
        rep.best_epoch = e.at("best_epoch").get<std::size_t>();
        rep.best_val = e.at("best_val").get<double>();
        rep.clip_events = e.at("clip_events").get<std::size_t>();
        rep.checkpoint = e.at("checkpoint").get<std::string>();
        r.repeats.push_back(std::move(rep));
    }
    const auto& s = j.at("summary");
    const auto metric = [](const json& m) {
        MetricSummary out;
        out.mean = m.at("mean").get<double>();
        out.stddev = m.at("std").get<double>();
        return out;
    };
    r.mse = metric(s.at("mse"));
    r.dtw = metric(s.at("dtw"));
    r.tdi = metric(s.at("tdi"));
    r.lcss = metric(s.at("lcss"));
    r.succeeded = s.at("succeeded").get<std::size_t>();
    r.failed = s.at("failed").get<std::size_t>();
    return r;
}

void write_metrics_csv(const std::string& path, const ResultRecord& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    char buf[256];
    out << "repeat,seed,status,mse,dtw,tdi,lcss\n";
    for (const auto& rep : r.repeats) {
        std::snprintf(buf, sizeof buf, "%zu,%llu,%s,%.17g,%.17g,%.17g,%.17g\n", rep.repeat,
                      static_cast<unsigned long long>(rep.seed), rep.ok ? "ok" : "failed",
                      rep.metrics.mse, rep.metrics.dtw, rep.metrics.tdi, rep.metrics.lcss);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "mean,,,%.17g,%.17g,%.17g,%.17g\n", r.mse.mean, r.dtw.mean,
                  r.tdi.mean, r.lcss.mean);
    out << buf;
    std::snprintf(buf, sizeof buf, "std,,,%.17g,%.17g,%.17g,%.17g\n", r.mse.stddev, r.dtw.stddev,
                  r.tdi.stddev, r.lcss.stddev);
    out << buf;
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace

std::string to_json_text(const ResultRecord& record) { return record_to_json(record).dump(2) + "\n"; }

ResultRecord record_from_json_text(const std::string& text) {
    return record_from_json(json::parse(text));
}

ResultRecord load_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open record");
    std::stringstream buf;
    buf << in.rdbuf();
    return record_from_json_text(buf.str());
}

ResultRecord run(const ExperimentConfig& config) {
    validate(config);
    fs::create_directories(config.out_dir);
    const auto t0 = std::chrono::steady_clock::now();

    ResultRecord record;
    record.config = config;
    record.created = timestamp_utc();
    const LossFn loss = make_loss(config.loss, config.tq, config.dl);

    std::vector<double> ms, ds, ts, ls;
    for (std::size_t i = 0; i < config.repeats; ++i) {
        RepeatResult rep;
        rep.repeat = i;
        rep.seed = config.base_seed + i;
        try {
            Rng rng(rep.seed);
            const SplitDataset data = build_dataset(config, rng);
            GruForecaster model = GruForecaster::init(config.hidden_size, rng);
            TrainerConfig tc = config.trainer;
            tc.seed = rng.next_u64();
            const TrainReport tr = train(model, data.train, data.val, loss, tc);
            rep.epochs_run = tr.epochs_run;
            rep.best_epoch = tr.best_epoch;
            rep.best_val = tr.best_val;
            rep.clip_events = tr.clip_events;
            rep.metrics = evaluate_model(model, data.test, config.lcss_epsilon, config.lcss_delta);
            rep.checkpoint = "ckpt_r" + std::to_string(i) + ".bin";
            save_checkpoint(model, (fs::path(config.out_dir) / rep.checkpoint).string());
            rep.ok = true;
            ms.push_back(rep.metrics.mse);
            ds.push_back(rep.metrics.dtw);
            ts.push_back(rep.metrics.tdi);
            ls.push_back(rep.metrics.lcss);
            ++record.succeeded;
        } catch (const std::exception& e) {
            rep.ok = false;
            rep.error = e.what();
            ++record.failed;
        }
        record.repeats.push_back(std::move(rep));
    }
    record.mse = summarize(ms);
    record.dtw = summarize(ds);
    record.tdi = summarize(ts);
    record.lcss = summarize(ls);
    record.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(fs::path(config.out_dir) / "results.json");
    if (!out) throw std::runtime_error(config.out_dir + "/results.json: cannot open for writing");
    out << to_json_text(record);
    if (!out) throw std::runtime_error(config.out_dir + "/results.json: write failed");
    write_metrics_csv((fs::path(config.out_dir) / "metrics.csv").string(), record);
    return record;
}

namespace {

std::string alpha_label(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    std::string s = buf;
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

} // namespace

std::vector<ResultRecord> ablate_alpha(const ExperimentConfig& base,
                                       const std::vector<double>& alphas) {
    if (alphas.empty())
        throw std::invalid_argument("usage: ablation needs at least one alpha in [0,1]");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("usage: ablation alphas must lie in [0,1]");
    validate(base);

    std::vector<std::string> labels;
    std::vector<ResultRecord> records;
    const auto run_variant = [&](const std::string& label, const ExperimentConfig& cfg) {
        labels.push_back(label);
        records.push_back(run(cfg));
    };
    for (double a : alphas) {
        ExperimentConfig cfg = base;
        cfg.loss = "tilde_q";
        cfg.tq.alpha = a;
        cfg.out_dir = (fs::path(base.out_dir) / ("alpha_" + alpha_label(a))).string();
        run_variant("alpha=" + std::to_string(a).substr(0, 8), cfg);
    }
    for (const char* single : {"ashift_only", "phase_only", "amp_only"}) {
        ExperimentConfig cfg = base;
        cfg.loss = single;
        cfg.out_dir = (fs::path(base.out_dir) / single).string();
        run_variant(single, cfg);
    }

    fs::create_directories(base.out_dir);
    const std::string path = (fs::path(base.out_dir) / "ablation.csv").string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "variant,mse_mean,mse_std,dtw_mean,dtw_std,tdi_mean,tdi_std,lcss_mean,lcss_std\n";
    char buf[320];
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ResultRecord& r = records[i];
        std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                      labels[i].c_str(), r.mse.mean, r.mse.stddev, r.dtw.mean, r.dtw.stddev,
                      r.tdi.mean, r.tdi.stddev, r.lcss.mean, r.lcss.stddev);
        out << buf;
    }
    if (!out) throw std::runtime_error(path + ": write failed");
    return records;
}

namespace {

std::string svg_path(const std::vector<double>& ys, double x0, double x1, double y_lo, double y_hi,
                     double h, double w) {
    // map sample index to [x0, x1], value to [h-margin, margin] (y grows down)
    std::string d;
    char buf[64];
    const std::size_t n = ys.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double fx = (n == 1) ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        const double x = x0 + fx * (x1 - x0);
        const double fy = (ys[i] - y_lo) / (y_hi - y_lo);
        const double y = h - 20.0 - fy * (h - 40.0);
        std::snprintf(buf, sizeof buf, "%c%.2f %.2f ", i == 0 ? 'M' : 'L', x, y);
        d += buf;
    }
    (void)w;
    if (!d.empty() && d.back() == ' ') d.pop_back();
    return d;
}

} // namespace

void emit_plots(const ResultRecord& record, std::size_t samples) {
    if (samples == 0) return;
    const RepeatResult* chosen = nullptr;
    for (const auto& rep : record.repeats)
        if (rep.ok) {
            chosen = &rep;
            break;
        }
    if (chosen == nullptr)
        throw std::runtime_error("missing checkpoint: no succeeded repeat in this record");
    const fs::path ckpt = fs::path(record.config.out_dir) / chosen->checkpoint;
    if (!fs::exists(ckpt))
        throw std::runtime_error("missing checkpoint: " + ckpt.string());
    const GruForecaster model = load_checkpoint(ckpt.string());

    Rng rng(chosen->seed);
    const SplitDataset data = build_dataset(record.config, rng);
    if (samples > data.test.size())
        throw std::invalid_argument("requested " + std::to_string(samples) +
                                    " plot samples but the test split holds " +
                                    std::to_string(data.test.size()));

    const fs::path dir = fs::path(record.config.out_dir) / "plots";
    fs::create_directories(dir);
    for (std::size_t k = 0; k < samples; ++k) {
        const auto& item = data.test.items[k];
        const Series pred = forward(model, item.input, item.target.length());
        const std::string base = "item" + std::to_string(k);

        std::ofstream csv(dir / (base + ".csv"));
        if (!csv) throw std::runtime_error((dir / (base + ".csv")).string() + ": cannot open");
        csv << "t,truth,prediction\n";
        char buf[96];
        for (std::size_t t = 0; t < pred.length(); ++t) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, item.target[t], pred[t]);
            csv << buf;
        }

        double lo = item.target[0], hi = item.target[0];
        for (double v : item.target.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (double v : pred.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) {
            lo -= 1.0;
            hi += 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
        const double w = 640.0, h = 320.0;
        std::ofstream svg(dir / (base + ".svg"));
        if (!svg) throw std::runtime_error((dir / (base + ".svg")).string() + ": cannot open");
        svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"320\" "
               "viewBox=\"0 0 640 320\">\n"
            << "  <rect width=\"640\" height=\"320\" fill=\"white\"/>\n"
            << "  <path d=\"" << svg_path(item.target.values, 40.0, 620.0, lo, hi, h, w)
            << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n"
            << "  <path d=\"" << svg_path(pred.values, 40.0, 620.0, lo, hi, h, w)
            << "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n"
            << "  <text x=\"48\" y=\"24\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#1f77b4\">truth</text>\n"
            << "  <text x=\"96\" y=\"24\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"#d62728\">prediction</text>\n"
            << "</svg>\n";
        if (!svg) throw std::runtime_error((dir / (base + ".svg")).string() + ": write failed");
    }
}

} // namespace tildeq
