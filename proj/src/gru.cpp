#include "tildeq/gru.hpp"

#include "tildeq/kernels.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tildeq {

GruForecaster GruForecaster::init(std::size_t hidden_size, Rng& rng) {
    if (hidden_size < 1) throw std::invalid_argument("hidden size must be >= 1");
    GruForecaster m;
    m.hidden_size = hidden_size;
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    const auto fill = [&](std::vector<double>& v, std::size_t n) {
        v.resize(n);
        for (double& x : v) x = rng.uniform(-bound, bound);
    };
    const auto cell = [&](GruCellParams& c) {
        const std::size_t h = hidden_size;
        c.wz = Matrix::zeros(h, 1);
        c.wr = Matrix::zeros(h, 1);
        c.wh = Matrix::zeros(h, 1);
        c.uz = Matrix::zeros(h, h);
        c.ur = Matrix::zeros(h, h);
        c.uh = Matrix::zeros(h, h);
        fill(c.wz.data, h);
        fill(c.wr.data, h);
        fill(c.wh.data, h);
        fill(c.uz.data, h * h);
        fill(c.ur.data, h * h);
        fill(c.uh.data, h * h);
        fill(c.bz, h);
        fill(c.br, h);
        fill(c.bh, h);
    };
    cell(m.encoder);
    cell(m.decoder);
    m.wo = Matrix::zeros(1, hidden_size);
    fill(m.wo.data, hidden_size);
    fill(m.bo, 1);
    return m;
}

namespace {

template <typename Model, typename Vec>
std::vector<Vec*> blocks_impl(Model& m) {
    const auto cell = [](auto& c, std::vector<Vec*>& out) {
        out.push_back(&c.wz.data);
        out.push_back(&c.wr.data);
        out.push_back(&c.wh.data);
        out.push_back(&c.uz.data);
        out.push_back(&c.ur.data);
        out.push_back(&c.uh.data);
        out.push_back(&c.bz);
        out.push_back(&c.br);
        out.push_back(&c.bh);
    };
    std::vector<Vec*> out;
    out.reserve(20);
    cell(m.encoder, out);
    cell(m.decoder, out);
    out.push_back(&m.wo.data);
    out.push_back(&m.bo);
    return out;
}

} // namespace

std::vector<std::vector<double>*> parameter_blocks(GruForecaster& model) {
    return blocks_impl<GruForecaster, std::vector<double>>(model);
}

std::vector<const std::vector<double>*> parameter_blocks(const GruForecaster& model) {
    return blocks_impl<const GruForecaster, const std::vector<double>>(model);
}

std::size_t parameter_count(const GruForecaster& model) {
    std::size_t n = 0;
    for (const auto* b : parameter_blocks(model)) n += b->size();
    return n;
}

namespace {

// Block indices within the declaration order.
enum BlockIdx : std::size_t {
    kEnc = 0,
    kDec = 9,
    kWo = 18,
    kBo = 19,
    kWz = 0,
    kWr = 1,
    kWh = 2,
    kUz = 3,
    kUr = 4,
    kUh = 5,
    kBz = 6,
    kBr = 7,
    kBh = 8,
};

struct CellScratch {
    std::vector<double> z, r, hc, t1, t2;
};

// h <- GRU(h, x) with scalar input x, untaped.
void cell_forward(const GruCellParams& p, double x, std::vector<double>& h, CellScratch& s) {
    const std::size_t n = h.size();
    s.z.resize(n);
    s.r.resize(n);
    s.hc.resize(n);
    s.t1.resize(n);
    s.t2.resize(n);
    // z = sigmoid(wz*x + Uz h + bz)
    kernels::matvec(p.uz.data.data(), h.data(), s.t1.data(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        s.z[i] = 1.0 / (1.0 + std::exp(-(p.wz.data[i] * x + s.t1[i] + p.bz[i])));
    // r = sigmoid(wr*x + Ur h + br)
    kernels::matvec(p.ur.data.data(), h.data(), s.t1.data(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        s.r[i] = 1.0 / (1.0 + std::exp(-(p.wr.data[i] * x + s.t1[i] + p.br[i])));
    // hc = tanh(wh*x + Uh (r . h) + bh)
    kernels::mul(s.r.data(), h.data(), s.t2.data(), n);
    kernels::matvec(p.uh.data.data(), s.t2.data(), s.t1.data(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        s.hc[i] = std::tanh(p.wh.data[i] * x + s.t1[i] + p.bh[i]);
    // h = (1 - z) . h + z . hc
    for (std::size_t i = 0; i < n; ++i) h[i] = (1.0 - s.z[i]) * h[i] + s.z[i] * s.hc[i];
}

} // namespace

Series forward(const GruForecaster& model, const Series& input, std::size_t horizon) {
    validate_series(input);
    if (horizon < 1) throw std::invalid_argument("forecast horizon must be >= 1");
    const std::size_t h = model.hidden_size;
    std::vector<double> state(h, 0.0);
    CellScratch scratch;
    for (double x : input.values) cell_forward(model.encoder, x, state, scratch);
    Series out;
    out.values.reserve(horizon);
    double prev = input.values.back();
    for (std::size_t step = 0; step < horizon; ++step) {
        cell_forward(model.decoder, prev, state, scratch);
        prev = kernels::dot(model.wo.data.data(), state.data(), h) + model.bo[0];
        out.values.push_back(prev);
    }
    for (double v : out.values)
        if (!std::isfinite(v)) throw std::runtime_error("numeric divergence: non-finite forecast");
    return out;
}

std::vector<Tape::NodeId> register_params(Tape& tape, const GruForecaster& model) {
    std::vector<Tape::NodeId> ids;
    ids.reserve(20);
    for (const auto* b : parameter_blocks(model)) ids.push_back(tape.leaf(*b));
    return ids;
}

Tape::NodeId forward_taped(Tape& tape, const std::vector<Tape::NodeId>& param_leaves,
                           std::size_t hidden_size, const Series& input, std::size_t horizon) {
    validate_series(input);
    if (horizon < 1) throw std::invalid_argument("forecast horizon must be >= 1");
    if (param_leaves.size() != 20)
        throw std::invalid_argument("expected 20 parameter leaves in declaration order");
    const std::size_t h = hidden_size;
    const Tape::NodeId ones = tape.leaf(std::vector<double>(h, 1.0));

    // one GRU step: state and x are node ids, cell blocks start at `base`
    const auto cell = [&](Tape::NodeId state, Tape::NodeId x, std::size_t base) {
        const auto gate_pre = [&](std::size_t w, std::size_t u, std::size_t b, Tape::NodeId hin) {
            const Tape::NodeId wx = tape.matvec(param_leaves[base + w], h, 1, x);
            const Tape::NodeId uh = tape.matvec(param_leaves[base + u], h, h, hin);
            return tape.add(tape.add(wx, uh), param_leaves[base + b]);
        };
        const Tape::NodeId z = tape.sigmoid(gate_pre(kWz, kUz, kBz, state));
        const Tape::NodeId r = tape.sigmoid(gate_pre(kWr, kUr, kBr, state));
        const Tape::NodeId rh = tape.mul(r, state);
        const Tape::NodeId hc = tape.tanh(gate_pre(kWh, kUh, kBh, rh));
        return tape.add(tape.mul(tape.sub(ones, z), state), tape.mul(z, hc));
    };

    Tape::NodeId state = tape.leaf(std::vector<double>(h, 0.0));
    for (double x : input.values) state = cell(state, tape.leaf({x}), kEnc);
    Tape::NodeId prev = tape.leaf({input.values.back()});
    std::vector<Tape::NodeId> outputs;
    outputs.reserve(horizon);
    for (std::size_t step = 0; step < horizon; ++step) {
        state = cell(state, prev, kDec);
        prev = tape.add(tape.matvec(param_leaves[kWo], 1, h, state), param_leaves[kBo]);
        outputs.push_back(prev);
    }
    const Tape::NodeId pred = tape.concat(outputs);
    for (double v : tape.value(pred))
        if (!std::isfinite(v)) throw std::runtime_error("numeric divergence: non-finite forecast");
    return pred;
}

AdamState make_adam_state(const GruForecaster& model) {
    AdamState st;
    for (const auto* b : parameter_blocks(model)) {
        st.m.emplace_back(b->size(), 0.0);
        st.v.emplace_back(b->size(), 0.0);
    }
    return st;
}

void validate(const TrainerConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (cfg.patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (cfg.max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (!(cfg.clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be positive");
}

void adam_update(GruForecaster& model, const std::vector<std::vector<double>>& grads,
                 AdamState& state, const TrainerConfig& cfg) {
    auto blocks = parameter_blocks(model);
    if (grads.size() != blocks.size())
        throw std::invalid_argument("gradient block count does not match the model");
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (grads[b].size() != blocks[b]->size())
            throw std::invalid_argument("gradient block " + std::to_string(b) + " has wrong size");
        kernels::ops().adam_step(blocks[b]->data(), state.m[b].data(), state.v[b].data(),
                                 grads[b].data(), grads[b].size(), cfg.learning_rate, cfg.beta1,
                                 cfg.beta2, cfg.eps, bc1, bc2);
    }
}

namespace {

double mean_loss(const GruForecaster& model, const WindowedDataset& data, const LossFn& loss) {
    double total = 0.0;
    for (const auto& item : data.items) {
        ForecastPair pair;
        pair.truth = item.target;
        pair.pred = forward(model, item.input, item.target.length());
        total += loss(pair).value;
    }
    return total / static_cast<double>(data.items.size());
}

} // namespace

TrainReport train(GruForecaster& model, const WindowedDataset& train_data,
                  const WindowedDataset& val_data, const LossFn& loss, const TrainerConfig& cfg) {
    validate(cfg);
    if (train_data.items.empty() || val_data.items.empty())
        throw std::invalid_argument("training requires nonempty train and val splits");
    const std::size_t horizon = train_data.target_length();

    Rng rng(cfg.seed);
    AdamState adam = make_adam_state(model);
    TrainReport report;
    GruForecaster best = model;
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0;
    std::size_t stale = 0;

    std::vector<std::size_t> order(train_data.items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        double train_total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, order.size() - start);
            Tape tape;
            const auto leaves = register_params(tape, model);
            std::vector<std::pair<Tape::NodeId, std::vector<double>>> seeds;
            seeds.reserve(count);
            for (std::size_t k = 0; k < count; ++k) {
                const auto& item = train_data.items[order[start + k]];
                const Tape::NodeId pred =
                    forward_taped(tape, leaves, model.hidden_size, item.input, horizon);
                ForecastPair pair;
                pair.truth = item.target;
                pair.pred = Series(tape.value(pred));
                LossValueGrad lv = loss(pair);
                train_total += lv.value;
                kernels::scale(1.0 / static_cast<double>(count), lv.grad.values.data(),
                               lv.grad.values.data(), horizon);
                seeds.emplace_back(pred, std::move(lv.grad.values));
            }
            tape.backward(seeds);

            std::vector<std::vector<double>> grads;
            grads.reserve(leaves.size());
            double norm_sq = 0.0;
            for (const Tape::NodeId id : leaves) {
                grads.push_back(tape.grad(id));
                norm_sq += kernels::sumsq(grads.back().data(), grads.back().size());
            }
            const double norm = std::sqrt(norm_sq);
            if (norm > cfg.clip_norm) {
                const double scale = cfg.clip_norm / norm;
                for (auto& g : grads) kernels::scale(scale, g.data(), g.data(), g.size());
                ++report.clip_events;
            }
            adam_update(model, grads, adam, cfg);
        }
        const double train_loss = train_total / static_cast<double>(order.size());
        const double val_loss = mean_loss(model, val_data, loss);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw std::runtime_error("numeric divergence at epoch " + std::to_string(epoch) +
                                     ": train loss " + std::to_string(train_loss) + ", val loss " +
                                     std::to_string(val_loss));
        report.train_curve.push_back(train_loss);
        report.val_curve.push_back(val_loss);
        report.epochs_run = epoch;

        if (val_loss < best_val) {
            best_val = val_loss;
            best = model;
            best_epoch = epoch;
            stale = 0;
        } else {
            ++stale;
            if (stale >= cfg.patience) break;
        }
    }

    model = best; // restore the best-validation parameters
    report.best_epoch = best_epoch;
    report.best_val = best_val;
    return report;
}

namespace {

constexpr char kMagic[8] = {'T', 'Q', 'G', 'R', 'U', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

} // namespace

void save_checkpoint(const GruForecaster& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out.write(kMagic, sizeof kMagic);
    const std::uint32_t version = kVersion;
    const auto hidden = static_cast<std::uint32_t>(model.hidden_size);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&hidden), sizeof hidden);
    for (const auto* b : parameter_blocks(model))
        out.write(reinterpret_cast<const char*>(b->data()),
                  static_cast<std::streamsize>(b->size() * sizeof(double)));
    if (!out) throw std::runtime_error(path + ": checkpoint write failed");
}

GruForecaster load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error(path + ": not a parameter checkpoint (bad magic)");
    std::uint32_t version = 0, hidden = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&hidden), sizeof hidden);
    if (!in || version != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
    if (hidden < 1) throw std::runtime_error(path + ": corrupt checkpoint header");
    Rng dummy(0);
    GruForecaster model = GruForecaster::init(hidden, dummy);
    for (auto* b : parameter_blocks(model)) {
        in.read(reinterpret_cast<char*>(b->data()),
                static_cast<std::streamsize>(b->size() * sizeof(double)));
        if (!in) throw std::runtime_error(path + ": truncated checkpoint");
    }
    char extra = 0;
    if (in.read(&extra, 1))
        throw std::runtime_error(path + ": trailing bytes after parameter blocks");
    return model;
}

} // namespace tildeq
