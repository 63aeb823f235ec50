#pragma once

// Sequence-to-sequence GRU forecaster on the reverse-mode tape, plus the
// Adam trainer with gradient clipping and early stopping, and flat binary
// parameter checkpoints.

#include "tildeq/autodiff.hpp"
#include "tildeq/losses.hpp"
#include "tildeq/rng.hpp"
#include "tildeq/series.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tildeq {

struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // row-major

    static Matrix zeros(std::size_t r, std::size_t c) {
        Matrix m;
        m.rows = r;
        m.cols = c;
        m.data.assign(r * c, 0.0);
        return m;
    }
};

// One GRU cell: update gate z, reset gate r, candidate state.
struct GruCellParams {
    Matrix wz, wr, wh;              // input weights, hidden x 1
    Matrix uz, ur, uh;              // recurrent weights, hidden x hidden
    std::vector<double> bz, br, bh; // gate biases, hidden each
};

struct GruForecaster {
    std::size_t hidden_size = 128;
    GruCellParams encoder;
    GruCellParams decoder;
    Matrix wo;              // output projection, 1 x hidden
    std::vector<double> bo; // output bias, size 1

    // All parameters drawn uniform(-1/sqrt(hidden), +1/sqrt(hidden)).
    static GruForecaster init(std::size_t hidden_size, Rng& rng);
};

// Parameter blocks in fixed declaration order (encoder wz..bh, decoder
// wz..bh, wo, bo); checkpoints, Adam state and tape leaves all follow it.
std::vector<std::vector<double>*> parameter_blocks(GruForecaster& model);
std::vector<const std::vector<double>*> parameter_blocks(const GruForecaster& model);
std::size_t parameter_count(const GruForecaster& model);

// Untaped inference: encoder consumes the input stepwise, the decoder rolls
// out autoregressively from the last input value. Throws "numeric
// divergence" when the forecast leaves the finite range.
Series forward(const GruForecaster& model, const Series& input, std::size_t horizon);

// Taped forward over shared parameter leaves (one set per tape, many items).
// Returns the prediction node of length `horizon`.
Tape::NodeId forward_taped(Tape& tape, const std::vector<Tape::NodeId>& param_leaves,
                           std::size_t hidden_size, const Series& input, std::size_t horizon);

// Registers every parameter block of the model as a tape leaf, in order.
std::vector<Tape::NodeId> register_params(Tape& tape, const GruForecaster& model);

// Adam optimizer state over the model's parameter blocks.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;
};
AdamState make_adam_state(const GruForecaster& model);

struct TrainerConfig {
    double learning_rate = 1e-3;
    std::size_t max_epochs = 1000;
    std::size_t patience = 10; // epochs without val improvement before stopping
    std::size_t batch_size = 32;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 5.0; // global gradient norm ceiling
    std::uint64_t seed = 0;
};
void validate(const TrainerConfig& cfg);

// One Adam update over all blocks; grads must follow declaration order.
// Zero gradients leave parameters bit-identical.
void adam_update(GruForecaster& model, const std::vector<std::vector<double>>& grads,
                 AdamState& state, const TrainerConfig& cfg);

struct TrainReport {
    std::vector<double> train_curve; // mean train loss per epoch
    std::vector<double> val_curve;   // mean val loss per epoch
    std::size_t epochs_run = 0;
    std::size_t best_epoch = 0; // 1-based epoch of the restored parameters
    double best_val = 0.0;
    std::size_t clip_events = 0; // batches whose gradient hit the norm ceiling
};

// Minibatch Adam with shuffled epochs, gradient clipping, early stopping on
// the validation loss, and best-parameter restoration. Divergence (non-finite
// train or val loss) aborts with a diagnostic.
TrainReport train(GruForecaster& model, const WindowedDataset& train_data,
                  const WindowedDataset& val_data, const LossFn& loss, const TrainerConfig& cfg);

// Versioned flat binary: 8-byte magic, u32 version, u32 hidden_size, then
// little-endian float64 parameter blocks in declaration order.
void save_checkpoint(const GruForecaster& model, const std::string& path);
GruForecaster load_checkpoint(const std::string& path);

} // namespace tildeq
