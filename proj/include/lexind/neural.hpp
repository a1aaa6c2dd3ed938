#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "lexind/matrix.hpp"
#include "lexind/provenance.hpp"
#include "lexind/random.hpp"

namespace lexind {

enum class StopMonitor { validation_mse, validation_pearson };

struct MlffnConfig {
    std::size_t input_dim = 300;
    std::vector<std::size_t> hidden_sizes{256, 128};
    std::size_t output_dim = 1;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    int max_epochs = 200;
    int patience = 20;
    double dropout_input = 0.2;
    double dropout_hidden = 0.5;
    double l2 = 0.001;  // on dense-layer weights only
    double validation_fraction = 0.1;
    std::uint64_t seed = 0;
    StopMonitor monitor = StopMonitor::validation_mse;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;

    void validate() const;  // throws UsageError
    Json to_json() const;
    static MlffnConfig from_json(const Json& j);
};

struct DenseLayer {
    DenseMatrix weights;  // out x in
    std::vector<double> bias;
};

// Feed-forward regressor: ReLU hidden layers, affine output.
class MlffnModel {
public:
    MlffnModel() = default;
    MlffnModel(MlffnConfig config, std::vector<DenseLayer> layers);

    // Glorot-uniform weights, zero biases.
    static MlffnModel initialize(const MlffnConfig& config, Rng& rng);

    const MlffnConfig& config() const noexcept { return config_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    std::size_t parameter_count() const noexcept;

    // Single example. With training=true, inverted dropout is applied to the
    // input and to every hidden activation using draws from `rng`.
    std::vector<double> forward(std::span<const double> x, bool training, Rng& rng) const;
    // Inference (no dropout) over the rows of `inputs`.
    DenseMatrix predict(const DenseMatrix& inputs) const;

    friend bool operator==(const MlffnModel& a, const MlffnModel& b);

private:
    MlffnConfig config_;
    std::vector<DenseLayer> layers_;
};

struct Gradients {
    std::vector<DenseMatrix> weights;
    std::vector<std::vector<double>> biases;
};

// Mean squared error over batch and outputs plus l2 * sum of squared weights.
// When `grads` is non-null it receives the gradient of that objective. With
// `rng` non-null dropout is active.
double loss_and_gradients(const MlffnModel& model, const DenseMatrix& inputs, const DenseMatrix& targets,
                          Gradients* grads, Rng* rng = nullptr);

struct AdamMoments {
    std::vector<double> m, v;
};

// One Adam step on `params` in place; `step` is the 1-based update count.
void adam_update(std::span<double> params, std::span<const double> grads, AdamMoments& moments, long step,
                 const MlffnConfig& config);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;       // mean minibatch MSE (dropout active, no penalty)
    double validation_loss = 0.0;  // MSE without dropout
    double validation_pearson = 0.0;
};

struct TrainingLog {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    int stopped_epoch = 0;
    bool early_stopped = false;
    double best_validation_loss = 0.0;
    double best_validation_pearson = 0.0;
    std::size_t train_size = 0;
    std::size_t validation_size = 0;
};

// Holds out the last validation_fraction of one seeded shuffle, trains with
// Adam on shuffled minibatches and returns the best-validation snapshot.
std::pair<MlffnModel, TrainingLog> train(const MlffnConfig& config, const DenseMatrix& inputs,
                                         const DenseMatrix& targets);

struct GradientCheckOptions {
    double step = 1e-5;
    std::size_t samples = 0;  // 0 checks every parameter
    std::uint64_t seed = 0;
};

// Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-6) over the
// checked parameters, using central differences of the dropout-free loss on
// the single example (x, y).
double gradient_check(const MlffnModel& model, std::span<const double> x, std::span<const double> y,
                      const GradientCheckOptions& options = {});

// Text checkpoint; parameters are written as hexadecimal floats so a reload
// is bit-identical.
void save_model(const std::filesystem::path& path, const MlffnModel& model);
MlffnModel load_model(const std::filesystem::path& path);

}  // namespace lexind
