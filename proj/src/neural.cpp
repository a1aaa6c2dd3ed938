#include "lexind/neural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lexind/error.hpp"
#include "lexind/kernels.hpp"
#include "lexind/numerics.hpp"

namespace lexind {

void MlffnConfig::validate() const {
    auto fail = [](const std::string& what) { throw UsageError("mlffn config: " + what); };
    if (input_dim == 0) fail("input_dim must be positive");
    if (output_dim == 0) fail("output_dim must be positive");
    for (auto h : hidden_sizes)
        if (h == 0) fail("hidden layer sizes must be positive");
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (batch_size == 0) fail("batch_size must be positive");
    if (max_epochs <= 0) fail("max_epochs must be positive");
    if (patience <= 0) fail("patience must be positive");
    if (!(dropout_input >= 0.0 && dropout_input < 1.0)) fail("dropout_input must be in [0,1)");
    if (!(dropout_hidden >= 0.0 && dropout_hidden < 1.0)) fail("dropout_hidden must be in [0,1)");
    if (!(l2 >= 0.0)) fail("l2 must be >= 0");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) fail("validation_fraction must be in (0,1)");
}

Json MlffnConfig::to_json() const {
    Json j;
    j["input_dim"] = input_dim;
    j["hidden_sizes"] = hidden_sizes;
    j["output_dim"] = output_dim;
    j["learning_rate"] = learning_rate;
    j["batch_size"] = batch_size;
    j["max_epochs"] = max_epochs;
    j["patience"] = patience;
    j["dropout_input"] = dropout_input;
    j["dropout_hidden"] = dropout_hidden;
    j["l2"] = l2;
    j["validation_fraction"] = validation_fraction;
    j["seed"] = seed;
    j["monitor"] = monitor == StopMonitor::validation_mse ? "validation_mse" : "validation_pearson";
    j["adam"] = {{"beta1", adam_beta1}, {"beta2", adam_beta2}, {"epsilon", adam_epsilon}};
    return j;
}

MlffnConfig MlffnConfig::from_json(const Json& j) {
    MlffnConfig c;
    try {
        c.input_dim = j.at("input_dim").get<std::size_t>();
        c.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
        c.output_dim = j.at("output_dim").get<std::size_t>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.batch_size = j.at("batch_size").get<std::size_t>();
        c.max_epochs = j.at("max_epochs").get<int>();
        c.patience = j.at("patience").get<int>();
        c.dropout_input = j.at("dropout_input").get<double>();
        c.dropout_hidden = j.at("dropout_hidden").get<double>();
        c.l2 = j.at("l2").get<double>();
        c.validation_fraction = j.at("validation_fraction").get<double>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.monitor = j.at("monitor").get<std::string>() == "validation_pearson" ? StopMonitor::validation_pearson
                                                                             : StopMonitor::validation_mse;
        c.adam_beta1 = j.at("adam").at("beta1").get<double>();
        c.adam_beta2 = j.at("adam").at("beta2").get<double>();
        c.adam_epsilon = j.at("adam").at("epsilon").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("mlffn config: ") + e.what());
    }
    return c;
}

MlffnModel::MlffnModel(MlffnConfig config, std::vector<DenseLayer> layers)
    : config_(std::move(config)), layers_(std::move(layers)) {
    std::size_t in = config_.input_dim;
    if (layers_.size() != config_.hidden_sizes.size() + 1) throw DimensionError("mlffn: layer count mismatch");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        std::size_t out = l < config_.hidden_sizes.size() ? config_.hidden_sizes[l] : config_.output_dim;
        const auto& layer = layers_[l];
        if (layer.weights.rows() != out || layer.weights.cols() != in || layer.bias.size() != out)
            throw DimensionError("mlffn: layer " + std::to_string(l) + " has inconsistent shape");
        if (!layer.weights.all_finite()) throw NumericalError("mlffn: non-finite weights");
        for (double b : layer.bias)
            if (!std::isfinite(b)) throw NumericalError("mlffn: non-finite bias");
        in = out;
    }
}

MlffnModel MlffnModel::initialize(const MlffnConfig& config, Rng& rng) {
    config.validate();
    std::vector<DenseLayer> layers;
    std::size_t in = config.input_dim;
    for (std::size_t l = 0; l <= config.hidden_sizes.size(); ++l) {
        std::size_t out = l < config.hidden_sizes.size() ? config.hidden_sizes[l] : config.output_dim;
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        DenseLayer layer{DenseMatrix(out, in), std::vector<double>(out, 0.0)};
        for (auto& w : layer.weights.data()) w = rng.uniform(-limit, limit);
        layers.push_back(std::move(layer));
        in = out;
    }
    return MlffnModel(config, std::move(layers));
}

std::size_t MlffnModel::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.data().size() + l.bias.size();
    return n;
}

bool operator==(const MlffnModel& a, const MlffnModel& b) {
    if (a.layers_.size() != b.layers_.size()) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
        if (!(a.layers_[l].weights == b.layers_[l].weights) || a.layers_[l].bias != b.layers_[l].bias) return false;
    }
    return a.config_.to_json() == b.config_.to_json();
}

namespace {

struct ForwardCache {
    std::vector<DenseMatrix> activations;  // input of each layer (after dropout)
    std::vector<DenseMatrix> pre;          // pre-activation of each layer
    std::vector<DenseMatrix> masks;        // dropout scale per hidden layer (empty when inactive)
    DenseMatrix output;
};

void apply_dropout(DenseMatrix& a, double rate, Rng& rng, DenseMatrix* mask) {
    if (rate <= 0.0) return;
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    if (mask) *mask = DenseMatrix(a.rows(), a.cols());
    auto data = a.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        double s = rng.uniform() < keep ? scale : 0.0;
        data[i] *= s;
        if (mask) mask->data()[i] = s;
    }
}

void forward_batch(const MlffnModel& model, const DenseMatrix& inputs, Rng* rng, ForwardCache& cache) {
    const auto& cfg = model.config();
    const auto& layers = model.layers();
    if (inputs.cols() != cfg.input_dim)
        throw DimensionError("mlffn: input has " + std::to_string(inputs.cols()) + " features, model expects " +
                             std::to_string(cfg.input_dim));
    cache.activations.assign(layers.size(), DenseMatrix());
    cache.pre.assign(layers.size(), DenseMatrix());
    cache.masks.assign(layers.size(), DenseMatrix());
    DenseMatrix a = inputs;
    if (rng) apply_dropout(a, cfg.dropout_input, *rng, nullptr);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        DenseMatrix z;
        kernels::matmul_abt(a, layers[l].weights, layers[l].bias, z);
        cache.activations[l] = std::move(a);
        if (l + 1 == layers.size()) {
            cache.output = z;
            cache.pre[l] = std::move(z);
            break;
        }
        a = z;
        for (auto& v : a.data()) v = v > 0.0 ? v : 0.0;
        if (rng) apply_dropout(a, cfg.dropout_hidden, *rng, &cache.masks[l]);
        cache.pre[l] = std::move(z);
    }
}

}  // namespace

std::vector<double> MlffnModel::forward(std::span<const double> x, bool training, Rng& rng) const {
    DenseMatrix in(1, x.size(), std::vector<double>(x.begin(), x.end()));
    ForwardCache cache;
    forward_batch(*this, in, training ? &rng : nullptr, cache);
    auto row = cache.output.row(0);
    return {row.begin(), row.end()};
}

DenseMatrix MlffnModel::predict(const DenseMatrix& inputs) const {
    ForwardCache cache;
    forward_batch(*this, inputs, nullptr, cache);
    return std::move(cache.output);
}

double loss_and_gradients(const MlffnModel& model, const DenseMatrix& inputs, const DenseMatrix& targets,
                          Gradients* grads, Rng* rng) {
    const auto& layers = model.layers();
    const auto& cfg = model.config();
    if (targets.rows() != inputs.rows() || targets.cols() != cfg.output_dim)
        throw DimensionError("mlffn: target shape mismatch");
    ForwardCache cache;
    forward_batch(model, inputs, rng, cache);
    const double denom = static_cast<double>(inputs.rows() * cfg.output_dim);
    DenseMatrix delta(targets.rows(), targets.cols());
    double sse = 0.0;
    for (std::size_t i = 0; i < delta.data().size(); ++i) {
        double diff = cache.output.data()[i] - targets.data()[i];
        sse += diff * diff;
        delta.data()[i] = 2.0 * diff / denom;
    }
    double penalty = 0.0;
    if (cfg.l2 > 0.0)
        for (const auto& l : layers)
            for (double w : l.weights.data()) penalty += w * w;
    const double loss = sse / denom + cfg.l2 * penalty;
    if (!grads) return loss;

    grads->weights.assign(layers.size(), DenseMatrix());
    grads->biases.assign(layers.size(), {});
    for (std::size_t ll = layers.size(); ll-- > 0;) {
        kernels::matmul_atb(delta, cache.activations[ll], grads->weights[ll]);
        auto& gb = grads->biases[ll];
        gb.assign(delta.cols(), 0.0);
        for (std::size_t r = 0; r < delta.rows(); ++r)
            for (std::size_t c = 0; c < delta.cols(); ++c) gb[c] += delta(r, c);
        if (cfg.l2 > 0.0) {
            auto gw = grads->weights[ll].data();
            auto w = layers[ll].weights.data();
            for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += 2.0 * cfg.l2 * w[i];
        }
        if (ll == 0) break;
        DenseMatrix back;
        kernels::matmul_ab(delta, layers[ll].weights, back);
        const auto& z = cache.pre[ll - 1];
        const auto& mask = cache.masks[ll - 1];
        for (std::size_t i = 0; i < back.data().size(); ++i) {
            double g = z.data()[i] > 0.0 ? back.data()[i] : 0.0;
            if (!mask.data().empty()) g *= mask.data()[i];
            back.data()[i] = g;
        }
        delta = std::move(back);
    }
    return loss;
}

void adam_update(std::span<double> params, std::span<const double> grads, AdamMoments& moments, long step,
                 const MlffnConfig& config) {
    if (grads.size() != params.size()) throw DimensionError("adam: gradient size mismatch");
    if (moments.m.size() != params.size()) {
        moments.m.assign(params.size(), 0.0);
        moments.v.assign(params.size(), 0.0);
    }
    const double b1 = config.adam_beta1, b2 = config.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        moments.m[i] = b1 * moments.m[i] + (1.0 - b1) * grads[i];
        moments.v[i] = b2 * moments.v[i] + (1.0 - b2) * grads[i] * grads[i];
        const double mhat = moments.m[i] / c1;
        const double vhat = moments.v[i] / c2;
        params[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
    }
}

namespace {

DenseMatrix gather_rows(const DenseMatrix& m, std::span<const std::size_t> idx) {
    DenseMatrix out(idx.size(), m.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        auto src = m.row(idx[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

double mse(const DenseMatrix& pred, const DenseMatrix& target) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        double d = pred.data()[i] - target.data()[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.data().size());
}

// Mean over output columns; -inf when undefined.
double mean_column_pearson(const DenseMatrix& pred, const DenseMatrix& target) {
    double total = 0.0;
    for (std::size_t c = 0; c < pred.cols(); ++c) {
        std::vector<double> p(pred.rows()), t(pred.rows());
        for (std::size_t r = 0; r < pred.rows(); ++r) {
            p[r] = pred(r, c);
            t[r] = target(r, c);
        }
        try {
            total += pearson(p, t);
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    }
    return total / static_cast<double>(pred.cols());
}

}  // namespace

std::pair<MlffnModel, TrainingLog> train(const MlffnConfig& config, const DenseMatrix& inputs,
                                         const DenseMatrix& targets) {
    config.validate();
    const std::size_t n = inputs.rows();
    if (targets.rows() != n) throw DimensionError("train: inputs and targets differ in row count");
    if (inputs.cols() != config.input_dim) throw DimensionError("train: input width does not match input_dim");
    if (targets.cols() != config.output_dim) throw DimensionError("train: target width does not match output_dim");
    if (n < 10) throw DimensionError("train: need at least 10 samples, got " + std::to_string(n));

    Rng init_rng(config.seed, 0), split_rng(config.seed, 1), shuffle_rng(config.seed, 2), dropout_rng(config.seed, 3);
    MlffnModel model = MlffnModel::initialize(config, init_rng);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    split_rng.shuffle(std::span<std::size_t>(order));
    std::size_t n_val = static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.validation_fraction));
    n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
    std::vector<std::size_t> train_idx(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    const DenseMatrix x_val = gather_rows(inputs, val_idx);
    const DenseMatrix y_val = gather_rows(targets, val_idx);

    TrainingLog log;
    log.train_size = train_idx.size();
    log.validation_size = val_idx.size();

    auto& layers = model.layers();
    std::vector<AdamMoments> w_moments(layers.size()), b_moments(layers.size());
    long step = 0;
    MlffnModel best = model;
    double best_score = std::numeric_limits<double>::infinity();  // lower is better
    int wait = 0;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(std::span<std::size_t>(train_idx));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < train_idx.size(); start += config.batch_size) {
            std::size_t end = std::min(train_idx.size(), start + config.batch_size);
            std::span<const std::size_t> batch(train_idx.data() + start, end - start);
            DenseMatrix xb = gather_rows(inputs, batch), yb = gather_rows(targets, batch);
            Gradients g;
            double batch_loss = loss_and_gradients(model, xb, yb, &g, &dropout_rng);
            double penalty = 0.0;
            if (config.l2 > 0.0)
                for (const auto& l : layers)
                    for (double w : l.weights.data()) penalty += w * w;
            loss_sum += (batch_loss - config.l2 * penalty) * static_cast<double>(batch.size());
            ++step;
            for (std::size_t l = 0; l < layers.size(); ++l) {
                adam_update(layers[l].weights.data(), g.weights[l].data(), w_moments[l], step, config);
                adam_update(layers[l].bias, g.biases[l], b_moments[l], step, config);
            }
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(train_idx.size());
        DenseMatrix pred = model.predict(x_val);
        rec.validation_loss = mse(pred, y_val);
        rec.validation_pearson = mean_column_pearson(pred, y_val);
        if (!std::isfinite(rec.train_loss) || !std::isfinite(rec.validation_loss))
            throw TrainingError(epoch, "loss diverged to a non-finite value");
        log.epochs.push_back(rec);

        const double score =
            config.monitor == StopMonitor::validation_mse ? rec.validation_loss : -rec.validation_pearson;
        if (score < best_score) {
            best_score = score;
            best = model;
            log.best_epoch = epoch;
            log.best_validation_loss = rec.validation_loss;
            log.best_validation_pearson = rec.validation_pearson;
            wait = 0;
        } else if (++wait >= config.patience) {
            log.stopped_epoch = epoch;
            log.early_stopped = true;
            break;
        }
        log.stopped_epoch = epoch;
    }
    if (log.best_epoch == 0) {
        // Pearson monitor never defined: keep the first epoch's numbers.
        log.best_epoch = 1;
        log.best_validation_loss = log.epochs.front().validation_loss;
        log.best_validation_pearson = log.epochs.front().validation_pearson;
    }
    return {std::move(best), std::move(log)};
}

double gradient_check(const MlffnModel& model, std::span<const double> x, std::span<const double> y,
                      const GradientCheckOptions& options) {
    DenseMatrix in(1, x.size(), std::vector<double>(x.begin(), x.end()));
    DenseMatrix tg(1, y.size(), std::vector<double>(y.begin(), y.end()));
    Gradients g;
    loss_and_gradients(model, in, tg, &g, nullptr);

    struct Coord {
        std::size_t layer;
        bool bias;
        std::size_t index;
    };
    std::vector<Coord> coords;
    for (std::size_t l = 0; l < model.layers().size(); ++l) {
        for (std::size_t i = 0; i < model.layers()[l].weights.data().size(); ++i) coords.push_back({l, false, i});
        for (std::size_t i = 0; i < model.layers()[l].bias.size(); ++i) coords.push_back({l, true, i});
    }
    if (options.samples > 0 && options.samples < coords.size()) {
        Rng rng(options.seed, 7);
        rng.shuffle(std::span<Coord>(coords));
        coords.resize(options.samples);
    }
    MlffnModel probe = model;
    double worst = 0.0;
    for (const auto& c : coords) {
        double& p = c.bias ? probe.layers()[c.layer].bias[c.index] : probe.layers()[c.layer].weights.data()[c.index];
        const double analytic = c.bias ? g.biases[c.layer][c.index] : g.weights[c.layer].data()[c.index];
        const double saved = p;
        p = saved + options.step;
        const double up = loss_and_gradients(probe, in, tg, nullptr, nullptr);
        p = saved - options.step;
        const double down = loss_and_gradients(probe, in, tg, nullptr, nullptr);
        p = saved;
        const double numeric = (up - down) / (2.0 * options.step);
        const double rel =
            std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace lexind
