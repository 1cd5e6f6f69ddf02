#include "lorenz/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lorenz/errors.hpp"
#include "lorenz/rng.hpp"

namespace lorenz {

using nlohmann::json;

namespace {

constexpr double kProbClamp = 1e-7;

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

Eigen::MatrixXd apply_activation(Activation a, const Eigen::MatrixXd& z) {
    switch (a) {
        case Activation::Tanh:
            return z.array().tanh();
        case Activation::Relu:
            return z.array().max(0.0);
        case Activation::Sigmoid:
            return (1.0 + (-z.array()).exp()).inverse();
    }
    return z;
}

// Elementwise activation derivative expressed through the activation value.
Eigen::MatrixXd activation_grad(Activation a, const Eigen::MatrixXd& value) {
    switch (a) {
        case Activation::Tanh:
            return 1.0 - value.array().square();
        case Activation::Relu:
            // subgradient at 0 is 0
            return (value.array() > 0.0).cast<double>();
        case Activation::Sigmoid:
            return value.array() * (1.0 - value.array());
    }
    return value;
}

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
    }
    return "?";
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidConfig("TrainConfig: learning_rate must be > 0");
    if (batch_size < 1) throw InvalidConfig("TrainConfig: batch_size must be >= 1");
    if (epochs < 1) throw InvalidConfig("TrainConfig: epochs must be >= 1");
}

AdamState AdamState::zeros_like(const NetworkParams& params) {
    AdamState s;
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        s.m_weights.push_back(Eigen::MatrixXd::Zero(params.weights[l].rows(),
                                                    params.weights[l].cols()));
        s.v_weights.push_back(s.m_weights.back());
        s.m_biases.push_back(Eigen::VectorXd::Zero(params.biases[l].size()));
        s.v_biases.push_back(s.m_biases.back());
    }
    return s;
}

NetworkParams init_params(std::uint64_t seed, const std::vector<std::size_t>& dims) {
    if (dims.size() != 5) throw InvalidConfig("init_params: expected 5 layer dims");
    if (dims.back() != 2) throw InvalidConfig("init_params: output layer must have 2 units");

    NetworkParams p;
    p.dims = dims;
    SplitMix64 rng(derive_seed(seed, 0x6e657477 /* "netw" */));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto fan_in = static_cast<double>(dims[l]);
        const auto fan_out = static_cast<double>(dims[l + 1]);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Eigen::MatrixXd w(dims[l + 1], dims[l]);
        // row-major fill so the serialized layout matches generation order
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                w(r, c) = rng.uniform(-bound, bound);
            }
        }
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
    }
    return p;
}

Eigen::MatrixXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& inputs) {
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        Eigen::MatrixXd z = params.weights[l] * a;
        z.colwise() += params.biases[l];
        a = apply_activation(params.activations[l], z);
    }
    return a;
}

Prediction forward(const NetworkParams& params, const FeatureVector& f) {
    Eigen::MatrixXd in(params.dims.front(), 1);
    for (std::size_t i = 0; i < params.dims.front(); ++i) in(static_cast<Eigen::Index>(i), 0) = f[i];
    const Eigen::MatrixXd out = forward_batch(params, in);

    Prediction pred;
    pred.probs = {out(0, 0), out(1, 0)};
    pred.predicted = (pred.probs[1] > pred.probs[0]) ? StabilityLabel::Unstable
                                                     : StabilityLabel::Stable;
    return pred;
}

double bce_loss(const std::array<double, 2>& probs, const std::array<double, 2>& target) {
    double loss = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        const double p = clamp_prob(probs[i]);
        loss += -(target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p));
    }
    return loss / 2.0;
}

double batch_loss(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets) {
    const Eigen::MatrixXd probs = forward_batch(params, inputs);
    const auto p = probs.array().max(kProbClamp).min(1.0 - kProbClamp);
    const auto y = targets.array();
    const double total = -(y * p.log() + (1.0 - y) * (1.0 - p).log()).sum();
    return total / (2.0 * static_cast<double>(inputs.cols()));
}

namespace {

// Shared by backward() and train(): one forward pass, gradients, and the
// batch loss computed from the same activations.
Gradients backward_impl(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                        const Eigen::MatrixXd& targets, double* loss_out) {
    if (inputs.cols() < 1) throw InvalidConfig("backward: empty batch");
    const std::size_t L = params.n_layers();
    const auto batch = static_cast<double>(inputs.cols());

    std::vector<Eigen::MatrixXd> activations;  // activations[0] = inputs
    activations.reserve(L + 1);
    activations.push_back(inputs);
    for (std::size_t l = 0; l < L; ++l) {
        Eigen::MatrixXd z = params.weights[l] * activations.back();
        z.colwise() += params.biases[l];
        activations.push_back(apply_activation(params.activations[l], z));
    }

    if (loss_out != nullptr) {
        const auto p = activations[L].array().max(kProbClamp).min(1.0 - kProbClamp);
        const auto y = targets.array();
        *loss_out = -(y * p.log() + (1.0 - y) * (1.0 - p).log()).sum() / (2.0 * batch);
    }

    Gradients g;
    g.weights.resize(L);
    g.biases.resize(L);

    // Sigmoid + BCE collapse: dL/dz_out = (p - y) / (2 * batch).
    Eigen::MatrixXd delta = (activations[L] - targets) / (2.0 * batch);
    for (std::size_t l = L; l-- > 0;) {
        g.weights[l] = delta * activations[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            delta = (params.weights[l].transpose() * delta).array() *
                    activation_grad(params.activations[l - 1], activations[l]).array();
        }
    }
    return g;
}

}  // namespace

Gradients backward(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets) {
    return backward_impl(params, inputs, targets, nullptr);
}

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double bc1 = 1.0 - std::pow(config.beta1, t);
    const double bc2 = 1.0 - std::pow(config.beta2, t);

    auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = (config.beta2 * v.array() + (1.0 - config.beta2) * g.array().square()).matrix();
        theta.array() -=
            config.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config.epsilon);
    };

    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        update(params.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l]);
        update(params.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l]);
    }
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
    config.validate();
    if (dataset.samples.empty()) throw InvalidConfig("train: empty dataset");

    const std::size_t n = dataset.samples.size();
    Eigen::MatrixXd features(6, static_cast<Eigen::Index>(n));
    Eigen::MatrixXd targets(2, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        for (std::size_t f = 0; f < 6; ++f) features(static_cast<Eigen::Index>(f), col) = dataset.samples[i].features[f];
        const bool unstable = dataset.samples[i].stability == StabilityLabel::Unstable;
        targets(0, col) = unstable ? 0.0 : 1.0;
        targets(1, col) = unstable ? 1.0 : 0.0;
    }

    TrainResult result;
    result.params = init_params(config.seed);
    AdamState state = AdamState::zeros_like(result.params);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle) {
            SplitMix64 rng(derive_seed(config.seed, 0x73687566 /* "shuf" */, epoch));
            for (std::size_t i = n - 1; i > 0; --i) {
                std::swap(order[i], order[rng.next_below(i + 1)]);
            }
        }

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t bs = std::min(config.batch_size, n - start);
            Eigen::MatrixXd bx(6, static_cast<Eigen::Index>(bs));
            Eigen::MatrixXd by(2, static_cast<Eigen::Index>(bs));
            for (std::size_t i = 0; i < bs; ++i) {
                const auto src = static_cast<Eigen::Index>(order[start + i]);
                bx.col(static_cast<Eigen::Index>(i)) = features.col(src);
                by.col(static_cast<Eigen::Index>(i)) = targets.col(src);
            }
            double loss = 0.0;
            const Gradients g = backward_impl(result.params, bx, by, &loss);
            epoch_loss += loss * static_cast<double>(bs);
            adam_step(result.params, g, state, config);
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss)) {
            throw NumericalDivergence("train: non-finite loss at epoch " +
                                      std::to_string(epoch));
        }
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

void save_model(const NetworkParams& params, const TrainConfig& config, bool normalized,
                const std::filesystem::path& path) {
    json j;
    j["dims"] = params.dims;
    json acts = json::array();
    for (auto a : params.activations) acts.push_back(activation_name(a));
    j["activations"] = acts;
    j["normalized"] = normalized;
    j["train_config"] = {{"learning_rate", config.learning_rate},
                         {"epochs", config.epochs},
                         {"batch_size", config.batch_size},
                         {"seed", config.seed},
                         {"beta1", config.beta1},
                         {"beta2", config.beta2},
                         {"epsilon", config.epsilon},
                         {"shuffle", config.shuffle}};

    json layers = json::array();
    for (std::size_t l = 0; l < params.n_layers(); ++l) {
        json weights = json::array();
        const Eigen::MatrixXd& w = params.weights[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) weights.push_back(w(r, c));
        }
        json biases = json::array();
        for (Eigen::Index r = 0; r < params.biases[l].size(); ++r) {
            biases.push_back(params.biases[l](r));
        }
        layers.push_back({{"rows", w.rows()}, {"cols", w.cols()},
                          {"weights", std::move(weights)}, {"biases", std::move(biases)}});
    }
    j["layers"] = std::move(layers);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
    out << j.dump() << '\n';
}

LoadedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
    json j = json::parse(in);

    LoadedModel m;
    m.params.dims = j.at("dims").get<std::vector<std::size_t>>();
    m.normalized = j.at("normalized").get<bool>();
    const json& tc = j.at("train_config");
    m.config.learning_rate = tc.at("learning_rate").get<double>();
    m.config.epochs = tc.at("epochs").get<std::size_t>();
    m.config.batch_size = tc.at("batch_size").get<std::size_t>();
    m.config.seed = tc.at("seed").get<std::uint64_t>();
    m.config.beta1 = tc.at("beta1").get<double>();
    m.config.beta2 = tc.at("beta2").get<double>();
    m.config.epsilon = tc.at("epsilon").get<double>();
    m.config.shuffle = tc.at("shuffle").get<bool>();

    for (const auto& layer : j.at("layers")) {
        const auto rows = layer.at("rows").get<Eigen::Index>();
        const auto cols = layer.at("cols").get<Eigen::Index>();
        const auto weights = layer.at("weights").get<std::vector<double>>();
        const auto biases = layer.at("biases").get<std::vector<double>>();
        if (weights.size() != static_cast<std::size_t>(rows * cols) ||
            biases.size() != static_cast<std::size_t>(rows)) {
            throw std::runtime_error("load_model: layer shape mismatch");
        }
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                w(r, c) = weights[static_cast<std::size_t>(r * cols + c)];
            }
        }
        m.params.weights.push_back(std::move(w));
        m.params.biases.push_back(
            Eigen::Map<const Eigen::VectorXd>(biases.data(), rows));
    }
    return m;
}

}  // namespace lorenz
