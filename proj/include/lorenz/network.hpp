#ifndef LORENZ_NETWORK_HPP
#define LORENZ_NETWORK_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lorenz/dataset.hpp"

namespace lorenz {

enum class Activation { Tanh, Relu, Sigmoid };

// Fixed four-layer classifier: dims.front() inputs, dims.back() == 2 outputs,
// activations tanh, relu, relu, sigmoid in that order.
struct NetworkParams {
    std::vector<std::size_t> dims = {6, 512, 512, 256, 2};
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: dims[l+1] x dims[l]
    std::vector<Eigen::VectorXd> biases;

    static constexpr std::array<Activation, 4> activations = {
        Activation::Tanh, Activation::Relu, Activation::Relu, Activation::Sigmoid};

    std::size_t n_layers() const { return weights.size(); }
};

struct TrainConfig {
    double learning_rate = 0.001;
    std::size_t epochs = 20;
    std::size_t batch_size = 128;
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool shuffle = true;

    void validate() const;  // throws InvalidConfig
};

struct AdamState {
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;
    std::uint64_t t = 0;

    static AdamState zeros_like(const NetworkParams& params);
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

struct Prediction {
    std::array<double, 2> probs{};  // (stable unit, unstable unit), each in (0,1)
    StabilityLabel predicted = StabilityLabel::Stable;  // argmax, ties -> Stable
};

struct TrainResult {
    NetworkParams params;
    std::vector<double> loss_history;  // mean sample loss per epoch
};

// Glorot-uniform weights, zero biases, deterministic given seed.
NetworkParams init_params(std::uint64_t seed,
                          const std::vector<std::size_t>& dims = {6, 512, 512, 256, 2});

Prediction forward(const NetworkParams& params, const FeatureVector& f);

// Batched forward pass; inputs are columns, returns the two output unit
// activations per column.
Eigen::MatrixXd forward_batch(const NetworkParams& params, const Eigen::MatrixXd& inputs);

// Mean over the two output units of -[y ln p + (1-y) ln(1-p)], with p
// clamped to [1e-7, 1-1e-7] before the log.
double bce_loss(const std::array<double, 2>& probs, const std::array<double, 2>& target);

// Mean batch loss and its exact gradients. Targets are one-hot columns,
// (1,0) = Stable, (0,1) = Unstable.
double batch_loss(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                  const Eigen::MatrixXd& targets);
Gradients backward(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets);

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

// Mini-batch Adam training; deterministic given (dataset, config).
// Throws NumericalDivergence if the loss goes non-finite.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

// Model file round-trip (JSON: dims, activations, row-major weights, biases,
// train config, normalization flag).
void save_model(const NetworkParams& params, const TrainConfig& config, bool normalized,
                const std::filesystem::path& path);
struct LoadedModel {
    NetworkParams params;
    TrainConfig config;
    bool normalized = false;
};
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace lorenz

#endif
