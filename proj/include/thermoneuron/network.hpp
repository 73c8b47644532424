#pragma once

// Feed-forward networks of neurons. Layers run one after another: each
// downstream input bath is an ideal bath at the upstream steady output.

#include <cstdint>
#include <vector>

#include "thermoneuron/channel.hpp"

namespace thermoneuron {

struct NetworkNode {
    NeuronSpec neuron;
    /// Indices into the previous layer's outputs (the primary inputs for layer 0).
    std::vector<std::size_t> wiring;
};

struct NetworkSpec {
    std::size_t inputs = 0;
    std::vector<std::vector<NetworkNode>> layers;

    /// Throws StructuralError on arity/wiring problems or mismatched rails.
    void validate() const;
    std::size_t outputs() const { return layers.empty() ? 0 : layers.back().size(); }
};

struct NetworkResult {
    /// outputs[l][j]: steady output of neuron j in layer l.
    std::vector<std::vector<double>> outputs;
    double final_output() const { return outputs.back().front(); }
};

NetworkResult eval_network(const NetworkSpec& net, std::span<const double> inputs);

/// Steady final outputs for each encoded row of the network's input table.
std::vector<double> network_means(const NetworkSpec& net, const Encoding& enc);

ChannelStats conditional_outputs(const NetworkSpec& net, const Encoding& enc, double spread);

struct NetworkTrainConfig {
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    std::size_t epochs = 5000;
    std::uint64_t seed = 7;
    DesignConfig design{.alpha = 20.0};
    /// Decoding rule for the final behavioral check.
    Encoding encoding{0.0, 1.0, 0.1, BandMode::Additive};
};

struct TrainedNetwork {
    NetworkSpec net;
    /// Final per-unit weights after margin rescaling and sign normalization.
    std::vector<std::vector<WeightVector>> weights;
    double final_loss = 0.0;
};

/// Backprop + Adam on the equivalent sigmoid network (units output
/// hot + (cold - hot) sigma(z)), then unit-by-unit compilation. A hidden unit
/// whose weights cannot be built directly is replaced by its complement and
/// the downstream weights are adjusted to compensate.
/// `topology` lists layer sizes, ending in 1.
TrainedNetwork train_network(const TruthTable& table, const std::vector<std::size_t>& topology,
                             const NetworkTrainConfig& config = {});

/// Wraps one neuron as a single-layer network.
NetworkSpec single_neuron_network(const NeuronSpec& spec);

}  // namespace thermoneuron
