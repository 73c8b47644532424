#pragma once

// Compiling boolean functions into neurons: truth tables, a small sigmoid
// perceptron trainer and the weights -> machine construction.

#include <cstdint>
#include <string>
#include <vector>

#include "thermoneuron/neuron.hpp"

namespace thermoneuron {

/// Complete table over n inputs. Row r holds input bits with x_1 as the most
/// significant bit of r.
struct TruthTable {
    std::size_t n = 0;
    std::vector<int> outputs;

    std::size_t rows() const noexcept { return outputs.size(); }
    std::vector<int> inputs(std::size_t row) const;
};

/// Lines "b1 ... bn : r" (the colon is optional); '#' starts a comment.
TruthTable parse_truth_table(const std::string& text);
TruthTable load_truth_table(const std::string& path);

/// Built-in tables: not, and, or, nand, nor, xor, xnor, maj3.
TruthTable named_table(const std::string& name);

std::string format_truth_table(const TruthTable& table);

/// (w_0, w_1, ..., w_n); w_0 multiplies the constant input 1.
using WeightVector = std::vector<double>;

struct TrainerConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 20000;
    std::uint64_t seed = 1;
};

struct DesignConfig {
    double alpha = 1.0;
    double eps_z = 0.1;  // nominal target gap before resonance normalization
    MachineParams machine;
    TrainerConfig trainer;
};

/// Gradient descent on cross entropy for one sigmoid unit, inputs encoded as
/// the rail temperatures. The result separates every row and is rescaled so
/// the smallest |w_0 + w.x| is 1. Throws SeparabilityError otherwise.
WeightVector train_perceptron(const TruthTable& table, const DesignConfig& config);

/// h_k = [w_k < 0], eps_k = alpha |w_k|, eps_0 = alpha |eps_z - sum w_k|,
/// beta_0 = |w_0| / |eps_z - sum w_k|, target gap = resulting virtual gap.
/// Throws DesignError when the construction is degenerate or the virtual gap
/// comes out non-positive (which would implement the complement).
NeuronSpec weights_to_neuron(const WeightVector& w, const DesignConfig& config);

enum class Gate { Not, Nor, Maj3 };

Gate parse_gate(const std::string& name);
std::string gate_name(Gate gate);
WeightVector preset_weights(Gate gate);
TruthTable gate_table(Gate gate);
NeuronSpec preset(Gate gate, const DesignConfig& config);

/// max over inputs of |eps_z beta_v - alpha (w_0 + sum w_k beta_k)| on the given rows.
double perceptron_identity_residual(const NeuronSpec& spec, const WeightVector& w, double alpha,
                                    const TruthTable& table);

}  // namespace thermoneuron
