#include "thermoneuron/network.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

void NetworkSpec::validate() const {
    if (inputs == 0) throw StructuralError("network: needs at least one input");
    if (layers.empty()) throw StructuralError("network: needs at least one layer");
    std::size_t fan_in = inputs;
    const NeuronSpec* first = nullptr;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].empty()) throw StructuralError("network: empty layer");
        for (const auto& node : layers[l]) {
            node.neuron.validate();
            if (node.wiring.size() != node.neuron.n) {
                std::ostringstream msg;
                msg << "network: layer " << l << " neuron has " << node.neuron.n << " inputs but "
                    << node.wiring.size() << " wires";
                throw StructuralError(msg.str());
            }
            for (std::size_t w : node.wiring) {
                if (w >= fan_in) throw StructuralError("network: wiring index out of range");
            }
            if (!first) first = &node.neuron;
            if (node.neuron.beta_hot != first->beta_hot || node.neuron.beta_cold != first->beta_cold) {
                throw StructuralError("network: all neurons must share the same rails");
            }
        }
        fan_in = layers[l].size();
    }
}

NetworkResult eval_network(const NetworkSpec& net, std::span<const double> inputs) {
    if (inputs.size() != net.inputs) {
        std::ostringstream msg;
        msg << "network expects " << net.inputs << " inputs, got " << inputs.size();
        throw StructuralError(msg.str());
    }
    NetworkResult res;
    std::vector<double> prev(inputs.begin(), inputs.end());
    for (const auto& layer : net.layers) {
        std::vector<double> out;
        for (const auto& node : layer) {
            std::vector<double> beta;
            for (std::size_t w : node.wiring) beta.push_back(prev.at(w));
            out.push_back(steady_output(node.neuron, beta).beta_z_inf);
        }
        res.outputs.push_back(out);
        prev = std::move(out);
    }
    return res;
}

std::vector<double> network_means(const NetworkSpec& net, const Encoding& enc) {
    TruthTable shape;
    shape.n = net.inputs;
    std::vector<double> means;
    for (std::size_t r = 0; r < (std::size_t{1} << net.inputs); ++r) {
        std::vector<double> beta;
        for (int b : shape.inputs(r)) beta.push_back(encode(b, enc));
        means.push_back(eval_network(net, beta).final_output());
    }
    return means;
}

ChannelStats conditional_outputs(const NetworkSpec& net, const Encoding& enc, double spread) {
    return conditional_outputs(network_means(net, enc), enc, spread);
}

NetworkSpec single_neuron_network(const NeuronSpec& spec) {
    NetworkSpec net;
    net.inputs = spec.n;
    NetworkNode node{spec, {}};
    for (std::size_t k = 0; k < spec.n; ++k) node.wiring.push_back(k);
    net.layers.push_back({node});
    return net;
}

namespace {

double sigmoid(double z) { return 1.0 - fermi_population(z); }

using Weights = std::vector<std::vector<WeightVector>>;

struct Forward {
    std::vector<std::vector<double>> a;  // a[0] = inputs, a[l+1] = layer l outputs
    std::vector<std::vector<double>> s;  // sigma(z) per unit
};

Forward forward(const Weights& w, const std::vector<double>& x, double hot, double cold) {
    Forward f;
    f.a.push_back(x);
    for (const auto& layer : w) {
        std::vector<double> a, s;
        for (const auto& unit : layer) {
            double z = unit[0];
            for (std::size_t k = 1; k < unit.size(); ++k) z += unit[k] * f.a.back()[k - 1];
            s.push_back(sigmoid(z));
            a.push_back(hot + (cold - hot) * s.back());
        }
        f.a.push_back(a);
        f.s.push_back(s);
    }
    return f;
}

double cross_entropy(double p, int y) {
    const double q = y ? p : 1.0 - p;
    return -std::log(std::max(q, 1e-300));
}

}  // namespace

TrainedNetwork train_network(const TruthTable& table, const std::vector<std::size_t>& topology,
                             const NetworkTrainConfig& cfg) {
    if (topology.empty() || topology.back() != 1) {
        throw ConfigError("network topology must end in a single output unit");
    }
    for (std::size_t s : topology) {
        if (s == 0) throw ConfigError("network layers must be non-empty");
    }
    const double hot = cfg.design.machine.beta_hot;
    const double cold = cfg.design.machine.beta_cold;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> init(-1.0, 1.0);
    Weights w;
    std::size_t fan_in = table.n;
    for (std::size_t size : topology) {
        std::vector<WeightVector> layer(size, WeightVector(fan_in + 1));
        for (auto& unit : layer) {
            for (double& v : unit) v = init(rng);
        }
        w.push_back(std::move(layer));
        fan_in = size;
    }

    std::vector<std::vector<double>> xs;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::vector<double> x;
        for (int b : table.inputs(r)) x.push_back(b ? cold : hot);
        xs.push_back(std::move(x));
    }

    // Adam moments share the shape of the weights.
    Weights m = w, v = w, g = w;
    for (auto* t : {&m, &v}) {
        for (auto& layer : *t) {
            for (auto& unit : layer) std::fill(unit.begin(), unit.end(), 0.0);
        }
    }
    const double inv_rows = 1.0 / static_cast<double>(table.rows());
    double loss = 0.0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (auto& layer : g) {
            for (auto& unit : layer) std::fill(unit.begin(), unit.end(), 0.0);
        }
        loss = 0.0;
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const Forward f = forward(w, xs[r], hot, cold);
            const double p = f.s.back()[0];
            loss += cross_entropy(p, table.outputs[r]) * inv_rows;
            std::vector<double> dz{p - table.outputs[r]};
            for (std::size_t l = w.size(); l-- > 0;) {
                const auto& in = f.a[l];
                std::vector<double> da(in.size(), 0.0);
                for (std::size_t j = 0; j < w[l].size(); ++j) {
                    g[l][j][0] += dz[j] * inv_rows;
                    for (std::size_t k = 0; k < in.size(); ++k) {
                        g[l][j][k + 1] += dz[j] * in[k] * inv_rows;
                        da[k] += dz[j] * w[l][j][k + 1];
                    }
                }
                if (l == 0) break;
                dz.assign(in.size(), 0.0);
                for (std::size_t k = 0; k < in.size(); ++k) {
                    const double s = f.s[l - 1][k];
                    dz[k] = da[k] * (cold - hot) * s * (1.0 - s);
                }
            }
        }
        const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(epoch));
        const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(epoch));
        for (std::size_t l = 0; l < w.size(); ++l) {
            for (std::size_t j = 0; j < w[l].size(); ++j) {
                for (std::size_t k = 0; k < w[l][j].size(); ++k) {
                    const double gr = g[l][j][k];
                    m[l][j][k] = cfg.adam_beta1 * m[l][j][k] + (1.0 - cfg.adam_beta1) * gr;
                    v[l][j][k] = cfg.adam_beta2 * v[l][j][k] + (1.0 - cfg.adam_beta2) * gr * gr;
                    w[l][j][k] -= cfg.learning_rate * (m[l][j][k] / c1) / (std::sqrt(v[l][j][k] / c2) + 1e-8);
                }
            }
        }
    }

    for (std::size_t r = 0; r < table.rows(); ++r) {
        const double p = forward(w, xs[r], hot, cold).s.back()[0];
        if ((p > 0.5) != (table.outputs[r] == 1)) {
            std::ostringstream msg;
            msg << "network training did not fit the table after " << cfg.epochs
                << " epochs (loss " << loss << "); try another seed or topology";
            throw TrainingError(msg.str(), loss);
        }
    }

    // Compile layer by layer against the temperatures the built machines produce.
    TrainedNetwork out;
    out.final_loss = loss;
    out.net.inputs = table.n;
    std::vector<std::vector<double>> realized = xs;  // realized[r] = current layer inputs
    for (std::size_t l = 0; l < w.size(); ++l) {
        std::vector<NetworkNode> layer;
        std::vector<std::vector<double>> next(table.rows());
        for (std::size_t j = 0; j < w[l].size(); ++j) {
            WeightVector& unit = w[l][j];
            auto margin_of = [&](const WeightVector& u) {
                double mgn = std::numeric_limits<double>::infinity();
                for (const auto& in : realized) {
                    double z = u[0];
                    for (std::size_t k = 0; k < in.size(); ++k) z += u[k + 1] * in[k];
                    mgn = std::min(mgn, std::abs(z));
                }
                return mgn;
            };
            const double margin = margin_of(unit);
            if (!(margin > 1e-9)) {
                throw TrainingError("network unit sits on its decision boundary for some row", loss);
            }
            for (double& x : unit) x /= margin;

            NeuronSpec neuron;
            try {
                neuron = weights_to_neuron(unit, cfg.design);
            } catch (const DesignError& err) {
                if (l + 1 == w.size()) {
                    throw TrainingError(std::string("output unit cannot be built: ") + err.what(), loss);
                }
                // Build the complement hot + cold - a instead and fold the
                // difference into the downstream biases.
                for (double& x : unit) x = -x;
                for (auto& down : w[l + 1]) {
                    down[0] += down[j + 1] * (hot + cold);
                    down[j + 1] = -down[j + 1];
                }
                neuron = weights_to_neuron(unit, cfg.design);
            }

            NetworkNode node{neuron, {}};
            for (std::size_t k = 0; k + 1 < unit.size(); ++k) node.wiring.push_back(k);
            for (std::size_t r = 0; r < table.rows(); ++r) {
                next[r].push_back(steady_output(neuron, realized[r]).beta_z_inf);
            }
            layer.push_back(std::move(node));
        }
        out.net.layers.push_back(std::move(layer));
        realized = std::move(next);
    }
    out.weights = w;
    out.net.validate();

    for (std::size_t r = 0; r < table.rows(); ++r) {
        const Output y = decode(realized[r][0], cfg.encoding);
        if (y != (table.outputs[r] ? Output::One : Output::Zero)) {
            std::ostringstream msg;
            msg << "compiled network decodes row " << r << " as " << output_name(y)
                << " (beta_z = " << realized[r][0] << "); increase alpha";
            throw TrainingError(msg.str(), loss);
        }
    }
    return out;
}

}  // namespace thermoneuron
