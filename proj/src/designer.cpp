#include "thermoneuron/designer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

std::vector<int> TruthTable::inputs(std::size_t row) const {
    std::vector<int> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = static_cast<int>((row >> (n - 1 - k)) & 1u);
    return x;
}

TruthTable parse_truth_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    TruthTable t;
    std::vector<int> seen;
    std::size_t lineno = 0;
    bool sized = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ':', ' ');
        std::istringstream fields(line);
        std::vector<int> bits;
        std::string tok;
        while (fields >> tok) {
            if (tok != "0" && tok != "1") {
                throw ConfigError("truth table line " + std::to_string(lineno) + ": expected 0/1, got '" +
                                  tok + "'");
            }
            bits.push_back(tok == "1");
        }
        if (bits.empty()) continue;
        if (bits.size() < 2) {
            throw ConfigError("truth table line " + std::to_string(lineno) + ": need inputs and an output");
        }
        if (!sized) {
            t.n = bits.size() - 1;
            if (t.n > 10) throw ConfigError("truth table: at most 10 inputs");
            t.outputs.assign(std::size_t{1} << t.n, -1);
            sized = true;
        } else if (bits.size() != t.n + 1) {
            throw ConfigError("truth table line " + std::to_string(lineno) + ": inconsistent arity");
        }
        std::size_t row = 0;
        for (std::size_t k = 0; k < t.n; ++k) row = (row << 1) | static_cast<std::size_t>(bits[k]);
        if (t.outputs[row] != -1) {
            throw ConfigError("truth table line " + std::to_string(lineno) + ": duplicate row");
        }
        t.outputs[row] = bits.back();
    }
    if (!sized) throw ConfigError("truth table is empty");
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.outputs[r] == -1) {
            std::ostringstream msg;
            msg << "truth table is incomplete: missing row";
            for (int b : t.inputs(r)) msg << ' ' << b;
            throw ConfigError(msg.str());
        }
    }
    return t;
}

TruthTable load_truth_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open truth table '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_truth_table(buf.str());
}

TruthTable named_table(const std::string& name) {
    auto make = [](std::size_t n, auto f) {
        TruthTable t;
        t.n = n;
        for (std::size_t r = 0; r < (std::size_t{1} << n); ++r) t.outputs.push_back(f(t.inputs(r)));
        return t;
    };
    using V = std::vector<int>;
    if (name == "not") return make(1, [](const V& x) { return 1 - x[0]; });
    if (name == "and") return make(2, [](const V& x) { return x[0] & x[1]; });
    if (name == "or") return make(2, [](const V& x) { return x[0] | x[1]; });
    if (name == "nand") return make(2, [](const V& x) { return 1 - (x[0] & x[1]); });
    if (name == "nor") return make(2, [](const V& x) { return 1 - (x[0] | x[1]); });
    if (name == "xor") return make(2, [](const V& x) { return x[0] ^ x[1]; });
    if (name == "xnor") return make(2, [](const V& x) { return 1 - (x[0] ^ x[1]); });
    if (name == "maj3") return make(3, [](const V& x) { return x[0] + x[1] + x[2] >= 2 ? 1 : 0; });
    throw ConfigError("unknown table '" + name + "'");
}

std::string format_truth_table(const TruthTable& table) {
    std::ostringstream out;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (int b : table.inputs(r)) out << b << ' ';
        out << ": " << table.outputs[r] << '\n';
    }
    return out.str();
}

namespace {

double sigmoid(double z) { return 1.0 - fermi_population(z); }

std::vector<double> encoded(const TruthTable& t, std::size_t row, const MachineParams& m) {
    std::vector<double> x{1.0};
    for (int b : t.inputs(row)) x.push_back(b ? m.beta_cold : m.beta_hot);
    return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

WeightVector train_perceptron(const TruthTable& table, const DesignConfig& config) {
    const TrainerConfig& tc = config.trainer;
    std::mt19937_64 rng(tc.seed);
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    WeightVector w(table.n + 1);
    for (double& wi : w) wi = init(rng);

    std::vector<std::vector<double>> xs;
    for (std::size_t r = 0; r < table.rows(); ++r) xs.push_back(encoded(table, r, config.machine));
    const double inv_rows = 1.0 / static_cast<double>(table.rows());

    auto separated = [&] {
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const double z = dot(w, xs[r]);
            // Stop once every row sits comfortably on its side (|sigma - y| < 0.2).
            if (table.outputs[r] ? z < 1.4 : z > -1.4) return false;
        }
        return true;
    };

    std::vector<double> grad(w.size());
    for (std::size_t epoch = 0; epoch < tc.epochs && !separated(); ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const double err = sigmoid(dot(w, xs[r])) - table.outputs[r];
            for (std::size_t i = 0; i < w.size(); ++i) grad[i] += err * xs[r][i] * inv_rows;
        }
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= tc.learning_rate * grad[i];
    }

    std::vector<std::size_t> wrong;
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const double z = dot(w, xs[r]);
        if ((z > 0.0) != (table.outputs[r] == 1) || z == 0.0) wrong.push_back(r);
        margin = std::min(margin, std::abs(z));
    }
    if (!wrong.empty()) {
        std::ostringstream msg;
        msg << "truth table is not linearly separable: no single hyperplane classifies rows";
        for (std::size_t r : wrong) {
            msg << " (";
            const auto x = table.inputs(r);
            for (std::size_t k = 0; k < x.size(); ++k) msg << (k ? " " : "") << x[k];
            msg << " -> " << table.outputs[r] << ")";
        }
        msg << "; use a layered network instead";
        throw SeparabilityError(msg.str());
    }
    for (double& wi : w) wi /= margin;
    return w;
}

NeuronSpec weights_to_neuron(const WeightVector& w, const DesignConfig& config) {
    if (w.size() < 2) throw DesignError("weights_to_neuron: need w_0 and at least one input weight");
    for (double wi : w) {
        if (!std::isfinite(wi)) throw DesignError("weights_to_neuron: weights must be finite");
    }
    if (!(config.alpha > 0.0) || !(config.eps_z > 0.0)) {
        throw DesignError("weights_to_neuron: alpha and eps_z must be positive");
    }
    const std::size_t n = w.size() - 1;
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) sum += w[k];
    const double denom = config.eps_z - sum;
    if (std::abs(denom) < 1e-9) {
        std::ostringstream msg;
        msg << "weights_to_neuron: eps_z - sum(w_k) = " << denom << " is degenerate; change eps_z";
        throw DesignError(msg.str());
    }

    InteractionVector h(n + 1);
    std::vector<double> eps(n + 1);
    for (std::size_t k = 0; k <= n; ++k) h[k] = w[k] < 0.0 ? 1 : 0;
    for (std::size_t k = 1; k <= n; ++k) eps[k] = config.alpha * std::abs(w[k]);
    eps[0] = config.alpha * std::abs(denom);
    const double beta0 = std::abs(w[0]) / std::abs(denom);

    const double s = resonant_gap(h, eps);
    if (!(s > 1e-12)) {
        std::ostringstream msg;
        msg << "weights_to_neuron: the virtual gap is " << s
            << "; with w_0 < 0 the input weights must sum to more than eps_z/2";
        throw DesignError(msg.str());
    }
    return make_neuron(std::move(eps), std::move(h), beta0, s, config.machine);
}

Gate parse_gate(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "not") return Gate::Not;
    if (lower == "nor") return Gate::Nor;
    if (lower == "maj3" || lower == "majority") return Gate::Maj3;
    throw ConfigError("unknown gate '" + name + "' (expected NOT, NOR or MAJ3)");
}

std::string gate_name(Gate gate) {
    switch (gate) {
        case Gate::Not: return "NOT";
        case Gate::Nor: return "NOR";
        case Gate::Maj3: return "MAJ3";
    }
    return "?";
}

WeightVector preset_weights(Gate gate) {
    switch (gate) {
        // Scaled so that alpha equals the input gap eps_1.
        case Gate::Not: return {0.5, -1.0};
        case Gate::Nor: return {1.0, -2.0, -2.0};
        case Gate::Maj3: return {-4.0, 3.0, 3.0, 3.0};
    }
    return {};
}

TruthTable gate_table(Gate gate) {
    switch (gate) {
        case Gate::Not: return named_table("not");
        case Gate::Nor: return named_table("nor");
        case Gate::Maj3: return named_table("maj3");
    }
    return {};
}

NeuronSpec preset(Gate gate, const DesignConfig& config) {
    return weights_to_neuron(preset_weights(gate), config);
}

double perceptron_identity_residual(const NeuronSpec& spec, const WeightVector& w, double alpha,
                                    const TruthTable& table) {
    double worst = 0.0;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::vector<double> beta;
        double z = w[0];
        const auto x = table.inputs(r);
        for (std::size_t k = 0; k < x.size(); ++k) {
            beta.push_back(x[k] ? spec.beta_cold : spec.beta_hot);
            z += w[k + 1] * beta.back();
        }
        const double u = spec.eps_z * neuron_virtual_temperature(spec, beta);
        worst = std::max(worst, std::abs(u - alpha * z));
    }
    return worst;
}

}  // namespace thermoneuron
