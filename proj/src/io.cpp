#include "thermoneuron/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

using nlohmann::json;

std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

void expect_keys(const json& j, const std::set<std::string>& keys, const char* what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
    for (const auto& [k, _] : j.items()) {
        if (!keys.count(k)) throw ConfigError(std::string(what) + ": unknown field '" + k + "'");
    }
    for (const auto& k : keys) {
        if (!j.contains(k)) throw ConfigError(std::string(what) + ": missing field '" + k + "'");
    }
}

template <class T>
T get(const json& j, const char* key, const char* what) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

}  // namespace

json to_json(const NeuronSpec& s) {
    return json{{"n", s.n},
                {"eps", s.eps},
                {"h", s.h},
                {"beta0", s.beta0},
                {"eps_z", s.eps_z},
                {"chi", s.chi},
                {"gamma", s.gamma},
                {"mu", s.mu},
                {"mu_prime", s.mu_prime},
                {"beta_r", s.beta_r},
                {"beta_hot", s.beta_hot},
                {"beta_cold", s.beta_cold},
                {"capacity", s.capacity}};
}

NeuronSpec neuron_from_json(const json& j) {
    const char* what = "neuron";
    expect_keys(j, {"n", "eps", "h", "beta0", "eps_z", "chi", "gamma", "mu", "mu_prime", "beta_r",
                    "beta_hot", "beta_cold", "capacity"},
                what);
    NeuronSpec s;
    s.n = get<std::size_t>(j, "n", what);
    s.eps = get<std::vector<double>>(j, "eps", what);
    s.h = get<std::vector<int>>(j, "h", what);
    s.beta0 = get<double>(j, "beta0", what);
    s.eps_z = get<double>(j, "eps_z", what);
    s.chi = get<double>(j, "chi", what);
    s.gamma = get<double>(j, "gamma", what);
    s.mu = get<double>(j, "mu", what);
    s.mu_prime = get<double>(j, "mu_prime", what);
    s.beta_r = get<double>(j, "beta_r", what);
    s.beta_hot = get<double>(j, "beta_hot", what);
    s.beta_cold = get<double>(j, "beta_cold", what);
    s.capacity = get<double>(j, "capacity", what);
    try {
        s.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("neuron: ") + e.what());
    }
    return s;
}

json to_json(const NetworkSpec& net) {
    json layers = json::array();
    for (const auto& layer : net.layers) {
        json nodes = json::array();
        for (const auto& node : layer) nodes.push_back({{"neuron", to_json(node.neuron)}, {"wiring", node.wiring}});
        layers.push_back(nodes);
    }
    return json{{"inputs", net.inputs}, {"layers", layers}};
}

NetworkSpec network_from_json(const json& j) {
    const char* what = "network";
    expect_keys(j, {"inputs", "layers"}, what);
    NetworkSpec net;
    net.inputs = get<std::size_t>(j, "inputs", what);
    if (!j["layers"].is_array()) throw ConfigError("network: layers must be an array");
    for (const auto& layer : j["layers"]) {
        if (!layer.is_array()) throw ConfigError("network: each layer must be an array");
        std::vector<NetworkNode> nodes;
        for (const auto& node : layer) {
            expect_keys(node, {"neuron", "wiring"}, "network node");
            nodes.push_back({neuron_from_json(node["neuron"]),
                             get<std::vector<std::size_t>>(node, "wiring", "network node")});
        }
        net.layers.push_back(std::move(nodes));
    }
    try {
        net.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return net;
}

NetworkSpec MachineFile::as_network() const {
    return kind == Kind::Network ? network : single_neuron_network(neuron);
}

std::size_t MachineFile::inputs() const { return kind == Kind::Network ? network.inputs : neuron.n; }

json to_json(const MachineFile& f) {
    const Provenance& p = f.provenance;
    return json{{"kind", f.kind == MachineFile::Kind::Network ? "network" : "neuron"},
                {"spec", f.kind == MachineFile::Kind::Network ? to_json(f.network) : to_json(f.neuron)},
                {"provenance",
                 {{"weights", p.weights},
                  {"alpha", p.alpha},
                  {"eps_z", p.eps_z},
                  {"seed", p.seed},
                  {"tool_version", p.tool_version}}},
                {"units", kUnitsNote}};
}

MachineFile machine_from_json(const json& j) {
    expect_keys(j, {"kind", "spec", "provenance", "units"}, "machine file");
    MachineFile f;
    const auto kind = get<std::string>(j, "kind", "machine file");
    if (kind == "neuron") {
        f.kind = MachineFile::Kind::Neuron;
        f.neuron = neuron_from_json(j["spec"]);
    } else if (kind == "network") {
        f.kind = MachineFile::Kind::Network;
        f.network = network_from_json(j["spec"]);
    } else {
        throw ConfigError("machine file: kind must be 'neuron' or 'network'");
    }
    const json& p = j["provenance"];
    expect_keys(p, {"weights", "alpha", "eps_z", "seed", "tool_version"}, "provenance");
    f.provenance.weights = p["weights"];
    f.provenance.alpha = get<double>(p, "alpha", "provenance");
    f.provenance.eps_z = get<double>(p, "eps_z", "provenance");
    f.provenance.seed = get<std::uint64_t>(p, "seed", "provenance");
    f.provenance.tool_version = get<std::string>(p, "tool_version", "provenance");
    get<std::string>(j, "units", "machine file");
    return f;
}

std::string dump_machine(const MachineFile& file) { return to_json(file).dump(2) + "\n"; }

MachineFile parse_machine(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("machine file is not valid JSON: ") + e.what());
    }
    return machine_from_json(j);
}

MachineFile load_machine(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open machine file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_machine(buf.str());
}

}  // namespace thermoneuron
