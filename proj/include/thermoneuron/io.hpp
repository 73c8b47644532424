#pragma once

// Machine files (JSON) and number formatting for CSV output.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "thermoneuron/network.hpp"

namespace thermoneuron {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kUnitsNote = "natural units, k_B = hbar = 1";

/// %.12g
std::string fmt12(double x);

nlohmann::json to_json(const NeuronSpec& spec);
nlohmann::json to_json(const NetworkSpec& net);
/// Strict readers: missing or unknown keys raise ConfigError.
NeuronSpec neuron_from_json(const nlohmann::json& j);
NetworkSpec network_from_json(const nlohmann::json& j);

struct Provenance {
    nlohmann::json weights = nlohmann::json::array();
    double alpha = 0.0;
    double eps_z = 0.0;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
};

struct MachineFile {
    enum class Kind { Neuron, Network } kind = Kind::Neuron;
    NeuronSpec neuron;
    NetworkSpec network;
    Provenance provenance;

    /// Either kind viewed as a network (a neuron becomes one layer).
    NetworkSpec as_network() const;
    std::size_t inputs() const;
};

nlohmann::json to_json(const MachineFile& file);
MachineFile machine_from_json(const nlohmann::json& j);

/// Canonical text form: two-space indented JSON with a trailing newline.
std::string dump_machine(const MachineFile& file);
MachineFile parse_machine(const std::string& text);
MachineFile load_machine(const std::string& path);

}  // namespace thermoneuron
