#pragma once

// Steady-state model of a single thermodynamic neuron: a collector whose
// virtual qubit is swapped with the target qubit C_z, plus a modulator qubit
// that pins the output of the finite reservoir B_z between two rails.

#include <string>
#include <vector>

#include "thermoneuron/quantum.hpp"
#include "thermoneuron/virtual_qubit.hpp"

namespace thermoneuron {

/// Physical constants shared by every neuron of a design.
struct MachineParams {
    double chi = 1.0;
    double gamma = 1.0;
    double mu = 1e-4;
    double beta_hot = 0.0;
    double beta_cold = 1.0;
    double capacity = 1.0;
};

struct Calibration {
    double delta = 0.0;
    double beta_r = 0.0;
    double mu_prime = 0.0;
};

/// Chooses beta_r and mu' so the output rails are exactly beta_hot and beta_cold.
/// Throws CalibrationError when delta <= 1e-12 or the log argument is not positive.
Calibration calibrate_modulator(double beta_hot, double beta_cold, double eps_z, double mu);

struct NeuronSpec {
    std::size_t n = 1;
    std::vector<double> eps;  // eps_0 .. eps_n
    InteractionVector h;
    double beta0 = 0.5;
    double eps_z = 0.1;
    double chi = 1.0;
    double gamma = 1.0;
    double mu = 1e-4;
    double mu_prime = 0.0;
    double beta_r = 0.0;
    double beta_hot = 0.0;
    double beta_cold = 1.0;
    double capacity = 1.0;

    /// Throws StructuralError/ResonanceError/CalibrationError on hard violations
    /// and returns soft warnings (weak timescale separation, negative betas).
    std::vector<std::string> validate() const;

    double delta() const;
    /// sum_i (-1)^h_i eps_i; its magnitude equals eps_z for a valid spec.
    double signed_gap() const;
    /// beta_0 followed by the inputs.
    std::vector<double> bath_betas(std::span<const double> inputs) const;
};

/// Fills in the modulator calibration and validates.
NeuronSpec make_neuron(std::vector<double> eps, InteractionVector h, double beta0, double eps_z,
                       const MachineParams& params = {});

/// The single-input inverter: eps = (eps1 + eps_z, eps1), h = (0, 1).
NeuronSpec make_not(double eps1, double beta0 = 0.5, double eps_z = 0.1,
                    const MachineParams& params = {});

struct TransferPoint {
    std::vector<double> inputs;
    double beta_v = 0.0;
    double beta_z_inf = 0.0;
};

double neuron_virtual_temperature(const NeuronSpec& spec, std::span<const double> inputs);

/// Exact steady output as a function of the virtual temperature.
double transfer(const NeuronSpec& spec, double beta_v);

TransferPoint steady_output(const NeuronSpec& spec, std::span<const double> inputs);

/// Small-eps_z sigmoid form hot + (cold - hot) / (1 + exp(-eps_z beta_v)).
double sigmoid_approx(const NeuronSpec& spec, double beta_v);
double sigmoid_approx(const NeuronSpec& spec, std::span<const double> inputs);

/// Input temperature at the inflection of the single-input transfer curve.
double threshold_point(const NeuronSpec& spec);

/// d beta_z_inf / d beta_1 at the threshold, in closed form.
double slope_at_threshold(const NeuronSpec& spec);

/// g_z(beta_z_inf) - [delta g_z(beta_v) + (1 - delta) g_z(beta_r)].
double fixed_point_residual(const NeuronSpec& spec, double beta_v);

/// Collector register: the n+1 machine qubits followed by C_z.
QubitRegister collector_register(const NeuronSpec& spec);

/// Collector generator with C_z coupled to B_z at inverse temperature beta_z.
Lindbladian collector_lindbladian(const NeuronSpec& spec, std::span<const double> inputs,
                                  double beta_z);

}  // namespace thermoneuron
