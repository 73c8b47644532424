#pragma once

// Virtual qubits of a collector: the pair of product levels |h> and |h xor 1>
// of the machine part, their gap, population and effective temperature.

#include <span>
#include <vector>

#include "thermoneuron/quantum.hpp"

namespace thermoneuron {

/// Bits h_0..h_n, one per machine-part qubit.
using InteractionVector = std::vector<int>;

struct VirtualQubit {
    double gap = 0.0;         // always >= 0; levels are relabeled when needed
    double population = 0.0;  // excited (upper-level) share within the subspace
    double beta_v = 0.0;
};

/// sum_i (-1)^(h_i xor 1) eps_i, i.e. E(h) - E(h xor 1).
double virtual_gap(std::span<const int> h, std::span<const double> eps);

/// sum_i (-1)^h_i eps_i = E(h xor 1) - E(h); the gap the target qubit must match.
double resonant_gap(std::span<const int> h, std::span<const double> eps);

/// prod_i g_i(h_i): occupation of the product level |h> in the Gibbs product state.
double virtual_population(std::span<const int> h, std::span<const double> betas,
                          std::span<const double> eps);

/// (1/eps_target) sum_i (-1)^h_i beta_i eps_i. Throws ResonanceError for eps_target = 0.
double virtual_temperature(std::span<const int> h, std::span<const double> betas,
                           std::span<const double> eps, double eps_target);

/// Gap, normalized population and temperature in one go. Throws for a zero gap.
VirtualQubit virtual_qubit(std::span<const int> h, std::span<const double> betas,
                           std::span<const double> eps);

/// chi-amplitude swap between the virtual qubit and the last register qubit (C_z).
///
/// The register holds the n+1 machine qubits followed by C_z. The coupled
/// pair is lower(h) (x) |1>_z <-> upper(h) (x) |0>_z, where lower/upper is the
/// energy ordering of |h>, |h xor 1>. Throws ResonanceError when the C_z gap
/// differs from the virtual gap by more than 1e-9.
Matrix build_interaction_hamiltonian(std::span<const int> h, double chi,
                                     const QubitRegister& reg);

void check_interaction_vector(std::span<const int> h, std::size_t expected);

}  // namespace thermoneuron
