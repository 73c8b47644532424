#pragma once

// Slow evolution of the finite reservoir B_z. The collector and modulator
// relax on the 1/gamma scale; B_z drifts on the 1/mu scale. Either the fast
// part is eliminated (quasi-static) or everything is integrated jointly.

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "thermoneuron/neuron.hpp"

namespace thermoneuron {

enum class EvolutionMode { QuasiStatic, Full };

struct TrajectorySample {
    double t = 0.0;
    double beta_z = 0.0;
    double j_c = 0.0;        // heat into the collector from B_z
    double j_m = 0.0;        // heat into the modulator from B_z
    double sigma_dot = 0.0;  // entropy production rate
    double sigma = 0.0;      // accumulated entropy production
    /// Excited population of C_z (full mode only).
    double cz_population = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
    EvolutionMode mode = EvolutionMode::QuasiStatic;
    std::vector<TrajectorySample> samples;

    const TrajectorySample& back() const { return samples.back(); }
};

struct EvolutionOptions {
    /// Output samples per decade of time.
    int samples_per_decade = 200;
    /// Decades covered below tau by the log-spaced grid.
    int decades = 8;
    double rtol = 1e-9;
    double atol = 1e-12;
};

/// Sample times: 0, then log-spaced up to tau.
std::vector<double> sample_times(double tau, const EvolutionOptions& opts = {});

/// Quasi-static currents at reservoir temperature beta_z.
struct SlowCurrents {
    double j_c = 0.0;
    double j_m = 0.0;
    double sigma_dot = 0.0;
};
SlowCurrents slow_currents(const NeuronSpec& spec, double beta_v, double beta_z);

Trajectory evolve_quasi_static(const NeuronSpec& spec, std::span<const double> inputs,
                               double beta_z0, double tau, const EvolutionOptions& opts = {});

/// Collector, modulator and beta_z integrated together. The modulator is reset
/// by B_r at rate gamma and by B_z at rate mu'.
Trajectory evolve_full(const NeuronSpec& spec, std::span<const double> inputs, double beta_z0,
                       double tau, EvolutionOptions opts = {.samples_per_decade = 20,
                                                            .decades = 8,
                                                            .rtol = 1e-7,
                                                            .atol = 1e-10});

/// Trapezoidal integral of the entropy production rate along the trajectory.
double accumulated_dissipation(const Trajectory& trajectory, const NeuronSpec& spec,
                               std::span<const double> inputs);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace thermoneuron
