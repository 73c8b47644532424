#pragma once

// Reading logical values out of temperatures: encoding on the rails, banded
// decoding, the Gaussian response channel and the error/dissipation averages.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "thermoneuron/designer.hpp"
#include "thermoneuron/dynamics.hpp"

namespace thermoneuron {

enum class BandMode {
    /// y = 0 iff beta_z <= (1+delta) beta_hot, y = 1 iff beta_z >= (1-delta) beta_cold.
    Multiplicative,
    /// Bands of width delta (beta_cold - beta_hot) at each rail; usable when beta_hot = 0.
    Additive,
};

BandMode parse_band(const std::string& name);
std::string band_name(BandMode mode);

class Encoding {
public:
    /// Throws ConfigError when the rails are unordered or the bands overlap.
    Encoding(double beta_hot = 0.0, double beta_cold = 1.0, double delta = 0.1,
             BandMode band = BandMode::Multiplicative);

    double beta_hot() const noexcept { return hot_; }
    double beta_cold() const noexcept { return cold_; }
    double delta() const noexcept { return delta_; }
    BandMode band() const noexcept { return band_; }
    /// Upper edge of the 0 band and lower edge of the 1 band.
    double zero_edge() const noexcept;
    double one_edge() const noexcept;

private:
    double hot_, cold_, delta_;
    BandMode band_;
};

enum class Output { Zero = 0, One = 1, Invalid = 2 };

double encode(int x, const Encoding& enc);
Output decode(double beta_z, const Encoding& enc);
std::string output_name(Output y);

/// Conditional distribution over (0, 1, invalid) for each table row.
struct ChannelStats {
    std::vector<std::array<double, 3>> p_y_given_x;
};

/// beta_z ~ Normal(mean_r, spread) for each row r, integrated over the bands.
ChannelStats conditional_outputs(std::span<const double> means, const Encoding& enc, double spread);

/// Seeded Monte Carlo estimate of the same table.
ChannelStats conditional_outputs_mc(std::span<const double> means, const Encoding& enc,
                                    double spread, std::size_t samples, std::uint64_t seed);

/// Steady responses of a neuron to each encoded row of an n-input table.
std::vector<double> neuron_means(const NeuronSpec& spec, std::size_t n, const Encoding& enc);

ChannelStats conditional_outputs(const NeuronSpec& spec, const Encoding& enc, double spread);

struct ErrorRates {
    double xi = 0.0;       // wrong valid output
    double invalid = 0.0;  // undecodable output
    double correct = 0.0;
};

/// Averages over input rows with weights p_x (uniform when empty).
ErrorRates average_error(const ChannelStats& stats, const TruthTable& table,
                         std::span<const double> p_x = {});

/// Sum_x p(x) Sigma(encode(x)), each from a quasi-static run over [0, tau]
/// starting at the midpoint of the rails.
double average_dissipation(const NeuronSpec& spec, const Encoding& enc, double tau,
                           std::span<const double> p_x = {});

enum class Knob { Eps1, Alpha };
Knob parse_knob(const std::string& name);

struct TradeoffPoint {
    double knob = 0.0;
    double avg_sigma = 0.0;
    double avg_xi = 0.0;
    double avg_invalid = 0.0;
};

struct TradeoffConfig {
    Gate gate = Gate::Not;
    Knob knob = Knob::Eps1;
    std::vector<double> grid;
    double spread = 0.05;
    double tau = 1e8;
    /// Used for the alpha knob and as the source of machine constants.
    DesignConfig design;
    /// Reference temperature of the eps1-knob inverter.
    double beta0 = 0.5;
};

/// The eps1 knob builds the direct inverter with eps_0 = eps_1 + eps_z; the
/// alpha knob compiles the gate's preset weights.
NeuronSpec tradeoff_machine(const TradeoffConfig& cfg, double knob);

std::vector<TradeoffPoint> tradeoff_sweep(const TradeoffConfig& cfg, const Encoding& enc);

/// Standard normal CDF, accurate in the far tails.
double normal_cdf(double x);

}  // namespace thermoneuron
