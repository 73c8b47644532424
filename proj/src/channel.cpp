#include "thermoneuron/channel.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

BandMode parse_band(const std::string& name) {
    if (name == "multiplicative" || name == "mult") return BandMode::Multiplicative;
    if (name == "additive" || name == "add") return BandMode::Additive;
    throw ConfigError("unknown band mode '" + name + "' (expected multiplicative or additive)");
}

std::string band_name(BandMode mode) {
    return mode == BandMode::Additive ? "additive" : "multiplicative";
}

Encoding::Encoding(double beta_hot, double beta_cold, double delta, BandMode band)
    : hot_(beta_hot), cold_(beta_cold), delta_(delta), band_(band) {
    if (!std::isfinite(hot_) || !std::isfinite(cold_) || !(hot_ < cold_)) {
        throw ConfigError("encoding: need finite rails with beta_hot < beta_cold");
    }
    if (!(delta_ >= 0.0 && delta_ < 1.0)) throw ConfigError("encoding: delta must lie in [0, 1)");
    if (!(zero_edge() < one_edge())) {
        std::ostringstream msg;
        msg << "encoding: decoding bands overlap (" << zero_edge() << " >= " << one_edge() << ")";
        throw ConfigError(msg.str());
    }
}

double Encoding::zero_edge() const noexcept {
    return band_ == BandMode::Additive ? hot_ + delta_ * (cold_ - hot_) : (1.0 + delta_) * hot_;
}

double Encoding::one_edge() const noexcept {
    return band_ == BandMode::Additive ? cold_ - delta_ * (cold_ - hot_) : (1.0 - delta_) * cold_;
}

double encode(int x, const Encoding& enc) {
    if (x != 0 && x != 1) throw ConfigError("encode: logical value must be 0 or 1");
    return x ? enc.beta_cold() : enc.beta_hot();
}

Output decode(double beta_z, const Encoding& enc) {
    if (beta_z <= enc.zero_edge()) return Output::Zero;
    if (beta_z >= enc.one_edge()) return Output::One;
    return Output::Invalid;
}

std::string output_name(Output y) {
    switch (y) {
        case Output::Zero: return "0";
        case Output::One: return "1";
        case Output::Invalid: return "invalid";
    }
    return "?";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

ChannelStats conditional_outputs(std::span<const double> means, const Encoding& enc, double spread) {
    if (!(spread > 0.0)) throw ConfigError("channel spread C must be positive");
    ChannelStats stats;
    for (double m : means) {
        const double lo = (enc.zero_edge() - m) / spread;
        const double hi = (enc.one_edge() - m) / spread;
        const double p0 = normal_cdf(lo);
        const double p1 = normal_cdf(-hi);
        // Difference of two tails, whichever side keeps precision.
        const double pinv = lo >= 0.0 ? normal_cdf(-lo) - normal_cdf(-hi) : normal_cdf(hi) - normal_cdf(lo);
        stats.p_y_given_x.push_back({p0, p1, std::max(0.0, pinv)});
    }
    return stats;
}

ChannelStats conditional_outputs_mc(std::span<const double> means, const Encoding& enc,
                                    double spread, std::size_t samples, std::uint64_t seed) {
    if (!(spread > 0.0)) throw ConfigError("channel spread C must be positive");
    if (samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
    ChannelStats stats;
    for (std::size_t r = 0; r < means.size(); ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> noise(means[r], spread);
        std::array<std::size_t, 3> counts{};
        for (std::size_t k = 0; k < samples; ++k) ++counts[static_cast<int>(decode(noise(rng), enc))];
        const double total = static_cast<double>(samples);
        stats.p_y_given_x.push_back({counts[0] / total, counts[1] / total, counts[2] / total});
    }
    return stats;
}

std::vector<double> neuron_means(const NeuronSpec& spec, std::size_t n, const Encoding& enc) {
    std::vector<double> means;
    TruthTable shape;
    shape.n = n;
    for (std::size_t r = 0; r < (std::size_t{1} << n); ++r) {
        std::vector<double> beta;
        for (int b : shape.inputs(r)) beta.push_back(encode(b, enc));
        means.push_back(steady_output(spec, beta).beta_z_inf);
    }
    return means;
}

ChannelStats conditional_outputs(const NeuronSpec& spec, const Encoding& enc, double spread) {
    return conditional_outputs(neuron_means(spec, spec.n, enc), enc, spread);
}

namespace {

std::vector<double> input_weights(std::span<const double> p_x, std::size_t rows) {
    if (p_x.empty()) return std::vector<double>(rows, 1.0 / static_cast<double>(rows));
    if (p_x.size() != rows) throw ConfigError("input distribution has the wrong length");
    double total = 0.0;
    for (double p : p_x) {
        if (!(p >= 0.0)) throw ConfigError("input probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("input probabilities must sum to 1");
    return {p_x.begin(), p_x.end()};
}

}  // namespace

ErrorRates average_error(const ChannelStats& stats, const TruthTable& table,
                         std::span<const double> p_x) {
    if (stats.p_y_given_x.size() != table.rows()) {
        throw StructuralError("average_error: channel table and truth table differ in size");
    }
    const std::vector<double> w = input_weights(p_x, table.rows());
    ErrorRates e;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        const auto& p = stats.p_y_given_x[r];
        const int want = table.outputs[r];
        e.xi += w[r] * p[1 - want];
        e.correct += w[r] * p[want];
        e.invalid += w[r] * p[2];
    }
    return e;
}

double average_dissipation(const NeuronSpec& spec, const Encoding& enc, double tau,
                           std::span<const double> p_x) {
    TruthTable shape;
    shape.n = spec.n;
    const std::size_t rows = std::size_t{1} << spec.n;
    const std::vector<double> w = input_weights(p_x, rows);
    if (tau == 0.0) return 0.0;
    const double start = 0.5 * (enc.beta_hot() + enc.beta_cold());
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        std::vector<double> beta;
        for (int b : shape.inputs(r)) beta.push_back(encode(b, enc));
        const Trajectory traj = evolve_quasi_static(spec, beta, start, tau);
        total += w[r] * accumulated_dissipation(traj, spec, beta);
    }
    return total;
}

Knob parse_knob(const std::string& name) {
    if (name == "eps1") return Knob::Eps1;
    if (name == "alpha") return Knob::Alpha;
    throw ConfigError("unknown knob '" + name + "' (expected eps1 or alpha)");
}

NeuronSpec tradeoff_machine(const TradeoffConfig& cfg, double knob) {
    if (cfg.knob == Knob::Eps1) {
        if (cfg.gate != Gate::Not) throw ConfigError("the eps1 knob applies to the NOT gate only");
        return make_not(knob, cfg.beta0, cfg.design.eps_z, cfg.design.machine);
    }
    DesignConfig d = cfg.design;
    d.alpha = knob;
    return preset(cfg.gate, d);
}

std::vector<TradeoffPoint> tradeoff_sweep(const TradeoffConfig& cfg, const Encoding& enc) {
    const TruthTable table = gate_table(cfg.gate);
    std::vector<TradeoffPoint> curve;
    for (double k : cfg.grid) {
        const NeuronSpec spec = tradeoff_machine(cfg, k);
        const ErrorRates e = average_error(conditional_outputs(spec, enc, cfg.spread), table);
        curve.push_back({k, average_dissipation(spec, enc, cfg.tau), e.xi, e.invalid});
    }
    return curve;
}

}  // namespace thermoneuron
