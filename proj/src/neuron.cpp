#include "thermoneuron/neuron.hpp"

#include <cmath>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

namespace {

double gz(const NeuronSpec& s, double beta) { return fermi_population(beta * s.eps_z); }

void require_single_input(const NeuronSpec& spec, const char* who) {
    if (spec.n != 1) {
        std::ostringstream msg;
        msg << who << ": defined for single-input neurons, got n = " << spec.n;
        throw StructuralError(msg.str());
    }
}

}  // namespace

Calibration calibrate_modulator(double beta_hot, double beta_cold, double eps_z, double mu) {
    if (!(eps_z > 0.0) || !(mu > 0.0) || !(beta_hot < beta_cold)) {
        throw CalibrationError("calibrate_modulator: need eps_z > 0, mu > 0 and beta_hot < beta_cold");
    }
    const double g_hot = fermi_population(beta_hot * eps_z);
    const double g_cold = fermi_population(beta_cold * eps_z);
    Calibration c;
    c.delta = g_hot - g_cold;
    if (!(c.delta > 1e-12)) {
        std::ostringstream msg;
        msg << "calibrate_modulator: rails too close for eps_z = " << eps_z
            << " (delta = " << c.delta << ")";
        throw CalibrationError(msg.str());
    }
    // ln[(1-delta) e^{beta_cold eps_z} - delta] rewritten as ln[(1-g_hot)/g_cold],
    // which does not overflow for large beta_cold eps_z.
    const double num = 1.0 - g_hot;
    if (!(num > 0.0) || !(g_cold > 0.0)) {
        throw CalibrationError("calibrate_modulator: reference temperature is not finite");
    }
    c.beta_r = (std::log(num) - std::log(g_cold)) / eps_z;
    c.mu_prime = mu * (1.0 - c.delta) / c.delta;
    return c;
}

double NeuronSpec::delta() const { return mu / (mu + mu_prime); }

double NeuronSpec::signed_gap() const { return resonant_gap(h, eps); }

std::vector<double> NeuronSpec::bath_betas(std::span<const double> inputs) const {
    if (inputs.size() != n) {
        std::ostringstream msg;
        msg << "expected " << n << " input temperature(s), got " << inputs.size();
        throw StructuralError(msg.str());
    }
    std::vector<double> betas{beta0};
    betas.insert(betas.end(), inputs.begin(), inputs.end());
    return betas;
}

std::vector<std::string> NeuronSpec::validate() const {
    std::vector<std::string> warnings;
    if (n < 1 || n + 2 > kMaxQubits) throw StructuralError("neuron: input count out of range");
    if (eps.size() != n + 1) throw StructuralError("neuron: need n+1 gaps eps_0..eps_n");
    check_interaction_vector(h, n + 1);
    for (double e : eps) {
        if (!std::isfinite(e) || e < 0.0) throw StructuralError("neuron: gaps must be finite and >= 0");
    }
    if (!(eps_z > 0.0) || !std::isfinite(eps_z)) throw StructuralError("neuron: eps_z must be positive");
    if (!std::isfinite(beta0)) throw StructuralError("neuron: beta0 must be finite");
    if (!(chi >= 0.0) || !(gamma > 0.0) || !(mu > 0.0) || !(mu_prime > 0.0) || !(capacity > 0.0)) {
        throw StructuralError("neuron: chi >= 0 and gamma, mu, mu', C > 0 are required");
    }
    if (!(beta_hot < beta_cold)) throw StructuralError("neuron: need beta_hot < beta_cold");

    const double s = signed_gap();
    if (std::abs(std::abs(s) - eps_z) > 1e-9) {
        std::ostringstream msg;
        msg << "neuron: eps_z = " << eps_z << " is off resonance with the virtual gap "
            << std::abs(s);
        throw ResonanceError(msg.str());
    }

    const double g_hot = gz(*this, beta_hot);
    const double g_cold = gz(*this, beta_cold);
    const double d = delta();
    if (std::abs(d - (g_hot - g_cold)) > 1e-10 ||
        std::abs(gz(*this, beta_r) * (1.0 - d) - g_cold) > 1e-10) {
        throw CalibrationError("neuron: modulator is not calibrated to the rails");
    }

    if (gamma / std::max(mu, mu_prime) < 100.0) {
        warnings.push_back("weak timescale separation: gamma / max(mu, mu') < 100");
    }
    if (beta_hot < 0.0 || beta0 < 0.0) warnings.push_back("negative bath beta is not physical");
    return warnings;
}

NeuronSpec make_neuron(std::vector<double> eps, InteractionVector h, double beta0, double eps_z,
                       const MachineParams& p) {
    NeuronSpec s;
    s.n = eps.empty() ? 0 : eps.size() - 1;
    s.eps = std::move(eps);
    s.h = std::move(h);
    s.beta0 = beta0;
    s.eps_z = eps_z;
    s.chi = p.chi;
    s.gamma = p.gamma;
    s.mu = p.mu;
    s.beta_hot = p.beta_hot;
    s.beta_cold = p.beta_cold;
    s.capacity = p.capacity;
    const Calibration c = calibrate_modulator(p.beta_hot, p.beta_cold, eps_z, p.mu);
    s.beta_r = c.beta_r;
    s.mu_prime = c.mu_prime;
    s.validate();
    return s;
}

NeuronSpec make_not(double eps1, double beta0, double eps_z, const MachineParams& params) {
    return make_neuron({eps1 + eps_z, eps1}, {0, 1}, beta0, eps_z, params);
}

double neuron_virtual_temperature(const NeuronSpec& spec, std::span<const double> inputs) {
    const std::vector<double> betas = spec.bath_betas(inputs);
    return virtual_temperature(spec.h, betas, spec.eps, spec.signed_gap());
}

double transfer(const NeuronSpec& spec, double beta_v) {
    // g_z(beta_z) = delta g_z(beta_v) + (1 - delta) g_z(beta_r), solved for beta_z.
    const double d = spec.delta();
    const double gv = gz(spec, beta_v);
    const double gr = gz(spec, spec.beta_r);
    const double q = d * gv + (1.0 - d) * gr;
    const double one_minus_q = d * (1.0 - gv) + (1.0 - d) * (1.0 - gr);
    return std::log(one_minus_q / q) / spec.eps_z;
}

TransferPoint steady_output(const NeuronSpec& spec, std::span<const double> inputs) {
    TransferPoint p;
    p.inputs.assign(inputs.begin(), inputs.end());
    p.beta_v = neuron_virtual_temperature(spec, inputs);
    p.beta_z_inf = transfer(spec, p.beta_v);
    return p;
}

double sigmoid_approx(const NeuronSpec& spec, double beta_v) {
    const double sigma = 1.0 - fermi_population(spec.eps_z * beta_v);
    return spec.beta_hot + (spec.beta_cold - spec.beta_hot) * sigma;
}

double sigmoid_approx(const NeuronSpec& spec, std::span<const double> inputs) {
    return sigmoid_approx(spec, neuron_virtual_temperature(spec, inputs));
}

double threshold_point(const NeuronSpec& spec) {
    require_single_input(spec, "threshold_point");
    // Inflection of the transfer curve in u = eps_z beta_v.
    const double u_star = 0.5 * std::log((1.0 + std::cosh(spec.beta_cold * spec.eps_z)) /
                                         (1.0 + std::cosh(spec.beta_hot * spec.eps_z)));
    const double ref = (spec.h[0] ? -1.0 : 1.0) * spec.beta0 * spec.eps[0];
    const double coeff = (spec.h[1] ? -1.0 : 1.0) * spec.eps[1];
    if (coeff == 0.0) throw StructuralError("threshold_point: input qubit is decoupled");
    return (u_star - ref) / coeff;
}

double slope_at_threshold(const NeuronSpec& spec) {
    require_single_input(spec, "slope_at_threshold");
    const double a = gz(spec, spec.beta_cold);
    const double b = gz(spec, spec.beta_hot);
    const double dbeta_du =
        (b - a) / (a * (1.0 - b) + b * (1.0 - a) + 2.0 * std::sqrt(a * (1.0 - a) * b * (1.0 - b)));
    const double sign = spec.h[1] ? -1.0 : 1.0;
    return sign * spec.eps[1] / spec.eps_z * dbeta_du;
}

double fixed_point_residual(const NeuronSpec& spec, double beta_v) {
    const double d = spec.delta();
    const double lhs = gz(spec, transfer(spec, beta_v));
    return lhs - (d * gz(spec, beta_v) + (1.0 - d) * gz(spec, spec.beta_r));
}

QubitRegister collector_register(const NeuronSpec& spec) {
    std::vector<double> gaps = spec.eps;
    gaps.push_back(spec.eps_z);
    return QubitRegister(std::move(gaps));
}

Lindbladian collector_lindbladian(const NeuronSpec& spec, std::span<const double> inputs,
                                  double beta_z) {
    const std::vector<double> betas = spec.bath_betas(inputs);
    QubitRegister reg = collector_register(spec);
    Matrix hint = build_interaction_hamiltonian(spec.h, spec.chi, reg);
    std::vector<BathContact> contacts;
    for (std::size_t i = 0; i < betas.size(); ++i) contacts.push_back({i, betas[i], spec.gamma});
    contacts.push_back({spec.n + 1, beta_z, spec.mu});
    return Lindbladian(std::move(reg), std::move(hint), std::move(contacts));
}

}  // namespace thermoneuron
