#include "thermoneuron/virtual_qubit.hpp"

#include <cmath>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

namespace {

constexpr double kResonanceTol = 1e-9;

void check_lengths(std::size_t a, std::size_t b, const char* who) {
    if (a != b) {
        std::ostringstream msg;
        msg << who << ": length mismatch (" << a << " vs " << b << ")";
        throw StructuralError(msg.str());
    }
}

}  // namespace

void check_interaction_vector(std::span<const int> h, std::size_t expected) {
    check_lengths(h.size(), expected, "interaction vector");
    for (int b : h) {
        if (b != 0 && b != 1) throw StructuralError("interaction vector entries must be 0 or 1");
    }
}

double resonant_gap(std::span<const int> h, std::span<const double> eps) {
    check_interaction_vector(h, eps.size());
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += h[i] ? -eps[i] : eps[i];
    return s;
}

double virtual_gap(std::span<const int> h, std::span<const double> eps) {
    return -resonant_gap(h, eps);
}

double virtual_population(std::span<const int> h, std::span<const double> betas,
                          std::span<const double> eps) {
    check_interaction_vector(h, eps.size());
    check_lengths(betas.size(), eps.size(), "virtual_population");
    double p = 1.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double excited = fermi_population(betas[i] * eps[i]);
        p *= h[i] ? excited : 1.0 - excited;
    }
    return p;
}

double virtual_temperature(std::span<const int> h, std::span<const double> betas,
                           std::span<const double> eps, double eps_target) {
    check_interaction_vector(h, eps.size());
    check_lengths(betas.size(), eps.size(), "virtual_temperature");
    if (eps_target == 0.0) throw ResonanceError("virtual_temperature: target gap is zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double term = betas[i] * eps[i];
        acc += h[i] ? -term : term;
    }
    return acc / eps_target;
}

VirtualQubit virtual_qubit(std::span<const int> h, std::span<const double> betas,
                           std::span<const double> eps) {
    const double s = resonant_gap(h, eps);
    VirtualQubit v;
    v.beta_v = virtual_temperature(h, betas, eps, s);
    v.gap = std::abs(s);
    v.population = fermi_population(v.beta_v * v.gap);
    return v;
}

Matrix build_interaction_hamiltonian(std::span<const int> h, double chi,
                                     const QubitRegister& reg) {
    if (reg.size() < 2) throw StructuralError("interaction needs a machine part and a target");
    const std::size_t machine = reg.size() - 1;
    check_interaction_vector(h, machine);
    const std::vector<double> eps(reg.gaps().begin(), reg.gaps().begin() + machine);
    const double s = resonant_gap(h, eps);
    const double eps_z = reg.gap(machine);
    const double mismatch = std::abs(std::abs(s) - eps_z);
    if (mismatch > kResonanceTol || s == 0.0) {
        std::ostringstream msg;
        msg << "target gap " << eps_z << " is off resonance with the virtual gap " << std::abs(s)
            << " (mismatch " << mismatch << ")";
        throw ResonanceError(msg.str());
    }

    const auto d = static_cast<Eigen::Index>(reg.dimension());
    Matrix hint = Matrix::Zero(d, d);
    if (chi == 0.0) return hint;

    std::vector<int> lower(h.begin(), h.end());
    std::vector<int> upper(lower);
    for (int& b : upper) b ^= 1;
    if (s < 0.0) std::swap(lower, upper);
    lower.push_back(1);
    upper.push_back(0);
    const auto a = static_cast<Eigen::Index>(reg.index_of(lower));
    const auto b = static_cast<Eigen::Index>(reg.index_of(upper));
    hint(a, b) = chi;
    hint(b, a) = chi;
    return hint;
}

}  // namespace thermoneuron
