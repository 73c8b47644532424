#include "thermoneuron/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "thermoneuron/error.hpp"
#include "thermoneuron/io.hpp"
#include "thermoneuron/ode.hpp"

namespace thermoneuron {

namespace {

void check_horizon(const NeuronSpec& spec, double beta_z0, double tau) {
    if (!(spec.capacity > 0.0)) throw StructuralError("heat capacity must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw StructuralError("horizon must be finite and >= 0");
    if (!std::isfinite(beta_z0)) throw StructuralError("initial beta_z must be finite");
}

void accumulate(Trajectory& traj) {
    auto& s = traj.samples;
    s[0].sigma = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        s[k].sigma = s[k - 1].sigma + 0.5 * (s[k].t - s[k - 1].t) * (s[k].sigma_dot + s[k - 1].sigma_dot);
    }
}

// Hermitian d x d matrix <-> d^2 reals: diagonal first, then (re, im) of the
// strict upper triangle row by row.
void pack(const Matrix& m, Eigen::VectorXd& v, Eigen::Index offset) {
    const Eigen::Index d = m.rows();
    Eigen::Index k = offset;
    for (Eigen::Index i = 0; i < d; ++i) v[k++] = m(i, i).real();
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            v[k++] = m(i, j).real();
            v[k++] = m(i, j).imag();
        }
    }
}

Matrix unpack(const Eigen::VectorXd& v, Eigen::Index offset, Eigen::Index d) {
    Matrix m(d, d);
    Eigen::Index k = offset;
    for (Eigen::Index i = 0; i < d; ++i) m(i, i) = v[k++];
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            m(i, j) = Complex(v[k], v[k + 1]);
            m(j, i) = std::conj(m(i, j));
            k += 2;
        }
    }
    return m;
}

Matrix commutator_term(const Matrix& h, const Matrix& rho) {
    return Complex(0.0, -1.0) * (h * rho - rho * h);
}

}  // namespace

std::vector<double> sample_times(double tau, const EvolutionOptions& opts) {
    std::vector<double> t{0.0};
    if (tau <= 0.0) return t;
    const int total = opts.decades * opts.samples_per_decade;
    for (int k = 0; k < total; ++k) {
        const double e = -static_cast<double>(opts.decades) +
                         static_cast<double>(k) / opts.samples_per_decade;
        t.push_back(tau * std::pow(10.0, e));
    }
    t.push_back(tau);
    return t;
}

SlowCurrents slow_currents(const NeuronSpec& spec, double beta_v, double beta_z) {
    const double gz = fermi_population(beta_z * spec.eps_z);
    SlowCurrents c;
    c.j_c = spec.mu * spec.eps_z * (gz - fermi_population(beta_v * spec.eps_z));
    c.j_m = spec.mu_prime * spec.eps_z * (gz - fermi_population(spec.beta_r * spec.eps_z));
    // Heat j_c leaves B_z and is split among the input baths in proportion to
    // (-1)^h_i eps_i / eps_z; the modulator passes j_m on to B_r.
    c.sigma_dot = c.j_c * (beta_v - beta_z) + c.j_m * (spec.beta_r - beta_z);
    return c;
}

Trajectory evolve_quasi_static(const NeuronSpec& spec, std::span<const double> inputs,
                               double beta_z0, double tau, const EvolutionOptions& opts) {
    check_horizon(spec, beta_z0, tau);
    const double beta_v = neuron_virtual_temperature(spec, inputs);

    auto rhs = [&](const Eigen::VectorXd& y) {
        const SlowCurrents c = slow_currents(spec, beta_v, y[0]);
        Eigen::VectorXd dy(1);
        dy[0] = (c.j_c + c.j_m) / spec.capacity;
        return dy;
    };
    auto norm = [&](const Eigen::VectorXd& err, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::abs(err[0]) / (opts.atol + opts.rtol * std::max(std::abs(a[0]), std::abs(b[0])));
    };
    auto keep = [](Eigen::VectorXd&) { return false; };

    Trajectory traj;
    traj.mode = EvolutionMode::QuasiStatic;
    Eigen::VectorXd y(1);
    y[0] = beta_z0;
    ode::StepControl control;
    control.atol = opts.atol;
    control.rtol = opts.rtol;
    double prev = 0.0;
    for (double t : sample_times(tau, opts)) {
        if (t > prev) {
            const ode::StepStats st = ode::dormand_prince(y, rhs, prev, t, control, norm, keep);
            if (st.last_step > 0.0) control.initial_step = st.last_step;
        }
        const SlowCurrents c = slow_currents(spec, beta_v, y[0]);
        traj.samples.push_back({t, y[0], c.j_c, c.j_m, c.sigma_dot, 0.0});
        prev = t;
    }
    accumulate(traj);
    return traj;
}

Trajectory evolve_full(const NeuronSpec& spec, std::span<const double> inputs, double beta_z0,
                       double tau, EvolutionOptions opts) {
    check_horizon(spec, beta_z0, tau);
    const std::vector<double> betas = spec.bath_betas(inputs);
    const std::size_t m = spec.n + 2;
    const std::size_t z = spec.n + 1;

    // The B_z contact is rebuilt at the instantaneous beta_z on every call, so
    // the template only needs a placeholder rate (mu may be zero here).
    NeuronSpec shape = spec;
    shape.mu = 1.0;
    const Lindbladian fixed = collector_lindbladian(shape, inputs, beta_z0);
    const QubitRegister& reg_c = fixed.reg();
    std::vector<BathContact> fast(fixed.contacts().begin(), fixed.contacts().end() - 1);
    const Matrix& h_c = fixed.hamiltonian();
    const Matrix& h0_c = fixed.free_hamiltonian();
    const QubitRegister reg_m({spec.eps_z});
    const Matrix h0_m = reg_m.free_hamiltonian();
    const BathContact reference{0, spec.beta_r, spec.gamma};

    const Eigen::Index dc = static_cast<Eigen::Index>(reg_c.dimension());
    const Eigen::Index off_m = dc * dc;
    const Eigen::Index off_z = off_m + 4;

    struct Eval {
        Matrix drho_c, drho_m;
        double j_c, j_m;
    };
    auto evaluate = [&](const Matrix& rho_c, const Matrix& rho_m, double beta_z) {
        const BathContact zc{z, beta_z, spec.mu};
        const BathContact zm{0, beta_z, spec.mu_prime};
        Eval e;
        const Matrix lz_c = reset_dissipator(rho_c, zc, reg_c);
        e.drho_c = commutator_term(h_c, rho_c) + lz_c;
        for (const auto& c : fast) e.drho_c += reset_dissipator(rho_c, c, reg_c);
        const Matrix lz_m = reset_dissipator(rho_m, zm, reg_m);
        e.drho_m = commutator_term(h0_m, rho_m) + lz_m + reset_dissipator(rho_m, reference, reg_m);
        e.j_c = (h0_c * lz_c).trace().real();
        e.j_m = (h0_m * lz_m).trace().real();
        return e;
    };

    auto rhs = [&](const Eigen::VectorXd& y) {
        const Eval e = evaluate(unpack(y, 0, dc), unpack(y, off_m, 2), y[off_z]);
        Eigen::VectorXd dy(y.size());
        pack(e.drho_c, dy, 0);
        pack(e.drho_m, dy, off_m);
        dy[off_z] = (e.j_c + e.j_m) / spec.capacity;
        return dy;
    };

    std::vector<DensityMatrix> factors;
    for (std::size_t i = 0; i + 1 < m; ++i) factors.push_back(gibbs_qubit(betas[i], spec.eps[i]));
    factors.push_back(gibbs_qubit(beta_z0, spec.eps_z));
    Eigen::VectorXd y(off_z + 1);
    pack(product_state(factors).matrix(), y, 0);
    pack(gibbs_qubit(spec.beta_r, spec.eps_z).matrix(), y, off_m);
    y[off_z] = beta_z0;

    ode::StepControl control;
    control.atol = opts.atol;
    control.rtol = opts.rtol;
    const ode::Rosenbrock23 solver(rhs, control);

    Trajectory traj;
    traj.mode = EvolutionMode::Full;
    double h = 0.0;
    double prev = 0.0;
    for (double t : sample_times(tau, opts)) {
        if (t > prev) {
            try {
                solver.integrate(y, prev, t, h);
            } catch (const IntegrationError& err) {
                std::ostringstream msg;
                msg << err.what() << "; the reservoir may be too small for this horizon,"
                    << " try a larger heat capacity C (currently " << spec.capacity << ")";
                throw IntegrationError(msg.str());
            }
        }
        const Matrix rho_c = unpack(y, 0, dc);
        const Matrix rho_m = unpack(y, off_m, 2);
        const double beta_z = y[off_z];
        const Eval e = evaluate(rho_c, rho_m, beta_z);

        std::vector<BathContact> all_c = fast;
        all_c.push_back({z, beta_z, spec.mu});
        const BathContact all_m[] = {reference, {0, beta_z, spec.mu_prime}};
        const double sd =
            entropy_production_rate(rho_c, all_c, h0_c, reg_c, entropy_rate(rho_c, e.drho_c)) +
            entropy_production_rate(rho_m, all_m, h0_m, reg_m, entropy_rate(rho_m, e.drho_m));

        TrajectorySample s{t, beta_z, e.j_c, e.j_m, sd, 0.0};
        double pz = 0.0;
        for (Eigen::Index i = 0; i < dc; ++i) {
            if (reg_c.bit(static_cast<std::size_t>(i), z)) pz += rho_c(i, i).real();
        }
        s.cz_population = pz / rho_c.trace().real();
        traj.samples.push_back(s);
        prev = t;
    }
    accumulate(traj);
    return traj;
}

double accumulated_dissipation(const Trajectory& trajectory, const NeuronSpec& spec,
                               std::span<const double> inputs) {
    const auto& s = trajectory.samples;
    if (s.empty()) return 0.0;
    std::vector<double> rate(s.size());
    if (trajectory.mode == EvolutionMode::QuasiStatic) {
        // Machine entropy is stationary here, so only the bath terms remain.
        const double beta_v = neuron_virtual_temperature(spec, inputs);
        for (std::size_t k = 0; k < s.size(); ++k) {
            rate[k] = slow_currents(spec, beta_v, s[k].beta_z).sigma_dot;
        }
    } else {
        for (std::size_t k = 0; k < s.size(); ++k) rate[k] = s[k].sigma_dot;
    }
    double total = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        total += 0.5 * (s[k].t - s[k - 1].t) * (rate[k] + rate[k - 1]);
    }
    return total;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "# natural units (k_B = hbar = 1); mode="
        << (trajectory.mode == EvolutionMode::Full ? "full" : "quasi") << "\n";
    out << "t,beta_z,j_C,j_M,sigma_dot,sigma\n";
    for (const auto& s : trajectory.samples) {
        out << fmt12(s.t) << ',' << fmt12(s.beta_z) << ',' << fmt12(s.j_c) << ',' << fmt12(s.j_m)
            << ',' << fmt12(s.sigma_dot) << ',' << fmt12(s.sigma) << '\n';
    }
}

}  // namespace thermoneuron
