#pragma once

// Few-qubit open-system machinery: registers, density matrices, the local
// reset-model master equation, steady states, heat and entropy bookkeeping.
//
// Units are natural (k_B = hbar = 1). Qubit 0 is the most significant bit of
// a basis index, so |100> on (C_0, C_1, C_z) has index 4.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermoneuron/ode.hpp"

namespace thermoneuron {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr std::size_t kMaxQubits = 12;

/// Excited-state population 1/(1+e^x) of a qubit with beta*eps = x.
double fermi_population(double x) noexcept;

class QubitRegister {
public:
    explicit QubitRegister(std::vector<double> gaps);

    std::size_t size() const noexcept { return gaps_.size(); }
    std::size_t dimension() const noexcept { return std::size_t{1} << gaps_.size(); }
    const std::vector<double>& gaps() const noexcept { return gaps_; }
    double gap(std::size_t qubit) const { return gaps_.at(qubit); }

    /// Occupation (0 or 1) of `qubit` in computational basis state `index`.
    int bit(std::size_t index, std::size_t qubit) const noexcept {
        return static_cast<int>((index >> (size() - 1 - qubit)) & 1u);
    }
    /// Basis index of a bit string listed qubit 0 first.
    std::size_t index_of(std::span<const int> bits) const;

    double level_energy(std::size_t index) const noexcept;
    /// H_0 = sum_i eps_i |1><1|_i, diagonal.
    Matrix free_hamiltonian() const;

private:
    std::vector<double> gaps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
public:
    /// Validates the invariants; throws StructuralError on violation.
    explicit DensityMatrix(Matrix entries);

    /// Skips validation; used for states produced by trusted constructions.
    static DensityMatrix trusted(Matrix entries);

    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dimension() const noexcept { return m_.rows(); }
    double population(std::size_t index) const {
        return m_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)).real();
    }
    /// Excited-state population of one qubit of an m-qubit register.
    double excited_population(std::size_t qubit, std::size_t qubits) const;

private:
    DensityMatrix() = default;
    Matrix m_;
};

struct BathContact {
    std::size_t qubit = 0;
    double beta = 0.0;
    double rate = 1.0;

    /// Negative temperatures are representable but not realizable by a bath.
    bool physical() const noexcept { return beta >= 0.0; }
};

DensityMatrix gibbs_qubit(double beta, double eps);

/// Tensor product of single-qubit states, qubit 0 first.
DensityMatrix product_state(std::span<const DensityMatrix> factors);

/// gamma_k (Tr_k[rho] (x) tau(beta_k) - rho) with tau reinserted at slot k.
Matrix reset_dissipator(const Matrix& rho, const BathContact& contact,
                        const QubitRegister& reg);

/// Local reset-model generator -i[H0 + Hint, .] + sum_k L_k.
///
/// Construction enforces [Hint, H0] = 0 so the local form is consistent.
class Lindbladian {
public:
    Lindbladian(QubitRegister reg, Matrix h_int, std::vector<BathContact> contacts);

    Matrix apply(const Matrix& rho) const;
    Matrix dissipator(std::size_t contact, const Matrix& rho) const;

    const QubitRegister& reg() const noexcept { return reg_; }
    const Matrix& free_hamiltonian() const noexcept { return h0_; }
    const Matrix& hamiltonian() const noexcept { return h_; }
    const std::vector<BathContact>& contacts() const noexcept { return contacts_; }
    Eigen::Index dimension() const noexcept { return h_.rows(); }

private:
    QubitRegister reg_;
    Matrix h0_;
    Matrix h_;
    std::vector<BathContact> contacts_;
};

Matrix lindblad_rhs(const Matrix& rho, const QubitRegister& reg, const Matrix& h_int,
                    std::span<const BathContact> contacts);

using MasterRhs = std::function<Matrix(const Matrix&)>;

struct IntegrationResult {
    DensityMatrix state;
    /// Most negative eigenvalue seen at the horizon (0 if none), before clipping.
    double positivity_drift = 0.0;
    ode::StepStats stats;
};

/// Dormand-Prince integration of rho' = rhs(rho), re-Hermitized every
/// accepted step and trace-renormalized at the horizon.
IntegrationResult integrate_master(const DensityMatrix& rho0, const MasterRhs& rhs,
                                   double horizon, const ode::StepControl& control = {});

/// Unique stationary state of a linear generator of the given dimension.
DensityMatrix steady_state(const MasterRhs& rhs, Eigen::Index dimension);

/// Heat flowing into the system from the bath of `contact`: Tr[H L_k[rho]].
double heat_current(const Matrix& rho, const Matrix& hamiltonian, const BathContact& contact,
                    const QubitRegister& reg);

/// dS/dt - sum_k beta_k Tr[H L_k[rho]]; non-negative for H = H0.
double entropy_production_rate(const Matrix& rho, std::span<const BathContact> contacts,
                               const Matrix& hamiltonian, const QubitRegister& reg,
                               double entropy_rate);

double von_neumann_entropy(const Matrix& rho);

/// -Tr[drho log rho], dropping eigen-directions with eigenvalue below 1e-15.
double entropy_rate(const Matrix& rho, const Matrix& drho);

double trace_norm(const Matrix& a);

}  // namespace thermoneuron
