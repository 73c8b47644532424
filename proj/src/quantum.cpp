#include "thermoneuron/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thermoneuron/error.hpp"

namespace thermoneuron {

namespace {

constexpr double kHermiticityTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kPositivityTol = 1e-10;
constexpr double kCommutatorTol = 1e-10;
constexpr double kResidualTol = 1e-10;
constexpr std::size_t kMaxDirectSteadyQubits = 6;

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Matrix& m, Eigen::Index dim, const char* who) {
    if (m.rows() != dim || m.cols() != dim) {
        std::ostringstream msg;
        msg << who << ": expected " << dim << "x" << dim << " matrix, got " << m.rows() << "x"
            << m.cols();
        throw StructuralError(msg.str());
    }
}

}  // namespace

double fermi_population(double x) noexcept {
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

// ---------------------------------------------------------------------------

QubitRegister::QubitRegister(std::vector<double> gaps) : gaps_(std::move(gaps)) {
    if (gaps_.size() > kMaxQubits) {
        throw StructuralError("QubitRegister: at most 12 qubits are supported");
    }
    for (double g : gaps_) {
        if (!std::isfinite(g)) throw StructuralError("QubitRegister: energy gaps must be finite");
    }
}

std::size_t QubitRegister::index_of(std::span<const int> bits) const {
    if (bits.size() != size()) throw StructuralError("QubitRegister::index_of: wrong bit count");
    std::size_t index = 0;
    for (int b : bits) index = (index << 1) | static_cast<std::size_t>(b & 1);
    return index;
}

double QubitRegister::level_energy(std::size_t index) const noexcept {
    double e = 0.0;
    for (std::size_t q = 0; q < size(); ++q) {
        if (bit(index, q)) e += gaps_[q];
    }
    return e;
}

Matrix QubitRegister::free_hamiltonian() const {
    const auto d = static_cast<Eigen::Index>(dimension());
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) h(i, i) = level_energy(static_cast<std::size_t>(i));
    return h;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0) {
        throw StructuralError("DensityMatrix: matrix must be square and non-empty");
    }
    if (max_abs(m_ - m_.adjoint()) > kHermiticityTol) {
        throw StructuralError("DensityMatrix: matrix is not Hermitian");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
        std::ostringstream msg;
        msg << "DensityMatrix: trace is " << tr.real() << ", expected 1";
        throw StructuralError(msg.str());
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kPositivityTol) {
        std::ostringstream msg;
        msg << "DensityMatrix: negative eigenvalue " << eig.eigenvalues().minCoeff();
        throw StructuralError(msg.str());
    }
}

DensityMatrix DensityMatrix::trusted(Matrix entries) {
    DensityMatrix rho;
    rho.m_ = std::move(entries);
    return rho;
}

double DensityMatrix::excited_population(std::size_t qubit, std::size_t qubits) const {
    if (qubit >= qubits || (Eigen::Index{1} << qubits) != m_.rows()) {
        throw StructuralError("DensityMatrix::excited_population: qubit out of range");
    }
    double p = 0.0;
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
        if ((i >> (qubits - 1 - qubit)) & 1) p += m_(i, i).real();
    }
    return p;
}

DensityMatrix gibbs_qubit(double beta, double eps) {
    const double g = fermi_population(beta * eps);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = 1.0 - g;
    m(1, 1) = g;
    return DensityMatrix::trusted(std::move(m));
}

DensityMatrix product_state(std::span<const DensityMatrix> factors) {
    Matrix acc = Matrix::Ones(1, 1);
    for (const auto& f : factors) {
        const Matrix& b = f.matrix();
        Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (Eigen::Index i = 0; i < acc.rows(); ++i) {
            for (Eigen::Index j = 0; j < acc.cols(); ++j) {
                next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
            }
        }
        acc = std::move(next);
    }
    return DensityMatrix::trusted(std::move(acc));
}

Matrix reset_dissipator(const Matrix& rho, const BathContact& contact, const QubitRegister& reg) {
    const auto d = static_cast<Eigen::Index>(reg.dimension());
    require_square(rho, d, "reset_dissipator");
    if (contact.qubit >= reg.size()) {
        throw StructuralError("reset_dissipator: contact qubit outside the register");
    }
    const double g = fermi_population(contact.beta * reg.gap(contact.qubit));
    const double tau[2] = {1.0 - g, g};
    const Eigen::Index mask = Eigen::Index{1} << (reg.size() - 1 - contact.qubit);

    Matrix out(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const int bj = (j & mask) ? 1 : 0;
        const Eigen::Index j0 = j & ~mask;
        for (Eigen::Index i = 0; i < d; ++i) {
            const int bi = (i & mask) ? 1 : 0;
            Complex v = -rho(i, j);
            if (bi == bj) {
                const Eigen::Index i0 = i & ~mask;
                v += tau[bi] * (rho(i0, j0) + rho(i0 | mask, j0 | mask));
            }
            out(i, j) = contact.rate * v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Lindbladian::Lindbladian(QubitRegister reg, Matrix h_int, std::vector<BathContact> contacts)
    : reg_(std::move(reg)), h0_(reg_.free_hamiltonian()), contacts_(std::move(contacts)) {
    const auto d = static_cast<Eigen::Index>(reg_.dimension());
    require_square(h_int, d, "Lindbladian (interaction Hamiltonian)");
    if (max_abs(h_int - h_int.adjoint()) > kHermiticityTol * std::max(1.0, max_abs(h_int))) {
        throw StructuralError("Lindbladian: interaction Hamiltonian is not Hermitian");
    }
    const double comm = max_abs(h_int * h0_ - h0_ * h_int);
    if (comm > kCommutatorTol * std::max(1.0, max_abs(h_int))) {
        std::ostringstream msg;
        msg << "Lindbladian: interaction does not conserve energy, |[Hint, H0]| = " << comm
            << "; the local master equation requires an energy-preserving interaction";
        throw ResonanceError(msg.str());
    }
    for (const auto& c : contacts_) {
        if (c.qubit >= reg_.size()) throw StructuralError("Lindbladian: contact qubit out of range");
        if (!(c.rate > 0.0) || !std::isfinite(c.rate)) {
            throw StructuralError("Lindbladian: coupling rates must be positive");
        }
        if (!std::isfinite(c.beta)) throw StructuralError("Lindbladian: bath beta must be finite");
    }
    h_ = h0_ + h_int;
}

Matrix Lindbladian::apply(const Matrix& rho) const {
    require_square(rho, h_.rows(), "Lindbladian::apply");
    const Complex minus_i(0.0, -1.0);
    Matrix out = minus_i * (h_ * rho - rho * h_);
    for (const auto& c : contacts_) out += reset_dissipator(rho, c, reg_);
    return out;
}

Matrix Lindbladian::dissipator(std::size_t contact, const Matrix& rho) const {
    return reset_dissipator(rho, contacts_.at(contact), reg_);
}

Matrix lindblad_rhs(const Matrix& rho, const QubitRegister& reg, const Matrix& h_int,
                    std::span<const BathContact> contacts) {
    const Lindbladian gen(reg, h_int, {contacts.begin(), contacts.end()});
    return gen.apply(rho);
}

// ---------------------------------------------------------------------------

IntegrationResult integrate_master(const DensityMatrix& rho0, const MasterRhs& rhs,
                                   double horizon, const ode::StepControl& control) {
    if (!(horizon >= 0.0)) throw StructuralError("integrate_master: horizon must be >= 0");
    Matrix y = rho0.matrix();
    ode::StepStats stats;
    if (horizon > 0.0) {
        auto norm = [&](const Matrix& err, const Matrix& y_old, const Matrix& y_new) {
            double e = 0.0;
            for (Eigen::Index k = 0; k < err.size(); ++k) {
                const double sc = control.atol + control.rtol * std::max(std::abs(y_old(k)),
                                                                         std::abs(y_new(k)));
                e = std::max(e, std::abs(err(k)) / sc);
            }
            return e;
        };
        auto hermitize = [](Matrix& m) {
            m = hermitian_part(m);
            return false;
        };
        stats = ode::dormand_prince(y, rhs, 0.0, horizon, control, norm, hermitize);
    }

    y = hermitian_part(y);
    y /= y.trace().real();
    IntegrationResult result{DensityMatrix::trusted(y), 0.0, stats};
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(y);
    const double lowest = eig.eigenvalues().minCoeff();
    if (lowest < 0.0) {
        result.positivity_drift = -lowest;
        if (lowest < -1e-12) {
            const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
            Matrix fixed = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
            fixed = hermitian_part(fixed);
            fixed /= fixed.trace().real();
            result.state = DensityMatrix::trusted(std::move(fixed));
        }
    }
    return result;
}

DensityMatrix steady_state(const MasterRhs& rhs, Eigen::Index dimension) {
    const Eigen::Index d = dimension;
    if (d < 1) throw StructuralError("steady_state: dimension must be positive");
    if (d > (Eigen::Index{1} << kMaxDirectSteadyQubits)) {
        throw StructuralError(
            "steady_state: direct null-space solve is limited to 6 qubits; integrate instead");
    }
    const Eigen::Index n = d * d;

    // Column-major vectorization: vec(rho)[r + c d] = rho(r, c).
    Matrix super(n, n);
    Matrix basis = Matrix::Zero(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        for (Eigen::Index r = 0; r < d; ++r) {
            basis(r, c) = 1.0;
            const Matrix image = rhs(basis);
            require_square(image, d, "steady_state (generator image)");
            super.col(r + c * d) = Eigen::Map<const Eigen::VectorXcd>(image.data(), n);
            basis(r, c) = 0.0;
        }
    }

    // Trace preservation makes the diagonal rows linearly dependent; trade
    // the (0,0) row for the normalization condition.
    Matrix system = super;
    system.row(0).setZero();
    for (Eigen::Index r = 0; r < d; ++r) system(0, r + r * d) = 1.0;
    Eigen::VectorXcd rhs_vec = Eigen::VectorXcd::Zero(n);
    rhs_vec(0) = 1.0;

    Eigen::ColPivHouseholderQR<Matrix> qr(system);
    qr.setThreshold(1e-12);
    if (qr.rank() < n) {
        const auto nullity = static_cast<std::size_t>(n - qr.rank() + 1);
        std::ostringstream msg;
        msg << "steady_state: generator has a " << nullity
            << "-dimensional stationary subspace; the steady state is not unique";
        throw DegenerateSteadyState(msg.str(), nullity);
    }
    const Eigen::VectorXcd x = qr.solve(rhs_vec);
    Matrix rho = Eigen::Map<const Matrix>(x.data(), d, d);
    rho = hermitian_part(rho);
    rho /= rho.trace().real();

    const double residual = max_abs(rhs(rho));
    if (residual > kResidualTol) {
        std::ostringstream msg;
        msg << "steady_state: residual " << residual << " exceeds tolerance";
        throw Error(msg.str());
    }
    return DensityMatrix(std::move(rho));
}

// ---------------------------------------------------------------------------

double heat_current(const Matrix& rho, const Matrix& hamiltonian, const BathContact& contact,
                    const QubitRegister& reg) {
    return (hamiltonian * reset_dissipator(rho, contact, reg)).trace().real();
}

double entropy_production_rate(const Matrix& rho, std::span<const BathContact> contacts,
                               const Matrix& hamiltonian, const QubitRegister& reg,
                               double entropy_rate) {
    double sigma = entropy_rate;
    for (const auto& c : contacts) sigma -= c.beta * heat_current(rho, hamiltonian, c, reg);
    return sigma;
}

double von_neumann_entropy(const Matrix& rho) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(rho), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (double p : eig.eigenvalues()) {
        if (p > 1e-15) s -= p * std::log(p);
    }
    return s;
}

double entropy_rate(const Matrix& rho, const Matrix& drho) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(rho));
    double rate = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
        const double p = eig.eigenvalues()(i);
        if (p <= 1e-15) continue;
        const auto v = eig.eigenvectors().col(i);
        rate -= (v.adjoint() * drho * v)(0, 0).real() * std::log(p);
    }
    return rate;
}

double trace_norm(const Matrix& a) {
    const Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

}  // namespace thermoneuron
