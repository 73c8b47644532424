#pragma once

#include <stdexcept>
#include <string>

namespace thermoneuron {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or shape mismatch between operands.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Interaction Hamiltonian does not commute with the free Hamiltonian.
class ResonanceError : public Error {
public:
    using Error::Error;
};

/// Integrator gave up (step-size underflow, step budget, stiffness).
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Generator has more than one stationary state.
class DegenerateSteadyState : public Error {
public:
    DegenerateSteadyState(const std::string& what, std::size_t nullity)
        : Error(what), nullity_(nullity) {}
    std::size_t nullity() const noexcept { return nullity_; }

private:
    std::size_t nullity_;
};

/// Modulator constraints cannot be met for the requested rails.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Weight vector cannot be compiled into a physical machine.
class DesignError : public Error {
public:
    using Error::Error;
};

/// Training data cannot be separated by a single hyperplane.
class SeparabilityError : public Error {
public:
    using Error::Error;
};

/// Gradient training ran out of epochs.
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, double final_loss)
        : Error(what), final_loss_(final_loss) {}
    double final_loss() const noexcept { return final_loss_; }

private:
    double final_loss_;
};

/// Invalid user-facing configuration (encodings, files, arguments).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace thermoneuron
