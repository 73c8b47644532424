#pragma once

// Adaptive time integrators shared by the master-equation and reservoir
// solvers. Dormand-Prince 5(4) for non-stiff problems and a Rosenbrock 2(3)
// W-method (Shampine's ode23s tableau) for the stiff two-timescale system.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "thermoneuron/error.hpp"

namespace thermoneuron::ode {

struct StepControl {
    double atol = 1e-10;
    double rtol = 1e-10;
    /// 0 picks a step from the initial derivative.
    double initial_step = 0.0;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
};

struct StepStats {
    double last_step = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace detail {

inline void check_step(double h, double t, const char* who) {
    if (!(h > 1e-14 * std::max(1.0, std::abs(t)))) {
        std::ostringstream msg;
        msg << who << ": step size underflow (h = " << h << " at t = " << t << ")";
        throw IntegrationError(msg.str());
    }
}

}  // namespace detail

/// Integrates y' = f(y) from t0 to t1 with the Dormand-Prince 5(4) pair.
///
/// `error_norm(err, y_old, y_new)` returns the scaled local error; a step is
/// accepted when it is <= 1. `on_accept(y)` may project the state after each
/// accepted step (for example re-Hermitization).
template <class State, class Rhs, class ErrorNorm, class OnAccept>
StepStats dormand_prince(State& y, Rhs&& f, double t0, double t1, const StepControl& control,
                         ErrorNorm&& error_norm, OnAccept&& on_accept) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2, (void)c3, (void)c4, (void)c5;

    StepStats stats;
    if (t1 <= t0) return stats;

    State k1 = f(y);
    double h = control.initial_step;
    if (h <= 0.0) {
        // Take a step that moves the state by roughly the tolerance scale.
        const double scale = std::max(1e-300, static_cast<double>(k1.cwiseAbs().maxCoeff()));
        h = std::min(t1 - t0, 0.01 * std::cbrt(control.atol + control.rtol) / scale);
        h = std::max(h, 1e-12 * std::max(1.0, t1 - t0));
    }
    h = std::min(h, control.max_step);

    double t = t0;
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > control.max_steps) {
            throw IntegrationError("dormand_prince: step budget exhausted");
        }
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        detail::check_step(h, t, "dormand_prince");

        const State k2 = f(State(y + h * a21 * k1));
        const State k3 = f(State(y + h * (a31 * k1 + a32 * k2)));
        const State k4 = f(State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
        const State k5 = f(State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const State k6 =
            f(State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const State k7 = f(y_new);
        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double e = error_norm(err, y, y_new);
        if (e <= 1.0 && std::isfinite(e)) {
            t = last ? t1 : t + h;
            y = std::move(y_new);
            const bool projected = on_accept(y);
            k1 = projected ? f(y) : k7;
            ++stats.accepted;
            stats.last_step = h;
            const double grow = e == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(e, -0.2));
            if (!last) h = std::min(h * grow, control.max_step);
        } else {
            ++stats.rejected;
            const double shrink = std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2;
            h *= shrink;
        }
    }
    return stats;
}

/// L-stable Rosenbrock 2(3) integrator for stiff systems y' = f(y).
///
/// The Jacobian is formed by forward differences at the start of every
/// step, which suits the small dense systems produced by few-qubit machines.
class Rosenbrock23 {
public:
    using Vector = Eigen::VectorXd;
    using Rhs = std::function<Vector(const Vector&)>;

    Rosenbrock23(Rhs rhs, StepControl control) : rhs_(std::move(rhs)), control_(control) {}

    /// Advances `y` from t0 to t1. `h` carries the step size between calls.
    StepStats integrate(Vector& y, double t0, double t1, double& h) const {
        const double d = 1.0 / (2.0 + std::sqrt(2.0));
        const double e32 = 6.0 + std::sqrt(2.0);
        StepStats stats;
        if (t1 <= t0) return stats;
        const Eigen::Index n = y.size();

        Vector f0 = rhs_(y);
        if (h <= 0.0) {
            const double scale = std::max(1e-300, f0.cwiseAbs().maxCoeff());
            h = std::min(t1 - t0, 1e-3 * (control_.atol + control_.rtol * y.cwiseAbs().maxCoeff() +
                                           1e-6) / scale);
            h = std::max(h, 1e-10);
        }
        h = std::min(h, control_.max_step);

        double t = t0;
        std::size_t steps = 0;
        Eigen::MatrixXd jac(n, n);
        bool jac_fresh = false;
        while (t < t1) {
            if (++steps > control_.max_steps) {
                throw IntegrationError("rosenbrock23: step budget exhausted");
            }
            if (!jac_fresh) {
                jacobian(y, f0, jac);
                jac_fresh = true;
            }
            bool last = false;
            double step = h;
            if (t + step >= t1) {
                step = t1 - t;
                last = true;
            }
            detail::check_step(step, t, "rosenbrock23");

            const Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n) - step * d * jac;
            const Eigen::PartialPivLU<Eigen::MatrixXd> lu(w);
            const Vector k1 = lu.solve(f0);
            const Vector f1 = rhs_(y + 0.5 * step * k1);
            const Vector k2 = lu.solve(f1 - k1) + k1;
            Vector y_new = y + step * k2;
            const Vector f2 = rhs_(y_new);
            const Vector k3 = lu.solve(f2 - e32 * (k2 - f1) - 2.0 * (k1 - f0));
            const Vector err = (step / 6.0) * (k1 - 2.0 * k2 + k3);

            double e = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double sc =
                    control_.atol + control_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                e = std::max(e, std::abs(err[i]) / sc);
            }
            if (e <= 1.0 && std::isfinite(e)) {
                t = last ? t1 : t + step;
                y = std::move(y_new);
                f0 = f2;
                jac_fresh = false;
                ++stats.accepted;
                stats.last_step = step;
                const double grow = e == 0.0 ? 5.0 : std::min(5.0, 0.8 * std::pow(e, -1.0 / 3.0));
                // A step shortened to land on t1 says nothing about the natural step.
                if (!last || step >= h) h = std::min(step * grow, control_.max_step);
            } else {
                ++stats.rejected;
                h = step * (std::isfinite(e) ? std::max(0.2, 0.8 * std::pow(e, -1.0 / 3.0)) : 0.2);
            }
        }
        return stats;
    }

private:
    void jacobian(const Vector& y, const Vector& f0, Eigen::MatrixXd& jac) const {
        Vector yp = y;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            const double delta = 1e-7 * std::max(1.0, std::abs(y[j]));
            yp[j] = y[j] + delta;
            jac.col(j) = (rhs_(yp) - f0) / delta;
            yp[j] = y[j];
        }
    }

    Rhs rhs_;
    StepControl control_;
};

}  // namespace thermoneuron::ode
