#pragma once

#include <cmath>
#include <random>

#include "thermoneuron/quantum.hpp"

namespace testutil {

inline thermoneuron::Matrix random_state(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    thermoneuron::Matrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = thermoneuron::Complex(n(rng), n(rng));
    }
    thermoneuron::Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

inline double max_abs(const thermoneuron::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testutil
