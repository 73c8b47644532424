#include <doctest.h>

#include <cmath>
#include <random>

#include "thermoneuron/error.hpp"
#include "thermoneuron/neuron.hpp"

using namespace thermoneuron;

namespace {

double out1(const NeuronSpec& s, double b1) {
    const double in[] = {b1};
    return steady_output(s, in).beta_z_inf;
}

// Against sigma(eps_z beta_v) on a fixed grid of eps_z beta_v.
double max_sigmoid_deviation(double eps_z) {
    const NeuronSpec s = make_not(20.0, 0.5, eps_z);
    double worst = 0.0;
    for (int k = 0; k <= 2000; ++k) {
        const double u = -10.0 + 0.01 * k;
        worst = std::max(worst, std::abs(transfer(s, u / eps_z) - sigmoid_approx(s, u / eps_z)));
    }
    return worst;
}

}  // namespace

TEST_CASE("modulator calibration") {
    const Calibration c = calibrate_modulator(0.0, 1.0, 0.1, 1e-4);
    CHECK(c.delta == doctest::Approx(0.02497918747894).epsilon(1e-12));
    CHECK(c.beta_r == doctest::Approx(0.512494795136).epsilon(1e-11));
    CHECK(c.mu_prime / 1e-4 == doctest::Approx(39.0333277791).epsilon(1e-10));
    // g_z(beta_r)(1 - delta) = g_z(beta_cold)
    CHECK(std::abs(fermi_population(0.1 * c.beta_r) * (1 - c.delta) - fermi_population(0.1)) < 1e-12);

    SUBCASE("small gap limit") {
        const Calibration small = calibrate_modulator(0.0, 1.0, 1e-4, 1e-4);
        CHECK(small.delta == doctest::Approx(1e-4 / 4).epsilon(1e-6));
    }
    CHECK_THROWS_AS(calibrate_modulator(1.0, 1.0, 0.1, 1e-4), CalibrationError);
    CHECK_THROWS_AS(calibrate_modulator(0.0, 1.0, 1e-13, 1e-4), CalibrationError);
}

TEST_CASE("spec validation") {
    const NeuronSpec s = make_not(20.0);
    CHECK(s.eps == std::vector<double>{20.1, 20.0});
    CHECK(s.h == InteractionVector{0, 1});
    CHECK(s.signed_gap() == doctest::Approx(0.1));
    CHECK(s.validate().empty());

    NeuronSpec off = s;
    off.eps_z = 0.2;
    CHECK_THROWS_AS(off.validate(), ResonanceError);
    NeuronSpec arity = s;
    arity.h = {0};
    CHECK_THROWS_AS(arity.validate(), StructuralError);
    NeuronSpec slow = make_not(20.0, 0.5, 0.1, {.gamma = 1e-3});
    CHECK_FALSE(slow.validate().empty());
    const double in[] = {1.0, 2.0};
    CHECK_THROWS_AS(steady_output(s, in), StructuralError);
}

TEST_CASE("steady output values") {
    const NeuronSpec s = make_not(20.0);
    CHECK(out1(s, 0.0) == doctest::Approx(0.999956744).epsilon(1e-8));
    CHECK(out1(s, 1.0) == doctest::Approx(0.000047686).epsilon(1e-4));
    CHECK(transfer(s, 0.0) == doctest::Approx(0.499687695223).epsilon(1e-11));
    CHECK(transfer(s, 1e9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(transfer(s, -1e9)) < 1e-12);
    // eps_z beta_v = 1
    CHECK(transfer(s, 10.0) == doctest::Approx(0.730775012607).epsilon(1e-11));
    CHECK(sigmoid_approx(s, 10.0) == doctest::Approx(0.731058578630).epsilon(1e-11));
    CHECK(sigmoid_approx(s, 0.0) == 0.5);
}

TEST_CASE("range confinement and monotonicity") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const NeuronSpec s = make_not(10.0);
    for (int k = 0; k < 500; ++k) {
        const double bv = u(rng) * 100;
        const double z = transfer(s, bv);
        CHECK(z >= -1e-9);
        CHECK(z <= 1.0 + 1e-9);
    }
    // Output falls with the inverted input and rises with beta_0.
    for (double b = -1.0; b < 2.0; b += 0.05) {
        CHECK(out1(s, b + 1e-3) < out1(s, b));
        NeuronSpec warmer = s;
        warmer.beta0 += 1e-3;
        CHECK(out1(warmer, b) > out1(s, b));
    }
}

TEST_CASE("fixed point residual over a dense grid") {
    const NeuronSpec s = make_not(20.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double bv = -100.0 + 0.2 * k;
        worst = std::max(worst, std::abs(fixed_point_residual(s, bv)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("threshold and slope") {
    // Input gap 20, eps_z = 0.5.
    const NeuronSpec s = make_not(20.0, 0.5, 0.5);
    const double bstar = threshold_point(s);
    CHECK(bstar == doctest::Approx(0.510953509819).epsilon(1e-11));
    const double a = slope_at_threshold(s);
    CHECK(a == doctest::Approx(-40.0 * std::tanh(0.125)).epsilon(1e-12));
    CHECK(a == doctest::Approx(-4.974120070864).epsilon(1e-11));

    SUBCASE("finite-difference slope") {
        const double h = 1e-5;
        const double fd = (out1(s, bstar + h) - out1(s, bstar - h)) / (2 * h);
        CHECK(std::abs(fd / a - 1.0) < 1e-6);
    }
    SUBCASE("threshold is the inflection point") {
        const double h = 1e-3;
        auto second = [&](double b) { return out1(s, b + h) - 2 * out1(s, b) + out1(s, b - h); };
        CHECK(second(bstar - 0.01) * second(bstar + 0.01) < 0.0);
        double lo = bstar - 0.01, hi = bstar + 0.01;
        for (int k = 0; k < 60; ++k) {
            const double mid = 0.5 * (lo + hi);
            (second(lo) * second(mid) <= 0 ? hi : lo) = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - bstar) < 1e-6);
    }
    SUBCASE("small gap limit") {
        const NeuronSpec tiny = make_not(20.0, 0.5, 1e-3);
        CHECK(std::abs(slope_at_threshold(tiny) / -5.0 - 1.0) < 1e-3);
        CHECK(threshold_point(tiny) == doctest::Approx(0.5).epsilon(1e-3));
    }
    SUBCASE("steeper with larger eps_0") {
        double prev = 0.0;
        for (double e : {2.0, 5.0, 10.0, 20.0, 40.0}) {
            const double m = std::abs(slope_at_threshold(make_not(e, 0.5, 0.5)));
            CHECK(m > prev);
            prev = m;
        }
    }
    SUBCASE("symmetric rails drop the log term") {
        NeuronSpec sym = make_not(20.0, 0.5, 0.5, {.beta_hot = -1.0, .beta_cold = 1.0});
        CHECK(threshold_point(sym) == doctest::Approx(0.5 * (1 + 0.5 / 20.0)).epsilon(1e-12));
    }
}

// Against sigma((eps_1 + eps_z)(beta_0 - beta_1)) on a fixed beta_1 grid.
double max_input_form_deviation(double eps_z) {
    const NeuronSpec s = make_not(20.0, 0.5, eps_z);
    double worst = 0.0;
    for (int k = 0; k <= 30000; ++k) {
        const double b1 = -1.0 + 1e-4 * k;
        const double x = (20.0 + eps_z) * (0.5 - b1);
        worst = std::max(worst, std::abs(out1(s, b1) - 1.0 / (1.0 + std::exp(-x))));
    }
    return worst;
}

TEST_CASE("sigmoid deviation scaling") {
    // sigma(eps_z beta_v) is accurate to second order in eps_z.
    CHECK(max_sigmoid_deviation(0.1) == doctest::Approx(3.205892428988e-4).epsilon(1e-8));
    CHECK(max_sigmoid_deviation(0.1) / max_sigmoid_deviation(0.05) == doctest::Approx(3.99849784700).epsilon(1e-8));
    // The input-side form shifts the argument by eps_z beta_1, a first-order error.
    const double ratio = max_input_form_deviation(0.1) / max_input_form_deviation(0.05);
    CHECK(ratio == doctest::Approx(1.97820326648).epsilon(1e-6));
}

TEST_CASE("collector lindbladian") {
    const NeuronSpec s = make_not(2.0, 0.5, 0.1);
    const QubitRegister reg = collector_register(s);
    CHECK(reg.size() == 3);
    const double in[] = {0.3};
    const Lindbladian gen = collector_lindbladian(s, in, 0.4);
    CHECK(gen.contacts().size() == 3);
    CHECK(gen.contacts()[2].beta == 0.4);
    CHECK(gen.contacts()[2].rate == s.mu);
}
