#include <doctest.h>

#include <limits>

#include "helpers.hpp"
#include "thermoneuron/error.hpp"
#include "thermoneuron/neuron.hpp"

using namespace thermoneuron;
using testutil::max_abs;
using testutil::random_state;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// NOT collector with eps = (2, 1), eps_z = 1 and its bath contacts.
struct SmallCollector {
    QubitRegister reg{{2.0, 1.0, 1.0}};
    Matrix hint = build_interaction_hamiltonian(std::vector<int>{0, 1}, 1.0, reg);
    std::vector<BathContact> contacts{{0, 1.0, 1.0}, {1, 0.5, 1.0}, {2, 0.3, 1e-4}};
    Lindbladian gen{reg, hint, contacts};
};

}  // namespace

TEST_CASE("fermi population values and limits") {
    CHECK(fermi_population(0.0) == 0.5);
    CHECK(fermi_population(kInf) == 0.0);
    CHECK(fermi_population(-kInf) == 1.0);
    CHECK(fermi_population(1.0) == doctest::Approx(0.268941421369995).epsilon(1e-13));
    CHECK(fermi_population(700.0) > 0.0);
    CHECK(fermi_population(-800.0) == 1.0);
    double prev = 1.0;
    for (double x = -30; x <= 30; x += 0.5) {
        CHECK(fermi_population(x) < prev);
        prev = fermi_population(x);
    }
}

TEST_CASE("gibbs qubit") {
    const auto inf_t = gibbs_qubit(0.0, 3.0).matrix();
    CHECK(inf_t(0, 0).real() == 0.5);
    CHECK(inf_t(1, 1).real() == 0.5);
    const auto ground = gibbs_qubit(1e6, 1.0).matrix();
    CHECK(ground(0, 0).real() == 1.0);
    const auto g = gibbs_qubit(1.0, 1.0).matrix();
    CHECK(g(0, 0).real() == doctest::Approx(0.731058578630005).epsilon(1e-13));
    CHECK(g(1, 1).real() == doctest::Approx(0.268941421369995).epsilon(1e-13));
}

TEST_CASE("density matrix validation") {
    Matrix bad = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix{bad}, StructuralError);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{neg}, StructuralError);
    Matrix nonh = 0.5 * Matrix::Identity(2, 2);
    nonh(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix{nonh}, StructuralError);
    CHECK_NOTHROW(DensityMatrix{0.5 * Matrix::Identity(2, 2)});
}

TEST_CASE("register indexing puts qubit 0 first") {
    const QubitRegister reg({2.0, 1.0, 1.0});
    const int bits[] = {1, 0, 0};
    CHECK(reg.index_of(bits) == 4);
    CHECK(reg.bit(4, 0) == 1);
    CHECK(reg.level_energy(4) == 2.0);
    CHECK(reg.level_energy(3) == 2.0);
    CHECK_THROWS_AS(QubitRegister(std::vector<double>(13, 1.0)), StructuralError);
}

TEST_CASE("reset dissipator") {
    const QubitRegister one({1.0});
    SUBCASE("fixed point") {
        const Matrix rho = gibbs_qubit(0.7, 1.0).matrix();
        CHECK(max_abs(reset_dissipator(rho, {0, 0.7, 2.0}, one)) < 1e-15);
    }
    SUBCASE("hand example") {
        Matrix rho = Matrix::Zero(2, 2);
        rho(0, 0) = 1.0;
        const Matrix out = reset_dissipator(rho, {0, 0.0, 1.0}, one);
        CHECK(out(0, 0).real() == doctest::Approx(-0.5));
        CHECK(out(1, 1).real() == doctest::Approx(0.5));
    }
    SUBCASE("traceless on random states") {
        std::mt19937_64 rng(11);
        const QubitRegister reg({1.0, 2.0, 0.5});
        for (int k = 0; k < 10; ++k) {
            const Matrix rho = random_state(8, rng);
            for (std::size_t q = 0; q < 3; ++q) {
                const Matrix out = reset_dissipator(rho, {q, 0.4 * (k + 1), 1.3}, reg);
                CHECK(std::abs(out.trace()) < 1e-14);
                CHECK(max_abs(out - out.adjoint()) < 1e-14);
            }
        }
    }
    SUBCASE("product with a thermal slot is untouched") {
        const DensityMatrix f[] = {gibbs_qubit(0.2, 1.0), gibbs_qubit(0.9, 2.0)};
        const Matrix rho = product_state(f).matrix();
        CHECK(max_abs(reset_dissipator(rho, {1, 0.9, 5.0}, QubitRegister({1.0, 2.0}))) < 1e-15);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(reset_dissipator(Matrix::Identity(4, 4) / 4.0, {0, 0.0, 1.0}, one), StructuralError);
    }
}

TEST_CASE("lindblad generator") {
    SUBCASE("global fixed point without interaction") {
        const QubitRegister reg({1.0, 2.0});
        const std::vector<BathContact> c{{0, 0.3, 1.0}, {1, 0.8, 0.5}};
        const DensityMatrix f[] = {gibbs_qubit(0.3, 1.0), gibbs_qubit(0.8, 2.0)};
        const Matrix out = lindblad_rhs(product_state(f).matrix(), reg, Matrix::Zero(4, 4), c);
        CHECK(max_abs(out) < 1e-15);
    }
    SUBCASE("trace and hermiticity preserved") {
        SmallCollector sc;
        std::mt19937_64 rng(5);
        for (int k = 0; k < 10; ++k) {
            const Matrix out = sc.gen.apply(random_state(8, rng));
            CHECK(std::abs(out.trace()) < 1e-13);
            CHECK(max_abs(out - out.adjoint()) < 1e-12);
        }
    }
    SUBCASE("non energy-preserving interaction is rejected") {
        const QubitRegister reg({2.0, 1.0, 1.2});
        Matrix hint = Matrix::Zero(8, 8);
        hint(4, 3) = hint(3, 4) = 1.0;
        CHECK_THROWS_AS(Lindbladian(reg, hint, {}), ResonanceError);
    }
    SUBCASE("bad contacts") {
        const QubitRegister reg({1.0});
        CHECK_THROWS_AS(Lindbladian(reg, Matrix::Zero(2, 2), {{1, 0.0, 1.0}}), StructuralError);
        CHECK_THROWS_AS(Lindbladian(reg, Matrix::Zero(2, 2), {{0, 0.0, 0.0}}), StructuralError);
    }
    SUBCASE("collector steady state is stationary") {
        SmallCollector sc;
        const MasterRhs rhs = [&](const Matrix& r) { return sc.gen.apply(r); };
        const DensityMatrix ss = steady_state(rhs, 8);
        CHECK(max_abs(sc.gen.apply(ss.matrix())) <= 1e-10);
    }
}

TEST_CASE("integrate_master") {
    const QubitRegister one({1.0});
    const std::vector<BathContact> c{{0, 1.0, 1.0}};
    const MasterRhs rhs = [&](const Matrix& r) { return lindblad_rhs(r, one, Matrix::Zero(2, 2), c); };
    Matrix excited = Matrix::Zero(2, 2);
    excited(1, 1) = 1.0;
    const DensityMatrix rho0(excited);

    SUBCASE("zero horizon") {
        CHECK(max_abs(integrate_master(rho0, rhs, 0.0).state.matrix() - excited) == 0.0);
    }
    SUBCASE("single qubit relaxation matches the analytic solution") {
        const double g = fermi_population(1.0);
        for (double t : {0.1, 1.0, 2.5, 7.0}) {
            const auto res = integrate_master(rho0, rhs, t);
            CHECK(res.state.population(1) == doctest::Approx(g + (1.0 - g) * std::exp(-t)).epsilon(1e-9));
        }
    }
    SUBCASE("trace and hermiticity over a long horizon") {
        const auto res = integrate_master(rho0, rhs, 1e4);
        CHECK(std::abs(res.state.matrix().trace().real() - 1.0) < 1e-10);
        CHECK(max_abs(res.state.matrix() - res.state.matrix().adjoint()) < 1e-10);
        CHECK(res.positivity_drift <= 1e-8);
    }
    SUBCASE("long horizon agrees with the steady state for the collector") {
        const QubitRegister reg({2.0, 1.0, 1.0});
        const Matrix hint = build_interaction_hamiltonian(std::vector<int>{0, 1}, 1.0, reg);
        const Lindbladian gen(reg, hint, {{0, 1.0, 1.0}, {1, 0.5, 1.0}, {2, 0.3, 0.5}});
        const MasterRhs r = [&](const Matrix& m) { return gen.apply(m); };
        const DensityMatrix ss = steady_state(r, 8);
        const DensityMatrix start = product_state(std::vector<DensityMatrix>(3, gibbs_qubit(0.0, 1.0)));
        const auto res = integrate_master(start, r, 200.0);
        CHECK(trace_norm(res.state.matrix() - ss.matrix()) < 1e-8);
        CHECK(res.positivity_drift <= 1e-8);
    }
}

TEST_CASE("steady_state") {
    SUBCASE("single qubit thermalizes") {
        const QubitRegister one({1.5});
        const std::vector<BathContact> c{{0, 0.8, 0.3}};
        const auto ss = steady_state([&](const Matrix& r) { return lindblad_rhs(r, one, Matrix::Zero(2, 2), c); }, 2);
        CHECK(max_abs(ss.matrix() - gibbs_qubit(0.8, 1.5).matrix()) < 1e-12);
    }
    SUBCASE("two uncoupled qubits give a product state") {
        const QubitRegister reg({1.0, 3.0});
        const std::vector<BathContact> c{{0, 0.2, 1.0}, {1, 1.1, 0.1}};
        const auto ss = steady_state([&](const Matrix& r) { return lindblad_rhs(r, reg, Matrix::Zero(4, 4), c); }, 4);
        const DensityMatrix f[] = {gibbs_qubit(0.2, 1.0), gibbs_qubit(1.1, 3.0)};
        CHECK(max_abs(ss.matrix() - product_state(f).matrix()) < 1e-12);
    }
    SUBCASE("degenerate generator is reported") {
        const QubitRegister one({1.0});
        try {
            steady_state([&](const Matrix& r) { return lindblad_rhs(r, one, Matrix::Zero(2, 2), {}); }, 2);
            FAIL("expected DegenerateSteadyState");
        } catch (const DegenerateSteadyState& e) {
            CHECK(e.nullity() == 2);
        }
    }
    SUBCASE("C_z population follows the virtual temperature") {
        SmallCollector sc;
        const auto ss = steady_state([&](const Matrix& r) { return sc.gen.apply(r); }, 8);
        // beta_v = (1*2 - 0.5*1)/1 = 1.5
        CHECK(std::abs(ss.excited_population(2, 3) - fermi_population(1.5)) < 2e-3);
    }
}

TEST_CASE("heat currents") {
    SUBCASE("thermal qubit carries no current") {
        const QubitRegister one({1.0});
        CHECK(std::abs(heat_current(gibbs_qubit(0.4, 1.0).matrix(), one.free_hamiltonian(), {0, 0.4, 1.0}, one)) < 1e-15);
    }
    SUBCASE("single qubit closed form") {
        const QubitRegister one({1.0});
        Matrix rho = Matrix::Zero(2, 2);
        rho(1, 1) = 1.0;
        CHECK(heat_current(rho, one.free_hamiltonian(), {0, 0.0, 1.0}, one) == doctest::Approx(-0.5));
        const double p = 0.3, g = fermi_population(2.0 * 0.7);
        rho(0, 0) = 1 - p;
        rho(1, 1) = p;
        const QubitRegister two({2.0});
        CHECK(heat_current(rho, two.free_hamiltonian(), {0, 0.7, 1.7}, two) ==
              doctest::Approx(1.7 * 2.0 * (g - p)).epsilon(1e-14));
    }
    SUBCASE("quantum flux conservation and first law in the collector") {
        SmallCollector sc;
        const auto ss = steady_state([&](const Matrix& r) { return sc.gen.apply(r); }, 8).matrix();
        const Matrix& h0 = sc.gen.free_hamiltonian();
        const double j0 = heat_current(ss, h0, sc.contacts[0], sc.reg);
        const double j1 = heat_current(ss, h0, sc.contacts[1], sc.reg);
        const double jz = heat_current(ss, h0, sc.contacts[2], sc.reg);
        CHECK(std::abs(j0) > 1e-8);
        CHECK(j0 / 2.0 == doctest::Approx(-j1 / 1.0).epsilon(1e-8));
        CHECK(j0 / 2.0 == doctest::Approx(-jz / 1.0).epsilon(1e-8));
        CHECK(std::abs(j0 + j1 + jz) < 1e-10);
    }
}

TEST_CASE("entropy bookkeeping") {
    CHECK(von_neumann_entropy(gibbs_qubit(1e6, 1.0).matrix()) == 0.0);
    CHECK(von_neumann_entropy(gibbs_qubit(0.0, 1.0).matrix()) == doctest::Approx(std::log(2.0)));
    CHECK(von_neumann_entropy(gibbs_qubit(1.0, 1.0).matrix()) == doctest::Approx(0.582203108888218).epsilon(1e-12));

    SUBCASE("global equilibrium produces no entropy") {
        const QubitRegister reg({2.0, 1.0, 1.0});
        const Matrix hint = build_interaction_hamiltonian(std::vector<int>{0, 1}, 1.0, reg);
        const std::vector<BathContact> c{{0, 0.6, 1.0}, {1, 0.6, 1.0}, {2, 0.6, 1e-2}};
        const Lindbladian gen(reg, hint, c);
        const Matrix ss = steady_state([&](const Matrix& r) { return gen.apply(r); }, 8).matrix();
        const double sd = entropy_production_rate(ss, c, reg.free_hamiltonian(), reg, entropy_rate(ss, gen.apply(ss)));
        CHECK(std::abs(sd) < 1e-10);
    }
    SUBCASE("second law on random states and temperatures") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        const QubitRegister reg({2.0, 1.0, 1.0});
        const Matrix hint = build_interaction_hamiltonian(std::vector<int>{0, 1}, 1.0, reg);
        for (int k = 0; k < 50; ++k) {
            const std::vector<BathContact> c{{0, u(rng), 1.0}, {1, u(rng), 1.0}, {2, u(rng), 0.1}};
            const Lindbladian gen(reg, hint, c);
            const Matrix rho = random_state(8, rng);
            const double sd = entropy_production_rate(rho, c, reg.free_hamiltonian(), reg, entropy_rate(rho, gen.apply(rho)));
            CHECK(sd >= -1e-10);
        }
    }
}
