#include <doctest.h>

#include <cmath>

#include "thermoneuron/channel.hpp"
#include "thermoneuron/error.hpp"
#include "thermoneuron/network.hpp"

using namespace thermoneuron;

TEST_CASE("encoding") {
    const Encoding enc;
    CHECK(encode(0, enc) == 0.0);
    CHECK(encode(1, enc) == 1.0);
    CHECK(decode(encode(0, enc), enc) == Output::Zero);
    CHECK(decode(encode(1, enc), enc) == Output::One);
    CHECK(decode(0.5, enc) == Output::Invalid);
    CHECK(decode(-0.01, enc) == Output::Zero);
    // The multiplicative zero band collapses to beta_z <= 0 when beta_hot = 0.
    CHECK(decode(1e-9, enc) == Output::Invalid);
    CHECK(decode(0.9, enc) == Output::One);
    CHECK_THROWS_AS(encode(2, enc), ConfigError);

    const Encoding add(0.0, 1.0, 0.1, BandMode::Additive);
    CHECK(add.zero_edge() == doctest::Approx(0.1));
    CHECK(add.one_edge() == doctest::Approx(0.9));
    CHECK(decode(0.05, add) == Output::Zero);

    CHECK_THROWS_AS(Encoding(1.0, 0.0), ConfigError);
    CHECK_THROWS_AS(Encoding(0.0, 1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(Encoding(0.0, 1.0, 0.6, BandMode::Additive), ConfigError);
    CHECK_THROWS_AS(Encoding(0.5, 0.6, 0.2), ConfigError);
    CHECK(parse_band("additive") == BandMode::Additive);
    CHECK_THROWS_AS(parse_band("wide"), ConfigError);
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(2.0) == doctest::Approx(0.977249868052).epsilon(1e-12));
    CHECK(normal_cdf(-2.0) == doctest::Approx(1 - 0.977249868052).epsilon(1e-11));
    CHECK(normal_cdf(-30.0) > 0.0);
    CHECK(normal_cdf(-30.0) == doctest::Approx(4.906713927148e-198).epsilon(1e-10));
}

TEST_CASE("gaussian channel closed form") {
    const Encoding enc;
    const double mean[] = {1.0};
    const ChannelStats st = conditional_outputs(mean, enc, 0.05);
    CHECK(st.p_y_given_x[0][1] == doctest::Approx(0.977249868052).epsilon(1e-12));
    CHECK(st.p_y_given_x[0][0] == doctest::Approx(normal_cdf(-20.0)).epsilon(1e-10));
    CHECK(st.p_y_given_x[0][0] + st.p_y_given_x[0][1] + st.p_y_given_x[0][2] == doctest::Approx(1.0).epsilon(1e-12));
    // Far-tail invalid mass keeps its relative precision.
    const double deep[] = {10.0};
    const ChannelStats far = conditional_outputs(deep, Encoding(0.0, 1.0, 0.1, BandMode::Additive), 0.5);
    CHECK(far.p_y_given_x[0][2] == doctest::Approx(normal_cdf(-18.2) - normal_cdf(-19.8)).epsilon(1e-9));
    CHECK_THROWS_AS(conditional_outputs(mean, enc, 0.0), ConfigError);

    SUBCASE("narrow spread is deterministic decoding") {
        const double m[] = {0.95, 0.02, 0.5};
        const Encoding add(0.0, 1.0, 0.1, BandMode::Additive);
        const ChannelStats s = conditional_outputs(m, add, 1e-6);
        CHECK(s.p_y_given_x[0][1] == doctest::Approx(1.0));
        CHECK(s.p_y_given_x[1][0] == doctest::Approx(1.0));
        CHECK(s.p_y_given_x[2][2] == doctest::Approx(1.0));
    }
}

TEST_CASE("closed form against Monte Carlo") {
    const Encoding add(0.0, 1.0, 0.1, BandMode::Additive);
    std::vector<std::vector<double>> fixtures;
    fixtures.push_back(neuron_means(make_not(5.0), 1, add));
    fixtures.push_back(neuron_means(preset(Gate::Nor, {.alpha = 1.0}), 2, add));
    fixtures.push_back(neuron_means(preset(Gate::Maj3, {.alpha = 10.0}), 3, add));
    fixtures.push_back(network_means(train_network(named_table("xor"), {2, 1}).net, add));
    for (const auto& means : fixtures) {
        for (const double spread : {0.05, 0.3}) {
            const ChannelStats exact = conditional_outputs(means, add, spread);
            const std::size_t n = 1000000;
            const ChannelStats mc = conditional_outputs_mc(means, add, spread, n, 42);
            for (std::size_t r = 0; r < means.size(); ++r) {
                for (int y = 0; y < 3; ++y) {
                    const double p = exact.p_y_given_x[r][y];
                    const double se = std::sqrt(std::max(p * (1 - p), 1e-300) / n);
                    CHECK(std::abs(mc.p_y_given_x[r][y] - p) <= 3 * se + 1e-12);
                }
            }
        }
    }
    SUBCASE("seeded") {
        const double m[] = {0.4};
        CHECK(conditional_outputs_mc(m, add, 0.2, 1000, 3).p_y_given_x == conditional_outputs_mc(m, add, 0.2, 1000, 3).p_y_given_x);
    }
}

TEST_CASE("average error") {
    const Encoding add(0.0, 1.0, 0.1, BandMode::Additive);
    const NeuronSpec s = make_not(5.0);
    const ChannelStats st = conditional_outputs(s, add, 0.05);
    const ErrorRates e = average_error(st, named_table("not"));
    CHECK(e.xi + e.invalid + e.correct == doctest::Approx(1.0).epsilon(1e-12));
    // For an inverter the wrong output is y = x.
    const double literal = 0.5 * (st.p_y_given_x[0][0] + st.p_y_given_x[1][1]);
    CHECK(e.xi == doctest::Approx(literal).epsilon(1e-12));

    SUBCASE("weights") {
        const double px[] = {1.0, 0.0};
        CHECK(average_error(st, named_table("not"), px).xi == doctest::Approx(st.p_y_given_x[0][0]));
        const double bad[] = {0.7, 0.7};
        CHECK_THROWS_AS(average_error(st, named_table("not"), bad), ConfigError);
        CHECK_THROWS_AS(average_error(st, named_table("nor")), StructuralError);
    }
    SUBCASE("noiseless step") {
        const double means[] = {1.0, 0.0};
        const ErrorRates z = average_error(conditional_outputs(means, add, 1e-4), named_table("not"));
        CHECK(z.xi == 0.0);
    }
}

TEST_CASE("average dissipation") {
    const Encoding enc;
    const NeuronSpec s = make_not(10.0);
    CHECK(average_dissipation(s, enc, 0.0) == 0.0);
    const double a = average_dissipation(s, enc, 1e8);
    const double b = average_dissipation(s, enc, 2e8);
    const double c = average_dissipation(s, enc, 4e8);
    CHECK(a > 0.0);
    CHECK((c - b) / 2.0 == doctest::Approx(b - a).epsilon(1e-3));
}

TEST_CASE("trade-off sweep") {
    const Encoding enc(0.0, 1.0, 0.1);
    TradeoffConfig cfg;
    cfg.grid = {2, 5, 10, 20};
    const auto pts = tradeoff_sweep(cfg, enc);
    REQUIRE(pts.size() == 4);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].avg_sigma > pts[i - 1].avg_sigma);
        CHECK(pts[i].avg_xi < pts[i - 1].avg_xi);
    }
    const auto again = tradeoff_sweep(cfg, enc);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(again[i].avg_sigma == pts[i].avg_sigma);
        CHECK(again[i].avg_xi == pts[i].avg_xi);
    }
    cfg.grid = {7};
    CHECK(tradeoff_sweep(cfg, enc).size() == 1);

    SUBCASE("alpha knob over the presets") {
        const Encoding add(0.0, 1.0, 0.1, BandMode::Additive);
        for (Gate g : {Gate::Not, Gate::Nor, Gate::Maj3}) {
            TradeoffConfig t;
            t.gate = g;
            t.knob = Knob::Alpha;
            t.grid = {2, 5, 10, 20};
            t.design.eps_z = 0.1;
            const auto p = tradeoff_sweep(t, add);
            for (std::size_t i = 1; i < p.size(); ++i) {
                CHECK(p[i].avg_sigma > p[i - 1].avg_sigma);
                CHECK(p[i].avg_xi < p[i - 1].avg_xi);
            }
        }
    }
}
