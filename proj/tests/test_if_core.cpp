#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "snncal/if_core.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace snncal;

namespace {

InputCurrents currents_from(std::initializer_list<std::initializer_list<double>> rows) {
    InputCurrents c;
    const std::size_t T = rows.size();
    const std::size_t n = rows.begin()->size();
    c.I = Matrix(T, n);
    std::size_t t = 0;
    for (const auto& row : rows) {
        std::size_t i = 0;
        for (double x : row) c.I(t, i++) = x;
        ++t;
    }
    return c;
}

}  // namespace

TEST_CASE("if_step hand examples") {
    Vec s(1), v(1), m(1);

    Vec vp{0.5}, I{0.6};
    if_step(vp, I, 1.0, s, v, m);
    CHECK(s[0] == 1.0);
    CHECK(m[0] == doctest::Approx(1.1));
    CHECK(v[0] == doctest::Approx(0.1));

    vp = {0.0}; I = {0.0};
    if_step(vp, I, 1.0, s, v, m);
    CHECK(s[0] == 0.0);
    CHECK(v[0] == 0.0);

    vp = {0.7}; I = {-1.0};
    if_step(vp, I, 1.0, s, v, m);
    CHECK(s[0] == 0.0);
    CHECK(v[0] == doctest::Approx(-0.3));
}

TEST_CASE("if_step threshold tie is non-strict") {
    Vec s(1), v(1), m(1);
    Vec vp{0.5}, I{0.5};
    if_step(vp, I, 1.0, s, v, m);
    CHECK(s[0] == 1.0);
    CHECK(v[0] == 0.0);
}

TEST_CASE("if_step error paths") {
    Vec s(1), v(1), m(1);
    Vec vp{0.5}, I2{0.1, 0.2};
    CHECK_THROWS_AS(if_step(vp, I2, 1.0, s, v, m), SimulationError);
    Vec bad{std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(if_step(vp, bad, 1.0, s, v, m), SimulationError);
}

TEST_CASE("run_layer hand simulations") {
    SUBCASE("shift-up worked example") {
        InputCurrents in = currents_from({{0.6}, {0.2}, {0.7}});
        LayerTrace tr = run_layer(1.0, Vec{0.5}, in, 3);
        CHECK(tr.s(0, 0) == 1.0);
        CHECK(tr.s(1, 0) == 0.0);
        CHECK(tr.s(2, 0) == 1.0);
        CHECK(tr.v(0, 0) == doctest::Approx(0.1));
        CHECK(tr.v(1, 0) == doctest::Approx(0.3));
        CHECK(tr.v(2, 0) == doctest::Approx(0.0));
    }
    SUBCASE("over-fire example") {
        InputCurrents in = currents_from({{1.2}, {-1.0}});
        LayerTrace tr = run_layer(1.0, Vec{0.5}, in, 2);
        CHECK(tr.s(0, 0) == 1.0);
        CHECK(tr.s(1, 0) == 0.0);
        CHECK(tr.v(0, 0) == doctest::Approx(0.7));
        CHECK(tr.v(1, 0) == doctest::Approx(-0.3));
    }
    SUBCASE("subthreshold rest") {
        InputCurrents in = currents_from({{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
        LayerTrace tr = run_layer(1.0, Vec{0.4, 0.9}, in, 3);
        for (std::size_t t = 0; t < 3; ++t) {
            CHECK(tr.s(t, 0) == 0.0);
            CHECK(tr.s(t, 1) == 0.0);
            CHECK(tr.v(t, 0) == 0.4);
            CHECK(tr.v(t, 1) == 0.9);
        }
    }
}

TEST_CASE("run_layer validates shapes and step counts") {
    InputCurrents in = currents_from({{0.1}, {0.2}});
    CHECK_THROWS_AS(run_layer(1.0, Vec{0.0}, in, 3, 7), SimulationError);
    CHECK_THROWS_AS(run_layer(1.0, Vec{0.0, 0.0}, in, 2, 7), SimulationError);
    CHECK_THROWS_AS(run_layer(-1.0, Vec{0.0}, in, 2), SimulationError);
}

TEST_CASE("average_psp examples") {
    InputCurrents in = currents_from({{0.6}, {0.2}, {0.7}});
    LayerTrace tr = run_layer(1.0, Vec{0.5}, in, 3);
    Vec phi = average_psp(tr);
    CHECK(phi[0] == doctest::Approx(2.0 / 3.0));

    InputCurrents zeros = currents_from({{0.0}, {0.0}});
    LayerTrace silent = run_layer(1.0, Vec{0.0}, zeros, 2);
    CHECK(average_psp(silent)[0] == 0.0);

    // saturated: theta=0.5, strong drive, T=4 -> phi = theta
    InputCurrents strong = currents_from({{2.0}, {2.0}, {2.0}, {2.0}});
    LayerTrace sat = run_layer(0.5, Vec{0.25}, strong, 4);
    CHECK(average_psp(sat)[0] == doctest::Approx(0.5));
}

TEST_CASE("conservation residual on worked traces") {
    InputCurrents in = currents_from({{0.6}, {0.2}, {0.7}});
    LayerTrace tr = run_layer(1.0, Vec{0.5}, in, 3);
    Vec res = conservation_residual(tr, in);
    CHECK(std::abs(res[0]) <= 64 * std::numeric_limits<double>::epsilon() * 3);

    InputCurrents zeros = currents_from({{0.0}, {0.0}});
    LayerTrace silent = run_layer(1.0, Vec{0.3}, zeros, 2);
    CHECK(conservation_residual(silent, zeros)[0] == 0.0);
}

TEST_CASE("trace invariants, conservation, determinism on random instances") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::size_t> Tdist(1, 16), ndist(1, 32);
    std::uniform_real_distribution<double> thdist(0.25, 2.5);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t T = Tdist(rng), n = ndist(rng);
        const double theta = thdist(rng);
        InputCurrents in = gen::random_currents(rng, T, n);
        Vec v0 = gen::random_vec(rng, n);
        LayerTrace tr = run_layer(theta, v0, in, T);

        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                const double expect_s = tr.m(t, i) >= theta ? 1.0 : 0.0;
                REQUIRE(tr.s(t, i) == expect_s);
                REQUIRE(tr.v(t, i) == tr.m(t, i) - tr.s(t, i) * theta);
            }
        }
        Vec res = conservation_residual(tr, in);
        for (double r : res) {
            REQUIRE(std::abs(r) <= 64 * std::numeric_limits<double>::epsilon() * T);
        }
        LayerTrace again = run_layer(theta, v0, in, T);
        REQUIRE(again.s.data() == tr.s.data());
        REQUIRE(again.v.data() == tr.v.data());
        REQUIRE(again.m.data() == tr.m.data());
    }
}

TEST_CASE("raising v0 never decreases the spike count") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> Tdist(1, 16);
    std::uniform_real_distribution<double> bump(0.0, 3.0);
    for (int it = 0; it < 500; ++it) {
        const std::size_t T = Tdist(rng);
        InputCurrents in = gen::random_currents(rng, T, 4);
        Vec v0 = gen::random_vec(rng, 4);
        LayerTrace lo = run_layer(1.0, v0, in, T);
        Vec v0_hi = v0;
        for (double& v : v0_hi) v += bump(rng);
        LayerTrace hi = run_layer(1.0, v0_hi, in, T);
        for (std::size_t i = 0; i < 4; ++i) {
            REQUIRE(hi.spike_count(i) >= lo.spike_count(i));
        }
    }
}

TEST_CASE("streaming run matches the full trace") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 200; ++it) {
        InputCurrents in = gen::random_currents(rng, 8, 6);
        Vec v0 = gen::random_vec(rng, 6);
        LayerTrace tr = run_layer(1.0, v0, in, 8);
        SpikeRun sr = run_layer_spikes(1.0, v0, in);
        REQUIRE(sr.s.data() == tr.s.data());
        for (std::size_t i = 0; i < 6; ++i) REQUIRE(sr.v_final[i] == tr.v(7, i));
    }
}

TEST_CASE("engine agrees with the serial oracle bit-for-bit") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<std::size_t> Tdist(1, 16), ndist(1, 32);
    std::uniform_real_distribution<double> thdist(0.25, 2.5);
    for (int it = 0; it < 1000; ++it) {
        const std::size_t T = Tdist(rng), n = ndist(rng);
        const double theta = thdist(rng);
        InputCurrents in = gen::random_currents(rng, T, n);
        Vec v0 = gen::random_vec(rng, n);
        LayerTrace tr = run_layer(theta, v0, in, T);
        oracle::OracleTrace ot = oracle::oracle_simulate(theta, v0, gen::as_rows(in));
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t i = 0; i < n; ++i) {
                REQUIRE(static_cast<int>(tr.s(t, i)) == ot.s[t][i]);
                REQUIRE(tr.v(t, i) == ot.v[t][i]);
                REQUIRE(tr.m(t, i) == ot.m[t][i]);
            }
        }
    }
}

TEST_CASE("project_currents matches a scalar dot product") {
    std::mt19937_64 rng(5);
    Matrix W = gen::random_matrix(rng, 5, 3);
    Matrix presyn = gen::random_matrix(rng, 4, 3);
    InputCurrents c = project_currents(W, presyn);
    for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t o = 0; o < 5; ++o) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 3; ++k) acc += W(o, k) * presyn(t, k);
            REQUIRE(c.I(t, o) == acc);
        }
    }
    Matrix bad(4, 2);
    CHECK_THROWS_AS(project_currents(W, bad, 3), SimulationError);
}
