#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "viab/dynamics.hpp"
#include "viab/fields.hpp"

using namespace viab;

TEST_CASE("integrate: zero field keeps the state")
{
    const auto traj = integrate(fields::zero(1), State{5.0}, 0.0, 3.0, 0.01);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 3.0);
    for (const auto& s : traj.states) CHECK(s[0] == 5.0);
    CHECK(traj.states.size() == traj.times.size());
}

TEST_CASE("integrate: exponential growth matches e^t")
{
    const auto traj = integrate(fields::scalar_linear(1.0), State{1.0}, 0.0, 1.0, 1e-3);
    CHECK(std::abs(traj.back()[0] - std::exp(1.0)) < 1e-6);
}

TEST_CASE("integrate: logistic matches its closed form")
{
    // y' = beta (b - y) y, y(0) = y0  =>  y(t) = b / (1 + (b/y0 - 1) e^{-beta b t})
    const double beta = 1.0, b = 2.0, y0 = 1.0;
    const auto traj = integrate(fields::logistic(beta, b), State{y0}, 0.0, 1.0, 1e-3);
    const double exact = b / (1.0 + (b / y0 - 1.0) * std::exp(-beta * b * 1.0));
    CHECK(std::abs(traj.back()[0] - exact) < 1e-6);
    CHECK(std::abs(exact - 1.761594) < 1e-6);
}

TEST_CASE("integrate: uniform spacing with a short last interval")
{
    const auto traj = integrate(fields::zero(1), State{0.0}, 0.0, 0.25, 0.1);
    REQUIRE(traj.size() == 4);
    CHECK(traj.times[1] == doctest::Approx(0.1));
    CHECK(traj.times[2] == doctest::Approx(0.2));
    CHECK(traj.times[3] == 0.25);
    for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("integrate: blow-up raises NonFinite")
{
    // x' = x^2 from 1 blows up at t = 1.
    auto f = make_field(1, [](double, std::span<const double> x) { return State{x[0] * x[0]}; });
    CHECK_THROWS_AS(integrate(f, State{1.0}, 0.0, 2.0, 1e-3), NonFinite);
}

TEST_CASE("integrate: rejects bad arguments")
{
    CHECK_THROWS_AS(integrate(fields::zero(1), State{0.0}, 1.0, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(fields::zero(1), State{0.0}, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(fields::zero(2), State{0.0}, 0.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("flow: forward, backward and zero time")
{
    const auto f = fields::scalar_linear(1.0);
    CHECK(std::abs(flow(f, 1.0, State{1.0}, 1e-3)[0] - std::exp(1.0)) < 1e-6);
    CHECK(std::abs(flow(f, -1.0, State{std::exp(1.0)}, 1e-3)[0] - 1.0) < 1e-6);

    const State x{0.3, -7.0};
    CHECK(flow(fields::rotation(), 0.0, x, 0.1) == x);

    CHECK(std::abs(flow(fields::scalar_linear(-1.0), std::log(2.0), State{1.0}, 1e-3)[0] - 0.5) < 1e-6);
}

TEST_CASE("flow: time-dependent field uses the running time")
{
    // x' = t  =>  x(t) = x0 + t^2/2 ; backward: x(-t) = x0 + t^2/2 as well.
    auto f = make_field(1, [](double t, std::span<const double>) { return State{t}; });
    CHECK(std::abs(flow(f, 2.0, State{1.0}, 0.01)[0] - 3.0) < 1e-12);
    CHECK(std::abs(flow(f, -2.0, State{1.0}, 0.01)[0] - 3.0) < 1e-12);
}

TEST_CASE("reach_set: pointwise images and per-seed failure flags")
{
    const auto f = fields::scalar_linear(-1.0);
    auto out = reach_set(f, std::log(2.0), {State{1.0}, State{2.0}}, 1e-3);
    REQUIRE(out.size() == 2);
    CHECK(std::abs(out[0].x[0] - 0.5) < 1e-6);
    CHECK(std::abs(out[1].x[0] - 1.0) < 1e-6);

    const std::vector<State> seeds{State{0.1}, State{-3.0}};
    auto same = reach_set(f, 0.0, seeds, 0.1);
    CHECK(same[0].x == seeds[0]);
    CHECK(same[1].x == seeds[1]);

    auto eq = reach_set(fields::scalar_linear(1.0), 1.0, {State{0.0}}, 0.01);
    CHECK(eq[0].x[0] == 0.0);

    auto sq = make_field(1, [](double, std::span<const double> x) { return State{x[0] * x[0]}; });
    auto mixed = reach_set(sq, 2.0, {State{1.0}, State{-1.0}}, 1e-3, Exec{2});
    CHECK_FALSE(mixed[0].ok);
    CHECK(mixed[1].ok);
    CHECK(std::abs(mixed[1].x[0] - (-1.0 / 3.0)) < 1e-6);
}

TEST_CASE("property: semigroup and inverse flow")
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5), ut(0.0, 1.5);
    const double step = 1e-2;
    for (const auto& f : {fields::rotation(), fields::scalar_linear(-0.7, 2),
                          fields::affine({0.0, 1.0, -1.0, -0.2}, {0.1, 0.0})}) {
        for (int trial = 0; trial < 20; ++trial) {
            const State x{u(rng), u(rng)};
            const double t = ut(rng), s = ut(rng);
            const State direct = flow(f, t + s, x, step);
            const State composed = flow(f, t, flow(f, s, x, step), step);
            CHECK(dist(direct, composed) <= 10.0 * step);
            CHECK(dist(flow(f, -t, flow(f, t, x, step), step), x) <= 10.0 * step);
        }
    }
}

TEST_CASE("property: linear growth bound along trajectories")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& f : {fields::scalar_linear(0.8, 2), fields::rotation(2.0), fields::transport({1.0, -0.5})}) {
        const double c = *f.growth_c;
        for (int trial = 0; trial < 10; ++trial) {
            const State x0{u(rng), u(rng)};
            const auto traj = integrate(f, x0, 0.0, 2.0, 1e-2);
            for (std::size_t k = 0; k < traj.size(); ++k) {
                const double bound = (norm(x0) + 1.0) * std::exp(c * traj.times[k]) - 1.0 + 1e-6;
                CHECK(norm(traj.states[k]) <= bound);
            }
        }
    }
}

TEST_CASE("property: monotone fields contract trajectories")
{
    const auto f = fields::scalar_linear(-2.0, 2);
    const double mu = *f.monotone_mu;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const State a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const auto ta = integrate(f, a, 0.0, 2.0, 1e-2);
        const auto tb = integrate(f, b, 0.0, 2.0, 1e-2);
        for (std::size_t k = 0; k < ta.size(); ++k)
            CHECK(dist(ta.states[k], tb.states[k]) <= std::exp(-mu * ta.times[k]) * dist(a, b) * (1.0 + 1e-6));
    }
}

TEST_CASE("trajectory CSV: header and full precision")
{
    Trajectory traj{{0.0, 0.1}, {State{1.0, 2.0}, State{1.0 / 3.0, 2.0}}, 0.1};
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    CHECK(os.str() == "t,x1,x2\n0,1,2\n0.10000000000000001,0.33333333333333331,2\n");
}
