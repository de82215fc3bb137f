#include <doctest.h>

#include <cmath>
#include <numbers>

#include "viab/fields.hpp"
#include "viab/viable_euler.hpp"

using namespace viab;

namespace {

const auto kCircle = SetOracle::sphere({0.0, 0.0}, 1.0);

double sup_error_vs_rotation(const Trajectory& traj)
{
    double err = 0.0;
    for (std::size_t j = 0; j < traj.size(); ++j) {
        const State exact{std::cos(traj.times[j]), std::sin(traj.times[j])};
        err = std::max(err, dist(traj.states[j], exact));
    }
    return err;
}

}  // namespace

TEST_CASE("viable_step: radial projection onto the circle")
{
    const auto up = fields::transport({0.0, 1.0});
    const State x = viable_step(up, kCircle, 0.0, State{1.0, 0.0}, 0.1);
    const double n = std::sqrt(1.01);
    CHECK(x[0] == doctest::Approx(1.0 / n).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(0.1 / n).epsilon(1e-12));
    CHECK(std::abs(x[0] - 0.99504) < 1e-5);
    CHECK(std::abs(x[1] - 0.09950) < 1e-5);

    CHECK(viable_step(fields::zero(2), kCircle, 0.0, State{0.6, 0.8}, 0.1) == State{0.6, 0.8});
}

TEST_CASE("viable_step: tangent field displaces by h f + o(h)")
{
    const auto rot = fields::rotation();
    const State x{1.0, 0.0};
    double prev = 1.0;
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const State y = viable_step(rot, kCircle, 0.0, x, h);
        const State euler = add_scaled(x, h, rot(0.0, x));
        const double rel = dist(y, euler) / h;
        CHECK(rel < prev);
        prev = rel;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("viable_trajectory: rotation stays on the circle")
{
    const double T = 2.0 * std::numbers::pi;
    const auto vt = viable_trajectory(fields::rotation(), kCircle, State{1.0, 0.0}, T, 1e-3);
    CHECK(vt.traj.times.back() == T);
    for (const auto& x : vt.traj.states) CHECK(kCircle.distance(x) <= 1e-9);
    CHECK(vt.max_substitution_error <= 1e-3);
    CHECK(dist(vt.traj.back(), State{1.0, 0.0}) < 1e-2);
}

TEST_CASE("viable_trajectory: tangency at the boundary point of an interval")
{
    auto f = make_field(1, [](double, std::span<const double> x) { return State{1.0 - x[0] * x[0]}; });
    const auto vt = viable_trajectory(f, SetOracle::box({-1.0}, {1.0}), State{0.0}, 5.0, 1e-2);
    for (std::size_t j = 1; j < vt.traj.size(); ++j) {
        CHECK(vt.traj.states[j][0] >= vt.traj.states[j - 1][0]);
        CHECK(vt.traj.states[j][0] <= 1.0);
    }
    CHECK(vt.traj.back()[0] > 0.99);
}

TEST_CASE("viable_trajectory: equilibrium in a singleton")
{
    const auto k = SetOracle::point_cloud(PointCloud({{0.0}}, 1e-9));
    const auto vt = viable_trajectory(fields::scalar_linear(3.0), k, State{0.0}, 1.0, 0.1);
    for (const auto& x : vt.traj.states) CHECK(x[0] == 0.0);
}

TEST_CASE("viable_trajectory: rejects starts outside K")
{
    CHECK_THROWS_AS(viable_trajectory(fields::rotation(), kCircle, State{2.0, 0.0}, 1.0, 0.1),
                    std::invalid_argument);
}

TEST_CASE("property: substitution error shrinks with h on the circle")
{
    double prev = 1e9;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const auto vt = viable_trajectory(fields::rotation(), kCircle, State{1.0, 0.0}, 2.0 * std::numbers::pi, h);
        CHECK(vt.max_substitution_error < prev);
        prev = vt.max_substitution_error;
        CHECK(sup_error_vs_rotation(vt.traj) < 10.0 * h);
    }
}

TEST_CASE("interpolate: piecewise linear and clamped")
{
    Trajectory traj{{0.0, 1.0, 2.0}, {State{0.0}, State{2.0}, State{0.0}}, 1.0};
    CHECK(interpolate(traj, 0.5)[0] == doctest::Approx(1.0));
    CHECK(interpolate(traj, 1.5)[0] == doctest::Approx(1.0));
    CHECK(interpolate(traj, -1.0)[0] == 0.0);
    CHECK(interpolate(traj, 9.0)[0] == 0.0);
}
