#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "viab/epi_hj.hpp"
#include "viab/fields.hpp"
#include "viab/kernels.hpp"

using namespace viab;

namespace {

const double kE = std::numbers::e;

double abs1(std::span<const double> x) { return norm(x); }
double one(std::span<const double>, std::span<const double>) { return 1.0; }

LagrangianProblem decay_abs(double a, bool unit_cost)
{
    LagrangianProblem p;
    p.f = fields::scalar_linear(-1.0);
    p.u = abs1;
    p.a = a;
    if (unit_cost) p.l = one;
    return p;
}

// Closed form of inf_t (|x| e^{-t} + t): |x| when |x| <= 1, else 1 + ln|x|.
double stopping_value(double x)
{
    const double r = std::abs(x);
    return r <= 1.0 ? r : 1.0 + std::log(r);
}

ValueField sample_field(const GridSpec& grid, double (*fn)(double))
{
    ValueField v{grid, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) v.values.push_back(fn(grid.node(i)[0]));
    return v;
}

std::vector<State> interior_samples(double lo, double hi, int n)
{
    std::vector<State> out;
    for (int i = 1; i < n; ++i) out.push_back({lo + (hi - lo) * i / n});
    return out;
}

}  // namespace

TEST_CASE("lifted field")
{
    LagrangianProblem p = decay_abs(0.5, true);
    const auto g = lifted_field(p);
    const State v = g(0.0, State{2.0, 3.0});
    CHECK(v[0] == -2.0);
    CHECK(v[1] == doctest::Approx(-0.5 * 3.0 - 1.0));
    CHECK(g(0.0, State{2.0, 0.0})[1] == -1.0);
}

TEST_CASE("running_cost_path: closed forms")
{
    LagrangianProblem plain = decay_abs(0.0, false);
    const auto a = running_cost_path(plain, State{2.0}, 3.0, 0.01);
    for (std::size_t k = 0; k < a.values.size(); ++k)
        CHECK(std::abs(a.values[k] - 2.0 * std::exp(-a.traj.times[k])) < 1e-8);

    const auto b = running_cost_path(decay_abs(1.0, false), State{-0.7}, 3.0, 0.01);
    for (double j : b.values) CHECK(std::abs(j - 0.7) < 1e-8);

    LagrangianProblem clock;
    clock.f = fields::zero(1);
    clock.l = one;
    const auto c = running_cost_path(clock, State{4.0}, 3.0, 0.01);
    CHECK(c.values.front() == 0.0);
    for (std::size_t k = 0; k < c.values.size(); ++k) CHECK(std::abs(c.values[k] - c.traj.times[k]) < 1e-12);
}

TEST_CASE("value_sup: examples")
{
    for (double x : {-1.0, -0.3, 0.0, 0.6, 2.0})
        CHECK(std::abs(value_sup(decay_abs(0.0, false), State{x}, 5.0, 0.01) - std::abs(x)) < 1e-12);

    CHECK(is_inf(value_sup(decay_abs(2.0, false), State{0.5}, 5.0, 0.01)));
    CHECK(value_sup(decay_abs(2.0, false), State{0.0}, 5.0, 0.01) == 0.0);

    LagrangianProblem clock;
    clock.f = fields::zero(1);
    clock.l = one;
    CHECK(is_inf(value_sup(clock, State{0.0}, 5.0, 0.01)));
}

TEST_CASE("value_inf: examples")
{
    CHECK(value_inf(decay_abs(0.0, true), State{0.0}, 5.0, 0.01) == 0.0);
    CHECK(std::abs(value_inf(decay_abs(0.0, true), State{kE}, 5.0, 0.01) - 2.0) < 1e-6);
    for (double x : {-3.0, -0.5, 0.25, 1.7, 4.0})
        CHECK(std::abs(value_inf(decay_abs(0.0, true), State{x}, 5.0, 0.01) - stopping_value(x)) < 1e-6);

    const auto target = SetOracle::ball({0.0}, 0.1);
    LagrangianProblem p;
    p.f = fields::scalar_linear(-1.0);
    p.l = one;
    p.u = indicator(target);
    const double w = hitting_time(p.f, target, State{1.0}, 5.0, 0.01);
    CHECK(std::abs(value_inf(p, State{1.0}, 5.0, 0.01) - w) < 1e-6);
}

TEST_CASE("lyapunov: examples and guards")
{
    LagrangianProblem p = decay_abs(0.5, false);
    for (double x : {-2.0, 0.3, 1.0}) CHECK(std::abs(lyapunov(p, State{x}, 5.0, 0.01) - std::abs(x)) < 1e-12);

    LagrangianProblem zero;
    zero.f = fields::rotation();
    CHECK(lyapunov(zero, State{1.0, 2.0}, 5.0, 0.01) == 0.0);

    LagrangianProblem grow;
    grow.f = fields::scalar_linear(1.0);
    grow.u = abs1;
    CHECK(is_inf(lyapunov(grow, State{0.2}, 5.0, 0.01)));

    CHECK_THROWS_AS(lyapunov(decay_abs(0.0, true), State{1.0}, 1.0, 0.01), std::invalid_argument);
}

TEST_CASE("minimal_time and minimal_length")
{
    const double cell = 1e-4;
    const auto unit = fields::transport({1.0});
    const auto near_one = SetOracle::box({1.0 - cell}, {1.0 + cell});
    CHECK(std::abs(minimal_time(unit, near_one, State{0.0}, 5.0, 0.01) - (1.0 - cell)) < 1e-6);
    CHECK(minimal_time(unit, near_one, State{1.0}, 5.0, 0.01) == 0.0);
    CHECK(is_inf(minimal_time(fields::scalar_linear(-1.0), SetOracle::box({0.0}, {0.0}), State{1.0}, 10.0, 0.01)));

    const auto disk = SetOracle::ball({0.0}, 0.1);
    CHECK(std::abs(minimal_length(fields::scalar_linear(-1.0), disk, State{1.0}, 5.0, 0.01) - 0.9) < 1e-4);
    CHECK(minimal_length(fields::scalar_linear(-1.0), disk, State{0.05}, 5.0, 0.01) == 0.0);

    // The target must be wider than one step of arc or the samples jump it.
    const double tol = 5e-4;
    const auto east = SetOracle::ball({1.0, 0.0}, tol);
    const double len = minimal_length(fields::rotation(), east, State{0.0, 1.0}, 6.0, 5e-4);
    CHECK(std::abs(len - 1.5 * std::numbers::pi) < 1e-3);
}

TEST_CASE("property: minimal_time equals hitting_time")
{
    struct Case {
        VectorField f;
        SetOracle k;
        State x;
    };
    const std::vector<Case> cases{
        {fields::transport({1.0}), SetOracle::box({0.8}, {1.0}), State{-0.35}},
        {fields::scalar_linear(-1.0), SetOracle::ball({0.0}, 0.1), State{2.5}},
        {fields::rotation(), SetOracle::ball({-1.0, 0.0}, 0.2), State{1.0, 0.0}},
    };
    for (const auto& c : cases) {
        const double a = minimal_time(c.f, c.k, c.x, 8.0, 0.01);
        const double b = hitting_time(c.f, c.k, c.x, 8.0, 0.01);
        CHECK(std::abs(a - b) < 1e-6);
    }
}

TEST_CASE("property: obstacle bounds and horizon monotonicity")
{
    LagrangianProblem sup = decay_abs(0.3, false);
    LagrangianProblem inf = decay_abs(0.0, true);
    for (double x : {-2.0, -0.4, 0.1, 0.9, 3.0}) {
        const State s{x};
        CHECK(value_sup(sup, s, 3.0, 0.01) >= std::abs(x));
        const double vi = value_inf(inf, s, 3.0, 0.01);
        CHECK(vi >= 0.0);
        CHECK(vi <= std::abs(x));
        double prev_sup = 0.0, prev_inf = kInfTime;
        for (double T : {0.5, 1.0, 2.0, 4.0}) {
            const double a = value_sup(sup, s, T, 0.01);
            const double b = value_inf(inf, s, T, 0.01);
            CHECK(a >= prev_sup);
            CHECK(b <= prev_inf + 1e-12);
            prev_sup = a;
            prev_inf = b;
        }
    }
}

TEST_CASE("epigraph_value_field: sup mode reproduces |x|")
{
    LagrangianProblem p = decay_abs(0.0, false);
    p.value_cap = 2.0;
    const GridSpec grid({-1.0, 0.0}, {1.0, 2.0}, {41, 41});
    const auto env = epigraph_value_field(p, grid, ValueMode::sup, 3.0, 0.01, Exec{4});
    const double cell = grid.spacing(1);
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        const double x = env.grid.node(i)[0];
        CHECK(std::abs(env.values[i] - value_sup(p, State{x}, 3.0, 0.01)) <= 2.0 * cell);
    }
}

TEST_CASE("epigraph_value_field: inf mode reproduces the stopping value")
{
    LagrangianProblem p = decay_abs(0.0, true);
    p.value_cap = 4.0;
    const GridSpec grid({-4.0, 0.0}, {4.0, 4.0}, {41, 41});
    const auto env = epigraph_value_field(p, grid, ValueMode::inf, 5.0, 0.01, Exec{4});
    const double cell = grid.spacing(1);
    for (std::size_t i = 0; i < env.grid.size(); ++i) {
        const double x = env.grid.node(i)[0];
        CHECK(std::abs(env.values[i] - stopping_value(x)) <= 2.0 * cell);
    }

    LagrangianProblem flat;
    flat.f = fields::scalar_linear(-1.0);
    flat.l = one;
    flat.value_cap = 1.0;
    const auto zero = epigraph_value_field(flat, GridSpec({-1.0, 0.0}, {1.0, 1.0}, {11, 11}), ValueMode::inf, 1.0, 0.01);
    for (double v : zero.values) CHECK(v == 0.0);
}

TEST_CASE("epigraph_value_field: grid checks")
{
    LagrangianProblem p = decay_abs(0.0, false);
    p.value_cap = 2.0;
    CHECK_THROWS_AS(epigraph_value_field(p, GridSpec({-1.0, 0.0}, {1.0, 1.0}, {5, 5}), ValueMode::sup, 1.0, 0.01),
                    std::invalid_argument);

    // Off-centre columns are empty; the middle one first meets the epigraph at the roof.
    LagrangianProblem steep = p;
    steep.u = [](std::span<const double> x) { return 1.95 + 10.0 * std::abs(x[0]); };
    CHECK_THROWS_AS(epigraph_value_field(steep, GridSpec({-1.0, 0.0}, {1.0, 2.0}, {5, 5}), ValueMode::sup, 1.0, 0.01),
                    CapTooSmall);
}

TEST_CASE("repeller_condition")
{
    std::vector<State> far;
    for (double r : {1.0, 1.5, 2.0, 4.0}) {
        far.push_back({r});
        far.push_back({-r});
    }
    LagrangianProblem grow;
    grow.f = fields::scalar_linear(1.0);
    grow.l = one;
    const auto rc = repeller_condition(grow, far);
    CHECK(rc.gamma_minus == doctest::Approx(0.5));
    CHECK(rc.holds);

    LagrangianProblem free = grow;
    free.l = {};
    CHECK_FALSE(repeller_condition(free, far).holds);

    LagrangianProblem decay = grow;
    decay.f = fields::scalar_linear(-1.0);
    const auto rd = repeller_condition(decay, far);
    CHECK(rd.gamma_minus <= -0.5);
    CHECK_FALSE(rd.holds);
}

TEST_CASE("epiderivative: smooth, kink, indicator")
{
    const GridSpec grid({-2.0}, {2.0}, {401});
    const auto ladder = epiderivative_ladder(grid);

    const auto sq = sample_field(grid, [](double x) { return x * x; });
    CHECK(std::abs(epiderivative(sq, State{1.0}, State{1.0}, ladder) - 2.0) < 5e-2);

    const auto ab = sample_field(grid, [](double x) { return std::abs(x); });
    CHECK(std::abs(epiderivative(ab, State{0.0}, State{1.0}, ladder) - 1.0) < 2e-2);
    CHECK(std::abs(epiderivative(ab, State{0.0}, State{-1.0}, ladder) - 1.0) < 2e-2);

    const auto ind = sample_field(grid, [](double x) { return (x >= 0.0 && x <= 1.0) ? 0.0 : kInfTime; });
    CHECK(is_inf(epiderivative(ind, State{1.0}, State{1.0}, ladder)));
    CHECK(epiderivative(ind, State{1.0}, State{-1.0}, ladder) == 0.0);
}

TEST_CASE("hj_check_sup: computed solution, shifted and flat fields")
{
    LagrangianProblem p = decay_abs(0.0, false);
    const GridSpec grid({-1.0}, {1.0}, {81});
    ValueField v{grid, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) v.values.push_back(value_sup(p, grid.node(i), 5.0, 0.01));
    const auto samples = interior_samples(-1.0, 1.0, 40);

    const auto ok = hj_check_sup(p, v, samples);
    CHECK(ok.violations == 0);
    CHECK(ok.samples.size() == samples.size());

    ValueField shifted = v;
    for (double& x : shifted.values) x += 1.0;
    const auto bad = hj_check_sup(p, shifted, samples);
    CHECK(bad.violations >= 1);
    CHECK(bad.max_fwd <= 0.05);
    CHECK(bad.max_complementarity > 0.05);

    LagrangianProblem q;
    q.f = fields::rotation();
    const GridSpec plane({-1.0, -1.0}, {1.0, 1.0}, {11, 11});
    const ValueField flat{plane, std::vector<double>(plane.size(), 3.0)};
    const auto rep = hj_check_sup(q, flat, {State{0.1, 0.2}, State{-0.5, 0.3}});
    CHECK(rep.violations == 0);
    for (const auto& s : rep.samples) {
        CHECK(s.residual_fwd == doctest::Approx(0.0));
        CHECK(s.residual_bwd == doctest::Approx(0.0));
    }
}

TEST_CASE("hj_check_inf: minimal time, stopping value, zero field")
{
    // Minimal time onto {1} under f = 1 is v(x) = 1 - x for x <= 1.
    LagrangianProblem mt;
    mt.f = fields::transport({1.0});
    mt.l = one;
    mt.u = indicator(SetOracle::box({1.0}, {1.0}));
    const GridSpec line({-1.0}, {1.5}, {101});
    ValueField v{line, {}};
    for (std::size_t i = 0; i < line.size(); ++i) {
        const double x = line.node(i)[0];
        v.values.push_back(x <= 1.0 ? 1.0 - x : kInfTime);
    }
    const auto rep = hj_check_inf(mt, v, interior_samples(-1.0, 1.0, 50));
    CHECK(rep.violations == 0);
    // The +-1% direction stencil biases the quotient down by |v'| = 0.01.
    CHECK(rep.max_fwd <= 0.0);
    CHECK(rep.max_fwd >= -0.02);

    LagrangianProblem p = decay_abs(0.0, true);
    const GridSpec grid({-4.0}, {4.0}, {161});
    ValueField w{grid, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) w.values.push_back(value_inf(p, grid.node(i), 5.0, 0.01));
    const auto samples = interior_samples(-3.9, 3.9, 78);
    CHECK(hj_check_inf(p, w, samples).violations == 0);

    ValueField zero{grid, std::vector<double>(grid.size(), 0.0)};
    CHECK(hj_check_inf(p, zero, samples).violations >= 1);

    ValueField same{grid, {}};
    for (std::size_t i = 0; i < grid.size(); ++i) same.values.push_back(std::abs(grid.node(i)[0]));
    const auto at_u = hj_check_inf(p, same, interior_samples(-1.0, 1.0, 20));
    CHECK(at_u.violations == 0);
    for (const auto& s : at_u.samples) CHECK(is_neg_inf(s.residual_fwd));
}

TEST_CASE("HJ report CSV columns")
{
    HjReport r;
    r.samples.push_back({State{0.5}, 0.0, -1.0, 0.25, false});
    std::ostringstream os;
    write_hj_report_csv(os, r);
    CHECK(os.str() == "x1,residual_fwd,residual_bwd,complementarity\n0.5,0,-1,0.25\n");
}
