#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "viab/sets.hpp"

using namespace viab;

namespace {

const double kPi = std::numbers::pi;

// Brute-force nearest point of a finite list, lowest index on ties.
std::size_t brute_nearest(const std::vector<State>& pts, const State& y)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (dist(pts[i], y) < dist(pts[best], y)) best = i;
    return best;
}

}  // namespace

TEST_CASE("distance: box, ball")
{
    const auto box = SetOracle::box({0.0, 0.0}, {1.0, 1.0});
    CHECK(box.distance(State{2.0, 0.5}) == doctest::Approx(1.0));
    CHECK(box.distance(State{0.5, 0.5}) == 0.0);
    CHECK(box.distance(State{2.0, 2.0}) == doctest::Approx(std::sqrt(2.0)));

    const auto ball = SetOracle::ball({0.0, 0.0}, 1.0);
    CHECK(ball.distance(State{0.0, 0.0}) == 0.0);
    CHECK(ball.distance(State{2.0, 0.0}) == doctest::Approx(1.0));
    CHECK(ball.distance(State{3.0, 4.0}) == doctest::Approx(4.0));
}

TEST_CASE("project: analytic rules and tie-breaks")
{
    const auto ball = SetOracle::ball({0.0, 0.0}, 1.0);
    CHECK(ball.project(State{2.0, 0.0}) == State{1.0, 0.0});

    const auto box = SetOracle::box({0.0, 0.0}, {1.0, 1.0});
    CHECK(box.project(State{-1.0, 2.0}) == State{0.0, 1.0});

    const auto cloud = SetOracle::point_cloud(PointCloud({{0.0, 0.0}, {1.0, 0.0}}, 1e-9));
    CHECK(cloud.project(State{0.5, 0.0}) == State{0.0, 0.0});

    const auto hs = SetOracle::halfspace({1.0, 1.0}, 0.0);
    const State p = hs.project(State{1.0, 1.0});
    CHECK(p[0] == doctest::Approx(0.0));
    CHECK(p[1] == doctest::Approx(0.0));
}

TEST_CASE("invariant: distance vanishes exactly on the set and projections realize it")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const std::vector<SetOracle> prims{
        SetOracle::box({-1.0, 0.0}, {1.0, 2.0}),
        SetOracle::ball({0.5, -0.5}, 1.25),
        SetOracle::sphere({0.0, 0.0}, 1.0),
        SetOracle::halfspace({1.0, -2.0}, 0.5),
        SetOracle::product({SetOracle::box({0.0}, {1.0}), SetOracle::ball({0.0}, 2.0)}),
        SetOracle::point_cloud(PointCloud({{0.0, 0.0}, {1.0, 1.0}, {-2.0, 0.5}}, 1e-6)),
    };
    for (const auto& k : prims) {
        for (int trial = 0; trial < 200; ++trial) {
            const State x{u(rng), u(rng)}, y{u(rng), u(rng)};
            const double dx = k.distance(x);
            CHECK((dx <= kMembershipSlack) == k.contains(x));
            const State p = k.project(x);
            CHECK(k.distance(p) <= 1e-9);
            CHECK(std::abs(dist(p, x) - dx) <= 1e-9);
            CHECK(std::abs(k.distance(x) - k.distance(y)) <= dist(x, y) + 1e-12);
        }
    }
}

TEST_CASE("point cloud: merge radius and exact nearest neighbour")
{
    PointCloud merged({{0.0}, {0.004}, {0.02}, {0.0051}}, 0.01);
    CHECK(merged.size() == 3);
    for (std::size_t i = 0; i < merged.size(); ++i)
        for (std::size_t j = i + 1; j < merged.size(); ++j)
            CHECK(dist(merged.point(i), merged.point(j)) >= 0.005);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<State> pts;
    for (int i = 0; i < 500; ++i) pts.push_back({u(rng), u(rng), u(rng)});
    PointCloud cloud(pts, 0.0);
    const auto k = SetOracle::point_cloud(cloud);
    for (int trial = 0; trial < 200; ++trial) {
        const State y{u(rng), u(rng), u(rng)};
        const std::size_t i = brute_nearest(pts, y);
        CHECK(k.project(y) == pts[i]);
        CHECK(k.distance(y) == doctest::Approx(dist(pts[i], y)));
    }
}

TEST_CASE("composites: intersection bounds, union, complement")
{
    const auto a = SetOracle::ball({0.0, 0.0}, 1.0);
    const auto b = SetOracle::halfspace({-1.0, 0.0}, -0.5);  // x1 >= 0.5
    const auto both = SetOracle::intersection({a, b});
    CHECK(both.contains(State{0.75, 0.0}));
    CHECK_FALSE(both.contains(State{0.25, 0.0}));
    const State y{-1.0, 0.0};
    const auto bounds = both.distance_bounds(y);
    CHECK(bounds.lower <= bounds.upper + 1e-12);
    CHECK(bounds.lower == doctest::Approx(1.5));
    CHECK(bounds.upper == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(both.contains(both.project(y)));

    const auto u = SetOracle::union_of({SetOracle::box({0.0}, {1.0}), SetOracle::box({3.0}, {4.0})}, 1);
    CHECK(u.distance(State{2.0}) == doctest::Approx(1.0));
    CHECK(u.distance(State{2.5}) == doctest::Approx(0.5));
    CHECK(u.project(State{2.5}) == State{3.0});

    const auto hole = SetOracle::complement(SetOracle::ball({0.0, 0.0}, 1.0));
    CHECK(hole.contains(State{2.0, 0.0}));
    CHECK(hole.contains(State{1.0, 0.0}));
    CHECK(hole.distance(State{0.25, 0.0}) == doctest::Approx(0.75));
    const State hp = hole.project(State{0.0, 0.5});
    CHECK(hp[1] == doctest::Approx(1.0));

    const auto odd = SetOracle::complement(SetOracle::point_cloud(PointCloud({{0.0, 0.0}}, 1e-9)));
    CHECK(odd.contains(State{1.0, 1.0}));

    CHECK_FALSE(SetOracle::empty(2).contains(State{0.0, 0.0}));
    CHECK(SetOracle::whole_space(2).distance(State{1e6, -1e6}) == 0.0);
}

TEST_CASE("sublevel sets")
{
    // Disk of radius 2 as g(x) = |x|^2 - 4.
    const auto disk = SetOracle::sublevel(2, [](std::span<const double> x) { return dot(x, x) - 4.0; });
    CHECK(disk.contains(State{1.0, 1.0}));
    CHECK(disk.distance(State{3.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-3));
    const State p = disk.project(State{0.0, 5.0});
    CHECK(p[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("tangent_residual on the unit circle and the plane")
{
    const auto circle = SetOracle::sphere({0.0, 0.0}, 1.0);
    const State x{1.0, 0.0};
    CHECK(tangent_residual(circle, x, State{0.0, 1.0}) <= kTangentHMin);
    CHECK(tangent_residual(circle, x, State{1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(tangent_residual(SetOracle::whole_space(2), x, State{3.0, -1.0}) == 0.0);
}

TEST_CASE("property: directions into a convex set are tangent")
{
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0), lam(0.1, 5.0);
    const std::vector<SetOracle> convex{SetOracle::box({-1.0, -1.0}, {1.0, 1.0}),
                                        SetOracle::ball({0.0, 0.0}, 1.0),
                                        SetOracle::halfspace({1.0, 1.0}, 0.3)};
    for (const auto& k : convex) {
        for (int trial = 0; trial < 50; ++trial) {
            const State x = k.project(State{2.0 * u(rng), 2.0 * u(rng)});
            const State kk = k.project(State{u(rng), u(rng)});
            const State v = scaled(sub(kk, x), lam(rng));
            CHECK(tangent_residual(k, x, v) <= 1e-6 * std::max(1.0, norm(v)));
        }
    }
}

TEST_CASE("property: projection residual is a normal vector")
{
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(1.2, 3.0), u(-1.0, 1.0);
    const std::vector<SetOracle> prims{SetOracle::ball({0.0, 0.0}, 1.0),
                                       SetOracle::box({-1.0, -1.0}, {1.0, 1.0})};
    for (const auto& k : prims) {
        for (int trial = 0; trial < 50; ++trial) {
            const double th = ang(rng), r = rad(rng);
            const State y{r * std::cos(th), r * std::sin(th)};
            const State x = k.project(y);
            const State n = sub(y, x);
            CHECK(tangent_residual(k, x, n) >= 0.5 * norm(n));
            for (int j = 0; j < 20; ++j) {
                const State w = sub(k.project(State{u(rng), u(rng)}), x);
                if (tangent_residual(k, x, w) > 1e-9) continue;
                CHECK(dot(n, w) <= 1e-9 * norm(n) * norm(w) + 1e-12);
            }
        }
    }
}

TEST_CASE("set_limit: singleton, decreasing boxes, alternating")
{
    std::vector<PointCloud> seq;
    for (int n = 1; n <= 100; ++n) seq.emplace_back(std::vector<State>{{1.0 / n}}, 1e-9);
    const auto up = set_limit(seq, LimitMode::upper, 0.05);
    REQUIRE(up.size() >= 1);
    for (const auto& p : up.points()) CHECK(std::abs(p[0]) <= 0.05);

    std::vector<PointCloud> boxes;
    for (int n = 1; n <= 40; ++n) {
        std::vector<State> pts;
        const double top = 1.0 + 1.0 / n;
        for (int i = 0; i <= 200; ++i) pts.push_back({top * i / 200.0});
        boxes.emplace_back(pts, 1e-9);
    }
    const auto low = set_limit(boxes, LimitMode::lower, 0.02);
    double lo = 1e9, hi = -1e9;
    for (const auto& p : low.points()) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
    }
    CHECK(lo <= 0.02);
    CHECK(hi >= 1.0 - 0.02);
    CHECK(hi <= 1.0 + 1.0 / 20 + 0.02);

    std::vector<PointCloud> alt;
    for (int n = 0; n < 20; ++n) alt.emplace_back(std::vector<State>{{static_cast<double>(n % 2)}}, 1e-9);
    const auto au = set_limit(alt, LimitMode::upper, 0.1);
    const auto al = set_limit(alt, LimitMode::lower, 0.1);
    CHECK(au.size() == 2);
    CHECK(al.size() == 0);
}

TEST_CASE("property: lower limit is contained in the upper limit")
{
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<PointCloud> seq;
    for (int n = 0; n < 12; ++n) {
        std::vector<State> pts;
        for (int i = 0; i < 30; ++i) pts.push_back({u(rng), u(rng)});
        pts.push_back({0.0, 0.0});
        seq.emplace_back(pts, 1e-9);
    }
    const auto up = set_limit(seq, LimitMode::upper, 0.2);
    const auto low = set_limit(seq, LimitMode::lower, 0.2);
    const auto up_set = SetOracle::point_cloud(up);
    for (const auto& p : low.points()) CHECK(up_set.distance(p) <= 0.2 + 1e-12);
}

TEST_CASE("point cloud CSV")
{
    std::ostringstream os;
    write_point_cloud_csv(os, PointCloud({{1.0, 2.0}, {0.5, -1.0}}, 0.0));
    CHECK(os.str() == "x1,x2\n1,2\n0.5,-1\n");
}
