#include "viab/demo4d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "viab/fields.hpp"

namespace viab {

Demo4d::Demo4d(Demo4dParams params, Initial u0, Face v1, Face v_r2)
    : params_(params), u0_(std::move(u0)), v1_(std::move(v1)), v_r2_(std::move(v_r2))
{
    if (!(params_.rho > 0.0) || !(params_.b > 0.0) || !(params_.r2 > 0.0) || !(params_.sigma >= 0.0) ||
        !(params_.beta >= 0.0))
        throw std::invalid_argument("demo4d: need rho, b, r2 > 0 and sigma, beta >= 0");
    if (!u0_ || !v1_ || !v_r2_) throw std::invalid_argument("demo4d: u0, v1 and v_r2 are required");
}

void Demo4d::set_rate(double a)
{
    a_const_ = a;
    a_fn_ = nullptr;
}

void Demo4d::set_rate(Rate a, std::size_t panels)
{
    if (panels == 0) throw std::invalid_argument("demo4d: need at least one Simpson panel");
    a_fn_ = std::move(a);
    panels_ = panels;
}

VectorField Demo4d::field() const
{
    return fields::demographic4d(params_.rho, params_.sigma, params_.beta, params_.b);
}

SetOracle Demo4d::domain() const
{
    const double inf = std::numeric_limits<double>::infinity();
    return SetOracle::box({0.0, 0.0, 0.0, 0.0}, {inf, params_.r2, inf, params_.b});
}

void Demo4d::check_domain(std::span<const double> x) const
{
    if (x.size() != 4) throw ParamDomain("demo4d: state must have 4 coordinates");
    if (!(x[0] >= 0.0)) throw ParamDomain("demo4d: x1 must be >= 0, got " + std::to_string(x[0]));
    if (!(x[1] > 0.0 && x[1] <= params_.r2)) throw ParamDomain("demo4d: x2 must lie in (0, r2]");
    if (!(x[2] >= 0.0)) throw ParamDomain("demo4d: x3 must be >= 0");
    if (!(x[3] > 0.0 && x[3] < params_.b)) throw ParamDomain("demo4d: x4 must lie in (0, b)");
}

double Demo4d::second_face_time(std::span<const double> x) const
{
    check_domain(x);
    return std::log(params_.r2 / x[1]) / params_.rho;
}

double Demo4d::exit_time(std::span<const double> x) const { return std::min(x[0], second_face_time(x)); }

int Demo4d::regime(double t, std::span<const double> x) const
{
    if (!(t >= 0.0)) throw ParamDomain("demo4d: t must be >= 0");
    const double l = second_face_time(x);
    if (t <= std::min(x[0], l)) return 1;
    if (x[0] <= std::min(t, l)) return 2;
    return 3;
}

State Demo4d::backward_flow(double d, std::span<const double> x) const
{
    const auto& p = params_;
    return {x[0] - d, std::exp(p.rho * d) * x[1], std::exp(-p.sigma * d) * x[2],
            p.b / (1.0 + (p.b / x[3] - 1.0) * std::exp(p.beta * p.b * d))};
}

Exitor Demo4d::exitor(double t, std::span<const double> x) const
{
    const auto& p = params_;
    Exitor e;
    switch (regime(t, x)) {
    case 1:
        e.tau = t;
        e.s = 0.0;
        e.initial = true;
        e.c = backward_flow(t, x);
        break;
    case 2:
        e.tau = x[0];
        e.s = t - x[0];
        e.initial = false;
        e.c = backward_flow(x[0], x);
        e.c[0] = 0.0;
        break;
    default: {
        const double l = second_face_time(x);
        e.tau = l;
        e.s = t - l;
        e.initial = false;
        // The x3 coordinate decays by exp(-sigma L) = (x2/r2)^(sigma/rho).
        e.c = {x[0] - l, p.r2, std::pow(x[1] / p.r2, p.sigma / p.rho) * x[2],
               p.b / (1.0 + (p.b / x[3] - 1.0) * std::pow(p.r2 / x[1], p.beta * p.b / p.rho))};
        break;
    }
    }
    return e;
}

double Demo4d::rate_integral(double s, double t, std::span<const double> x) const
{
    if (!a_fn_) return a_const_ * (t - s);
    if (t <= s) return 0.0;
    const std::size_t n = 2 * panels_;
    const double h = (t - s) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double tau = s + h * static_cast<double>(i);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * a_fn_(tau, backward_flow(t - tau, x));
    }
    return acc * h / 3.0;
}

double Demo4d::solve(double t, std::span<const double> x) const
{
    const Exitor e = exitor(t, x);
    const double decay = std::exp(-rate_integral(e.s, t, x));
    switch (regime(t, x)) {
    case 1:
        return decay * u0_(e.c);
    case 2: {
        const double rest[3] = {e.c[1], e.c[2], e.c[3]};
        return decay * v1_(e.s, rest);
    }
    default: {
        const double rest[3] = {e.c[0], e.c[2], e.c[3]};
        return decay * v_r2_(e.s, rest);
    }
    }
}

CharProblem Demo4d::char_problem() const
{
    CharProblem prob;
    prob.phi = field();
    prob.k = domain();
    prob.output_dim = 1;

    const double a = a_const_;
    const Rate a_fn = a_fn_;
    prob.g = [a, a_fn](double t, std::span<const double> x, std::span<const double> y) {
        const double rate = a_fn ? a_fn(t, x) : a;
        return State{-rate * y[0]};
    };

    const Initial u0 = u0_;
    const Face v1 = v1_, v_r2 = v_r2_;
    const double r2 = params_.r2;
    prob.data.u0 = [u0](std::span<const double> x) { return State{u0(x)}; };
    prob.data.v_gamma = [v1, v_r2, r2](double s, std::span<const double> xi) {
        if (std::abs(xi[0]) <= std::abs(r2 - xi[1])) {
            const double rest[3] = {xi[1], xi[2], xi[3]};
            return State{v1(s, rest)};
        }
        const double rest[3] = {xi[0], xi[2], xi[3]};
        return State{v_r2(s, rest)};
    };
    return prob;
}

std::vector<TimePoint> demo4d_samples(const Demo4d& d, std::size_t per_regime, std::uint64_t seed, double gap)
{
    const auto& p = d.params();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ut(0.05, 3.0), u1(0.05, 3.0), u2(0.05 * p.r2, 0.99 * p.r2),
        u3(0.1, 2.0), u4(0.05 * p.b, 0.95 * p.b);
    std::vector<TimePoint> out;
    for (int want = 1; want <= 3; ++want) {
        std::size_t got = 0;
        while (got < per_regime) {
            const double t = ut(rng);
            State x{u1(rng), u2(rng), u3(rng), u4(rng)};
            const double l = d.second_face_time(x);
            if (std::abs(t - x[0]) < gap || std::abs(t - l) < gap || std::abs(x[0] - l) < gap) continue;
            if (d.regime(t, x) != want) continue;
            out.push_back({t, std::move(x)});
            ++got;
        }
    }
    return out;
}

}  // namespace viab
