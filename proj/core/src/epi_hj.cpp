#include "viab/epi_hj.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "viab/csv.hpp"
#include "viab/kernels.hpp"

namespace viab {

double LagrangianProblem::cost(std::span<const double> x, std::span<const double> p) const
{
    return l ? l(x, p) : 0.0;
}

double LagrangianProblem::obstacle(std::span<const double> x) const
{
    return u ? to_sentinel(u(x)) : 0.0;
}

Obstacle indicator(SetOracle k)
{
    return [k = std::move(k)](std::span<const double> x) { return k.contains(x) ? 0.0 : kInfTime; };
}

VectorField lifted_field(const LagrangianProblem& p)
{
    const std::size_t n = p.f.dim;
    VectorField g;
    g.dim = n + 1;
    g.eval = [p, n](double, std::span<const double> xy, std::span<double> out) {
        const auto x = xy.first(n);
        p.f.eval(0.0, x, out.first(n));
        out[n] = -p.a * xy[n] - p.cost(x, std::span<const double>(out.data(), n));
    };
    return g;
}

namespace {

double capped(const LagrangianProblem& p, double j)
{
    return (is_inf(j) || j > p.value_cap) ? kInfTime : j;
}

/// J(t) at an arbitrary time, using one RK4 substep from the sample before t
/// and the trapezoid rule on the partial interval.
class PathEval {
public:
    PathEval(const LagrangianProblem& p, const CostPath& path) : p_(p), path_(path), rk_(p.f.dim) {}

    double at(double t)
    {
        const auto& times = path_.traj.times;
        std::size_t j = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
        j = j == 0 ? 0 : j - 1;
        if (j + 1 >= times.size()) j = times.size() - 1;
        const double tj = times[j];
        const State& xj = path_.traj.states[j];
        const double dt = t - tj;
        if (dt <= 0.0) return path_.values[j];

        State y(p_.f.dim);
        rk_.step(p_.f, tj, xj, dt, y);
        check_finite(y, t);
        const double lj = p_.cost(xj, p_.f(tj, xj));
        const double ly = p_.cost(y, p_.f(t, y));
        const double integral =
            path_.integral[j] + 0.5 * dt * (std::exp(p_.a * tj) * lj + std::exp(p_.a * t) * ly);
        const double u = p_.obstacle(y);
        if (is_inf(u)) return kInfTime;
        return capped(p_, std::exp(p_.a * t) * u + integral);
    }

private:
    const LagrangianProblem& p_;
    const CostPath& path_;
    Rk4Stepper rk_;
};

}  // namespace

CostPath running_cost_path(const LagrangianProblem& p, std::span<const double> x, double t_max, double h)
{
    CostPath path;
    path.traj = integrate(p.f, x, 0.0, t_max, h);
    const std::size_t n = path.traj.size();
    path.integral.assign(n, 0.0);
    path.values.assign(n, 0.0);

    double prev_rate = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = path.traj.times[k];
        const State& xk = path.traj.states[k];
        const double rate = std::exp(p.a * t) * p.cost(xk, p.f(t, xk));
        if (k > 0) {
            const double dt = t - path.traj.times[k - 1];
            path.integral[k] = path.integral[k - 1] + 0.5 * dt * (prev_rate + rate);
        }
        prev_rate = rate;
        const double u = p.obstacle(xk);
        path.values[k] = is_inf(u) ? kInfTime : capped(p, std::exp(p.a * t) * u + path.integral[k]);
    }
    return path;
}

double value_sup(const LagrangianProblem& p, std::span<const double> x, double t_max, double h)
{
    const CostPath path = running_cost_path(p, x, t_max, h);
    const auto& j = path.values;
    const auto it = std::max_element(j.begin(), j.end());
    if (is_inf(*it)) return kInfTime;
    const std::size_t n = j.size();
    if (n >= 2 && static_cast<std::size_t>(it - j.begin()) == n - 1) {
        const double dt = path.traj.times[n - 1] - path.traj.times[n - 2];
        const double slope = (j[n - 1] - j[n - 2]) / dt;
        if (slope > 1e-6 * std::max(1.0, std::abs(j[n - 1]))) return kInfTime;
    }
    return *it;
}

namespace {

/// Golden-section minimum of eval on [lo, hi] (both ends finite).
double golden_min(PathEval& eval, double lo, double hi)
{
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double jc = eval.at(c), jd = eval.at(d);
    while (hi - lo > 1e-8) {
        if (jc <= jd) {
            hi = d;
            d = c;
            jd = jc;
            c = hi - inv_phi * (hi - lo);
            jc = eval.at(c);
        } else {
            lo = c;
            c = d;
            jc = jd;
            d = lo + inv_phi * (hi - lo);
            jd = eval.at(d);
        }
    }
    return std::min({jc, jd, eval.at(lo), eval.at(hi)});
}

/// J at the finite side of the finite/infinite transition inside [a, b],
/// located by bisection to 1e-8. Exactly one of J(a), J(b) is infinite.
double transition_value(PathEval& eval, double a, double b, bool finite_at_a)
{
    double fin = finite_at_a ? a : b, inf = finite_at_a ? b : a;
    while (std::abs(inf - fin) > 1e-8) {
        const double mid = 0.5 * (fin + inf);
        if (is_inf(eval.at(mid)))
            inf = mid;
        else
            fin = mid;
    }
    return eval.at(fin);
}

}  // namespace

double value_inf(const LagrangianProblem& p, std::span<const double> x, double t_max, double h)
{
    const CostPath path = running_cost_path(p, x, t_max, h);
    const auto& j = path.values;
    const auto& times = path.traj.times;
    const std::size_t k = static_cast<std::size_t>(std::min_element(j.begin(), j.end()) - j.begin());
    double best = j[k];
    if (is_inf(best)) return kInfTime;

    // Refine on each neighbouring interval. Where the neighbour is infinite
    // (indicator obstacles) the minimum sits at the entry/exit point, which
    // golden-section search cannot see inside a narrow window.
    PathEval eval(p, path);
    for (std::size_t nb : {k - 1, k + 1}) {
        if (nb >= times.size()) continue;  // also catches k - 1 wrapping at k = 0
        const double a = std::min(times[k], times[nb]), b = std::max(times[k], times[nb]);
        if (is_inf(j[nb]))
            best = std::min(best, transition_value(eval, a, b, nb > k));
        else
            best = std::min(best, golden_min(eval, a, b));
    }
    return best;
}

double lyapunov(const LagrangianProblem& p, std::span<const double> x, double t_max, double h)
{
    if (p.l) throw std::invalid_argument("lyapunov: the Lagrangian must be identically zero (leave l empty)");
    const double value = value_sup(p, x, t_max, h);
    if (is_inf(value)) return kInfTime;
    const Trajectory traj = integrate(p.f, x, 0.0, t_max, h);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double u = p.obstacle(traj.states[k]);
        const double bound = std::exp(-p.a * traj.times[k]) * value;
        if (u > bound + 1e-6)
            throw DescentViolation("lyapunov: u(x(t)) exceeds e^{-at} value at t = " + csv::format(traj.times[k]));
    }
    return value;
}

double minimal_time(const VectorField& f, const SetOracle& k, std::span<const double> x, double t_max,
                    double h)
{
    LagrangianProblem p;
    p.f = f;
    p.l = [](std::span<const double>, std::span<const double>) { return 1.0; };
    p.u = indicator(k);
    p.value_cap = std::max(1e6, 2.0 * t_max);
    return value_inf(p, x, t_max, h);
}

double minimal_length(const VectorField& f, const SetOracle& k, std::span<const double> x, double t_max,
                      double h)
{
    LagrangianProblem p;
    p.f = f;
    p.l = [](std::span<const double>, std::span<const double> v) { return norm(v); };
    p.u = indicator(k);
    return value_inf(p, x, t_max, h);
}

ValueField epigraph_value_field(const LagrangianProblem& p, const GridSpec& grid, ValueMode mode,
                                double t_max, double h, Exec exec)
{
    grid.validate();
    const std::size_t n = p.f.dim;
    if (grid.dim() != n + 1) throw std::invalid_argument("epigraph_value_field: grid must cover (x, y)");
    if (grid.lo[n] > 0.0 || grid.hi[n] < p.value_cap)
        throw std::invalid_argument("epigraph_value_field: y axis must span [0, value_cap]");

    const auto epigraph = SetOracle::sublevel(n + 1, [p, n](std::span<const double> xy) {
        const double u = p.obstacle(xy.first(n));
        return is_inf(u) ? kInfTime : u - xy[n];
    });
    const VectorField g = lifted_field(p);

    const TimeField tf = mode == ValueMode::sup ? viab_field(g, epigraph, grid, t_max, h, exec)
                                                : capt_field(g, epigraph, grid, t_max, h, exec);
    auto kept = [&](std::size_t i) {
        if (!tf.inside[i]) return false;
        const double v = tf.values[i];
        return mode == ValueMode::sup ? v >= t_max : (!is_inf(v) && v <= t_max);
    };

    GridSpec states(State(grid.lo.begin(), grid.lo.end() - 1), State(grid.hi.begin(), grid.hi.end() - 1),
                    std::vector<std::size_t>(grid.counts.begin(), grid.counts.end() - 1));
    const std::size_t ny = grid.counts[n];
    ValueField out{states, std::vector<double>(states.size(), kInfTime)};
    for (std::size_t s = 0; s < states.size(); ++s) {
        for (std::size_t j = 0; j < ny; ++j) {
            if (!kept(s * ny + j)) continue;
            if (j + 1 == ny)
                throw CapTooSmall("epigraph_value_field: envelope reaches the top of the y grid at x = " +
                                  csv::format(states.node(s)[0]));
            out.values[s] = grid.coord(n, j);
            break;
        }
    }
    return out;
}

RepellerCondition repeller_condition(const LagrangianProblem& p, const std::vector<State>& samples)
{
    RepellerCondition rc;
    double gamma = kInfTime, delta = kInfTime;
    for (const auto& x : samples) {
        const State fx = p.f(0.0, x);
        const double nx = norm(x);
        if (nx > 0.0) gamma = std::min(gamma, dot(x, fx) / (nx * (nx + 1.0)));
        delta = std::min(delta, p.cost(x, fx) / (nx + 1.0));
    }
    if (samples.empty()) return rc;
    rc.gamma_minus = is_inf(gamma) ? 0.0 : gamma;
    rc.delta_minus = delta;
    rc.holds = p.a + rc.gamma_minus > 0.0 && rc.delta_minus > 0.0;
    return rc;
}

std::vector<double> epiderivative_ladder(const GridSpec& grid)
{
    double s = grid.spacing(0);
    for (std::size_t a = 1; a < grid.dim(); ++a) s = std::min(s, grid.spacing(a));
    return {2.0 * s, s, 0.5 * s, 0.25 * s};
}

double epiderivative(const ValueField& u, std::span<const double> x, std::span<const double> v,
                     const std::vector<double>& h_ladder)
{
    const double ux = u.interpolate(x);
    if (is_inf(ux)) return kInfTime;
    const std::size_t n = x.size();
    const double delta = 0.01 * norm(v);

    std::vector<State> stencil{State(v.begin(), v.end())};
    if (delta > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            for (double sgn : {1.0, -1.0}) {
                State w(v.begin(), v.end());
                w[i] += sgn * delta;
                stencil.push_back(std::move(w));
            }
        }
    }

    double best = kInfTime;
    for (double h : h_ladder) {
        for (const auto& w : stencil) {
            const double up = u.interpolate(add_scaled(x, h, w));
            if (is_inf(up)) continue;
            best = std::min(best, (up - ux) / h);
        }
    }
    return best;
}

namespace {

void tally(HjReport& report, HjSample row)
{
    report.max_fwd = std::max(report.max_fwd, row.residual_fwd);
    report.max_bwd = std::max(report.max_bwd, row.residual_bwd);
    report.max_complementarity = std::max(report.max_complementarity, row.complementarity);
    if (row.violated) ++report.violations;
    report.samples.push_back(std::move(row));
}

/// D v(x)(w) + extra, keeping +infinity.
double residual(const ValueField& v, std::span<const double> x, std::span<const double> w,
                const std::vector<double>& ladder, double extra)
{
    const double d = epiderivative(v, x, w, ladder);
    return is_inf(d) ? kInfTime : d + extra;
}

}  // namespace

HjReport hj_check_sup(const LagrangianProblem& p, const ValueField& v, const std::vector<State>& samples,
                      double tol)
{
    const auto ladder = epiderivative_ladder(v.grid);
    HjReport report;
    for (const auto& x : samples) {
        HjSample row{x};
        const double vx = v.interpolate(x);
        const double ux = p.obstacle(x);
        const State fx = p.f(0.0, x);
        const double l = p.cost(x, fx);

        row.residual_fwd = residual(v, x, fx, ladder, l + p.a * vx);
        row.residual_bwd = residual(v, x, scaled(fx, -1.0), ladder, -l - p.a * vx);
        const double slack = is_inf(vx) ? kInfTime : std::max(0.0, vx - ux);
        row.complementarity = std::min(slack, std::max(0.0, row.residual_bwd));

        bool obstacle_ok = vx >= ux - tol;
        if (is_inf(ux)) obstacle_ok = is_inf(vx);
        row.violated = row.residual_fwd > tol || !obstacle_ok || row.complementarity > tol;
        tally(report, std::move(row));
    }
    return report;
}

HjReport hj_check_inf(const LagrangianProblem& p, const ValueField& v, const std::vector<State>& samples,
                      double tol)
{
    const auto ladder = epiderivative_ladder(v.grid);
    HjReport report;
    for (const auto& x : samples) {
        HjSample row{x};
        const double vx = v.interpolate(x);
        const double ux = p.obstacle(x);
        const State fx = p.f(0.0, x);
        const double l = p.cost(x, fx);

        // Distance outside the band 0 <= v <= u.
        double excess = std::max(0.0, -vx);
        if (!is_inf(ux)) excess = is_inf(vx) ? kInfTime : std::max(excess, vx - ux);
        row.complementarity = excess;

        const bool below_obstacle = !is_inf(vx) && (is_inf(ux) || vx < ux - tol);
        row.residual_fwd = below_obstacle ? residual(v, x, fx, ladder, l + p.a * vx) : -kInfTime;
        row.residual_bwd = is_inf(vx) ? -kInfTime : residual(v, x, scaled(fx, -1.0), ladder, -l - p.a * vx);

        row.violated = excess > tol || row.residual_fwd > tol || row.residual_bwd > tol;
        tally(report, std::move(row));
    }
    return report;
}

void write_hj_report_csv(std::ostream& os, const HjReport& report)
{
    const std::size_t n = report.samples.empty() ? 0 : report.samples.front().x.size();
    std::vector<std::string> header;
    for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
    for (const char* c : {"residual_fwd", "residual_bwd", "complementarity"}) header.emplace_back(c);
    csv::write_header(os, header);
    for (const auto& row : report.samples) {
        csv::Row r(os);
        for (double c : row.x) r << c;
        r << row.residual_fwd << row.residual_bwd << row.complementarity;
    }
}

}  // namespace viab
