#include "viab/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace viab {

namespace {

/// First t in (0, t_max] where pred(x(t)) holds along the RK4 trajectory of
/// field from (0, x0), or kInfTime. The bracketing step is bisected with
/// single RK4 substeps from its left node.
template <class Pred>
double first_crossing(const VectorField& field, std::span<const double> x0, double t_max, double h,
                      Pred&& pred)
{
    if (!(h > 0.0)) throw std::invalid_argument("crossing search: h must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("crossing search: T_max must be >= 0");
    check_finite(x0, 0.0);

    const double tol = kCrossingRelTol * std::max(t_max, h);
    Rk4Stepper rk(field.dim);
    State cur(x0.begin(), x0.end());
    State next(field.dim);
    State probe(field.dim);
    double t = 0.0;
    for (std::size_t k = 0; t < t_max; ++k) {
        double t_next = static_cast<double>(k + 1) * h;
        if (t_next > t_max || t_max - t_next < 1e-12 * h) t_next = t_max;
        const double dt = t_next - t;
        rk.step(field, t, cur, dt, next);
        check_finite(next, t_next);
        if (pred(std::span<const double>(next))) {
            double lo = 0.0, hi = dt;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                rk.step(field, t, cur, mid, probe);
                if (pred(std::span<const double>(probe)))
                    hi = mid;
                else
                    lo = mid;
            }
            return t + 0.5 * (lo + hi);
        }
        cur.swap(next);
        t = t_next;
    }
    return kInfTime;
}

}  // namespace

double exit_time(const VectorField& field, const SetOracle& k, std::span<const double> x, double t_max,
                 double h)
{
    if (!k.contains(x)) return 0.0;
    return first_crossing(field, x, t_max, h, [&](std::span<const double> y) { return !k.contains(y); });
}

double hitting_time(const VectorField& field, const SetOracle& c, std::span<const double> x,
                    double t_max, double h)
{
    if (c.contains(x)) return 0.0;
    return first_crossing(field, x, t_max, h, [&](std::span<const double> y) { return c.contains(y); });
}

double capture_margin(const VectorField& field, const SetOracle& k, const SetOracle& c,
                      std::span<const double> x, double t_max, double h)
{
    const double tau = exit_time(field, k, x, t_max, h);
    const double omega = hitting_time(field, c, x, t_max, h);
    if (is_inf(omega)) return kInfTime;
    if (is_inf(tau)) return -kInfTime;
    return omega - tau;
}

TimeField viab_field(const VectorField& field, const SetOracle& k, const GridSpec& grid, double t_max,
                     double h, Exec exec)
{
    grid.validate();
    TimeField out{grid, std::vector<double>(grid.size(), 0.0), std::vector<char>(grid.size(), 0)};
    parallel_for(grid.size(), exec, [&](std::size_t i) {
        const State x = grid.node(i);
        if (!k.contains(x)) return;
        out.inside[i] = 1;
        try {
            out.values[i] = exit_time(field, k, x, t_max, h);
        } catch (const NonFinite&) {
            out.values[i] = 0.0;
        }
    });
    return out;
}

TimeField capt_field(const VectorField& field, const SetOracle& c, const GridSpec& grid, double t_max,
                     double h, Exec exec)
{
    grid.validate();
    TimeField out{grid, std::vector<double>(grid.size(), kInfTime), std::vector<char>(grid.size(), 1)};
    parallel_for(grid.size(), exec, [&](std::size_t i) {
        const State x = grid.node(i);
        try {
            out.values[i] = hitting_time(field, c, x, t_max, h);
        } catch (const NonFinite&) {
            out.values[i] = kInfTime;
        }
    });
    return out;
}

TimeField viable_capt_field(const VectorField& field, const SetOracle& k, const SetOracle& c,
                            const GridSpec& grid, double t_max, double h, Exec exec)
{
    grid.validate();
    TimeField out{grid, std::vector<double>(grid.size(), kInfTime), std::vector<char>(grid.size(), 0)};
    parallel_for(grid.size(), exec, [&](std::size_t i) {
        const State x = grid.node(i);
        if (!k.contains(x)) return;
        out.inside[i] = 1;
        try {
            out.values[i] = capture_margin(field, k, c, x, t_max, h);
        } catch (const NonFinite&) {
            out.values[i] = kInfTime;
        }
    });
    return out;
}

std::vector<std::size_t> KernelMask::indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < survivors.size(); ++i)
        if (survivors[i]) out.push_back(i);
    return out;
}

namespace {

/// True when some alive node lies within r of y.
bool witnessed(const GridSpec& grid, const std::vector<char>& alive, std::span<const double> y, double r)
{
    const std::size_t n = grid.dim();
    std::vector<std::size_t> lo(n), hi(n), idx(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double s = grid.spacing(a);
        const double u_lo = std::ceil((y[a] - r - grid.lo[a]) / s - 1e-9);
        const double u_hi = std::floor((y[a] + r - grid.lo[a]) / s + 1e-9);
        const double top = static_cast<double>(grid.counts[a] - 1);
        if (u_hi < 0.0 || u_lo > top) return false;
        lo[a] = static_cast<std::size_t>(std::max(0.0, u_lo));
        hi[a] = static_cast<std::size_t>(std::min(top, u_hi));
    }
    idx = lo;
    State node(n);
    while (true) {
        const std::size_t flat = grid.flatten(idx);
        if (alive[flat]) {
            for (std::size_t a = 0; a < n; ++a) node[a] = grid.coord(a, idx[a]);
            if (dist(node, y) <= r) return true;
        }
        std::size_t a = n;
        while (a-- > 0) {
            if (idx[a] < hi[a]) {
                ++idx[a];
                break;
            }
            idx[a] = lo[a];
        }
        if (a == static_cast<std::size_t>(-1)) return false;
    }
}

}  // namespace

KernelMask discrete_kernel(const VectorField& field, const SetOracle& k, const GridSpec& grid, double h,
                           Exec exec)
{
    grid.validate();
    if (!(h > 0.0)) throw std::invalid_argument("discrete_kernel: h must be positive");
    const std::size_t n = grid.size();
    const double substep = std::min(h, 0.01);
    const double radius = grid.diagonal() * (1.0 + 1e-9);

    KernelMask mask{grid, std::vector<char>(n, 0), 0};
    std::vector<State> images(n);
    std::vector<char> image_ok(n, 0);
    parallel_for(n, exec, [&](std::size_t i) {
        const State x = grid.node(i);
        if (!k.contains(x)) return;
        mask.survivors[i] = 1;
        try {
            images[i] = advance(field, x, 0.0, h, substep);
            image_ok[i] = 1;
        } catch (const NonFinite&) {
            image_ok[i] = 0;
        }
    });

    std::vector<char> keep(n, 0);
    for (std::size_t pass = 1;; ++pass) {
        if (pass > n + 1) throw NoConvergence("discrete_kernel: more passes than nodes");
        mask.passes = pass;
        parallel_for(n, exec, [&](std::size_t i) {
            keep[i] = mask.survivors[i] && image_ok[i] && witnessed(grid, mask.survivors, images[i], radius);
        });
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask.survivors[i] && !keep[i]) {
                mask.survivors[i] = 0;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return mask;
}

RepellerReport repeller_check(const VectorField& field, const SetOracle& k, const GridSpec& grid,
                              double t_max, double h, Exec exec)
{
    const TimeField tf = viab_field(field, k, grid, t_max, h, exec);
    RepellerReport report;
    for (std::size_t i = 0; i < tf.values.size(); ++i) {
        if (!tf.inside[i]) continue;
        const double v = tf.values[i];
        if (is_inf(v) || v >= t_max)
            report.is_repeller = false;
        else
            report.max_exit_time = std::max(report.max_exit_time, v);
    }
    return report;
}

}  // namespace viab
