#include "viab/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "viab/csv.hpp"
#include "viab/kernels.hpp"

namespace viab {

double backward_exit_time(const VectorField& phi, const SetOracle& k, double t, std::span<const double> x,
                          double h)
{
    if (!(t >= 0.0)) throw std::invalid_argument("backward_exit_time: t must be >= 0");
    if (t == 0.0) return 0.0;
    return std::min(t, exit_time(phi.reversed(), k, x, t, h));
}

Exitor exitor(const VectorField& phi, const SetOracle& k, double t, std::span<const double> x, double h)
{
    Exitor e;
    e.tau = backward_exit_time(phi, k, t, x, h);
    e.initial = e.tau == t;
    e.s = e.initial ? 0.0 : t - e.tau;
    e.c = flow(phi, -e.tau, x, h);
    return e;
}

double product_exit_time(const std::vector<VectorField>& per_axis_phi, const std::vector<SetOracle>& per_axis_k,
                         std::span<const double> x, double t_max, double h)
{
    if (per_axis_phi.size() != per_axis_k.size())
        throw std::invalid_argument("product_exit_time: one field and one set per axis");
    double best = kInfTime;
    std::size_t offset = 0;
    for (std::size_t j = 0; j < per_axis_phi.size(); ++j) {
        const std::size_t d = per_axis_phi[j].dim;
        if (offset + d > x.size()) throw std::invalid_argument("product_exit_time: axes exceed the state");
        best = std::min(best, exit_time(per_axis_phi[j].reversed(), per_axis_k[j], x.subspan(offset, d), t_max, h));
        offset += d;
    }
    return best;
}

namespace {

bool on_boundary(const SetOracle& k, std::span<const double> c, double x_tol)
{
    try {
        return k.boundary_distance(c) <= x_tol;
    } catch (const Unsupported&) {
        return false;
    }
}

/// Boundary part of Psi at s > 0.
std::optional<State> boundary_value(const BoundaryData& data, double s, std::span<const double> c,
                                    const SetOracle& k, double s_tol, double x_tol)
{
    if (!data.v_gamma || !on_boundary(k, c, x_tol)) return std::nullopt;
    if (data.impulse_times.empty()) return data.v_gamma(s, c);
    for (double ti : data.impulse_times)
        if (std::abs(s - ti) <= s_tol) return data.v_gamma(ti, c);
    return std::nullopt;
}

/// (x, y) system x' = phi(x) or f(t, x, y), y' = g(t, x, y).
VectorField characteristic_system(const CharProblem& prob, bool general)
{
    const std::size_t n = prob.phi.dim ? prob.phi.dim : prob.k.dim();
    const std::size_t p = prob.output_dim;
    VectorField sys;
    sys.dim = n + p;
    sys.eval = [&prob, n, p, general](double t, std::span<const double> xy, std::span<double> out) {
        const auto x = xy.first(n);
        const auto y = xy.subspan(n, p);
        if (general && prob.f) {
            const State v = prob.f(t, x, y);
            std::copy(v.begin(), v.end(), out.begin());
        } else {
            prob.phi.eval(t, x, out.first(n));
        }
        if (prob.g) {
            const State w = prob.g(t, x, y);
            std::copy(w.begin(), w.end(), out.begin() + static_cast<std::ptrdiff_t>(n));
        } else {
            std::fill(out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), 0.0);
        }
    };
    return sys;
}

State join(std::span<const double> a, std::span<const double> b)
{
    State out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

}  // namespace

std::optional<State> boundary_trace(const BoundaryData& data, double s, std::span<const double> c,
                                    const SetOracle& k, double s_tol, double x_tol)
{
    if (s <= s_tol) return data.u0 ? std::optional<State>(data.u0(c)) : std::nullopt;
    return boundary_value(data, s, c, k, s_tol, x_tol);
}

std::optional<State> solve_char(const CharProblem& prob, double t, std::span<const double> x, double h)
{
    if (!prob.k.contains(x)) throw std::invalid_argument("solve_char: x is not in K");
    const Exitor e = exitor(prob.phi, prob.k, t, x, h);
    std::optional<State> psi;
    if (e.initial)
        psi = prob.data.u0(e.c);
    else
        psi = boundary_value(prob.data, e.s, e.c, prob.k, h, prob.x_tol);
    if (!psi) return std::nullopt;
    if (psi->size() != prob.output_dim) throw std::invalid_argument("solve_char: data has the wrong dimension");

    const VectorField sys = characteristic_system(prob, false);
    const State end = advance(sys, join(e.c, *psi), e.s, t - e.s, h);
    return State(end.begin() + static_cast<std::ptrdiff_t>(x.size()), end.end());
}

std::vector<std::optional<State>> solve_char_batch(const CharProblem& prob, const std::vector<TimePoint>& queries,
                                                   double h, Exec exec)
{
    std::vector<std::optional<State>> out(queries.size());
    parallel_for(queries.size(), exec, [&](std::size_t i) { out[i] = solve_char(prob, queries[i].t, queries[i].x, h); });
    return out;
}

void write_solution_csv(std::ostream& os, const std::vector<TimePoint>& queries,
                        const std::vector<std::optional<State>>& values, std::size_t output_dim)
{
    const std::size_t n = queries.empty() ? 0 : queries.front().x.size();
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < output_dim; ++i) header.push_back("u" + std::to_string(i + 1));
    csv::write_header(os, header);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        csv::Row row(os);
        row << queries[q].t;
        for (double v : queries[q].x) row << v;
        for (std::size_t i = 0; i < output_dim; ++i) {
            if (values[q])
                row << (*values[q])[i];
            else
                row << std::string("nan");
        }
    }
}

GraphCloud graph_sample(const CharProblem& prob, double T, double h, const GraphSampleOptions& options)
{
    if (!(h > 0.0) || !(T >= 0.0)) throw std::invalid_argument("graph_sample: need h > 0 and T >= 0");
    const GridSpec& grid = options.seed_grid;
    grid.validate();
    const std::size_t n = grid.dim();
    const std::size_t p = prob.output_dim;

    GraphCloud cloud;
    cloud.state_dim = n;
    cloud.output_dim = p;
    cloud.tol = options.tol;

    auto add_seed = [&](double s, std::span<const double> c, const State& y) {
        State seed{s};
        seed.insert(seed.end(), c.begin(), c.end());
        seed.insert(seed.end(), y.begin(), y.end());
        cloud.seeds.push_back(std::move(seed));
    };

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const State c = grid.node(i);
        if (prob.k.contains(c)) add_seed(0.0, c, prob.data.u0(c));
    }
    if (prob.data.v_gamma) {
        std::vector<double> times;
        if (!prob.data.impulse_times.empty()) {
            for (double ti : prob.data.impulse_times)
                if (ti > 0.0 && ti <= T) times.push_back(ti);
        } else {
            for (std::size_t j = 1; j < options.seeds_per_face; ++j)
                times.push_back(T * static_cast<double>(j) / static_cast<double>(options.seeds_per_face));
        }
        for (double s : times) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const State c = grid.node(i);
                if (on_boundary(prob.k, c, prob.x_tol)) add_seed(s, c, prob.data.v_gamma(s, c));
            }
        }
    }

    const VectorField sys = characteristic_system(prob, true);
    std::vector<std::vector<State>> paths(cloud.seeds.size());
    parallel_for(cloud.seeds.size(), options.exec, [&](std::size_t i) {
        const State& seed = cloud.seeds[i];
        auto& out = paths[i];
        out.push_back(seed);
        Rk4Stepper rk(sys.dim);
        State cur(seed.begin() + 1, seed.end());
        State next(sys.dim);
        const double s = seed[0];
        double t = s;
        for (std::size_t k = 0; t < T; ++k) {
            double t_next = s + static_cast<double>(k + 1) * h;
            if (t_next > T || T - t_next < 1e-12 * h) t_next = T;
            rk.step(sys, t, cur, t_next - t, next);
            if (!all_finite(next) || norm(next) > kBlowUpNorm) break;
            if (prob.k.distance(std::span<const double>(next).first(n)) > options.tol) break;
            State point{t_next};
            point.insert(point.end(), next.begin(), next.end());
            out.push_back(std::move(point));
            cur.swap(next);
            t = t_next;
        }
    });

    for (std::size_t i = 0; i < paths.size(); ++i) {
        for (auto& point : paths[i]) {
            cloud.points.push_back(std::move(point));
            cloud.seed_of.push_back(i);
        }
    }
    return cloud;
}

std::vector<State> query_graph(const GraphCloud& cloud, double t, std::span<const double> x, double radius)
{
    const std::size_t n = cloud.state_dim;
    std::vector<State> ys;
    for (const auto& pt : cloud.points) {
        if (std::abs(pt[0] - t) > radius) continue;
        if (dist(std::span<const double>(pt).subspan(1, n), x) > radius) continue;
        ys.emplace_back(pt.begin() + 1 + static_cast<std::ptrdiff_t>(n), pt.end());
    }

    // Single linkage by union-find.
    std::vector<std::size_t> parent(ys.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < ys.size(); ++i)
        for (std::size_t j = i + 1; j < ys.size(); ++j)
            if (dist(ys[i], ys[j]) <= cloud.tol) parent[find(i)] = find(j);

    std::vector<State> sums;
    std::vector<double> counts;
    std::vector<std::size_t> slot(ys.size(), static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const std::size_t r = find(i);
        if (slot[r] == static_cast<std::size_t>(-1)) {
            slot[r] = sums.size();
            sums.emplace_back(ys[i].size(), 0.0);
            counts.push_back(0.0);
        }
        for (std::size_t a = 0; a < ys[i].size(); ++a) sums[slot[r]][a] += ys[i][a];
        counts[slot[r]] += 1.0;
    }
    for (std::size_t c = 0; c < sums.size(); ++c)
        for (double& v : sums[c]) v /= counts[c];
    std::sort(sums.begin(), sums.end());
    return sums;
}

FrankowskaReport frankowska_residual(const GraphCloud& cloud, const CharProblem& prob,
                                     const std::vector<std::size_t>& samples, double h_min, double h_max)
{
    const std::size_t n = cloud.state_dim;
    const std::size_t p = cloud.output_dim;
    const auto graph = SetOracle::point_cloud(PointCloud(cloud.points, 0.0));

    FrankowskaReport report;
    for (std::size_t i : samples) {
        const State& pt = cloud.points.at(i);
        const double t = pt[0];
        const auto x = std::span<const double>(pt).subspan(1, n);
        const auto y = std::span<const double>(pt).subspan(1 + n, p);

        State dir{1.0};
        State fx(n);
        if (prob.f)
            fx = prob.f(t, x, y);
        else
            prob.phi.eval(t, x, fx);
        dir.insert(dir.end(), fx.begin(), fx.end());
        const State gy = prob.g ? prob.g(t, x, y) : State(p, 0.0);
        dir.insert(dir.end(), gy.begin(), gy.end());

        ++report.checked;
        report.max_forward = std::max(report.max_forward, tangent_residual(graph, pt, dir, h_min, h_max));
        if (cloud.on_data(i)) {
            ++report.exempt_backward;
            continue;
        }
        report.max_backward = std::max(report.max_backward, tangent_residual(graph, pt, scaled(dir, -1.0), h_min, h_max));
    }
    return report;
}

std::vector<std::size_t> interior_graph_samples(const GraphCloud& cloud, std::size_t count, double T, double margin)
{
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double t = cloud.points[i][0];
        if (t >= margin && t <= T - margin) eligible.push_back(i);
    }
    if (eligible.size() <= count) return eligible;
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < count; ++j) out.push_back(eligible[j * eligible.size() / count]);
    return out;
}

PhiInvarianceReport phi_invariance_check(const CharProblem& prob, const std::vector<CharSample>& samples,
                                         double h, double tol)
{
    PhiInvarianceReport report;
    if (!prob.phi_constraint) return report;
    const std::size_t p = prob.output_dim;

    for (const auto& smp : samples) {
        const SetOracle here = prob.phi_constraint(smp.t, smp.x);

        if (here.distance(smp.y) <= kMembershipSlack) {
            const State v = prob.phi(smp.t, smp.x);
            const State gy = prob.g ? prob.g(smp.t, smp.x, smp.y) : State(p, 0.0);
            double best = kInfTime;
            for (double hh = h; hh >= h * 1e-3; hh *= 0.5) {
                const SetOracle ahead = prob.phi_constraint(smp.t + hh, add_scaled(smp.x, hh, v));
                best = std::min(best, ahead.distance(add_scaled(smp.y, hh, gy)) / hh);
            }
            report.max_cone_residual = std::max(report.max_cone_residual, best);
            if (best > tol) ++report.cone_violations;
        }

        if (prob.data.u0 && prob.k.contains(smp.x)) {
            if (prob.phi_constraint(0.0, smp.x).distance(prob.data.u0(smp.x)) > tol) ++report.u0_violations;
        }
        if (prob.data.v_gamma && on_boundary(prob.k, smp.x, prob.x_tol)) {
            if (here.distance(prob.data.v_gamma(smp.t, smp.x)) > tol) ++report.boundary_violations;
        }
    }
    report.passed = report.cone_violations == 0 && report.u0_violations == 0 && report.boundary_violations == 0;
    return report;
}

ReplayReport replay_check(const GraphCloud& cloud, const CharProblem& prob, double h, std::size_t stride)
{
    if (stride == 0) throw std::invalid_argument("replay_check: stride must be positive");
    const VectorField back = characteristic_system(prob, true).reversed();
    ReplayReport report;
    for (std::size_t i = 0; i < cloud.size(); i += stride) {
        const State& pt = cloud.points[i];
        const State& seed = cloud.seeds[cloud.seed_of[i]];
        const double t = pt[0], s = seed[0];
        // y(s) from the point at t: the reversed field runs in time -t .. -s.
        const State foot = advance(back, std::span<const double>(pt).subspan(1), -t, t - s, h);
        report.max_error = std::max(report.max_error, dist(foot, std::span<const double>(seed).subspan(1)));
        ++report.checked;
    }
    return report;
}

void write_graph_csv(std::ostream& os, const GraphCloud& cloud)
{
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < cloud.state_dim; ++i) header.push_back("x" + std::to_string(i + 1));
    for (std::size_t i = 0; i < cloud.output_dim; ++i) header.push_back("y" + std::to_string(i + 1));
    csv::write_header(os, header);
    for (const auto& pt : cloud.points) {
        csv::Row row(os);
        for (double v : pt) row << v;
    }
}

}  // namespace viab
