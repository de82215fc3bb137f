#include "viab/viable_euler.hpp"

#include <algorithm>

namespace viab {

State viable_step(const VectorField& field, const SetOracle& k, double t, std::span<const double> x,
                  double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("viable_step: h must be positive");
    const State v = field(t, x);
    return k.project(add_scaled(x, h, v));
}

ViableTrajectory viable_trajectory(const VectorField& field, const SetOracle& k,
                                   std::span<const double> x0, double T, double h)
{
    if (!(h > 0.0) || !(T >= 0.0)) throw std::invalid_argument("viable_trajectory: need h > 0, T >= 0");
    if (k.distance(x0) > 1e-9) throw std::invalid_argument("viable_trajectory: x0 is not in K");

    ViableTrajectory out;
    out.traj.step = h;
    out.traj.times.push_back(0.0);
    out.traj.states.emplace_back(x0.begin(), x0.end());

    for (std::size_t j = 0;; ++j) {
        const double t = out.traj.times.back();
        if (t >= T) break;
        double t_next = static_cast<double>(j + 1) * h;
        if (t_next > T || T - t_next < 1e-12 * h) t_next = T;
        const double hj = t_next - t;

        const State& x = out.traj.states.back();
        const State f = field(t, x);
        State next = k.project(add_scaled(x, hj, f));
        check_finite(next, t_next);

        double err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double u = (next[i] - x[i]) / hj;
            err += (f[i] - u) * (f[i] - u);
        }
        out.max_substitution_error = std::max(out.max_substitution_error, std::sqrt(err));

        out.traj.times.push_back(t_next);
        out.traj.states.push_back(std::move(next));
    }
    return out;
}

State interpolate(const Trajectory& traj, double t)
{
    if (traj.size() == 0) throw std::invalid_argument("interpolate: empty trajectory");
    if (t <= traj.times.front()) return traj.states.front();
    if (t >= traj.times.back()) return traj.states.back();
    const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - traj.times.begin());
    const double t0 = traj.times[j - 1], t1 = traj.times[j];
    const double w = (t - t0) / (t1 - t0);
    State out(traj.states[j - 1].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (1.0 - w) * traj.states[j - 1][i] + w * traj.states[j][i];
    return out;
}

}  // namespace viab
