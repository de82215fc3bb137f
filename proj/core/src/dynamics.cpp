#include "viab/dynamics.hpp"

#include <ostream>
#include <sstream>

#include "viab/csv.hpp"

namespace viab {

VectorField VectorField::reversed() const
{
    VectorField back = *this;
    back.eval = [fwd = eval](double s, std::span<const double> x, std::span<double> out) {
        fwd(-s, x, out);
        for (double& v : out) v = -v;
    };
    // A contraction bound for f says nothing useful about -f.
    back.monotone_mu.reset();
    return back;
}

void check_finite(std::span<const double> x, double t)
{
    if (!all_finite(x) || norm(x) > kBlowUpNorm) {
        std::ostringstream msg;
        msg << "state became non-finite or exceeded " << kBlowUpNorm << " at t=" << t;
        throw NonFinite(msg.str());
    }
}

Rk4Stepper::Rk4Stepper(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

void Rk4Stepper::step(const VectorField& field, double t, std::span<const double> x, double h,
                      std::span<double> out)
{
    const std::size_t n = x.size();
    field.eval(t, x, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
    field.eval(t + 0.5 * h, tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    field.eval(t + 0.5 * h, tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
    field.eval(t + h, tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = x[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
}

Trajectory integrate(const VectorField& field, std::span<const double> x0, double t0, double t1,
                     double step)
{
    if (!(step > 0.0)) throw std::invalid_argument("integrate: step must be positive");
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must be >= t0");
    if (x0.size() != field.dim) throw std::invalid_argument("integrate: dimension mismatch");

    Trajectory traj;
    traj.step = step;
    check_finite(x0, t0);
    traj.times.push_back(t0);
    traj.states.emplace_back(x0.begin(), x0.end());

    Rk4Stepper rk(field.dim);
    State next(field.dim);
    for (std::size_t k = 0;; ++k) {
        const double t = traj.times.back();
        if (t >= t1) break;
        // Node times are t0 + k*step, not accumulated sums, so long runs do
        // not drift; the last step is clipped to land on t1.
        double t_next = t0 + static_cast<double>(k + 1) * step;
        if (t_next > t1 || t1 - t_next < 1e-12 * step) t_next = t1;
        rk.step(field, t, traj.states.back(), t_next - t, next);
        check_finite(next, t_next);
        traj.times.push_back(t_next);
        traj.states.push_back(next);
    }
    return traj;
}

State advance(const VectorField& field, std::span<const double> x, double t0, double duration,
              double step)
{
    if (!(step > 0.0)) throw std::invalid_argument("advance: step must be positive");
    if (!(duration >= 0.0)) throw std::invalid_argument("advance: duration must be >= 0");
    if (x.size() != field.dim) throw std::invalid_argument("advance: dimension mismatch");
    check_finite(x, t0);

    Rk4Stepper rk(field.dim);
    State cur(x.begin(), x.end());
    State next(field.dim);
    double t = t0;
    const double t1 = t0 + duration;
    for (std::size_t k = 0; t < t1; ++k) {
        double t_next = t0 + static_cast<double>(k + 1) * step;
        if (t_next > t1 || t1 - t_next < 1e-12 * step) t_next = t1;
        rk.step(field, t, cur, t_next - t, next);
        check_finite(next, t_next);
        cur.swap(next);
        t = t_next;
    }
    return cur;
}

State flow(const VectorField& field, double t, std::span<const double> x, double step)
{
    if (!(step > 0.0)) throw std::invalid_argument("flow: step must be positive");
    if (t == 0.0) return State(x.begin(), x.end());
    if (t > 0.0) return advance(field, x, 0.0, t, step);
    return advance(field.reversed(), x, 0.0, -t, step);
}

std::vector<ReachPoint> reach_set(const VectorField& field, double t,
                                  const std::vector<State>& seeds, double step, Exec exec)
{
    if (t < 0.0) throw std::invalid_argument("reach_set: t must be >= 0");
    std::vector<ReachPoint> out(seeds.size());
    parallel_for(seeds.size(), exec, [&](std::size_t i) {
        try {
            out[i].x = flow(field, t, seeds[i], step);
        } catch (const NonFinite&) {
            out[i].x = seeds[i];
            out[i].ok = false;
        }
    });
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj)
{
    const std::size_t n = traj.states.empty() ? 0 : traj.states.front().size();
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < n; ++i) header.push_back("x" + std::to_string(i + 1));
    csv::write_header(os, header);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        csv::Row row(os);
        row << traj.times[k];
        for (double v : traj.states[k]) row << v;
    }
}

}  // namespace viab
