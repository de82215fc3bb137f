#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "viab/common.hpp"

namespace viab {

/// Time-dependent right-hand side (t, x) -> f(t, x).
///
/// `eval` writes dim components into `out`; it must be safe to call from many
/// threads at once. The optional constants are declarations used by the
/// invariant checks (growth bound, contraction), not by the integrator.
struct VectorField {
    using Eval = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

    std::size_t dim = 0;
    Eval eval;
    std::optional<double> growth_c;
    std::optional<double> lipschitz;
    std::optional<double> monotone_mu;

    State operator()(double t, std::span<const double> x) const
    {
        State out(dim);
        eval(t, x, out);
        return out;
    }

    /// The field of the backward flow: g(s, x) = -f(-s, x), so that
    /// y(s) = x(-s) solves y' = g(s, y).
    VectorField reversed() const;
};

/// Wraps a value-returning callable as a VectorField.
template <class F>
VectorField make_field(std::size_t dim, F&& f)
{
    VectorField field;
    field.dim = dim;
    field.eval = [fn = std::forward<F>(f)](double t, std::span<const double> x, std::span<double> out) {
        const State v = fn(t, x);
        std::copy(v.begin(), v.end(), out.begin());
    };
    return field;
}

/// Sampled solution. times are strictly increasing with uniform spacing `step`
/// except possibly the last interval.
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    double step = 0.0;

    std::size_t size() const { return times.size(); }
    const State& back() const { return states.back(); }
};

/// Norm above which a state is treated as having blown up.
inline constexpr double kBlowUpNorm = 1e12;

/// Throws NonFinite when x contains NaN/inf or has norm above kBlowUpNorm.
void check_finite(std::span<const double> x, double t);

/// One classical RK4 step with preallocated stage buffers.
class Rk4Stepper {
public:
    explicit Rk4Stepper(std::size_t dim);

    /// out = RK4 step of size h from (t, x). `out` may alias nothing else.
    void step(const VectorField& field, double t, std::span<const double> x, double h,
              std::span<double> out);

private:
    State k1_, k2_, k3_, k4_, tmp_;
};

/// Fixed-step RK4 samples of the solution on [t0, t1]. The last step is
/// shortened so the trajectory ends exactly at t1.
Trajectory integrate(const VectorField& field, std::span<const double> x0, double t0, double t1,
                     double step);

/// Endpoint of integrate(field, x, t0, t0 + duration, step) without storing
/// the samples.
State advance(const VectorField& field, std::span<const double> x, double t0, double duration,
              double step);

/// theta_f(t, x): forward flow for t >= 0, backward flow (reversed field) for
/// t < 0. flow(f, 0, x) returns x unchanged.
State flow(const VectorField& field, double t, std::span<const double> x, double step);

struct ReachPoint {
    State x;
    bool ok = true;  ///< false when the seed's trajectory blew up
};

/// Pointwise image of the seeds under theta_f(t, .), order preserved.
std::vector<ReachPoint> reach_set(const VectorField& field, double t,
                                  const std::vector<State>& seeds, double step, Exec exec = {});

/// Header `t,x1,...,xn`, one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace viab
