#pragma once

#include <iosfwd>
#include <vector>

#include "viab/dynamics.hpp"
#include "viab/grid.hpp"
#include "viab/sets.hpp"

namespace viab {

/// l(x, p) >= 0, evaluated at p = f(x).
using Lagrangian = std::function<double(std::span<const double> x, std::span<const double> p)>;
/// u(x) >= 0; return kInfTime (or more) for +infinity.
using Obstacle = std::function<double(std::span<const double> x)>;

/// Data (f, l, a, u) of the value problems. An empty l means l = 0 and an
/// empty u means u = 0. f is treated as autonomous (evaluated at t = 0 in
/// the lifted field).
struct LagrangianProblem {
    VectorField f;
    Lagrangian l;
    double a = 0.0;
    Obstacle u;
    /// Values above this are reported as +infinity.
    double value_cap = 1e6;

    double cost(std::span<const double> x, std::span<const double> p) const;
    double obstacle(std::span<const double> x) const;
};

/// Indicator of K: 0 on K, kInfTime elsewhere.
Obstacle indicator(SetOracle k);

/// g(x, y) = (f(x), -a y - l(x, f(x))) on R^{n+1}.
VectorField lifted_field(const LagrangianProblem& p);

/// J(t) = e^{at} u(x(t)) + int_0^t e^{a s} l(x(s), f(x(s))) ds sampled on the
/// RK4 grid; the integral uses the trapezoid rule.
struct CostPath {
    Trajectory traj;
    std::vector<double> integral;  ///< running integral at each sample
    std::vector<double> values;    ///< J at each sample, kInfTime when above value_cap
};

CostPath running_cost_path(const LagrangianProblem& p, std::span<const double> x, double t_max, double h);

/// sup_t J(t) over the samples. Reported as +infinity when J exceeds
/// value_cap, or when the sup sits at the horizon while J is still
/// increasing there (last-step slope above 1e-6 * max(1, |J(T)|)).
/// The finite horizon makes this a lower approximation, monotone in T_max.
double value_sup(const LagrangianProblem& p, std::span<const double> x, double t_max, double h);

/// inf_t J(t). The sampled minimiser is refined by golden-section search on
/// its two neighbouring intervals to 1e-8 in t. Upper approximation,
/// monotone in T_max.
double value_inf(const LagrangianProblem& p, std::span<const double> x, double t_max, double h);

/// value_sup for l = 0, plus a check of u(x(t)) <= e^{-at} value + 1e-6 along
/// the samples. Throws std::invalid_argument when l is set and
/// DescentViolation when the inequality fails.
double lyapunov(const LagrangianProblem& p, std::span<const double> x, double t_max, double h);

/// value_inf with u = indicator(K), l = 1, a = 0.
double minimal_time(const VectorField& f, const SetOracle& k, std::span<const double> x, double t_max,
                    double h);

/// value_inf with u = indicator(K), l(x, p) = |p|, a = 0.
double minimal_length(const VectorField& f, const SetOracle& k, std::span<const double> x, double t_max,
                      double h);

enum class ValueMode { sup, inf };

/// Value function read off the epigraph on a grid over (x, y); y is the last
/// axis. Mode sup runs viab_field of the lifted field on Ep(u) and keeps
/// nodes with exit time >= T_max; mode inf runs capt_field onto Ep(u) and
/// keeps nodes captured within T_max. The result holds, per x node, the least
/// kept y (kInfTime when the column is empty).
///
/// Requires y lo <= 0 and y hi >= value_cap. Throws CapTooSmall when a
/// column's least kept y is the top y node.
ValueField epigraph_value_field(const LagrangianProblem& p, const GridSpec& grid, ValueMode mode,
                                double t_max, double h, Exec exec = {});

struct RepellerCondition {
    double gamma_minus = 0.0;
    double delta_minus = 0.0;
    bool holds = false;
};

/// Estimates gamma- = inf <x, f(x)> / (|x| (|x| + 1)) and
/// delta- = inf l(x, f(x)) / (|x| + 1) over the samples (samples at the
/// origin are skipped for gamma-). Holds when a + gamma- > 0 and delta- > 0.
/// A sufficient condition only.
RepellerCondition repeller_condition(const LagrangianProblem& p, const std::vector<State>& samples);

/// Default difference-quotient steps for a grid: {2, 1, 1/2, 1/4} times the
/// smallest spacing.
std::vector<double> epiderivative_ladder(const GridSpec& grid);

/// Lower difference quotient min (u(x + h v') - u(x)) / h over the ladder and
/// the stencil v' in {v, v +- 0.01 |v| e_i}, with u interpolated from the
/// field. kInfTime when u(x) or every probe is infinite.
double epiderivative(const ValueField& u, std::span<const double> x, std::span<const double> v,
                     const std::vector<double>& h_ladder);

/// One row of a Hamilton-Jacobi residual report. Clauses that do not apply
/// at a sample hold -kInfTime.
struct HjSample {
    State x;
    double residual_fwd = 0.0;
    double residual_bwd = 0.0;
    double complementarity = 0.0;
    bool violated = false;
};

struct HjReport {
    std::vector<HjSample> samples;
    std::size_t violations = 0;
    double max_fwd = -kInfTime;
    double max_bwd = -kInfTime;
    double max_complementarity = 0.0;
};

/// Checks v = u_field against the sup problem at each sample:
///   forward  D v(x)(f) + l + a v <= tol,
///   obstacle v >= u - tol,
///   complementarity min(v - u, D v(x)(-f) - l - a v)^+ <= tol.
HjReport hj_check_sup(const LagrangianProblem& p, const ValueField& v, const std::vector<State>& samples,
                      double tol = 0.05);

/// Checks v = u_field against the stopping problem at each sample:
///   bounds -tol <= v <= u + tol (slack reported as complementarity),
///   forward D v(x)(f) + l + a v <= tol where v < u - tol,
///   backward D v(x)(-f) - l - a v <= tol where v is finite.
HjReport hj_check_inf(const LagrangianProblem& p, const ValueField& v, const std::vector<State>& samples,
                      double tol = 0.05);

/// Rows `x1,...,xn,residual_fwd,residual_bwd,complementarity`.
void write_hj_report_csv(std::ostream& os, const HjReport& report);

}  // namespace viab
