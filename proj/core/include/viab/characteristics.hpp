#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "viab/dynamics.hpp"
#include "viab/grid.hpp"
#include "viab/sets.hpp"

namespace viab {

/// x -> output vector (dimension p).
using InitialData = std::function<State(std::span<const double> x)>;
/// (s, xi) -> output vector, xi on the boundary of K.
using BoundaryValue = std::function<State(double s, std::span<const double> xi)>;
/// (t, x, y) -> velocity.
using CharVelocity = std::function<State(double t, std::span<const double> x, std::span<const double> y)>;
/// (t, x) -> closed set in output space.
using OutputConstraint = std::function<SetOracle(double t, std::span<const double> x)>;

struct BoundaryData {
    InitialData u0;
    BoundaryValue v_gamma;
    /// When non-empty, boundary data only exists at these times.
    std::vector<double> impulse_times;
};

/// First-order system  du/dt + Du f(t, x, u) = g(t, x, u)  on [0, T] x K with
/// initial data u0 on {0} x K and boundary data v_gamma on R+ x boundary(K).
///
/// `phi` is the y-independent characteristic field used by solve_char; it is
/// treated as autonomous. `f`, when set, is the general field used by
/// graph_sample instead of phi.
struct CharProblem {
    VectorField phi;
    CharVelocity f;
    CharVelocity g;
    SetOracle k;
    BoundaryData data;
    OutputConstraint phi_constraint;
    std::size_t output_dim = 1;
    /// Boundary membership tolerance for characteristic feet.
    double x_tol = 1e-6;
};

/// min(t, exit time of the backward field -phi from K starting at x).
double backward_exit_time(const VectorField& phi, const SetOracle& k, double t, std::span<const double> x,
                          double h);

/// Foot of the characteristic through (t, x).
struct Exitor {
    double tau = 0.0;  ///< backward_exit_time
    double s = 0.0;    ///< t - tau: 0 for the initial slice
    State c;           ///< backward flow of x for tau
    /// true when tau was capped at t (the foot lies on the initial slice).
    bool initial = true;
};

Exitor exitor(const VectorField& phi, const SetOracle& k, double t, std::span<const double> x, double h);

/// min over axes of the backward exit time of phi_j from K_j starting at
/// x_j. Each axis is integrated on its own; kInfTime when no axis exits
/// within t_max.
double product_exit_time(const std::vector<VectorField>& per_axis_phi, const std::vector<SetOracle>& per_axis_k,
                         std::span<const double> x, double t_max, double h);

/// Psi(u0, v_gamma)(s, c): u0(c) when s <= s_tol; v_gamma(s, c) when c is
/// within x_tol of the boundary of K (with impulses: only within s_tol of an
/// impulse time t_i, evaluated at t_i); empty otherwise.
std::optional<State> boundary_trace(const BoundaryData& data, double s, std::span<const double> c,
                                    const SetOracle& k, double s_tol, double x_tol);

/// Single-valued characteristics solution at (t, x): the foot (s, c) from
/// the exitor, Psi at the foot, then y' = g(tau, x(tau), y) along
/// x' = phi(x) from tau = s to t with RK4 step h.
///
/// The initial datum is used exactly when the exit time is capped at t;
/// otherwise the boundary datum is read (with impulses, within h of an
/// impulse time). Empty when Psi is empty at the foot.
std::optional<State> solve_char(const CharProblem& prob, double t, std::span<const double> x, double h);

struct TimePoint {
    double t = 0.0;
    State x;
};

/// solve_char at every query, in order.
std::vector<std::optional<State>> solve_char_batch(const CharProblem& prob, const std::vector<TimePoint>& queries,
                                                   double h, Exec exec = {});

/// Rows `t,x1,...,xn,u1,...,up`; empty solutions print as nan.
void write_solution_csv(std::ostream& os, const std::vector<TimePoint>& queries,
                        const std::vector<std::optional<State>>& values, std::size_t output_dim);

/// Sampled graph of the (possibly set-valued) solution: points (t, x, y).
struct GraphCloud {
    std::size_t state_dim = 0;
    std::size_t output_dim = 0;
    double tol = 0.0;
    std::vector<State> points;
    /// Index of the seed whose characteristic produced each point.
    std::vector<std::size_t> seed_of;
    /// Seeds (s, c, Psi(s, c)) in the same (t, x, y) layout.
    std::vector<State> seeds;

    std::size_t size() const { return points.size(); }
    /// true when point i is its seed (lies on the data set Psi).
    bool on_data(std::size_t i) const { return points[i] == seeds[seed_of[i]]; }
};

struct GraphSampleOptions {
    /// Lattice whose nodes in K seed the initial slice and whose nodes within
    /// x_tol of the boundary seed the boundary.
    GridSpec seed_grid;
    /// Boundary seeds are placed at s = T j / seeds_per_face, j = 1..seeds_per_face-1
    /// (ignored when the data declares impulse times).
    std::size_t seeds_per_face = 10;
    /// Merge radius of the cloud (used by query_graph clustering).
    double tol = 1e-2;
    Exec exec;
};

/// Sweeps the characteristic system t' = 1, x' = f(t, x, y), y' = g(t, x, y)
/// forward to T from every seed, recording each RK4 step while x stays within
/// tol of K. Seeds whose characteristic blows up are dropped at that point.
/// Points are ordered by seed, then by time, so the result does not depend
/// on the worker count.
GraphCloud graph_sample(const CharProblem& prob, double T, double h, const GraphSampleOptions& options);

/// y-values of cloud points with |tau - t| <= radius and |xi - x| <= radius,
/// grouped by single linkage with merge radius cloud.tol. Returns one centroid
/// per cluster, sorted lexicographically.
std::vector<State> query_graph(const GraphCloud& cloud, double t, std::span<const double> x, double radius);

struct FrankowskaReport {
    double max_forward = 0.0;
    double max_backward = 0.0;
    std::size_t checked = 0;
    std::size_t exempt_backward = 0;  ///< samples on the data set
};

/// Contingent-direction residuals of the cloud (as a point set in (t, x, y),
/// no merging) at the sampled indices: forward direction (1, f, g) and,
/// except at seeds, backward direction (-1, -f, -g). The ladder runs from
/// h_max down by halves to h_min.
FrankowskaReport frankowska_residual(const GraphCloud& cloud, const CharProblem& prob,
                                     const std::vector<std::size_t>& samples, double h_min, double h_max);

/// Up to `count` evenly spaced indices of points with t in [margin, T - margin].
std::vector<std::size_t> interior_graph_samples(const GraphCloud& cloud, std::size_t count, double T,
                                                double margin);

struct CharSample {
    double t = 0.0;
    State x;
    State y;
};

struct PhiInvarianceReport {
    double max_cone_residual = 0.0;
    std::size_t u0_violations = 0;
    std::size_t boundary_violations = 0;
    std::size_t cone_violations = 0;
    bool passed = true;
};

/// Checks the output constraint Phi on samples:
///   g(t, x, y) is a contingent direction of Phi along (1, phi(x)) for
///   samples with y in Phi(t, x) (min over a ladder of
///   d(y + h g, Phi(t + h, x + h phi)) / h <= tol),
///   u0(x) in Phi(0, x) for samples with x in K,
///   v_gamma(t, x) in Phi(t, x) for samples with x on the boundary.
PhiInvarianceReport phi_invariance_check(const CharProblem& prob, const std::vector<CharSample>& samples,
                                         double h, double tol = 1e-6);

struct ReplayReport {
    std::size_t checked = 0;
    double max_error = 0.0;
};

/// Integrates the characteristic system backward from every `stride`-th
/// cloud point to its seed time and compares the result with the seed.
ReplayReport replay_check(const GraphCloud& cloud, const CharProblem& prob, double h, std::size_t stride);

/// Rows `t,x1,...,xn,y1,...,yp`.
void write_graph_csv(std::ostream& os, const GraphCloud& cloud);

}  // namespace viab
