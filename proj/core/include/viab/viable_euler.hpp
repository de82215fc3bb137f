#pragma once

#include "viab/dynamics.hpp"
#include "viab/sets.hpp"

namespace viab {

/// Projected Euler step: project(K, x + h f(t, x)).
State viable_step(const VectorField& field, const SetOracle& k, double t, std::span<const double> x,
                  double h);

struct ViableTrajectory {
    /// Nodes of the scheme; the trajectory is their piecewise-linear interpolant.
    Trajectory traj;
    /// max_j ||f(t_j, x_j) - u_j|| with u_j = (x_{j+1} - x_j) / h_j, the
    /// velocity actually used on step j.
    double max_substitution_error = 0.0;
};

/// Nodes stay in K up to projection exactness; the last step is shortened to
/// end at T. Throws std::invalid_argument when x0 is farther than 1e-9 from K.
ViableTrajectory viable_trajectory(const VectorField& field, const SetOracle& k,
                                   std::span<const double> x0, double T, double h);

/// Piecewise-linear interpolation of a trajectory at time t (clamped to its span).
State interpolate(const Trajectory& traj, double t);

}  // namespace viab
